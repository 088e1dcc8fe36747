from importlib import resources

import pytest

from respcheck.modelfile import load_model

ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def model_path(name: str) -> str:
    return str(resources.files("respcheck") / "models" / f"{name}.mas")


@pytest.fixture(scope="session")
def cpd_uniform():
    return load_model(model_path("cpd-uniform"))


@pytest.fixture(scope="session")
def cpd_biased():
    return load_model(model_path("cpd-biased"))


@pytest.fixture(scope="session")
def cpd_uniform_path():
    return model_path("cpd-uniform")


@pytest.fixture(scope="session")
def cpd_biased_path():
    return model_path("cpd-biased")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{outcome:<4} {name}")
