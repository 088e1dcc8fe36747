from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from respcheck import (
    EvaluationError,
    GameStructure,
    History,
    JointAction,
    MissingTransitionError,
    PlanPattern,
    SemanticError,
    compatible,
    enumerate_histories,
    history_probability,
    plan_class,
    successors,
    trace_of,
)
from respcheck.modelfile import parse_model

A = JointAction


def ja(text: str) -> JointAction:
    return JointAction(tuple(text))


def test_successors_deterministic_edges(cpd_uniform):
    assert successors(cpd_uniform, "s0", ja("cc")) == {"s1": Fraction(1)}
    assert successors(cpd_uniform, "s0", ja("dd")) == {"s0": Fraction(1)}
    assert successors(cpd_uniform, "s2", ja("dc")) == {"s3": Fraction(1)}


def test_successors_missing_entry_names_pair():
    G = parse_model(
        """
        agents A
        actions x y
        props p
        state s {p}
        trans s (x) -> s : 1
        """
    )
    with pytest.raises(MissingTransitionError) as err:
        successors(G, "s", ja("y"))
    assert "s" in str(err.value) and "(y)" in str(err.value)


@pytest.mark.parametrize("n,count", [(0, 1), (1, 4), (2, 16), (3, 64)])
def test_enumerate_history_counts(cpd_uniform, n, count):
    histories = enumerate_histories(cpd_uniform, "s0", n)
    assert len(histories) == count
    assert len(set(histories)) == count
    assert all(len(h) == n for h in histories)


def test_enumerate_order_is_deterministic(cpd_uniform):
    first = enumerate_histories(cpd_uniform, "s0", 2)
    second = enumerate_histories(cpd_uniform, "s0", 2)
    assert first == second
    # lexicographic by agent-ordered actions: (c,c) first, (d,d) last
    assert first[0].steps[0][0] == ja("cc")
    assert first[-1].steps[0][0] == ja("dd")


def test_history_probability_biased_profile(cpd_biased):
    rho = History("s0", ((ja("dd"), "s0"),))
    assert history_probability(cpd_biased, rho) == Fraction(1, 16)


def test_history_probability_empty_history(cpd_uniform):
    assert history_probability(cpd_uniform, History("s0")) == Fraction(1)


def test_one_step_probabilities_sum_to_one(cpd_uniform):
    probs = [history_probability(cpd_uniform, h) for h in enumerate_histories(cpd_uniform, "s0", 1)]
    assert all(p == Fraction(1, 4) for p in probs)
    assert sum(probs) == Fraction(1)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_probability_normalisation(cpd_biased, n):
    total = sum(
        history_probability(cpd_biased, h)
        for h in enumerate_histories(cpd_biased, "s0", n)
    )
    assert total == Fraction(1)


def test_trace_of_erases_states(cpd_uniform):
    rho = History("s0", ((ja("cd"), "s2"), (ja("dc"), "s3")))
    tr = trace_of(rho)
    assert tr.actions == (ja("cd"), ja("dc"))
    assert len(tr) == len(rho)
    assert trace_of(History("s0")).actions == ()


def test_plan_class_single_agent_constraint(cpd_uniform):
    pattern = PlanPattern.from_steps(["A1", "A2"], [{"A1": "d", "A2": "d"}])
    plans = plan_class(cpd_uniform, "s0", pattern, {"A1"}, 1)
    assert sorted(str(p[0]) for p in plans) == ["(d,c)", "(d,d)"]


def test_plan_class_universal(cpd_uniform):
    plans = plan_class(
        cpd_uniform, "s0", PlanPattern.universal(cpd_uniform), cpd_uniform.agents, 1
    )
    assert len(plans) == 4


def test_plan_class_wildcard_prefix(cpd_uniform):
    pattern = PlanPattern.from_steps(["A1"], [{"A1": "d"}], wildcard_prefix=True)
    plans = plan_class(cpd_uniform, "s0", pattern, {"A1"}, 2)
    assert len(plans) == 8
    assert all(p[1].actions[0] == "d" for p in plans)


def test_plan_class_rejects_short_horizon(cpd_uniform):
    pattern = PlanPattern.from_steps(["A1"], [{"A1": "d"}, {"A1": "c"}])
    with pytest.raises(EvaluationError):
        plan_class(cpd_uniform, "s0", pattern, {"A1"}, 1)


def test_plan_class_full_plan_is_singleton(cpd_uniform):
    pattern = PlanPattern.from_steps(
        ["A1", "A2"], [{"A1": "c", "A2": "d"}, {"A1": "d", "A2": "d"}]
    )
    plans = plan_class(cpd_uniform, "s0", pattern, cpd_uniform.agents, 2)
    assert plans == [(ja("cd"), ja("dd"))]


def test_plan_class_cardinality_law(cpd_uniform):
    # |class| = |Act|^(free agent-steps) for suffix-free patterns
    pattern = PlanPattern.from_steps(["A1"], [{"A1": "d"}, {}])
    for n in (2, 3):
        plans = plan_class(cpd_uniform, "s0", pattern, {"A1"}, n)
        free = n * 2 - 1
        assert len(plans) == 2**free


def test_compatible_matches_worked_pair(cpd_uniform):
    p1 = (ja("cd"), ja("dc"))
    p2 = (ja("cc"), ja("dd"))
    assert compatible(cpd_uniform, p1, p2, {"A1"})
    assert not compatible(cpd_uniform, p1, p2, {"A2"})


def test_compatible_rejects_length_mismatch(cpd_uniform):
    with pytest.raises(EvaluationError):
        compatible(cpd_uniform, (ja("cc"),), (ja("cc"), ja("cc")), {"A1"})


_plans = st.lists(
    st.tuples(st.sampled_from("cd"), st.sampled_from("cd")).map(
        lambda t: JointAction(t)
    ),
    min_size=1,
    max_size=4,
)
_coalitions = st.sets(st.sampled_from(["A1", "A2"]), max_size=2)


@settings(max_examples=120, deadline=None)
@given(a=_plans, b=_plans, c=_plans, J=_coalitions)
def test_compatibility_is_an_equivalence(cpd_uniform, a, b, c, J):
    n = min(len(a), len(b), len(c))
    a, b, c = tuple(a[:n]), tuple(b[:n]), tuple(c[:n])
    assert compatible(cpd_uniform, a, a, J)
    assert compatible(cpd_uniform, a, b, J) == compatible(cpd_uniform, b, a, J)
    if compatible(cpd_uniform, a, b, J) and compatible(cpd_uniform, b, c, J):
        assert compatible(cpd_uniform, a, c, J)


def test_plan_pattern_rejects_foreign_agents():
    with pytest.raises(EvaluationError):
        PlanPattern.from_steps(["A1"], [{"A2": "c"}])


def test_model_validation_rejects_bad_distribution():
    with pytest.raises(SemanticError):
        parse_model(
            """
            agents A
            actions x
            props p
            state s {p}
            trans s (x) -> s : 1/2
            """
        )


def test_model_validation_rejects_partial_labeling():
    with pytest.raises(SemanticError):
        GameStructure(
            agents=("A",),
            states=("s", "u"),
            actions=("x",),
            transitions={("s", A(("x",))): {"s": Fraction(1)}},
            propositions=frozenset({"p"}),
            labeling={"s": frozenset()},
            profile={"A": {"x": Fraction(1)}},
        )


def test_model_parse_roundtrip_of_profile(cpd_biased):
    assert cpd_biased.profile["A1"]["c"] == Fraction(3, 4)
    assert cpd_biased.profile["A1"]["d"] == Fraction(1, 4)
    assert cpd_biased.joint_profile_probability(ja("dc")) == Fraction(3, 16)


def test_model_format_errors_carry_line_numbers():
    from respcheck import ModelFormatError

    with pytest.raises(ModelFormatError) as err:
        parse_model("agents A\nactions x\nbogus line here\n")
    assert "line 3" in str(err.value)
