"""Command-line front end.

Subcommands: ``check`` (any state formula), ``car``/``cpr``/``ccr``
(qualitative responsibility verdicts), ``degree`` (quantitative degrees),
``entropy`` (asymptotic entropy of monitored behaviour), and ``sweep``
(degree rows over a range of time bounds, written as CSV with a rendered
figure alongside).  Exit status: 0 on success, 1 when a checked property is
false, 2 on usage or model errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .automata import (
    BoundedRecurrence,
    ExplicitDfa,
    Invariance,
    asymptotic_entropy,
    build_product,
    load_dfa,
    spectral_radius,
    trim,
)
from .errors import RespcheckError, SemanticError
from .measures import DegreeReport, degree_car, degree_ccr, degree_cpr
from .modelfile import load_model
from .model import GameStructure
from .parser import parse_history_formula, parse_plan, parse_state_formula
from .responsibility import ccr_witness, check_car, check_cpr
from .semantics import eval_state

__all__ = ["main", "QueryConfig"]

DEFAULT_MAX_HISTORIES = 10**7

_DEGREE_FNS = {"car": degree_car, "cpr": degree_cpr, "ccr": degree_ccr}

CSV_COLUMNS = [
    "t",
    "count_degree",
    "prob_degree",
    "entropy_degree",
    "entropy_denominator",
    "prob_denominator",
    "entropy_numerator",
    "prob_numerator",
    "count_degree_exact",
    "prob_degree_exact",
    "prob_denominator_exact",
    "prob_numerator_exact",
]


@dataclass(frozen=True)
class QueryConfig:
    """A validated query: model, location, texts, and output options."""

    model_path: str
    command: str
    state: str
    formula: str | None = None
    plan: str | None = None
    agent: str | None = None
    kind: str | None = None
    measure: str = "all"
    t_range: tuple[int, ...] = ()
    window: int | None = None
    dfa: str | None = None
    csv_path: str | None = None
    plot_path: str | None = None
    no_plot: bool = False
    output_format: str = "text"
    max_histories: int = DEFAULT_MAX_HISTORIES

    def __post_init__(self) -> None:
        if self.t_range and list(self.t_range) != sorted(set(self.t_range)):
            raise SemanticError("the t-range must be increasing")
        if self.command == "sweep" and not self.t_range:
            raise SemanticError("sweep needs a non-empty t-range")


def _resolve_model_path(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    builtin = resources.files("respcheck") / "models" / f"{name}.mas"
    if builtin.is_file():
        return Path(str(builtin))
    raise SemanticError(f"model {name!r} not found (no such file or bundled model)")


def _substitute_t(text: str | None, t: int | None) -> str | None:
    if text is None:
        return None
    if "@t" in text:
        if t is None:
            raise SemanticError("the text uses @t but no --t value was given")
        return text.replace("@t", str(t))
    return text


def fraction_decimal(value: Fraction, digits: int = 12) -> str:
    """Decimal rendering with the given number of significant digits."""
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(value.numerator) / Decimal(value.denominator))


def fraction_exact(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _float12(value: float) -> str:
    return f"{value:.12g}"


def _check_state(G: GameStructure, state: str) -> None:
    if state not in G.states:
        raise SemanticError(f"unknown state {state!r}")


def _parse_t_range(text: str) -> tuple[int, ...]:
    m = re.fullmatch(r"(\d+)\.\.(\d+)", text.strip())
    if m:
        a, b = int(m.group(1)), int(m.group(2))
        if a > b:
            raise SemanticError(f"empty t-range {text!r}")
        return tuple(range(a, b + 1))
    if re.fullmatch(r"\d+", text.strip()):
        val = int(text)
        return (val,)
    raise SemanticError(f"bad t-range {text!r}, expected `a..b`")


def _guard_horizon(G: GameStructure, t: int, cap: int) -> None:
    per_step = len(G.actions) ** len(G.agents)
    if per_step**t > cap:
        raise SemanticError(
            f"t={t} spans up to {per_step**t} histories, over the cap of {cap}; "
            "raise --max-histories to run it anyway"
        )


def _degree_row(report: DegreeReport, t: int | None) -> dict:
    return {
        "t": t if t is not None else report.length,
        "count_degree": report.count_degree,
        "prob_degree": report.prob_degree,
        "entropy_degree": report.entropy_degree,
        "entropy_denominator": report.denominator_entropy,
        "prob_denominator": report.denominator_probability,
        "entropy_numerator": report.numerator_entropy,
        "prob_numerator": report.numerator_probability,
    }


def _row_to_csv(row: dict) -> dict[str, str]:
    return {
        "t": str(row["t"]),
        "count_degree": fraction_decimal(row["count_degree"]),
        "prob_degree": fraction_decimal(row["prob_degree"]),
        "entropy_degree": _float12(row["entropy_degree"]),
        "entropy_denominator": _float12(row["entropy_denominator"]),
        "prob_denominator": fraction_decimal(row["prob_denominator"]),
        "entropy_numerator": _float12(row["entropy_numerator"]),
        "prob_numerator": fraction_decimal(row["prob_numerator"]),
        "count_degree_exact": fraction_exact(row["count_degree"]),
        "prob_degree_exact": fraction_exact(row["prob_degree"]),
        "prob_denominator_exact": fraction_exact(row["prob_denominator"]),
        "prob_numerator_exact": fraction_exact(row["prob_numerator"]),
    }


def report_json_dict(report: DegreeReport, t: int | None = None) -> dict:
    """Loss-free JSON mapping: rationals as exact `p/q` strings."""
    out = {
        "kind": report.kind,
        "agent": report.agent,
        "state": report.state,
        "t": t if t is not None else report.length,
        "length": report.length,
        "kappa": report.kappa,
        "count_degree": fraction_exact(report.count_degree),
        "prob_degree": fraction_exact(report.prob_degree),
        "entropy_degree": report.entropy_degree,
        "numerator_cardinality": report.numerator_cardinality,
        "numerator_probability": fraction_exact(report.numerator_probability),
        "numerator_entropy": report.numerator_entropy,
        "denominator_cardinality": report.denominator_cardinality,
        "denominator_probability": fraction_exact(report.denominator_probability),
        "denominator_entropy": report.denominator_entropy,
    }
    if report.note:
        out["note"] = report.note
    if report.shares:
        out["shares"] = [
            {
                "coalition": sorted(s.coalition),
                "positive_cardinality": s.positive_cardinality,
                "positive_probability": fraction_exact(s.positive_probability),
                "positive_entropy": s.positive_entropy,
                "deviation_cardinality": s.deviation_cardinality,
                "kappa": s.kappa,
                "contributes": s.contributes,
            }
            for s in report.shares
        ]
    return out


def parse_report_line(line: str) -> dict:
    """Re-parse a json-lines report, restoring exact rationals."""
    data = json.loads(line)
    for key, value in list(data.items()):
        if isinstance(value, str) and re.fullmatch(r"-?\d+/\d+", value):
            data[key] = Fraction(value)
    return data


def _measure_keys(selection: str) -> list[str]:
    if selection == "all":
        return ["count_degree", "prob_degree", "entropy_degree"]
    return {
        "count": ["count_degree"],
        "prob": ["prob_degree"],
        "entropy": ["entropy_degree"],
    }[selection]


def _print_degree_text(report: DegreeReport, cfg: QueryConfig, t: int | None) -> None:
    lines = [
        f"kind: {report.kind}",
        f"state: {report.state}",
        f"agent: {report.agent}",
        f"length: {report.length}",
        f"kappa: {report.kappa}",
    ]
    selected = _measure_keys(cfg.measure)
    if "count_degree" in selected:
        lines.append(
            f"count_degree: {fraction_decimal(report.count_degree)}"
            f" ({fraction_exact(report.count_degree)})"
        )
    if "prob_degree" in selected:
        lines.append(
            f"prob_degree: {fraction_decimal(report.prob_degree)}"
            f" ({fraction_exact(report.prob_degree)})"
        )
    if "entropy_degree" in selected:
        lines.append(f"entropy_degree: {_float12(report.entropy_degree)}")
    lines += [
        f"numerator: cardinality={report.numerator_cardinality}"
        f" probability={fraction_exact(report.numerator_probability)}"
        f" entropy={_float12(report.numerator_entropy)}",
        f"denominator: cardinality={report.denominator_cardinality}"
        f" probability={fraction_exact(report.denominator_probability)}"
        f" entropy={_float12(report.denominator_entropy)}",
    ]
    if report.note:
        lines.append(f"note: {report.note}")
    for share in report.shares:
        lines.append(
            "coalition {%s}: positive=%d deviation=%d kappa=%d contributes=%s"
            % (
                ",".join(sorted(share.coalition)),
                share.positive_cardinality,
                share.deviation_cardinality,
                share.kappa,
                "yes" if share.contributes else "no",
            )
        )
    print("\n".join(lines))


def _emit_rows(rows: list[dict], cfg: QueryConfig) -> None:
    if cfg.output_format == "jsonl":
        for row in rows:
            payload = dict(row)
            for key in (
                "count_degree",
                "prob_degree",
                "prob_denominator",
                "prob_numerator",
            ):
                payload[key] = fraction_exact(payload[key])
            print(json.dumps(payload, sort_keys=True))
        return
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(_row_to_csv(row))
    text = buffer.getvalue()
    if cfg.csv_path:
        Path(cfg.csv_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# --- subcommand handlers ---------------------------------------------------


def _single_t(cfg: QueryConfig) -> int | None:
    if not cfg.t_range:
        return None
    if len(cfg.t_range) > 1:
        raise SemanticError(f"{cfg.command} takes a single --t value; use sweep for ranges")
    return cfg.t_range[0]


def _cmd_check(cfg: QueryConfig) -> int:
    G = load_model(_resolve_model_path(cfg.model_path))
    _check_state(G, cfg.state)
    if cfg.formula is None:
        raise SemanticError("a --formula is required")
    t = _single_t(cfg)
    phi = parse_state_formula(_substitute_t(cfg.formula, t), G)
    verdict = eval_state(G, cfg.state, phi)
    _emit_verdict(verdict, cfg)
    return 0 if verdict else 1


def _responsibility_inputs(cfg: QueryConfig):
    G = load_model(_resolve_model_path(cfg.model_path))
    _check_state(G, cfg.state)
    if cfg.formula is None:
        raise SemanticError("a --formula is required")
    if cfg.plan is None:
        raise SemanticError("a --plan is required")
    if cfg.agent is None:
        raise SemanticError("an --agent is required")
    t = _single_t(cfg)
    plan = parse_plan(_substitute_t(cfg.plan, t), G)
    psi = parse_history_formula(_substitute_t(cfg.formula, t), G)
    G.agent_index(cfg.agent)
    return G, plan, psi, t


def _emit_verdict(verdict: bool, cfg: QueryConfig, extra: dict | None = None) -> None:
    if cfg.output_format == "jsonl":
        payload = {"verdict": verdict}
        if extra:
            payload.update(extra)
        print(json.dumps(payload, sort_keys=True))
    else:
        print(f"verdict: {'true' if verdict else 'false'}")
        if extra:
            for key, value in extra.items():
                print(f"{key}: {value}")


def _cmd_car(cfg: QueryConfig) -> int:
    G, plan, psi, _ = _responsibility_inputs(cfg)
    verdict = check_car(G, cfg.state, cfg.agent, plan, psi)
    _emit_verdict(verdict, cfg)
    return 0 if verdict else 1


def _cmd_cpr(cfg: QueryConfig) -> int:
    G, plan, psi, _ = _responsibility_inputs(cfg)
    verdict = check_cpr(G, cfg.state, cfg.agent, plan, psi)
    _emit_verdict(verdict, cfg)
    return 0 if verdict else 1


def _cmd_ccr(cfg: QueryConfig) -> int:
    G, plan, psi, _ = _responsibility_inputs(cfg)
    witness = ccr_witness(G, cfg.state, cfg.agent, plan, psi)
    extra = {"witness": ",".join(sorted(witness))} if witness else None
    _emit_verdict(witness is not None, cfg, extra)
    return 0 if witness is not None else 1


def _cmd_degree(cfg: QueryConfig) -> int:
    G, plan, psi, t = _responsibility_inputs(cfg)
    if cfg.kind not in _DEGREE_FNS:
        raise SemanticError("--kind must be one of car, cpr, ccr")
    report = _DEGREE_FNS[cfg.kind](G, cfg.state, cfg.agent, plan, psi)
    if cfg.output_format == "jsonl":
        print(json.dumps(report_json_dict(report, t), sort_keys=True))
    elif cfg.output_format == "csv":
        _emit_rows([_degree_row(report, t)], cfg)
    else:
        _print_degree_text(report, cfg, t)
    return 0


def _cmd_entropy(cfg: QueryConfig) -> int:
    G = load_model(_resolve_model_path(cfg.model_path))
    _check_state(G, cfg.state)
    if cfg.dfa:
        spec = ExplicitDfa(load_dfa(cfg.dfa))
    else:
        if cfg.formula is None:
            raise SemanticError("entropy needs --formula (a state predicate) or --dfa")
        predicate = parse_state_formula(cfg.formula, G)
        if cfg.window is not None:
            spec = BoundedRecurrence(cfg.window, predicate)
        else:
            spec = Invariance(predicate)
    graph = build_product(G, spec, cfg.state)
    trimmed = trim(graph)
    value = asymptotic_entropy(trimmed)
    radius = 0.0 if trimmed.is_empty() else spectral_radius(trimmed.matrix())
    if cfg.output_format == "jsonl":
        print(
            json.dumps(
                {
                    "nodes": len(graph.nodes),
                    "trimmed_nodes": len(trimmed.nodes),
                    "spectral_radius": radius,
                    "entropy": value,
                },
                sort_keys=True,
            )
        )
    else:
        print(f"nodes: {len(graph.nodes)}")
        print(f"trimmed_nodes: {len(trimmed.nodes)}")
        print(f"spectral_radius: {_float12(radius)}")
        print(f"entropy: {_float12(value)}")
    return 0


def _cmd_sweep(cfg: QueryConfig) -> int:
    G = load_model(_resolve_model_path(cfg.model_path))
    _check_state(G, cfg.state)
    if cfg.kind not in _DEGREE_FNS:
        raise SemanticError("--kind must be one of car, cpr, ccr")
    if cfg.agent is None:
        raise SemanticError("an --agent is required")
    if cfg.formula is None or cfg.plan is None:
        raise SemanticError("sweep needs both --formula and --plan")
    G.agent_index(cfg.agent)
    rows = []
    for t in cfg.t_range:
        _guard_horizon(G, t, cfg.max_histories)
        plan = parse_plan(_substitute_t(cfg.plan, t), G)
        psi = parse_history_formula(_substitute_t(cfg.formula, t), G)
        report = _DEGREE_FNS[cfg.kind](G, cfg.state, cfg.agent, plan, psi)
        rows.append(_degree_row(report, t))
    _emit_rows(rows, cfg)
    plot_path = cfg.plot_path
    if plot_path is None and cfg.csv_path and not cfg.no_plot:
        plot_path = str(Path(cfg.csv_path).with_suffix(".png"))
    if plot_path:
        from .figures import render_sweep_figure

        title = f"{cfg.kind} degrees at {cfg.state} for {cfg.agent}"
        render_sweep_figure(rows, title, plot_path)
    return 0


# --- argument wiring --------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser, *, needs_plan: bool) -> None:
    sub.add_argument("--model", required=True, help="model file or bundled model name")
    sub.add_argument("--state", required=True, help="initial state of the query")
    sub.add_argument("--formula", help="formula text; @t substitutes the --t value")
    if needs_plan:
        sub.add_argument("--plan", help="plan literal; @t substitutes the --t value")
        sub.add_argument("--agent", help="acting agent under scrutiny")
    sub.add_argument("--t", dest="t_text", help="time bound: a single value or a..b")
    sub.add_argument(
        "--measure",
        choices=["count", "prob", "entropy", "all"],
        default="all",
        help="which degree measures to print (text format)",
    )
    sub.add_argument(
        "--format",
        dest="output_format",
        choices=["text", "csv", "jsonl"],
        default="text",
        help="output format",
    )
    sub.add_argument("--csv", dest="csv_path", help="write CSV rows to this path")
    sub.add_argument(
        "--max-histories",
        type=int,
        default=DEFAULT_MAX_HISTORIES,
        help="refuse horizons spanning more histories than this",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="respcheck",
        description="Model checker for causal responsibility in multi-agent"
        " stochastic systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="evaluate a state formula")
    _add_common(p_check, needs_plan=False)

    for name, helptext in [
        ("car", "check active responsibility"),
        ("cpr", "check passive responsibility"),
        ("ccr", "check contributive responsibility"),
    ]:
        p = sub.add_parser(name, help=helptext)
        _add_common(p, needs_plan=True)

    p_degree = sub.add_parser("degree", help="compute responsibility degrees")
    p_degree.add_argument("--kind", required=True, choices=["car", "cpr", "ccr"])
    _add_common(p_degree, needs_plan=True)

    p_entropy = sub.add_parser("entropy", help="asymptotic entropy of behaviour")
    _add_common(p_entropy, needs_plan=False)
    p_entropy.add_argument("--window", type=int, help="bounded-recurrence window")
    p_entropy.add_argument("--dfa", help="explicit monitor multigraph file")

    p_sweep = sub.add_parser("sweep", help="degree rows over a t-range")
    p_sweep.add_argument("--kind", required=True, choices=["car", "cpr", "ccr"])
    _add_common(p_sweep, needs_plan=True)
    p_sweep.add_argument("--plot", dest="plot_path", help="figure output path")
    p_sweep.add_argument(
        "--no-plot",
        action="store_true",
        help="skip the figure even when --csv is given",
    )
    return parser


def _config_from_args(args: argparse.Namespace) -> QueryConfig:
    t_range: tuple[int, ...] = ()
    if getattr(args, "t_text", None):
        t_range = _parse_t_range(args.t_text)
    return QueryConfig(
        model_path=args.model,
        command=args.command,
        state=args.state,
        formula=getattr(args, "formula", None),
        plan=getattr(args, "plan", None),
        agent=getattr(args, "agent", None),
        kind=getattr(args, "kind", None),
        measure=args.measure,
        t_range=t_range,
        window=getattr(args, "window", None),
        dfa=getattr(args, "dfa", None),
        csv_path=args.csv_path,
        plot_path=getattr(args, "plot_path", None),
        no_plot=getattr(args, "no_plot", False),
        output_format=args.output_format,
        max_histories=args.max_histories,
    )


_HANDLERS = {
    "check": _cmd_check,
    "car": _cmd_car,
    "cpr": _cmd_cpr,
    "ccr": _cmd_ccr,
    "degree": _cmd_degree,
    "entropy": _cmd_entropy,
    "sweep": _cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return _HANDLERS[cfg.command](cfg)
    except (RespcheckError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
