"""Counting, probability, and finite-horizon entropy measures, plus the
responsibility degree computations built on them.

Degrees are ratios of language measures.  The numerator and denominator
languages are never materialised here: an exact dynamic program advances the
formula monitor over a step-indexed frontier of (state, monitor) pairs,
accumulating cardinalities as integers and probabilities as rationals, so
sweeps stay cheap at horizons where explicit enumeration would blow up.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    EvaluationError,
    OutcomeUnavoidableError,
    OutcomeUnsatisfiableError,
)
from .formulas import HistoryFormula, NotHist, horizon
from .model import (
    GameStructure,
    History,
    JointAction,
    PlanPattern,
    history_probability,
    step_constraints,
)
from .semantics import EvalContext, H_TRUE, _Resolved, advance, init_monitor

__all__ = [
    "MeasuredLanguage",
    "DegreeReport",
    "CoalitionShare",
    "measure",
    "language_stats",
    "degree_car",
    "degree_cpr",
    "degree_ccr",
    "entropy_fh",
]


def entropy_fh(cardinality: int, length: int) -> float:
    """Finite-horizon entropy ``log2(1 + cardinality) / length`` (0 when length is 0)."""
    if length == 0:
        return 0.0
    return math.log2(1 + cardinality) / length


@dataclass(frozen=True)
class MeasuredLanguage:
    """A length-uniform set of histories with its three measures."""

    words: frozenset[History]
    length: int
    cardinality: int
    probability: Fraction
    entropy: float

    def __post_init__(self) -> None:
        if self.cardinality != len(self.words):
            raise EvaluationError("cardinality must equal the number of words")
        if not 0 <= self.probability <= 1:
            raise EvaluationError("language probability must lie in [0, 1]")


def measure(
    words: Iterable[History], G: GameStructure, length: int | None = None
) -> MeasuredLanguage:
    """Measure a finite, length-uniform set of histories."""
    wordset = frozenset(words)
    lengths = {len(w) for w in wordset}
    if len(lengths) > 1:
        raise EvaluationError(f"mixed history lengths {sorted(lengths)}")
    if lengths:
        n = lengths.pop()
        if length is not None and length != n:
            raise EvaluationError(f"expected length {length}, found {n}")
    else:
        n = length or 0
    prob = sum((history_probability(G, w) for w in wordset), Fraction(0))
    return MeasuredLanguage(
        words=wordset,
        length=n,
        cardinality=len(wordset),
        probability=prob,
        entropy=entropy_fh(len(wordset), n),
    )


def _allowed_actions(
    G: GameStructure, constraint: Mapping[str, str]
) -> tuple[JointAction, ...]:
    idx = [(G.agent_index(a), x) for a, x in constraint.items()]
    return tuple(
        ja for ja in G.joint_actions() if all(ja.actions[i] == x for i, x in idx)
    )


def language_stats(
    G: GameStructure,
    state: str,
    n: int,
    constraints: Sequence[Mapping[str, str]] | None,
    psi: HistoryFormula | None,
    ctx: EvalContext | None = None,
) -> tuple[int, Fraction]:
    """Cardinality and probability of the constrained satisfying language.

    The language is the set of length-``n`` histories from ``state`` whose
    actions match the per-step ``constraints`` (None means unconstrained) and
    which satisfy ``psi`` (None means all).  Exact integer/rational results.
    """
    ctx = ctx or EvalContext(G)
    if constraints is None:
        constraints = [{} for _ in range(n)]
    if len(constraints) != n:
        raise EvaluationError("need one constraint map per step")
    start_monitor = init_monitor(psi) if psi is not None else H_TRUE
    frontier: dict[tuple[str, HistoryFormula], tuple[int, Fraction]] = {
        (state, start_monitor): (1, Fraction(1))
    }
    for step in range(n):
        allowed = _allowed_actions(G, constraints[step])
        nxt: dict[tuple[str, HistoryFormula], tuple[int, Fraction]] = {}
        for (s, m), (count, prob) in frontier.items():
            if isinstance(m, _Resolved) and not m.value:
                continue  # failed monitors cannot recover
            for action in allowed:
                dist = G.transitions.get((s, action))
                if not dist:
                    continue
                pa = G.joint_profile_probability(action)
                for succ, mu in dist.items():
                    m2 = advance(ctx, m, succ)
                    key = (succ, m2)
                    c0, p0 = nxt.get(key, (0, Fraction(0)))
                    nxt[key] = (c0 + count, p0 + prob * pa * mu)
        frontier = nxt
    total_count = 0
    total_prob = Fraction(0)
    for (s, m), (count, prob) in frontier.items():
        if not isinstance(m, _Resolved):
            raise EvaluationError("formula undecided at the horizon")
        if m.value:
            total_count += count
            total_prob += prob
    return total_count, total_prob


@dataclass(frozen=True)
class CoalitionShare:
    """Per-coalition contribution inside a contributive-responsibility degree."""

    coalition: frozenset[str]
    positive_cardinality: int
    positive_probability: Fraction
    positive_entropy: float
    deviation_cardinality: int
    kappa: int
    contributes: bool


@dataclass(frozen=True)
class DegreeReport:
    """Quantified responsibility: one degree per measure, plus the languages'
    raw measures for reporting."""

    kind: str
    agent: str
    state: str
    length: int
    kappa: int
    count_degree: Fraction
    prob_degree: Fraction
    entropy_degree: float
    numerator_cardinality: int
    numerator_probability: Fraction
    numerator_entropy: float
    denominator_cardinality: int
    denominator_probability: Fraction
    denominator_entropy: float
    shares: tuple[CoalitionShare, ...] = ()
    note: str | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.count_degree <= 1 or not 0 <= self.prob_degree <= 1:
            raise EvaluationError("degrees must lie in [0, 1]")
        if not 0 <= self.entropy_degree <= 1 + 1e-12:
            raise EvaluationError("entropy degree must lie in [0, 1]")


def _query_length(pattern: PlanPattern, psi: HistoryFormula) -> int:
    return max(horizon(psi), len(pattern.steps))


def _require_agent_in_plan(agent: str, pattern: PlanPattern) -> None:
    if agent not in pattern.coalition:
        raise EvaluationError(f"plan does not constrain agent {agent!r}")


def _zero_report(kind, agent, state, n, den_c, den_p, note=None) -> DegreeReport:
    return DegreeReport(
        kind=kind,
        agent=agent,
        state=state,
        length=n,
        kappa=0,
        count_degree=Fraction(0),
        prob_degree=Fraction(0),
        entropy_degree=0.0,
        numerator_cardinality=0,
        numerator_probability=Fraction(0),
        numerator_entropy=0.0,
        denominator_cardinality=den_c,
        denominator_probability=den_p,
        denominator_entropy=0.0,
        note=note,
    )


def degree_car(
    G: GameStructure, state: str, agent: str, pattern: PlanPattern, psi: HistoryFormula
) -> DegreeReport:
    """Active-responsibility degrees of ``agent`` for ``psi`` under ``pattern``.

    Numerator: histories of plans agreeing with the pattern on the agent's
    own actions that satisfy the outcome.  Denominator: all histories
    satisfying the outcome.  Gated to zero when no history violates the
    outcome (the outcome is unavoidable).
    """
    G.agent_index(agent)
    _require_agent_in_plan(agent, pattern)
    ctx = EvalContext(G)
    n = _query_length(pattern, psi)
    own = step_constraints(G, pattern, {agent}, n)
    c_plus, p_plus = language_stats(G, state, n, own, psi, ctx)
    c_phi, p_phi = language_stats(G, state, n, None, psi, ctx)
    c_avoid, _ = language_stats(G, state, n, None, NotHist(psi), ctx)
    kappa = 1 if c_avoid > 0 else 0
    if kappa == 0:
        return _zero_report("car", agent, state, n, c_phi, p_phi)
    if c_phi == 0:
        raise OutcomeUnsatisfiableError(
            "no history satisfies the outcome; the degree is undefined"
        )
    return DegreeReport(
        kind="car",
        agent=agent,
        state=state,
        length=n,
        kappa=1,
        count_degree=Fraction(c_plus, c_phi),
        prob_degree=p_plus / p_phi,
        entropy_degree=math.log2(1 + c_plus) / math.log2(1 + c_phi),
        numerator_cardinality=c_plus,
        numerator_probability=p_plus,
        numerator_entropy=entropy_fh(c_plus, n),
        denominator_cardinality=c_phi,
        denominator_probability=p_phi,
        denominator_entropy=entropy_fh(c_phi, n),
    )


def degree_cpr(
    G: GameStructure, state: str, agent: str, pattern: PlanPattern, psi: HistoryFormula
) -> DegreeReport:
    """Passive-responsibility degrees: how much of the outcome-avoiding
    behaviour is reachable by the agent deviating alone.

    Numerator: histories where the other agents keep the pattern's actions
    and the outcome is violated.  Denominator: all histories violating the
    outcome.  Gated to zero when the pattern cannot achieve the outcome.
    """
    G.agent_index(agent)
    _require_agent_in_plan(agent, pattern)
    ctx = EvalContext(G)
    n = _query_length(pattern, psi)
    not_psi = NotHist(psi)
    everyone = step_constraints(G, pattern, G.agents, n)
    others = step_constraints(G, pattern, set(G.agents) - {agent}, n)
    c_keep, _ = language_stats(G, state, n, everyone, psi, ctx)
    kappa = 1 if c_keep > 0 else 0
    c_minus, p_minus = language_stats(G, state, n, others, not_psi, ctx)
    c_nphi, p_nphi = language_stats(G, state, n, None, not_psi, ctx)
    if kappa == 0:
        return _zero_report("cpr", agent, state, n, c_nphi, p_nphi)
    if c_nphi == 0:
        raise OutcomeUnavoidableError(
            "no history violates the outcome; the degree is undefined"
        )
    return DegreeReport(
        kind="cpr",
        agent=agent,
        state=state,
        length=n,
        kappa=1,
        count_degree=Fraction(c_minus, c_nphi),
        prob_degree=p_minus / p_nphi,
        entropy_degree=math.log2(1 + c_minus) / math.log2(1 + c_nphi),
        numerator_cardinality=c_minus,
        numerator_probability=p_minus,
        numerator_entropy=entropy_fh(c_minus, n),
        denominator_cardinality=c_nphi,
        denominator_probability=p_nphi,
        denominator_entropy=entropy_fh(c_nphi, n),
    )


def _subsets_containing(agents: Sequence[str], member: str):
    """Subsets of ``agents`` containing ``member``, by size then lexicographic."""
    rest = [a for a in agents if a != member]
    out: list[frozenset[str]] = []
    for size in range(len(rest) + 1):
        combos = _combinations_sorted(rest, size)
        out.extend(frozenset([member, *combo]) for combo in combos)
    return out


def _combinations_sorted(items: Sequence[str], size: int):
    from itertools import combinations

    return combinations(sorted(items), size)


def degree_ccr(
    G: GameStructure, state: str, agent: str, pattern: PlanPattern, psi: HistoryFormula
) -> DegreeReport:
    """Contributive-responsibility degrees, averaged over the coalitions
    through which the agent can contribute.

    Every coalition containing the agent contributes its satisfying
    plan-compatible language when the coalition-without-the-agent admits a
    violating history; the summed ratios are divided by the number of
    coalitions with a non-empty satisfying language and an open deviation.
    """
    G.agent_index(agent)
    _require_agent_in_plan(agent, pattern)
    ctx = EvalContext(G)
    n = _query_length(pattern, psi)
    not_psi = NotHist(psi)
    c_phi, p_phi = language_stats(G, state, n, None, psi, ctx)
    shares: list[CoalitionShare] = []
    for coalition in _subsets_containing(G.agents, agent):
        own = step_constraints(G, pattern, coalition, n)
        without = step_constraints(G, pattern, coalition - {agent}, n)
        c_plus, p_plus = language_stats(G, state, n, own, psi, ctx)
        c_dev, _ = language_stats(G, state, n, without, not_psi, ctx)
        kappa_j = 1 if c_dev > 0 else 0
        shares.append(
            CoalitionShare(
                coalition=coalition,
                positive_cardinality=c_plus,
                positive_probability=p_plus,
                positive_entropy=entropy_fh(c_plus, n),
                deviation_cardinality=c_dev,
                kappa=kappa_j,
                contributes=bool(kappa_j and c_plus > 0),
            )
        )
    contributing = [s for s in shares if s.contributes]
    if not contributing:
        report = _zero_report(
            "ccr", agent, state, n, c_phi, p_phi, note="no contributing coalition"
        )
        return dataclasses.replace(
            report, shares=tuple(shares), denominator_entropy=entropy_fh(c_phi, n)
        )
    num_j = len(contributing)
    count_sum = sum(Fraction(s.positive_cardinality, c_phi) for s in shares if s.kappa)
    prob_sum = sum((s.positive_probability / p_phi for s in shares if s.kappa), Fraction(0))
    log_phi = math.log2(1 + c_phi)
    ent_sum = sum(
        math.log2(1 + s.positive_cardinality) / log_phi for s in shares if s.kappa
    )
    union_c, union_p = _union_stats(
        G, state, n, pattern, psi, [s.coalition for s in contributing], ctx
    )
    return DegreeReport(
        kind="ccr",
        agent=agent,
        state=state,
        length=n,
        kappa=1,
        count_degree=count_sum / num_j,
        prob_degree=prob_sum / num_j,
        entropy_degree=ent_sum / num_j,
        numerator_cardinality=union_c,
        numerator_probability=union_p,
        numerator_entropy=entropy_fh(union_c, n),
        denominator_cardinality=c_phi,
        denominator_probability=p_phi,
        denominator_entropy=entropy_fh(c_phi, n),
        shares=tuple(shares),
    )


def _union_stats(
    G: GameStructure,
    state: str,
    n: int,
    pattern: PlanPattern,
    psi: HistoryFormula,
    coalitions: list[frozenset[str]],
    ctx: EvalContext,
) -> tuple[int, Fraction]:
    """Measures of the union of per-coalition satisfying languages.

    Plan-compatibility classes over coalitions from the same pattern
    intersect as the class over the union coalition, so inclusion-exclusion
    over coalition unions is exact.
    """
    from itertools import combinations

    count = 0
    prob = Fraction(0)
    for size in range(1, len(coalitions) + 1):
        sign = 1 if size % 2 == 1 else -1
        for combo in combinations(coalitions, size):
            merged = frozenset().union(*combo)
            maps = step_constraints(G, pattern, merged, n)
            c, p = language_stats(G, state, n, maps, psi, ctx)
            count += sign * c
            prob += sign * p
    return count, prob
