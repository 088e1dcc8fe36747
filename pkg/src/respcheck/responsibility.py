"""Qualitative causal-responsibility checks and the history languages the
degree metrics consume.

The three operators share a shape: the plan (or a compatibility class of it)
must guarantee the outcome, while some deviation class admits a plan that
guarantees the opposite.  Guarantee checks reduce to exact language counts;
"some plan forces a uniform verdict" is decided by a belief-set search over
plans, since a single plan may branch into many histories in stochastic
models.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import EvaluationError
from .formulas import HistoryFormula, NotHist, horizon
from .measures import MeasuredLanguage, language_stats, measure
from .model import (
    GameStructure,
    History,
    PlanPattern,
    histories_of_plan,
    plan_class,
    step_constraints,
)
from .semantics import EvalContext, _Resolved, advance, eval_history, init_monitor

__all__ = [
    "ResponsibilityLanguages",
    "check_car",
    "check_cpr",
    "check_ccr",
    "ccr_witness",
    "car_languages",
    "cpr_languages",
    "ccr_languages",
]


@dataclass(frozen=True)
class ResponsibilityLanguages:
    """Positive/negative history languages of one responsibility query.

    ``kappa`` is 1 exactly when the gating language is non-empty: the
    negative language for active responsibility, the positive one for
    passive responsibility, and the per-coalition negative language for
    contributive responsibility (where ``coalition`` is populated).
    """

    positive: MeasuredLanguage
    negative: MeasuredLanguage
    kappa: int
    coalition: frozenset[str] | None = None


def _query_length(pattern: PlanPattern, psi: HistoryFormula) -> int:
    return max(horizon(psi), len(pattern.steps))


def _require_plan_agent(G: GameStructure, agent: str, pattern: PlanPattern) -> None:
    G.agent_index(agent)
    if agent not in pattern.coalition:
        raise EvaluationError(f"plan does not constrain agent {agent!r}")


def _exists_uniform_plan(
    G: GameStructure,
    state: str,
    n: int,
    constraints: Sequence[Mapping[str, str]],
    psi: HistoryFormula,
    want: bool,
    ctx: EvalContext,
) -> bool:
    """Whether some plan in the constraint class makes *every* consistent
    history evaluate ``psi`` to ``want``."""
    from .measures import _allowed_actions

    per_step = [_allowed_actions(G, c) for c in constraints]
    memo: dict[tuple[int, frozenset], bool] = {}

    def search(step: int, belief: frozenset) -> bool:
        if step == n:
            return all(
                isinstance(m, _Resolved) and m.value == want for _, m in belief
            )
        key = (step, belief)
        cached = memo.get(key)
        if cached is not None:
            return cached
        result = False
        for action in per_step[step]:
            nxt = set()
            dead = False
            for s, m in belief:
                dist = G.transitions.get((s, action))
                if not dist:
                    dead = True
                    break
                for succ in dist:
                    nxt.add((succ, advance(ctx, m, succ)))
            if dead:
                continue
            if search(step + 1, frozenset(nxt)):
                result = True
                break
        memo[key] = result
        return result

    return search(0, frozenset({(state, init_monitor(psi))}))


def check_car(
    G: GameStructure, state: str, agent: str, pattern: PlanPattern, psi: HistoryFormula
) -> bool:
    """Active responsibility: the agent's own actions in the plan force the
    outcome, yet some full plan avoids it entirely."""
    _require_plan_agent(G, agent, pattern)
    ctx = EvalContext(G)
    n = _query_length(pattern, psi)
    own = step_constraints(G, pattern, {agent}, n)
    violations, _ = language_stats(G, state, n, own, NotHist(psi), ctx)
    if violations > 0:
        return False
    unconstrained = [dict() for _ in range(n)]
    return _exists_uniform_plan(G, state, n, unconstrained, psi, False, ctx)


def check_cpr(
    G: GameStructure, state: str, agent: str, pattern: PlanPattern, psi: HistoryFormula
) -> bool:
    """Passive responsibility: the plan forces the outcome, yet the agent
    could deviate alone (others fixed) to avoid it."""
    _require_plan_agent(G, agent, pattern)
    ctx = EvalContext(G)
    n = _query_length(pattern, psi)
    everyone = step_constraints(G, pattern, G.agents, n)
    violations, _ = language_stats(G, state, n, everyone, NotHist(psi), ctx)
    if violations > 0:
        return False
    others = step_constraints(G, pattern, set(G.agents) - {agent}, n)
    return _exists_uniform_plan(G, state, n, others, psi, False, ctx)


def ccr_witness(
    G: GameStructure, state: str, agent: str, pattern: PlanPattern, psi: HistoryFormula
) -> frozenset[str] | None:
    """The first coalition witnessing contributive responsibility, if any.

    Coalitions containing the agent are scanned by size then lexicographic
    order; a witness's plan-compatible class must force the outcome while the
    coalition minus the agent admits a plan forcing its negation.
    """
    from .measures import _subsets_containing

    _require_plan_agent(G, agent, pattern)
    ctx = EvalContext(G)
    n = _query_length(pattern, psi)
    everyone = step_constraints(G, pattern, G.agents, n)
    violations, _ = language_stats(G, state, n, everyone, NotHist(psi), ctx)
    if violations > 0:
        return None
    for coalition in _subsets_containing(G.agents, agent):
        own = step_constraints(G, pattern, coalition, n)
        bad, _ = language_stats(G, state, n, own, NotHist(psi), ctx)
        if bad > 0:
            continue
        without = step_constraints(G, pattern, coalition - {agent}, n)
        if _exists_uniform_plan(G, state, n, without, psi, False, ctx):
            return coalition
    return None


def check_ccr(
    G: GameStructure, state: str, agent: str, pattern: PlanPattern, psi: HistoryFormula
) -> bool:
    """Contributive responsibility: see :func:`ccr_witness`."""
    return ccr_witness(G, state, agent, pattern, psi) is not None


def _class_language(
    G: GameStructure,
    state: str,
    pattern: PlanPattern | None,
    coalition,
    n: int,
    psi: HistoryFormula,
    want: bool,
    ctx: EvalContext,
) -> list[History]:
    if n == 0:
        plans: list[tuple] = [()]
    elif pattern is None:
        plans = plan_class(G, state, PlanPattern.universal(G, n), G.agents, n)
    else:
        plans = plan_class(G, state, pattern, coalition, n)
    out: list[History] = []
    for plan in plans:
        for rho in histories_of_plan(G, state, plan):
            if eval_history(G, rho, psi, ctx) == want:
                out.append(rho)
    return out


def car_languages(
    G: GameStructure,
    state: str,
    agent: str,
    pattern: PlanPattern,
    psi: HistoryFormula,
    n: int | None = None,
) -> ResponsibilityLanguages:
    """Positive language over the agent-compatible class; negative language
    over all plans."""
    _require_plan_agent(G, agent, pattern)
    ctx = EvalContext(G)
    n = n if n is not None else _query_length(pattern, psi)
    if n < horizon(psi):
        raise EvaluationError(f"length {n} is below the outcome horizon")
    positive = _class_language(G, state, pattern, {agent}, n, psi, True, ctx)
    negative = _class_language(G, state, None, None, n, psi, False, ctx)
    return ResponsibilityLanguages(
        positive=measure(positive, G, length=n),
        negative=measure(negative, G, length=n),
        kappa=1 if negative else 0,
    )


def cpr_languages(
    G: GameStructure,
    state: str,
    agent: str,
    pattern: PlanPattern,
    psi: HistoryFormula,
    n: int | None = None,
) -> ResponsibilityLanguages:
    """Positive language over the full-coalition class; negative language
    over the others-fixed deviation class."""
    _require_plan_agent(G, agent, pattern)
    ctx = EvalContext(G)
    n = n if n is not None else _query_length(pattern, psi)
    if n < horizon(psi):
        raise EvaluationError(f"length {n} is below the outcome horizon")
    positive = _class_language(G, state, pattern, G.agents, n, psi, True, ctx)
    negative = _class_language(
        G, state, pattern, set(G.agents) - {agent}, n, psi, False, ctx
    )
    return ResponsibilityLanguages(
        positive=measure(positive, G, length=n),
        negative=measure(negative, G, length=n),
        kappa=1 if positive else 0,
    )


def ccr_languages(
    G: GameStructure,
    state: str,
    agent: str,
    pattern: PlanPattern,
    psi: HistoryFormula,
    n: int | None = None,
) -> list[ResponsibilityLanguages]:
    """Per-coalition positive/negative languages, ordered by coalition size
    then lexicographic membership."""
    from .measures import _subsets_containing

    _require_plan_agent(G, agent, pattern)
    ctx = EvalContext(G)
    n = n if n is not None else _query_length(pattern, psi)
    if n < horizon(psi):
        raise EvaluationError(f"length {n} is below the outcome horizon")
    out: list[ResponsibilityLanguages] = []
    for coalition in _subsets_containing(G.agents, agent):
        positive = _class_language(G, state, pattern, coalition, n, psi, True, ctx)
        negative = _class_language(
            G, state, pattern, coalition - {agent}, n, psi, False, ctx
        )
        out.append(
            ResponsibilityLanguages(
                positive=measure(positive, G, length=n),
                negative=measure(negative, G, length=n),
                kappa=1 if negative else 0,
                coalition=coalition,
            )
        )
    return out
