"""Bounded-horizon satisfaction for state and history formulae.

History formulae are evaluated by *progression*: a formula is advanced over
each successive post-action state, resolving ``Next`` after one step and
counting ``Until`` bounds down until the residual collapses to a constant.
The same progression drives the single-history evaluator here and the exact
language-counting machinery in :mod:`respcheck.measures`, so the two cannot
drift apart.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import BudgetExceededError, EvaluationError, SemanticError
from .formulas import (
    AndHist,
    AndState,
    Atom,
    Car,
    Ccr,
    Coalition,
    Cpr,
    FalseFormula,
    HistoryFormula,
    Next,
    NotHist,
    NotState,
    ProbBound,
    StateFormula,
    TrueFormula,
    Until,
    horizon,
)
from .model import GameStructure, History, successors

__all__ = [
    "eval_state",
    "eval_history",
    "check_coalition",
    "check_prob_bound",
    "satisfying_language",
    "EvalContext",
]


@dataclass(frozen=True)
class _Resolved(HistoryFormula):
    """Internal constant monitor state."""

    value: bool


H_TRUE = _Resolved(True)
H_FALSE = _Resolved(False)


class EvalContext:
    """Per-query caches for state-formula truth and monitor progression."""

    def __init__(self, G: GameStructure):
        self.G = G
        self.state_truth: dict[tuple[StateFormula, str], bool] = {}
        self.advance_cache: dict[tuple[HistoryFormula, str], HistoryFormula] = {}

    def holds(self, phi: StateFormula, state: str) -> bool:
        key = (phi, state)
        cached = self.state_truth.get(key)
        if cached is None:
            cached = _eval_state(self, state, phi)
            self.state_truth[key] = cached
        return cached


def _not(m: HistoryFormula) -> HistoryFormula:
    if isinstance(m, _Resolved):
        return H_FALSE if m.value else H_TRUE
    return NotHist(m)


def _and(a: HistoryFormula, b: HistoryFormula) -> HistoryFormula:
    if isinstance(a, _Resolved):
        return b if a.value else H_FALSE
    if isinstance(b, _Resolved):
        return a if b.value else H_FALSE
    return AndHist(a, b)


def init_monitor(psi: HistoryFormula) -> HistoryFormula:
    """Fold away parts of the formula already decided before any step."""
    if isinstance(psi, _Resolved):
        return psi
    if isinstance(psi, Next):
        return psi
    if isinstance(psi, Until):
        return H_FALSE if psi.bound == 0 else psi
    if isinstance(psi, NotHist):
        return _not(init_monitor(psi.operand))
    if isinstance(psi, AndHist):
        return _and(init_monitor(psi.left), init_monitor(psi.right))
    raise TypeError(f"not a history formula: {psi!r}")


def advance(ctx: EvalContext, m: HistoryFormula, state: str) -> HistoryFormula:
    """Progress the monitor over one step arriving in ``state``."""
    key = (m, state)
    cached = ctx.advance_cache.get(key)
    if cached is not None:
        return cached
    out: HistoryFormula
    if isinstance(m, _Resolved):
        out = m
    elif isinstance(m, Next):
        out = H_TRUE if ctx.holds(m.body, state) else H_FALSE
    elif isinstance(m, Until):
        if ctx.holds(m.right, state):
            out = H_TRUE
        elif not ctx.holds(m.left, state):
            out = H_FALSE
        elif m.bound == 1:
            out = H_FALSE
        else:
            out = Until(m.left, m.bound - 1, m.right)
    elif isinstance(m, NotHist):
        out = _not(advance(ctx, m.operand, state))
    elif isinstance(m, AndHist):
        out = _and(advance(ctx, m.left, state), advance(ctx, m.right, state))
    else:
        raise TypeError(f"not a monitor: {m!r}")
    ctx.advance_cache[key] = out
    return out


def eval_history(
    G: GameStructure, rho: History, psi: HistoryFormula, ctx: EvalContext | None = None
) -> bool:
    """Whether the history satisfies the formula.

    Raises :class:`EvaluationError` when the history is shorter than the
    formula's horizon, which would otherwise silently misjudge.
    """
    need = horizon(psi)
    if len(rho) < need:
        raise EvaluationError(
            f"history of {len(rho)} steps is shorter than the horizon {need}"
        )
    ctx = ctx or EvalContext(G)
    m = init_monitor(psi)
    for _, state in rho.steps:
        if isinstance(m, _Resolved):
            break
        m = advance(ctx, m, state)
    if not isinstance(m, _Resolved):
        raise EvaluationError("formula undecided at the end of the history")
    return m.value


def eval_state(
    G: GameStructure, state: str, phi: StateFormula, ctx: EvalContext | None = None
) -> bool:
    """Satisfaction of a state formula at ``state``."""
    if state not in G.states:
        raise SemanticError(f"unknown state {state!r}")
    ctx = ctx or EvalContext(G)
    return ctx.holds(phi, state)


def _eval_state(ctx: EvalContext, state: str, phi: StateFormula) -> bool:
    G = ctx.G
    if isinstance(phi, Atom):
        if phi.name not in G.propositions:
            raise SemanticError(f"unknown proposition {phi.name!r}")
        return phi.name in G.labeling[state]
    if isinstance(phi, TrueFormula):
        return True
    if isinstance(phi, FalseFormula):
        return False
    if isinstance(phi, NotState):
        return not ctx.holds(phi.operand, state)
    if isinstance(phi, AndState):
        return ctx.holds(phi.left, state) and ctx.holds(phi.right, state)
    if isinstance(phi, Coalition):
        return check_coalition(G, state, phi.agents, phi.body, ctx)
    if isinstance(phi, ProbBound):
        return check_prob_bound(
            G, state, phi.agents, phi.body, phi.comparator, phi.bound, ctx
        )
    if isinstance(phi, (Car, Cpr, Ccr)):
        from . import responsibility

        checker = {
            Car: responsibility.check_car,
            Cpr: responsibility.check_cpr,
            Ccr: responsibility.check_ccr,
        }[type(phi)]
        return checker(G, state, phi.agent, phi.plan, phi.outcome)
    raise TypeError(f"not a state formula: {phi!r}")


def _assignments(
    G: GameStructure, agents: frozenset[str]
) -> list[dict[str, str]]:
    ordered = [a for a in G.agents if a in agents]
    for agent in agents:
        G.agent_index(agent)
    return [dict(zip(ordered, combo)) for combo in product(G.actions, repeat=len(ordered))]


def check_coalition(
    G: GameStructure,
    state: str,
    agents: frozenset[str],
    psi: HistoryFormula,
    ctx: EvalContext | None = None,
) -> bool:
    """Whether the coalition has a strategy forcing ``psi`` from ``state``.

    Bounded AND-OR search over the depth-``horizon(psi)`` history tree:
    OR over the coalition's joint choices, AND over opponents' choices and
    stochastic successors.  Strategies may depend on the full history.
    """
    ctx = ctx or EvalContext(G)
    depth = horizon(psi)
    own = _assignments(G, agents)
    others = _assignments(G, frozenset(G.agents) - agents)
    # The monitor residual captures everything the formula remembers about
    # the history, so (state, monitor, depth) keys the search exactly.
    memo: dict[tuple[str, HistoryFormula, int], bool] = {}

    def forced(current: str, m: HistoryFormula, left: int) -> bool:
        if isinstance(m, _Resolved):
            return m.value
        if left == 0:
            raise EvaluationError("formula undecided at the horizon")
        key = (current, m, left)
        cached = memo.get(key)
        if cached is not None:
            return cached
        result = False
        for choice in own:
            ok = True
            for opposition in others:
                action = G.joint_action({**choice, **opposition})
                for succ in successors(G, current, action):
                    if not forced(succ, advance(ctx, m, succ), left - 1):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                result = True
                break
        memo[key] = result
        return result

    return forced(state, init_monitor(psi), depth)


def check_prob_bound(
    G: GameStructure,
    state: str,
    agents: frozenset[str],
    psi: HistoryFormula,
    comparator: str,
    bound: Fraction,
    ctx: EvalContext | None = None,
) -> bool:
    """Whether some coalition strategy puts Prob(psi) within the bound.

    Agents outside the coalition follow the base profile and transitions
    follow the model; the optimum over deterministic depth-bounded strategies
    is computed exactly by backward induction (maximising for >=/>,
    minimising for <=/<).
    """
    if comparator not in ("<=", "<", ">=", ">"):
        raise EvaluationError(f"bad comparator {comparator!r}")
    ctx = ctx or EvalContext(G)
    depth = horizon(psi)
    own = _assignments(G, agents)
    others = _assignments(G, frozenset(G.agents) - agents)
    maximise = comparator in (">=", ">")
    pick = max if maximise else min
    other_agents = [a for a in G.agents if a not in agents]

    def value(current: str, m: HistoryFormula, left: int) -> Fraction:
        if isinstance(m, _Resolved):
            return Fraction(1 if m.value else 0)
        best: Fraction | None = None
        for choice in own:
            total = Fraction(0)
            for opposition in others:
                weight = Fraction(1)
                for agent in other_agents:
                    weight *= G.profile[agent][opposition[agent]]
                if weight == 0:
                    continue
                action = G.joint_action({**choice, **opposition})
                for succ, mu in successors(G, current, action).items():
                    total += weight * mu * value(succ, advance(ctx, m, succ), left - 1)
            best = total if best is None else pick(best, total)
        assert best is not None
        return best

    optimum = value(state, init_monitor(psi), depth)
    if comparator == "<=":
        return optimum <= bound
    if comparator == "<":
        return optimum < bound
    if comparator == ">=":
        return optimum >= bound
    return optimum > bound


def satisfying_language(
    G: GameStructure,
    state: str,
    psi: HistoryFormula,
    n: int,
    max_histories: int | None = None,
):
    """All length-``n`` histories from ``state`` satisfying ``psi``, measured.

    Materialises the word set; guard large horizons with ``max_histories``.
    """
    from .measures import measure

    need = horizon(psi)
    if n < need:
        raise EvaluationError(f"length {n} is below the formula horizon {need}")
    if max_histories is not None:
        budget = (len(G.actions) ** len(G.agents) * len(G.states)) ** n
        if budget > max_histories:
            raise BudgetExceededError(
                f"up to {budget} histories exceeds the cap of {max_histories}"
            )
    ctx = EvalContext(G)
    state_order = {s: i for i, s in enumerate(G.states)}
    words: list[History] = []

    def extend(prefix, current, m, left):
        if left == 0:
            if not isinstance(m, _Resolved):
                raise EvaluationError("formula undecided at the horizon")
            if m.value:
                words.append(History(state, prefix))
            return
        for action in G.joint_actions():
            dist = G.transitions.get((current, action))
            if not dist:
                continue
            for succ in sorted(dist, key=state_order.__getitem__):
                extend(prefix + ((action, succ),), succ, advance(ctx, m, succ), left - 1)

    extend((), state, init_monitor(psi), n)
    return measure(words, G, length=n)
