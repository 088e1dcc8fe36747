"""Brute-force reference implementations used to cross-check the library.

Everything here enumerates explicitly: all joint-action sequences, all
branch outcomes, direct index-based formula evaluation.  Keep this module
free of the library's monitor/DP machinery so the two routes stay
independent; only the plain model containers are shared.
"""

from fractions import Fraction
from itertools import product

from respcheck.formulas import (
    AndHist,
    AndState,
    Atom,
    FalseFormula,
    Next,
    NotHist,
    NotState,
    TrueFormula,
    Until,
)
from respcheck.model import GameStructure, History, JointAction, PlanPattern


def state_holds(G: GameStructure, state: str, phi) -> bool:
    """Propositional state formulas only (atoms, true/false, not, and)."""
    if isinstance(phi, Atom):
        return phi.name in G.labeling[state]
    if isinstance(phi, TrueFormula):
        return True
    if isinstance(phi, FalseFormula):
        return False
    if isinstance(phi, NotState):
        return not state_holds(G, state, phi.operand)
    if isinstance(phi, AndState):
        return state_holds(G, state, phi.left) and state_holds(G, state, phi.right)
    raise TypeError(f"oracle cannot evaluate {phi!r}")


def eval_history(G: GameStructure, rho: History, psi) -> bool:
    """Direct scan semantics: temporal operators read post-action states 1..k."""
    states = rho.states()
    if isinstance(psi, Next):
        return state_holds(G, states[1], psi.body)
    if isinstance(psi, Until):
        top = min(psi.bound, len(states) - 1)
        for i in range(1, top + 1):
            if state_holds(G, states[i], psi.right) and all(
                state_holds(G, states[j], psi.left) for j in range(1, i)
            ):
                return True
        return False
    if isinstance(psi, NotHist):
        return not eval_history(G, rho, psi.operand)
    if isinstance(psi, AndHist):
        return eval_history(G, rho, psi.left) and eval_history(G, rho, psi.right)
    raise TypeError(f"oracle cannot evaluate {psi!r}")


def all_plans(G: GameStructure, n: int) -> list[tuple[JointAction, ...]]:
    return [tuple(combo) for combo in product(G.joint_actions(), repeat=n)]


def plan_matches(
    G: GameStructure,
    plan: tuple[JointAction, ...],
    pattern: PlanPattern,
    coalition,
    n: int,
) -> bool:
    """Literal check of suffix/prefix alignment and coalition restriction."""
    coalition = frozenset(coalition)
    offset = n - len(pattern.steps) if pattern.wildcard_prefix else 0
    for k in range(len(pattern.steps)):
        step = pattern.step_map(k)
        position = offset + k
        if position >= n:
            return False
        for agent, action in step.items():
            if agent not in coalition:
                continue
            if plan[position].actions[G.agent_index(agent)] != action:
                return False
    return True


def histories_of_plan(G: GameStructure, state: str, plan) -> list[History]:
    out = []

    def walk(prefix, current, k):
        if k == len(plan):
            out.append(History(state, prefix))
            return
        action = plan[k]
        dist = G.transitions.get((current, action), {})
        for succ in dist:
            walk(prefix + ((action, succ),), succ, k + 1)

    walk((), state, 0)
    return out


def all_histories(G: GameStructure, state: str, n: int) -> list[History]:
    out = []
    for plan in all_plans(G, n):
        out.extend(histories_of_plan(G, state, plan))
    return out


def history_probability(G: GameStructure, rho: History) -> Fraction:
    p = Fraction(1)
    current = rho.start
    for action, succ in rho.steps:
        for agent, act in zip(G.agents, action.actions):
            p *= G.profile[agent][act]
        p *= G.transitions[(current, action)][succ]
        current = succ
    return p


def language_measures(G: GameStructure, words) -> tuple[int, Fraction]:
    prob = sum((history_probability(G, w) for w in words), Fraction(0))
    return len(words), prob


def class_histories(G, state, pattern, coalition, n, psi, want):
    out = []
    for plan in all_plans(G, n):
        if pattern is not None and not plan_matches(G, plan, pattern, coalition, n):
            continue
        for rho in histories_of_plan(G, state, plan):
            if eval_history(G, rho, psi) == want:
                out.append(rho)
    return out


def _query_length(pattern: PlanPattern, psi) -> int:
    from respcheck.formulas import horizon

    return max(horizon(psi), len(pattern.steps))


def degrees_car(G, state, agent, pattern, psi):
    """(count, prob, entropy) degrees straight from the definitions."""
    import math

    n = _query_length(pattern, psi)
    plus = class_histories(G, state, pattern, {agent}, n, psi, True)
    phi_all = class_histories(G, state, None, None, n, psi, True)
    minus = class_histories(G, state, None, None, n, psi, False)
    kappa = 1 if minus else 0
    if not kappa:
        return Fraction(0), Fraction(0), 0.0
    c_plus, p_plus = language_measures(G, plus)
    c_phi, p_phi = language_measures(G, phi_all)
    return (
        Fraction(c_plus, c_phi),
        p_plus / p_phi,
        math.log2(1 + c_plus) / math.log2(1 + c_phi),
    )


def degrees_cpr(G, state, agent, pattern, psi):
    import math

    n = _query_length(pattern, psi)
    keep = class_histories(G, state, pattern, G.agents, n, psi, True)
    kappa = 1 if keep else 0
    if not kappa:
        return Fraction(0), Fraction(0), 0.0
    others = frozenset(G.agents) - {agent}
    minus = class_histories(G, state, pattern, others, n, psi, False)
    nphi = class_histories(G, state, None, None, n, psi, False)
    c_minus, p_minus = language_measures(G, minus)
    c_nphi, p_nphi = language_measures(G, nphi)
    return (
        Fraction(c_minus, c_nphi),
        p_minus / p_nphi,
        math.log2(1 + c_minus) / math.log2(1 + c_nphi),
    )


def degrees_ccr(G, state, agent, pattern, psi):
    import math
    from itertools import combinations

    n = _query_length(pattern, psi)
    phi_all = class_histories(G, state, None, None, n, psi, True)
    c_phi, p_phi = language_measures(G, phi_all)
    if c_phi == 0:
        # nothing satisfies the outcome, so no coalition can contribute
        return Fraction(0), Fraction(0), 0.0
    rest = sorted(a for a in G.agents if a != agent)
    coalitions = []
    for size in range(len(rest) + 1):
        for combo in combinations(rest, size):
            coalitions.append(frozenset([agent, *combo]))
    count_sum = Fraction(0)
    prob_sum = Fraction(0)
    ent_sum = 0.0
    num_j = 0
    for coalition in coalitions:
        plus = class_histories(G, state, pattern, coalition, n, psi, True)
        dev = class_histories(G, state, pattern, coalition - {agent}, n, psi, False)
        if not dev:
            continue
        c_plus, p_plus = language_measures(G, plus)
        count_sum += Fraction(c_plus, c_phi)
        prob_sum += p_plus / p_phi
        ent_sum += math.log2(1 + c_plus) / math.log2(1 + c_phi)
        if c_plus > 0:
            num_j += 1
    if num_j == 0:
        return Fraction(0), Fraction(0), 0.0
    return count_sum / num_j, prob_sum / num_j, ent_sum / num_j
