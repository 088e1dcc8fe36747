"""Multi-agent stochastic transition systems and their history/plan machinery.

A game structure couples a finite state space with probabilistic transitions
indexed by joint actions (one action per agent, drawn from a shared alphabet)
and carries a stationary per-agent behavioural profile used by probabilistic
measures.  All probabilities are exact rationals; every type is immutable
after construction and every operation is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Mapping

from .errors import EvaluationError, MissingTransitionError, SemanticError

__all__ = [
    "JointAction",
    "GameStructure",
    "History",
    "Trace",
    "PlanPattern",
    "successors",
    "enumerate_histories",
    "history_probability",
    "trace_of",
    "plan_class",
    "compatible",
    "step_constraints",
]


@dataclass(frozen=True)
class JointAction:
    """One action per agent, ordered by the model's agent declaration."""

    actions: tuple[str, ...]

    def __str__(self) -> str:
        return "(" + ",".join(self.actions) + ")"


@dataclass(frozen=True, eq=False)
class GameStructure:
    """A multi-agent stochastic transition system with a behavioural profile.

    Attributes:
        agents: ordered agent identifiers.
        states: ordered state identifiers.
        actions: ordered action identifiers (shared alphabet for all agents).
        transitions: (state, joint action) -> {successor: probability}.
            May be partial; querying a missing pair raises
            :class:`MissingTransitionError`.
        propositions: declared atomic proposition names.
        labeling: state -> set of propositions true in that state (total).
        profile: agent -> {action: probability}; the stationary distribution
            each agent follows under the probabilistic measure.
    """

    agents: tuple[str, ...]
    states: tuple[str, ...]
    actions: tuple[str, ...]
    transitions: Mapping[tuple[str, JointAction], Mapping[str, Fraction]]
    propositions: frozenset[str]
    labeling: Mapping[str, frozenset[str]]
    profile: Mapping[str, Mapping[str, Fraction]]
    _joint: tuple[JointAction, ...] = field(init=False, repr=False)
    _agent_index: Mapping[str, int] = field(init=False, repr=False)
    _joint_profile: Mapping[JointAction, Fraction] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not self.states:
            raise SemanticError("a model needs at least one state")
        if not self.actions:
            raise SemanticError("a model needs at least one action")
        if len(set(self.agents)) != len(self.agents):
            raise SemanticError("duplicate agent identifiers")
        one = Fraction(1)
        for (state, action), dist in self.transitions.items():
            if state not in self.states:
                raise SemanticError(f"transition from undeclared state {state!r}")
            if len(action.actions) != len(self.agents):
                raise SemanticError(f"joint action {action} has wrong arity")
            total = sum(dist.values(), Fraction(0))
            if total != one:
                raise SemanticError(
                    f"distribution for ({state}, {action}) sums to {total}, not 1"
                )
            for succ, p in dist.items():
                if succ not in self.states:
                    raise SemanticError(f"transition to undeclared state {succ!r}")
                if p <= 0:
                    raise SemanticError(
                        f"non-positive probability {p} in ({state}, {action})"
                    )
        for state in self.states:
            if state not in self.labeling:
                raise SemanticError(f"labeling is not total: missing state {state!r}")
            extra = set(self.labeling[state]) - set(self.propositions)
            if extra:
                raise SemanticError(f"state {state!r} labelled with undeclared {extra}")
        for agent in self.agents:
            if agent not in self.profile:
                raise SemanticError(f"profile missing for agent {agent!r}")
            dist = self.profile[agent]
            if set(dist) != set(self.actions):
                raise SemanticError(f"profile for {agent!r} must cover all actions")
            if sum(dist.values(), Fraction(0)) != one:
                raise SemanticError(f"profile for {agent!r} does not sum to 1")
        joint = tuple(
            JointAction(combo) for combo in product(self.actions, repeat=len(self.agents))
        )
        object.__setattr__(self, "_joint", joint)
        object.__setattr__(
            self, "_agent_index", {a: i for i, a in enumerate(self.agents)}
        )
        jp = {
            ja: _product(self.profile[ag][act] for ag, act in zip(self.agents, ja.actions))
            for ja in joint
        }
        object.__setattr__(self, "_joint_profile", jp)

    def joint_actions(self) -> tuple[JointAction, ...]:
        """All joint actions in lexicographic agent-ordered action order."""
        return self._joint

    def agent_index(self, agent: str) -> int:
        try:
            return self._agent_index[agent]
        except KeyError:
            raise SemanticError(f"unknown agent {agent!r}") from None

    def joint_action(self, assignment: Mapping[str, str]) -> JointAction:
        """Build a joint action from a total agent -> action map."""
        if set(assignment) != set(self.agents):
            raise SemanticError("joint action assignment must cover every agent")
        return JointAction(tuple(assignment[a] for a in self.agents))

    def joint_profile_probability(self, action: JointAction) -> Fraction:
        """Probability of a joint action under the base profile."""
        return self._joint_profile[action]


def _product(values: Iterable[Fraction]) -> Fraction:
    out = Fraction(1)
    for v in values:
        out *= v
    return out


@dataclass(frozen=True)
class History:
    """A finite path: a start state and (joint action, successor) steps."""

    start: str
    steps: tuple[tuple[JointAction, str], ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def states(self) -> tuple[str, ...]:
        """States visited, index 0 being the start."""
        return (self.start,) + tuple(s for _, s in self.steps)

    def state_at(self, i: int) -> str:
        if i == 0:
            return self.start
        return self.steps[i - 1][1]

    def __str__(self) -> str:
        parts = [self.start]
        for action, succ in self.steps:
            parts.append(f"-{action}->")
            parts.append(succ)
        return " ".join(parts)


@dataclass(frozen=True)
class Trace:
    """The state-erased action sequence of a history."""

    actions: tuple[JointAction, ...]

    def __len__(self) -> int:
        return len(self.actions)

    def __str__(self) -> str:
        return ";".join(str(a) for a in self.actions)


@dataclass(frozen=True)
class PlanPattern:
    """A possibly partial joint plan for a coalition.

    ``steps`` hold per-step constraints as sorted (agent, action) tuples;
    agents absent from a step are unconstrained there.  When
    ``wildcard_prefix`` is set the constrained steps anchor at the end of the
    query horizon and any finite prefix may precede them.
    """

    coalition: frozenset[str]
    steps: tuple[tuple[tuple[str, str], ...], ...]
    wildcard_prefix: bool = False

    def __post_init__(self) -> None:
        if not self.steps:
            raise EvaluationError("a plan pattern needs at least one step")
        for step in self.steps:
            for agent, _ in step:
                if agent not in self.coalition:
                    raise EvaluationError(
                        f"step constrains agent {agent!r} outside the coalition"
                    )

    @staticmethod
    def from_steps(
        coalition: Iterable[str],
        steps: Iterable[Mapping[str, str]],
        wildcard_prefix: bool = False,
    ) -> "PlanPattern":
        frozen = tuple(tuple(sorted(step.items())) for step in steps)
        return PlanPattern(frozenset(coalition), frozen, wildcard_prefix)

    @staticmethod
    def universal(G: GameStructure, n: int = 1) -> "PlanPattern":
        """The unconstrained pattern covering all agents."""
        return PlanPattern.from_steps(G.agents, [{} for _ in range(max(1, n))])

    def step_map(self, i: int) -> dict[str, str]:
        return dict(self.steps[i])

    def __str__(self) -> str:
        rendered = []
        for step in self.steps:
            rendered.append("(" + ",".join(f"{a}:{x}" for a, x in step) + ")")
        body = ";".join(rendered)
        return ("...;" + body) if self.wildcard_prefix else body


def successors(G: GameStructure, state: str, action: JointAction) -> dict[str, Fraction]:
    """The transition distribution from ``state`` under ``action``."""
    if state not in G.states:
        raise SemanticError(f"unknown state {state!r}")
    try:
        dist = G.transitions[(state, action)]
    except KeyError:
        raise MissingTransitionError(state, action) from None
    return dict(dist)


def enumerate_histories(G: GameStructure, state: str, n: int) -> list[History]:
    """All histories of exactly ``n`` steps starting at ``state``.

    Iteration order is deterministic: lexicographic by agent-ordered actions,
    then successor state id, at every step.
    """
    if n < 0:
        raise EvaluationError("step count must be non-negative")
    if state not in G.states:
        raise SemanticError(f"unknown state {state!r}")
    state_order = {s: i for i, s in enumerate(G.states)}
    out: list[History] = []

    def extend(prefix: tuple[tuple[JointAction, str], ...], current: str, left: int) -> None:
        if left == 0:
            out.append(History(state, prefix))
            return
        for action in G.joint_actions():
            dist = G.transitions.get((current, action))
            if not dist:
                continue
            for succ in sorted(dist, key=state_order.__getitem__):
                extend(prefix + ((action, succ),), succ, left - 1)

    extend((), state, n)
    return out


def history_probability(G: GameStructure, rho: History) -> Fraction:
    """Probability of ``rho`` under the base profile and the transitions.

    The empty history has probability 1; each step multiplies in the joint
    profile probability of its action and the transition probability of its
    successor.
    """
    p = Fraction(1)
    current = rho.start
    for action, succ in rho.steps:
        dist = G.transitions.get((current, action))
        if dist is None:
            raise MissingTransitionError(current, action)
        mu = dist.get(succ, Fraction(0))
        if mu <= 0:
            raise EvaluationError(
                f"history step {current} -{action}-> {succ} has zero probability"
            )
        p *= G.joint_profile_probability(action) * mu
        current = succ
    return p


def trace_of(rho: History) -> Trace:
    """Erase the states of a history, keeping the joint-action sequence."""
    return Trace(tuple(action for action, _ in rho.steps))


def step_constraints(
    G: GameStructure, pattern: PlanPattern, coalition: Iterable[str], n: int
) -> list[dict[str, str]]:
    """Per-step agent->action constraints of ``pattern`` restricted to ``coalition``.

    Wildcard-prefix patterns anchor their constrained steps at the suffix of
    the ``n``-step window; plain patterns anchor at step 0.  Steps outside the
    pattern are unconstrained.
    """
    coalition = frozenset(coalition)
    for agent in coalition:
        G.agent_index(agent)
    if n < len(pattern.steps):
        raise EvaluationError(
            f"horizon {n} is shorter than the {len(pattern.steps)} constrained steps"
        )
    offset = n - len(pattern.steps) if pattern.wildcard_prefix else 0
    maps: list[dict[str, str]] = [dict() for _ in range(n)]
    for k, step in enumerate(pattern.steps):
        maps[offset + k] = {a: x for a, x in step if a in coalition}
    return maps


def _matching_actions(G: GameStructure, constraint: Mapping[str, str]) -> list[JointAction]:
    idx = [(G.agent_index(a), x) for a, x in constraint.items()]
    return [ja for ja in G.joint_actions() if all(ja.actions[i] == x for i, x in idx)]


def plan_class(
    G: GameStructure,
    state: str,
    pattern: PlanPattern,
    coalition: Iterable[str],
    n: int,
) -> list[tuple[JointAction, ...]]:
    """All fully specified length-``n`` plans compatible with ``pattern`` on ``coalition``.

    Agents outside the coalition and unconstrained steps range over all
    actions.  The universal pattern with the full agent set yields every
    length-``n`` plan.
    """
    maps = step_constraints(G, pattern, coalition, n)
    per_step = [_matching_actions(G, m) for m in maps]
    return [tuple(combo) for combo in product(*per_step)]


def compatible(
    G: GameStructure,
    plan_a: tuple[JointAction, ...],
    plan_b: tuple[JointAction, ...],
    coalition: Iterable[str],
) -> bool:
    """Whether two equal-length plans agree on the coalition's actions everywhere."""
    if len(plan_a) != len(plan_b):
        raise EvaluationError("plans must have equal length to compare")
    idx = [G.agent_index(a) for a in coalition]
    return all(
        a.actions[i] == b.actions[i] for a, b in zip(plan_a, plan_b) for i in idx
    )


def histories_of_plan(
    G: GameStructure, state: str, plan: tuple[JointAction, ...]
) -> Iterator[History]:
    """All histories consistent with a fully specified plan, in state order."""
    state_order = {s: i for i, s in enumerate(G.states)}

    def walk(prefix: tuple[tuple[JointAction, str], ...], current: str, k: int):
        if k == len(plan):
            yield History(state, prefix)
            return
        action = plan[k]
        dist = G.transitions.get((current, action))
        if dist is None:
            raise MissingTransitionError(current, action)
        for succ in sorted(dist, key=state_order.__getitem__):
            yield from walk(prefix + ((action, succ),), succ, k + 1)

    yield from walk((), state, 0)
