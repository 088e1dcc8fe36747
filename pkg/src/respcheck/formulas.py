"""Formula ASTs, horizons, and the pretty printer.

State formulae describe single states; history formulae describe bounded
finite paths.  Temporal operators read the states reached *after* actions:
``Next`` looks at step 1, and ``Until`` scans steps 1..k.  The disjunction
and the bounded eventually/always operators are parse-time sugar, so the AST
only carries atoms, negation, conjunction, strategy and probability
quantifiers, the responsibility operators, ``Next`` and bounded ``Until``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import PlanPattern

__all__ = [
    "StateFormula",
    "Atom",
    "TrueFormula",
    "FalseFormula",
    "NotState",
    "AndState",
    "Coalition",
    "ProbBound",
    "Car",
    "Cpr",
    "Ccr",
    "HistoryFormula",
    "Next",
    "Until",
    "NotHist",
    "AndHist",
    "state_or",
    "hist_or",
    "finally_",
    "globally",
    "horizon",
    "horizon_state",
    "format_state",
    "format_history",
]


class StateFormula:
    """Base class for state formulae."""

    __slots__ = ()


class HistoryFormula:
    """Base class for history formulae."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(StateFormula):
    name: str


@dataclass(frozen=True)
class TrueFormula(StateFormula):
    pass


@dataclass(frozen=True)
class FalseFormula(StateFormula):
    pass


@dataclass(frozen=True)
class NotState(StateFormula):
    operand: StateFormula


@dataclass(frozen=True)
class AndState(StateFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class Coalition(StateFormula):
    """The coalition can enforce the history formula with some strategy."""

    agents: frozenset[str]
    body: HistoryFormula


@dataclass(frozen=True)
class ProbBound(StateFormula):
    """The coalition has a strategy making Prob(body) satisfy the bound."""

    comparator: str  # one of <=, <, >=, >
    bound: Fraction
    agents: frozenset[str]
    body: HistoryFormula

    def __post_init__(self) -> None:
        if self.comparator not in ("<=", "<", ">=", ">"):
            raise ValueError(f"bad comparator {self.comparator!r}")
        if not 0 <= self.bound <= 1:
            raise ValueError(f"probability bound {self.bound} outside [0, 1]")


@dataclass(frozen=True)
class Car(StateFormula):
    agent: str
    plan: PlanPattern
    outcome: HistoryFormula


@dataclass(frozen=True)
class Cpr(StateFormula):
    agent: str
    plan: PlanPattern
    outcome: HistoryFormula


@dataclass(frozen=True)
class Ccr(StateFormula):
    agent: str
    plan: PlanPattern
    outcome: HistoryFormula


@dataclass(frozen=True)
class Next(HistoryFormula):
    body: StateFormula


@dataclass(frozen=True)
class Until(HistoryFormula):
    """``left U<=bound right``: some step i in 1..bound satisfies ``right``
    while every earlier step satisfies ``left``."""

    left: StateFormula
    bound: int
    right: StateFormula

    def __post_init__(self) -> None:
        if self.bound < 0:
            raise ValueError("until bound must be non-negative")


@dataclass(frozen=True)
class NotHist(HistoryFormula):
    operand: HistoryFormula


@dataclass(frozen=True)
class AndHist(HistoryFormula):
    left: HistoryFormula
    right: HistoryFormula


def state_or(a: StateFormula, b: StateFormula) -> StateFormula:
    """Disjunction via De Morgan, applied at parse time."""
    return NotState(AndState(NotState(a), NotState(b)))


def hist_or(a: HistoryFormula, b: HistoryFormula) -> HistoryFormula:
    return NotHist(AndHist(NotHist(a), NotHist(b)))


def finally_(bound: int, phi: StateFormula) -> HistoryFormula:
    """``F<=k phi`` expands to ``true U<=k phi``."""
    return Until(TrueFormula(), bound, phi)


def globally(bound: int, phi: StateFormula) -> HistoryFormula:
    """``G<=k phi`` expands to ``!(true U<=k !phi)``."""
    return NotHist(Until(TrueFormula(), bound, NotState(phi)))


def horizon_state(phi: StateFormula) -> int:
    """Steps a history must provide for the state formula's nested futures."""
    if isinstance(phi, (Atom, TrueFormula, FalseFormula)):
        return 0
    if isinstance(phi, NotState):
        return horizon_state(phi.operand)
    if isinstance(phi, AndState):
        return max(horizon_state(phi.left), horizon_state(phi.right))
    if isinstance(phi, (Coalition, ProbBound)):
        return horizon(phi.body)
    if isinstance(phi, (Car, Cpr, Ccr)):
        return horizon(phi.outcome)
    raise TypeError(f"not a state formula: {phi!r}")


def horizon(psi: HistoryFormula) -> int:
    """Minimal number of steps needed to decide the history formula."""
    if isinstance(psi, Next):
        return 1 + horizon_state(psi.body)
    if isinstance(psi, Until):
        return psi.bound + max(horizon_state(psi.left), horizon_state(psi.right))
    if isinstance(psi, NotHist):
        return horizon(psi.operand)
    if isinstance(psi, AndHist):
        return max(horizon(psi.left), horizon(psi.right))
    raise TypeError(f"not a history formula: {psi!r}")


def _fmt_agents(agents: frozenset[str]) -> str:
    return ",".join(sorted(agents))


def format_state(phi: StateFormula) -> str:
    """Canonical text for a state formula; parses back to the same AST."""
    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, TrueFormula):
        return "true"
    if isinstance(phi, FalseFormula):
        return "false"
    if isinstance(phi, NotState):
        return f"!({format_state(phi.operand)})"
    if isinstance(phi, AndState):
        return f"({format_state(phi.left)} & {format_state(phi.right)})"
    if isinstance(phi, Coalition):
        return f"<{_fmt_agents(phi.agents)}>[ {format_history(phi.body)} ]"
    if isinstance(phi, ProbBound):
        return (
            f"P{phi.comparator}{phi.bound} "
            f"<{_fmt_agents(phi.agents)}>[ {format_history(phi.body)} ]"
        )
    if isinstance(phi, (Car, Cpr, Ccr)):
        op = type(phi).__name__.upper()
        return f"{op}({phi.agent}; {phi.plan}; {format_history(phi.outcome)})"
    raise TypeError(f"not a state formula: {phi!r}")


def format_history(psi: HistoryFormula) -> str:
    """Canonical text for a history formula; parses back to the same AST."""
    if isinstance(psi, Next):
        return f"X {_fmt_state_operand(psi.body)}"
    if isinstance(psi, Until):
        return f"{_fmt_state_operand(psi.left)} U<={psi.bound} {_fmt_state_operand(psi.right)}"
    if isinstance(psi, NotHist):
        return f"!({format_history(psi.operand)})"
    if isinstance(psi, AndHist):
        return f"({format_history(psi.left)} & {format_history(psi.right)})"
    raise TypeError(f"not a history formula: {psi!r}")


def _fmt_state_operand(phi: StateFormula) -> str:
    text = format_state(phi)
    if isinstance(phi, (Atom, TrueFormula, FalseFormula)) or text.startswith("("):
        return text
    return f"({text})"
