"""Text parsing for formulae and plan literals.

The grammar is ASCII with ``!``, ``&``, ``|`` booleans (``|`` expands by
De Morgan at parse time), ``X phi``, ``phi U<=k phi``, the ``F<=k``/``G<=k``
sugar, coalition brackets ``<A1,A2>[ psi ]``, probability bounds like
``P>=1/4 <A1>[ psi ]``, and responsibility operators ``CAR(agent; plan; psi)``
(likewise ``CPR``/``CCR``).  Plan literals are ``;``-separated steps, each a
parenthesised tuple such as ``(d,c)`` or ``(A1:d,*)``, with an optional
leading ``...`` marking a wildcard prefix.  Operands of ``X``/``U`` bind to
the nearest state term; parenthesise anything larger.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import FormulaSyntaxError, SemanticError
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
    finally_,
    globally,
    hist_or,
    state_or,
)
from .model import GameStructure, PlanPattern

__all__ = [
    "parse_state_formula",
    "parse_history_formula",
    "parse_plan",
    "validate_state_formula",
    "validate_history_formula",
    "validate_plan",
]

_TOKEN_RE = re.compile(
    r"""
    (?P<dots>\.\.\.)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>\d+)
  | (?P<le><=)|(?P<ge>>=)
  | (?P<sym>[()\[\]<>,;:&|!*/])
  | (?P<ws>\s+)
""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup or ""
        chunk = m.group(0)
        if kind != "ws":
            if kind == "sym":
                kind = chunk
            elif kind in ("le", "ge"):
                kind = chunk
            tokens.append(_Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n") - 1
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise FormulaSyntaxError(
                f"expected {kind!r}, found {tok.text or 'end of input'!r}",
                tok.line,
                tok.column,
            )
        return self.next()

    def fail(self, message: str) -> FormulaSyntaxError:
        tok = self.peek()
        return FormulaSyntaxError(message, tok.line, tok.column)

    # --- state formulae -------------------------------------------------

    def state_formula(self) -> StateFormula:
        node = self.state_and()
        while self.peek().kind == "|":
            self.next()
            node = state_or(node, self.state_and())
        return node

    def state_and(self) -> StateFormula:
        node = self.state_unary()
        while self.peek().kind == "&":
            self.next()
            node = AndState(node, self.state_unary())
        return node

    def state_unary(self) -> StateFormula:
        if self.peek().kind == "!":
            self.next()
            return NotState(self.state_unary())
        return self.state_primary()

    def state_primary(self) -> StateFormula:
        tok = self.peek()
        if tok.kind == "(":
            self.next()
            node = self.state_formula()
            self.expect(")")
            return node
        if tok.kind == "<":
            return self.coalition()
        if tok.kind == "ident":
            if tok.text == "true":
                self.next()
                return TrueFormula()
            if tok.text == "false":
                self.next()
                return FalseFormula()
            if tok.text == "P" and self.peek(1).kind in ("<=", "<", ">=", ">"):
                return self.prob_bound()
            if tok.text in ("CAR", "CPR", "CCR") and self.peek(1).kind == "(":
                return self.responsibility(tok.text)
            self.next()
            return Atom(tok.text)
        raise self.fail("expected a state formula")

    def coalition(self) -> StateFormula:
        agents = self.agent_list()
        self.expect("[")
        body = self.history_formula()
        self.expect("]")
        return Coalition(agents, body)

    def agent_list(self) -> frozenset[str]:
        self.expect("<")
        agents: list[str] = []
        if self.peek().kind == "ident":
            agents.append(self.next().text)
            while self.peek().kind == ",":
                self.next()
                agents.append(self.expect("ident").text)
        self.expect(">")
        return frozenset(agents)

    def prob_bound(self) -> StateFormula:
        self.expect("ident")  # the P
        cmp_tok = self.next()
        if cmp_tok.kind not in ("<=", "<", ">=", ">"):
            raise FormulaSyntaxError(
                "expected a comparator after P", cmp_tok.line, cmp_tok.column
            )
        bound = self.rational()
        if not 0 <= bound <= 1:
            raise FormulaSyntaxError(
                f"probability bound {bound} outside [0, 1]",
                cmp_tok.line,
                cmp_tok.column,
            )
        agents = self.agent_list()
        self.expect("[")
        body = self.history_formula()
        self.expect("]")
        return ProbBound(cmp_tok.text, bound, agents, body)

    def rational(self) -> Fraction:
        num = int(self.expect("int").text)
        if self.peek().kind == "/":
            self.next()
            den = int(self.expect("int").text)
            if den == 0:
                raise self.fail("zero denominator")
            return Fraction(num, den)
        return Fraction(num)

    def responsibility(self, op: str) -> StateFormula:
        self.next()  # operator name
        self.expect("(")
        agent = self.expect("ident").text
        self.expect(";")
        wildcard = False
        if self.peek().kind == "dots":
            self.next()
            wildcard = True
            if self.peek().kind == ";":
                self.next()
        # Plan steps each end with ';'; the last ';' separates plan from
        # formula.  A paren group not followed by ';' belongs to the formula.
        steps: list[list[tuple[int, str | None, str]]] = []
        while self.peek().kind == "(":
            saved = self.pos
            try:
                step = self.plan_step()
            except FormulaSyntaxError:
                self.pos = saved
                break
            if self.peek().kind != ";":
                self.pos = saved
                break
            self.next()
            steps.append(step)
        if not steps:
            raise self.fail("expected plan steps terminated by ';'")
        body = self.history_formula()
        self.expect(")")
        cls = {"CAR": Car, "CPR": Cpr, "CCR": Ccr}[op]
        return cls(agent, _RawPlan(steps, wildcard), body)

    # --- history formulae -----------------------------------------------

    def history_formula(self) -> HistoryFormula:
        node = self.hist_and()
        while self.peek().kind == "|":
            self.next()
            node = hist_or(node, self.hist_and())
        return node

    def hist_and(self) -> HistoryFormula:
        node = self.hist_unary()
        while self.peek().kind == "&":
            self.next()
            node = AndHist(node, self.hist_unary())
        return node

    def hist_unary(self) -> HistoryFormula:
        if self.peek().kind == "!":
            self.next()
            return NotHist(self.hist_unary())
        return self.hist_primary()

    def hist_primary(self) -> HistoryFormula:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "X":
            self.next()
            return Next(self.state_unary())
        if tok.kind == "ident" and tok.text in ("F", "G") and self.peek(1).kind == "<=":
            op = self.next().text
            self.next()  # <=
            bound = int(self.expect("int").text)
            body = self.state_unary()
            return finally_(bound, body) if op == "F" else globally(bound, body)
        if tok.kind == "(":
            # Either a parenthesised history formula or the state operand of
            # an Until; decide by attempting the Until route first.
            saved = self.pos
            try:
                left = self.state_unary()
                if self.peek().kind == "ident" and self.peek().text == "U":
                    return self.until_tail(left)
            except FormulaSyntaxError:
                pass
            self.pos = saved
            self.next()
            node = self.history_formula()
            self.expect(")")
            return node
        # A bare state term can only start an Until here.
        left = self.state_unary()
        if self.peek().kind == "ident" and self.peek().text == "U":
            return self.until_tail(left)
        raise self.fail("expected a history formula (X, U<=, F<=, G<=)")

    def until_tail(self, left: StateFormula) -> HistoryFormula:
        self.expect("ident")  # the U
        self.expect("<=")
        bound = int(self.expect("int").text)
        right = self.state_unary()
        return Until(left, bound, right)

    # --- plans ------------------------------------------------------------

    def plan(self) -> "_RawPlan":
        wildcard = False
        if self.peek().kind == "dots":
            self.next()
            wildcard = True
            if self.peek().kind == ";":
                self.next()
        steps: list[list[tuple[int, str | None, str]]] = []
        steps.append(self.plan_step())
        while self.peek().kind == ";":
            self.next()
            steps.append(self.plan_step())
        return _RawPlan(steps, wildcard)

    def plan_step(self) -> list[tuple[int, str | None, str]]:
        self.expect("(")
        comps: list[tuple[int, str | None, str]] = []
        index = 0
        while True:
            tok = self.peek()
            if tok.kind == "*":
                self.next()
                comps.append((index, None, "*"))
            elif tok.kind == "ident":
                first = self.next().text
                if self.peek().kind == ":":
                    self.next()
                    nxt = self.peek()
                    if nxt.kind == "*":
                        self.next()
                        comps.append((index, first, "*"))
                    else:
                        comps.append((index, first, self.expect("ident").text))
                else:
                    comps.append((index, None, first))
            else:
                raise self.fail("expected an action, `agent:action`, or `*`")
            index += 1
            if self.peek().kind == ",":
                self.next()
                continue
            self.expect(")")
            return comps


@dataclass(frozen=True)
class _RawPlan:
    """Parsed plan steps before agent names are resolved against a model."""

    steps: list
    wildcard: bool


def _resolve_plan(raw: _RawPlan, G: GameStructure) -> PlanPattern:
    steps: list[dict[str, str]] = []
    for comps in raw.steps:
        if len(comps) != len(G.agents):
            raise SemanticError(
                f"plan step has {len(comps)} components for {len(G.agents)} agents"
            )
        step: dict[str, str] = {}
        for index, name, action in comps:
            agent = G.agents[index]
            if name is not None and name != agent:
                raise SemanticError(
                    f"plan step names {name!r} in the position of agent {agent!r}"
                )
            if action == "*":
                continue
            if action not in G.actions:
                raise SemanticError(f"unknown action {action!r} in plan step")
            step[agent] = action
        steps.append(step)
    coalition = frozenset().union(*[set(s) for s in steps]) if steps else frozenset()
    if not coalition:
        coalition = frozenset(G.agents)
    return PlanPattern.from_steps(coalition, steps, raw.wildcard)


_CYCLE_RE = re.compile(r"^\s*cycle\s*@?\s*(\d+)\s*:\s*(.*)$", re.DOTALL)


def parse_plan(text: str, G: GameStructure) -> PlanPattern:
    """Parse a plan literal against a model.

    ``cycle@N: step;step`` repeats the listed steps cyclically, truncated to
    exactly N steps (a convenience for periodic plans in sweeps, where the
    ``@t`` substitution token supplies N).
    """
    m = _CYCLE_RE.match(text)
    if m:
        n = int(m.group(1))
        if n < 1:
            raise SemanticError("cycle length must be at least 1")
        base = parse_plan(m.group(2), G)
        if base.wildcard_prefix:
            raise SemanticError("a cycle plan cannot carry a wildcard prefix")
        maps = [base.step_map(i % len(base.steps)) for i in range(n)]
        return PlanPattern.from_steps(base.coalition, maps, False)
    parser = _Parser(text)
    raw = parser.plan()
    parser.expect("eof")
    return _resolve_plan(raw, G)


def parse_state_formula(text: str, G: GameStructure | None = None) -> StateFormula:
    """Parse a state formula; validates names when a model is supplied."""
    parser = _Parser(text)
    node = parser.state_formula()
    parser.expect("eof")
    node = _resolve_formula(node, G)
    if G is not None:
        validate_state_formula(node, G)
    return node


def parse_history_formula(text: str, G: GameStructure | None = None) -> HistoryFormula:
    """Parse a history formula; validates names when a model is supplied."""
    parser = _Parser(text)
    node = parser.history_formula()
    parser.expect("eof")
    node = _resolve_formula(node, G)
    if G is not None:
        validate_history_formula(node, G)
    return node


def _resolve_formula(node, G: GameStructure | None):
    """Resolve raw plan placeholders inside responsibility operators."""
    if isinstance(node, (Atom, TrueFormula, FalseFormula)):
        return node
    if isinstance(node, NotState):
        return NotState(_resolve_formula(node.operand, G))
    if isinstance(node, AndState):
        return AndState(_resolve_formula(node.left, G), _resolve_formula(node.right, G))
    if isinstance(node, Coalition):
        return Coalition(node.agents, _resolve_formula(node.body, G))
    if isinstance(node, ProbBound):
        return ProbBound(
            node.comparator, node.bound, node.agents, _resolve_formula(node.body, G)
        )
    if isinstance(node, (Car, Cpr, Ccr)):
        plan = node.plan
        if isinstance(plan, _RawPlan):
            if G is None:
                raise SemanticError(
                    "responsibility operators need a model to resolve their plan"
                )
            plan = _resolve_plan(plan, G)
        return type(node)(node.agent, plan, _resolve_formula(node.outcome, G))
    if isinstance(node, Next):
        return Next(_resolve_formula(node.body, G))
    if isinstance(node, Until):
        return Until(
            _resolve_formula(node.left, G), node.bound, _resolve_formula(node.right, G)
        )
    if isinstance(node, NotHist):
        return NotHist(_resolve_formula(node.operand, G))
    if isinstance(node, AndHist):
        return AndHist(_resolve_formula(node.left, G), _resolve_formula(node.right, G))
    raise TypeError(f"unexpected node {node!r}")


def validate_state_formula(phi: StateFormula, G: GameStructure) -> None:
    if isinstance(phi, Atom):
        if phi.name not in G.propositions:
            raise SemanticError(f"unknown proposition {phi.name!r}")
    elif isinstance(phi, (TrueFormula, FalseFormula)):
        pass
    elif isinstance(phi, NotState):
        validate_state_formula(phi.operand, G)
    elif isinstance(phi, AndState):
        validate_state_formula(phi.left, G)
        validate_state_formula(phi.right, G)
    elif isinstance(phi, (Coalition, ProbBound)):
        for agent in phi.agents:
            G.agent_index(agent)
        validate_history_formula(phi.body, G)
    elif isinstance(phi, (Car, Cpr, Ccr)):
        G.agent_index(phi.agent)
        validate_plan(phi.plan, G)
        if phi.agent not in phi.plan.coalition:
            raise SemanticError(
                f"plan does not constrain agent {phi.agent!r}"
            )
        validate_history_formula(phi.outcome, G)
    else:
        raise TypeError(f"not a state formula: {phi!r}")


def validate_history_formula(psi: HistoryFormula, G: GameStructure) -> None:
    if isinstance(psi, Next):
        validate_state_formula(psi.body, G)
    elif isinstance(psi, Until):
        validate_state_formula(psi.left, G)
        validate_state_formula(psi.right, G)
    elif isinstance(psi, NotHist):
        validate_history_formula(psi.operand, G)
    elif isinstance(psi, AndHist):
        validate_history_formula(psi.left, G)
        validate_history_formula(psi.right, G)
    else:
        raise TypeError(f"not a history formula: {psi!r}")


def validate_plan(plan: PlanPattern, G: GameStructure) -> None:
    for agent in plan.coalition:
        G.agent_index(agent)
    for i in range(len(plan.steps)):
        for agent, action in plan.step_map(i).items():
            if action not in G.actions:
                raise SemanticError(f"unknown action {action!r} in plan")
