"""Asymptotic entropy of constrained behaviour via labeled multigraphs.

A monitor restricts the joint-action graph of a model; the asymptotic
entropy of the surviving behaviour is log2 of the spectral radius of the
trimmed graph's extended adjacency matrix, whose (i, j) entry counts the
joint-action symbols enabling the move i -> j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import ConvergenceError, EvaluationError, ModelFormatError, SemanticError
from .formulas import StateFormula
from .model import GameStructure
from .semantics import EvalContext

__all__ = [
    "LabeledMultigraph",
    "Invariance",
    "BoundedRecurrence",
    "ExplicitDfa",
    "build_product",
    "trim",
    "spectral_radius",
    "asymptotic_entropy",
    "path_count",
    "load_dfa",
]


@dataclass(frozen=True)
class LabeledMultigraph:
    """A multigraph with symbol multiplicities on its edges."""

    nodes: tuple
    initial: object
    accepting: frozenset
    edge_count: Mapping[tuple, int]

    def matrix(self) -> np.ndarray:
        """The extended adjacency matrix in node order."""
        index = {node: i for i, node in enumerate(self.nodes)}
        m = np.zeros((len(self.nodes), len(self.nodes)))
        for (u, v), k in self.edge_count.items():
            m[index[u], index[v]] = k
        return m

    def int_matrix(self) -> list[list[int]]:
        index = {node: i for i, node in enumerate(self.nodes)}
        m = [[0] * len(self.nodes) for _ in self.nodes]
        for (u, v), k in self.edge_count.items():
            m[index[u]][index[v]] = k
        return m

    def is_empty(self) -> bool:
        return not self.nodes


@dataclass(frozen=True)
class Invariance:
    """Behaviour must stay inside the states satisfying the predicate."""

    predicate: StateFormula


@dataclass(frozen=True)
class BoundedRecurrence:
    """States satisfying the predicate must recur within every ``window`` steps."""

    window: int
    predicate: StateFormula

    def __post_init__(self) -> None:
        if self.window < 1:
            raise EvaluationError("recurrence window must be at least 1")


@dataclass(frozen=True)
class ExplicitDfa:
    """A user-supplied multigraph used as the monitor directly."""

    graph: LabeledMultigraph


MonitorSpec = Invariance | BoundedRecurrence | ExplicitDfa


def _empty_graph() -> LabeledMultigraph:
    return LabeledMultigraph(nodes=(), initial=None, accepting=frozenset(), edge_count={})


def build_product(
    G: GameStructure, spec: MonitorSpec, initial: str
) -> LabeledMultigraph:
    """Product of the model's joint-action graph with the monitor.

    All nodes are accepting: prefixes of surviving behaviour count as words.
    Returns the empty graph when the restriction kills the initial state.
    """
    if isinstance(spec, ExplicitDfa):
        return spec.graph
    if initial not in G.states:
        raise SemanticError(f"unknown state {initial!r}")
    ctx = EvalContext(G)
    if isinstance(spec, Invariance):
        good = frozenset(s for s in G.states if ctx.holds(spec.predicate, s))
        if initial not in good:
            return _empty_graph()
        edges: dict[tuple, int] = {}
        for s in good:
            for action in G.joint_actions():
                dist = G.transitions.get((s, action))
                if not dist:
                    continue
                for succ, _ in dist.items():
                    if succ in good:
                        edges[(s, succ)] = edges.get((s, succ), 0) + 1
        nodes = tuple(s for s in G.states if s in good)
        return LabeledMultigraph(nodes, initial, frozenset(nodes), edges)
    if isinstance(spec, BoundedRecurrence):
        holds = {s: ctx.holds(spec.predicate, s) for s in G.states}
        w = spec.window
        start = (initial, w - 1)
        frontier = [start]
        seen = {start}
        edges = {}
        while frontier:
            node = frontier.pop()
            s, counter = node
            for action in G.joint_actions():
                dist = G.transitions.get((s, action))
                if not dist:
                    continue
                for succ in dist:
                    if holds[succ]:
                        nxt = (succ, w - 1)
                    elif counter > 0:
                        nxt = (succ, counter - 1)
                    else:
                        continue  # window expired
                    edges[(node, nxt)] = edges.get((node, nxt), 0) + 1
                    if nxt not in seen:
                        seen.add(nxt)
                        frontier.append(nxt)
        state_order = {s: i for i, s in enumerate(G.states)}
        nodes = tuple(sorted(seen, key=lambda sc: (state_order[sc[0]], -sc[1])))
        return LabeledMultigraph(nodes, start, frozenset(nodes), edges)
    raise TypeError(f"unknown monitor spec {spec!r}")


def trim(g: LabeledMultigraph) -> LabeledMultigraph:
    """Restrict to nodes reachable from the initial node and co-reachable to
    an accepting node.  Idempotent; may return the empty graph."""
    if g.is_empty() or g.initial is None:
        return _empty_graph()
    forward: dict = {}
    backward: dict = {}
    for (u, v), k in g.edge_count.items():
        if k > 0:
            forward.setdefault(u, []).append(v)
            backward.setdefault(v, []).append(u)
    reachable = {g.initial}
    stack = [g.initial]
    while stack:
        for v in forward.get(stack.pop(), []):
            if v not in reachable:
                reachable.add(v)
                stack.append(v)
    coreach = set(g.accepting)
    stack = list(g.accepting)
    while stack:
        for u in backward.get(stack.pop(), []):
            if u not in coreach:
                coreach.add(u)
                stack.append(u)
    keep = reachable & coreach
    if g.initial not in keep:
        return _empty_graph()
    nodes = tuple(n for n in g.nodes if n in keep)
    edges = {
        (u, v): k for (u, v), k in g.edge_count.items() if u in keep and v in keep and k > 0
    }
    return LabeledMultigraph(nodes, g.initial, frozenset(g.accepting & keep), edges)


def _radius_by_squaring(matrix: np.ndarray) -> float:
    """Deterministic fallback: log of the max-entry norm of repeated squares.

    Converges for every non-negative matrix, including nilpotent and
    defective ones where plain power iteration stalls.
    """
    b = matrix.astype(float)
    top = float(b.max())
    if top == 0.0:
        return 0.0
    b = b / top
    log_norm = math.log(top)  # log of max entry of matrix^(2^j), j = 0
    for _ in range(60):
        b = b @ b
        s = float(b.max())
        if s == 0.0:
            return 0.0  # nilpotent
        b = b / s
        log_norm = 2.0 * log_norm + math.log(s)
    return math.exp(log_norm / 2.0**60)


def spectral_radius(matrix, tol: float = 1e-10, max_iterations: int = 10**6) -> float:
    """Spectral radius of a non-negative matrix.

    Power iteration runs on the shifted matrix M + I (the shift removes
    periodicity) with Rayleigh-quotient stabilisation; a residual check
    guards against defective dominant eigenvalues, falling back to a
    repeated-squaring norm estimate when the iteration cannot certify the
    requested tolerance.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise EvaluationError("spectral radius needs a square matrix")
    if m.size == 0:
        return 0.0
    if (m < 0).any():
        raise EvaluationError("matrix entries must be non-negative")
    if not np.isfinite(m).all():
        raise ConvergenceError("matrix has non-finite entries", 0)
    n = m.shape[0]
    shifted = m + np.eye(n)
    x = np.ones(n) / math.sqrt(n)
    # Residuals understate eigenvalue error on non-normal matrices; demand a
    # margin below the advertised tolerance before trusting the iteration.
    threshold = tol * 1e-2
    iteration_cap = min(max_iterations, 20_000)
    for _ in range(iteration_cap):
        y = shifted @ x
        rq = float(x @ y)
        residual = float(np.abs(y - rq * x).max())
        if residual <= threshold * max(1.0, rq):
            return rq - 1.0
        norm = float(np.linalg.norm(y))
        if norm == 0.0 or not math.isfinite(norm):
            break
        x = y / norm
    return _radius_by_squaring(m)


def asymptotic_entropy(g: LabeledMultigraph) -> float:
    """log2 of the spectral radius of the trimmed graph's matrix.

    Zero for empty graphs and for graphs whose language is finite (spectral
    radius below 1).
    """
    t = trim(g)
    if t.is_empty():
        return 0.0
    radius = spectral_radius(t.matrix())
    if radius <= 1.0:
        return 0.0
    return math.log2(radius)


def path_count(g: LabeledMultigraph, n: int) -> int:
    """Number of accepted length-``n`` words, by exact matrix powering."""
    t = trim(g)
    if t.is_empty():
        return 0
    index = {node: i for i, node in enumerate(t.nodes)}
    m = t.int_matrix()
    size = len(t.nodes)

    def matmul(a, b):
        return [
            [sum(a[i][k] * b[k][j] for k in range(size)) for j in range(size)]
            for i in range(size)
        ]

    result = [[1 if i == j else 0 for j in range(size)] for i in range(size)]
    base = m
    power = n
    while power:
        if power & 1:
            result = matmul(result, base)
        base = matmul(base, base)
        power >>= 1
    row = result[index[t.initial]]
    return sum(row[index[a]] for a in t.accepting)


def load_dfa(path: str | Path) -> LabeledMultigraph:
    """Parse an explicit multigraph file.

    Lines: ``node NAME [init] [accept]`` and ``edge SRC DST : MULTIPLICITY``;
    ``#`` starts a comment.
    """
    nodes: list[str] = []
    initial: str | None = None
    accepting: set[str] = set()
    edges: dict[tuple, int] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "node":
            if len(parts) < 2:
                raise ModelFormatError("expected `node NAME [init] [accept]`", lineno)
            name = parts[1]
            if name in nodes:
                raise ModelFormatError(f"node {name!r} declared twice", lineno)
            nodes.append(name)
            for flag in parts[2:]:
                if flag == "init":
                    initial = name
                elif flag == "accept":
                    accepting.add(name)
                else:
                    raise ModelFormatError(f"unknown node flag {flag!r}", lineno)
        elif parts[0] == "edge":
            if len(parts) != 5 or parts[3] != ":":
                raise ModelFormatError("expected `edge SRC DST : K`", lineno)
            src, dst, mult = parts[1], parts[2], parts[4]
            if src not in nodes or dst not in nodes:
                raise ModelFormatError("edge endpoints must be declared first", lineno)
            try:
                k = int(mult)
            except ValueError:
                raise ModelFormatError(f"bad multiplicity {mult!r}", lineno) from None
            if k < 0:
                raise ModelFormatError("multiplicity must be non-negative", lineno)
            edges[(src, dst)] = edges.get((src, dst), 0) + k
        else:
            raise ModelFormatError(f"unknown directive {parts[0]!r}", lineno)
    if initial is None:
        raise ModelFormatError("no node marked `init`")
    if not accepting:
        raise ModelFormatError("no node marked `accept`")
    return LabeledMultigraph(tuple(nodes), initial, frozenset(accepting), edges)
