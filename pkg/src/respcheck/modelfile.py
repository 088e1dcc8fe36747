"""Line-oriented text format for game structures.

Grammar (UTF-8, ``#`` starts a comment, blank lines ignored)::

    agents A1 A2
    actions c d
    props cooperative1 cooperative2
    state s0 {}
    state s1 {cooperative1 cooperative2}
    trans s0 (d,d) -> s0 : 1
    profile A1 {c: 3/4, d: 1/4}

Joint actions are parenthesised per-agent tuples in ``agents`` declaration
order.  Probabilities are rationals (``p/q`` or an integer).  Agents without
a ``profile`` line default to the uniform distribution over the actions.
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

from .errors import ModelFormatError
from .model import GameStructure, JointAction

__all__ = ["load_model", "parse_model"]

_PROFILE_RE = re.compile(r"^(\S+)\s*\{(.*)\}$")
_TRANS_RE = re.compile(r"^(\S+)\s*\(([^)]*)\)\s*->\s*(\S+)\s*:\s*(\S+)$")
_STATE_RE = re.compile(r"^(\S+)\s*\{([^}]*)\}$")


def _rational(text: str, line: int) -> Fraction:
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError):
        raise ModelFormatError(f"bad rational {text!r}", line) from None


def parse_model(text: str) -> GameStructure:
    """Parse model text into a validated :class:`GameStructure`."""
    agents: list[str] = []
    actions: list[str] = []
    props: list[str] = []
    states: list[str] = []
    labeling: dict[str, frozenset[str]] = {}
    transitions: dict[tuple[str, JointAction], dict[str, Fraction]] = {}
    profile: dict[str, dict[str, Fraction]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if keyword == "agents":
            agents = rest.split()
        elif keyword == "actions":
            actions = rest.split()
        elif keyword == "props":
            props = rest.split()
        elif keyword == "state":
            m = _STATE_RE.match(rest)
            if not m:
                raise ModelFormatError("expected `state NAME {prop ...}`", lineno)
            name, body = m.group(1), m.group(2)
            if name in labeling:
                raise ModelFormatError(f"state {name!r} declared twice", lineno)
            states.append(name)
            labeling[name] = frozenset(body.split())
        elif keyword == "trans":
            m = _TRANS_RE.match(rest)
            if not m:
                raise ModelFormatError(
                    "expected `trans STATE (a,b) -> STATE : p`", lineno
                )
            src, tup, dst, prob = m.groups()
            parts = tuple(p.strip() for p in tup.split(","))
            if len(parts) != len(agents):
                raise ModelFormatError(
                    f"joint action has {len(parts)} components for {len(agents)} agents",
                    lineno,
                )
            for part in parts:
                if part not in actions:
                    raise ModelFormatError(f"undeclared action {part!r}", lineno)
            action = JointAction(parts)
            dist = transitions.setdefault((src, action), {})
            if dst in dist:
                raise ModelFormatError(
                    f"duplicate successor {dst!r} for ({src}, {action})", lineno
                )
            dist[dst] = _rational(prob, lineno)
        elif keyword == "profile":
            m = _PROFILE_RE.match(rest)
            if not m:
                raise ModelFormatError("expected `profile AGENT {a: p, b: q}`", lineno)
            agent, body = m.group(1), m.group(2)
            dist: dict[str, Fraction] = {}
            for item in body.split(","):
                item = item.strip()
                if not item:
                    continue
                if ":" not in item:
                    raise ModelFormatError(f"expected `action: p` in {item!r}", lineno)
                act, p = (x.strip() for x in item.split(":", 1))
                dist[act] = _rational(p, lineno)
            profile[agent] = dist
        else:
            raise ModelFormatError(f"unknown directive {keyword!r}", lineno)

    if not agents:
        raise ModelFormatError("missing `agents` declaration")
    if not actions:
        raise ModelFormatError("missing `actions` declaration")
    uniform = {a: Fraction(1, len(actions)) for a in actions}
    full_profile = {agent: dict(profile.get(agent, uniform)) for agent in agents}
    return GameStructure(
        agents=tuple(agents),
        states=tuple(states),
        actions=tuple(actions),
        transitions={k: dict(v) for k, v in transitions.items()},
        propositions=frozenset(props),
        labeling=labeling,
        profile=full_profile,
    )


def load_model(path: str | Path) -> GameStructure:
    """Load and validate a model file."""
    return parse_model(Path(path).read_text(encoding="utf-8"))
