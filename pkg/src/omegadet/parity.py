"""Transition-based deterministic parity automata and lasso evaluation.

Acceptance is min-even over edge priorities: a run is accepting when the
smallest priority occurring infinitely often along its edges is even.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .nba import Lasso, UnknownSymbolError


class DpaFormatError(ValueError):
    """Malformed .dpa text.  Carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class MissingEdgeError(LookupError):
    """A reachable (state, symbol) pair has no outgoing edge."""


@dataclass(frozen=True)
class ParityAutomaton:
    """Deterministic automaton with per-edge priorities and one initial state.

    ``edges`` maps ``(state, symbol)`` to ``(target, priority)``.  ``labels``
    optionally annotate states with their canonical slice string.
    """

    num_states: int
    alphabet: tuple[str, ...]
    initial: int
    edges: dict[tuple[int, str], tuple[int, int]]
    labels: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.initial < self.num_states:
            raise DpaFormatError(f"initial state {self.initial} out of range")
        symbols = set(self.alphabet)
        for (src, sym), (dst, priority) in self.edges.items():
            if not (0 <= src < self.num_states and 0 <= dst < self.num_states):
                raise DpaFormatError(f"edge ({src},{sym}) -> {dst} references an invalid state")
            if sym not in symbols:
                raise DpaFormatError(f"edge ({src},{sym}) uses an unknown symbol")
            if priority < 1:
                raise DpaFormatError(f"priority {priority} on ({src},{sym}) must be >= 1")
        for state in self.labels:
            if not 0 <= state < self.num_states:
                raise DpaFormatError(f"label for invalid state {state}")

    def follow(self, state: int, symbol: str) -> tuple[int, int]:
        """Target state and priority of the unique outgoing edge."""
        if symbol not in self.alphabet:
            raise UnknownSymbolError(f"symbol {symbol!r} not in alphabet")
        try:
            return self.edges[(state, symbol)]
        except KeyError:
            raise MissingEdgeError(f"no edge from state {state} on {symbol!r}") from None


@dataclass(frozen=True)
class LassoRun:
    """Verdict of a lasso evaluation plus the recurring evidence.

    ``loop_states`` are the states observed at cycle boundaries of the
    repeating segment; ``min_priority`` is the smallest edge priority seen
    along that segment, and decides acceptance by parity.
    """

    accepted: bool
    loop_states: tuple[int, ...]
    min_priority: int


def run_lasso(dpa: ParityAutomaton, lasso: Lasso) -> LassoRun:
    """Evaluate an ultimately periodic word.

    Follows the stem, then iterates the cycle until the state at a cycle
    boundary repeats; the minimum priority over the repeating segment decides
    acceptance.  Terminates within ``num_states + 1`` cycle iterations.
    """
    state = dpa.initial
    for symbol in lasso.stem:
        state, _ = dpa.follow(state, symbol)
    first_seen: dict[int, int] = {}
    boundary_states: list[int] = []
    segment_minimums: list[int] = []
    while state not in first_seen:
        first_seen[state] = len(boundary_states)
        boundary_states.append(state)
        segment_min = None
        for symbol in lasso.cycle:
            state, priority = dpa.follow(state, symbol)
            segment_min = priority if segment_min is None else min(segment_min, priority)
        assert segment_min is not None
        segment_minimums.append(segment_min)
    start = first_seen[state]
    min_priority = min(segment_minimums[start:])
    return LassoRun(
        accepted=min_priority % 2 == 0,
        loop_states=tuple(boundary_states[start:]),
        min_priority=min_priority,
    )


def serialize_dpa(dpa: ParityAutomaton) -> bytes:
    """Canonical .dpa text: optional label lines, then edges sorted by (src, symbol index)."""
    index = {sym: i for i, sym in enumerate(dpa.alphabet)}
    lines = [
        "dpa",
        f"states {dpa.num_states}",
        " ".join(["alphabet", *dpa.alphabet]).rstrip(),
        f"init {dpa.initial}",
    ]
    for state in sorted(dpa.labels):
        lines.append(f"label {state} {dpa.labels[state]}")
    for (src, sym), (dst, priority) in sorted(dpa.edges.items(), key=lambda e: (e[0][0], index[e[0][1]])):
        lines.append(f"{src} {sym} {dst} {priority}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_dpa(data: bytes | str) -> ParityAutomaton:
    """Parse the .dpa text format (see :func:`serialize_dpa` for the layout)."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    items: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            items.append((lineno, line.split()))

    if not items or items[0][1] != ["dpa"]:
        line = items[0][0] if items else 1
        raise DpaFormatError("expected 'dpa' header", line)
    items = items[1:]

    def parse_int(token: str, lineno: int) -> int:
        try:
            return int(token)
        except ValueError:
            raise DpaFormatError(f"expected an integer, found {token!r}", lineno) from None

    if not items or items[0][1][0] != "states" or len(items[0][1]) != 2:
        raise DpaFormatError("expected 'states <n>' line", items[0][0] if items else 1)
    lineno, tokens = items.pop(0)
    num_states = parse_int(tokens[1], lineno)
    if num_states < 1:
        raise DpaFormatError("a parity automaton needs at least one state", lineno)

    if not items or items[0][1][0] != "alphabet":
        raise DpaFormatError("expected 'alphabet' line", items[0][0] if items else 1)
    lineno, tokens = items.pop(0)
    alphabet = tuple(tokens[1:])
    if len(set(alphabet)) != len(alphabet):
        raise DpaFormatError("duplicate alphabet token", lineno)

    def parse_state(token: str, lineno: int) -> int:
        q = parse_int(token, lineno)
        if not 0 <= q < num_states:
            raise DpaFormatError(f"state {q} out of range for {num_states} states", lineno)
        return q

    if not items or items[0][1][0] != "init" or len(items[0][1]) != 2:
        raise DpaFormatError("expected 'init <id>' line", items[0][0] if items else 1)
    lineno, tokens = items.pop(0)
    initial = parse_state(tokens[1], lineno)

    labels: dict[int, str] = {}
    while items and items[0][1][0] == "label":
        lineno, tokens = items.pop(0)
        if len(tokens) != 3:
            raise DpaFormatError("label line must be 'label <id> <slice>'", lineno)
        state = parse_state(tokens[1], lineno)
        if state in labels:
            raise DpaFormatError(f"duplicate label for state {state}", lineno)
        labels[state] = tokens[2]

    symbols = set(alphabet)
    edges: dict[tuple[int, str], tuple[int, int]] = {}
    for lineno, tokens in items:
        if len(tokens) != 4:
            raise DpaFormatError("edge line must be '<src> <symbol> <dst> <priority>'", lineno)
        src = parse_state(tokens[0], lineno)
        if tokens[1] not in symbols:
            raise DpaFormatError(f"unknown symbol {tokens[1]!r}", lineno)
        dst = parse_state(tokens[2], lineno)
        priority = parse_int(tokens[3], lineno)
        if priority < 1:
            raise DpaFormatError(f"priority must be >= 1, found {priority}", lineno)
        if (src, tokens[1]) in edges:
            raise DpaFormatError(f"duplicate edge from {src} on {tokens[1]!r}", lineno)
        edges[(src, tokens[1])] = (dst, priority)

    return ParityAutomaton(
        num_states=num_states,
        alphabet=alphabet,
        initial=initial,
        edges=edges,
        labels=labels,
    )


def compact_priorities(dpa: ParityAutomaton) -> ParityAutomaton:
    """Optional post-pass: remap priorities onto small consecutive values.

    The mapping is strictly increasing and parity-preserving, so the minimum
    parity over any cycle is unchanged.  Off the main pipeline by default.
    """
    used = sorted({priority for _, priority in dpa.edges.values()})
    mapping: dict[int, int] = {}
    previous = 0
    for priority in used:
        candidate = previous + 1
        if candidate % 2 != priority % 2:
            candidate += 1
        mapping[priority] = candidate
        previous = candidate
    edges = {key: (dst, mapping[priority]) for key, (dst, priority) in dpa.edges.items()}
    return ParityAutomaton(
        num_states=dpa.num_states,
        alphabet=dpa.alphabet,
        initial=dpa.initial,
        edges=edges,
        labels=dict(dpa.labels),
    )
