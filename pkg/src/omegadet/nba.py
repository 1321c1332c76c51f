"""Nondeterministic Büchi automata: representation, successor sets, text format.

States are dense integer ids ``0 .. num_states-1``; alphabet symbols are
arbitrary whitespace-free tokens.  All values are immutable after construction
and every operation is a pure function, so automata are safe to share across
threads.
"""
from __future__ import annotations

from dataclasses import dataclass


class NbaFormatError(ValueError):
    """Malformed .nba text.  Carries the offending 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnknownSymbolError(ValueError):
    """A symbol outside the alphabet of the automaton in use."""


class InvalidAutomatonError(ValueError):
    """Structural invariant of an automaton is violated."""


class LassoFormatError(ValueError):
    """Malformed lasso text (expected ``stem | cycle`` token syntax)."""


def _check_token(token: str) -> str:
    if not token or any(c.isspace() for c in token):
        raise InvalidAutomatonError(f"bad symbol token {token!r}: must be non-empty, no whitespace")
    return token


@dataclass(frozen=True)
class BuchiAutomaton:
    """NBA as a tuple of state count, ordered alphabet, transitions, initial and accepting sets."""

    num_states: int
    alphabet: tuple[str, ...]
    transitions: frozenset[tuple[int, str, int]]
    initial: frozenset[int]
    accepting: frozenset[int]

    def __post_init__(self):
        if self.num_states < 0:
            raise InvalidAutomatonError("num_states must be non-negative")
        for token in self.alphabet:
            _check_token(token)
        if len(set(self.alphabet)) != len(self.alphabet):
            raise InvalidAutomatonError("alphabet tokens must be pairwise distinct")
        symbols = set(self.alphabet)
        for src, sym, dst in self.transitions:
            if not (0 <= src < self.num_states and 0 <= dst < self.num_states):
                raise InvalidAutomatonError(f"transition ({src},{sym},{dst}) references an invalid state")
            if sym not in symbols:
                raise InvalidAutomatonError(f"transition ({src},{sym},{dst}) uses an unknown symbol")
        if not self.initial:
            raise InvalidAutomatonError("initial state set must be non-empty")
        for group, name in ((self.initial, "initial"), (self.accepting, "accepting")):
            for q in group:
                if not 0 <= q < self.num_states:
                    raise InvalidAutomatonError(f"{name} state {q} out of range")
        delta: dict[tuple[int, str], set[int]] = {}
        for src, sym, dst in self.transitions:
            delta.setdefault((src, sym), set()).add(dst)
        object.__setattr__(self, "_delta", {k: frozenset(v) for k, v in delta.items()})

    def successors_of(self, state: int, symbol: str) -> frozenset[int]:
        """Successor states of a single state on one symbol."""
        if symbol not in self.alphabet:
            raise UnknownSymbolError(f"symbol {symbol!r} not in alphabet")
        return self._delta.get((state, symbol), frozenset())  # type: ignore[attr-defined]


@dataclass(frozen=True)
class Lasso:
    """Ultimately periodic word ``stem . cycle^ω`` given by two finite symbol sequences."""

    stem: tuple[str, ...]
    cycle: tuple[str, ...]

    def __post_init__(self):
        if len(self.cycle) < 1:
            raise LassoFormatError("lasso cycle must contain at least one symbol")
        for token in self.stem + self.cycle:
            if not token or any(c.isspace() for c in token):
                raise LassoFormatError(f"bad lasso token {token!r}")

    def symbol_at(self, i: int) -> str:
        """Symbol consumed at time ``i`` of the infinite word."""
        if i < len(self.stem):
            return self.stem[i]
        return self.cycle[(i - len(self.stem)) % len(self.cycle)]


def successors(aut: BuchiAutomaton, source_set: frozenset[int] | set[int], symbol: str) -> frozenset[int]:
    """States reachable from any member of ``source_set`` on ``symbol``."""
    if symbol not in aut.alphabet:
        raise UnknownSymbolError(f"symbol {symbol!r} not in alphabet")
    out: set[int] = set()
    for q in source_set:
        if not 0 <= q < aut.num_states:
            raise InvalidAutomatonError(f"source state {q} out of range")
        out |= aut.successors_of(q, symbol)
    return frozenset(out)


def run_set(aut: BuchiAutomaton, source_set: frozenset[int], word: tuple[str, ...]) -> frozenset[int]:
    """States reachable from ``source_set`` after reading a finite word."""
    current = frozenset(source_set)
    for symbol in word:
        current = successors(aut, current, symbol)
    return current


def parse_nba(data: bytes | str) -> BuchiAutomaton:
    """Parse the .nba text format.

    Line 1 is the literal ``nba`` header, then ``states <n>``,
    ``alphabet <tok> ...``, ``init <id> ...``, ``accept <id> ...``, then zero
    or more ``<src> <symbol> <dst>`` transition lines.  ``#`` starts a comment
    and blank lines are ignored.
    """
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    items: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            items.append((lineno, line.split()))

    if not items or items[0][1] != ["nba"]:
        line = items[0][0] if items else 1
        raise NbaFormatError("expected 'nba' header", line)
    items = items[1:]

    def take(keyword: str, min_args: int) -> tuple[int, list[str]]:
        if not items:
            raise NbaFormatError(f"missing '{keyword}' line")
        lineno, tokens = items.pop(0)
        if tokens[0] != keyword:
            raise NbaFormatError(f"expected '{keyword}' line, found {tokens[0]!r}", lineno)
        if len(tokens) - 1 < min_args:
            raise NbaFormatError(f"'{keyword}' needs at least {min_args} argument(s)", lineno)
        return lineno, tokens[1:]

    def parse_int(token: str, lineno: int) -> int:
        try:
            value = int(token)
        except ValueError:
            raise NbaFormatError(f"expected an integer, found {token!r}", lineno) from None
        return value

    lineno, args = take("states", 1)
    num_states = parse_int(args[0], lineno)
    if num_states < 0 or len(args) != 1:
        raise NbaFormatError("'states' takes one non-negative count", lineno)

    lineno, alphabet = take("alphabet", 0)
    if len(set(alphabet)) != len(alphabet):
        raise NbaFormatError("duplicate alphabet token", lineno)
    symbol_set = set(alphabet)

    def parse_state(token: str, lineno: int) -> int:
        q = parse_int(token, lineno)
        if not 0 <= q < num_states:
            raise NbaFormatError(f"state {q} out of range for {num_states} states", lineno)
        return q

    lineno, args = take("init", 1)
    initial = frozenset(parse_state(t, lineno) for t in args)
    lineno, args = take("accept", 0)
    accepting = frozenset(parse_state(t, lineno) for t in args)

    transitions: set[tuple[int, str, int]] = set()
    for lineno, tokens in items:
        if len(tokens) != 3:
            raise NbaFormatError("transition line must be '<src> <symbol> <dst>'", lineno)
        src = parse_state(tokens[0], lineno)
        if tokens[1] not in symbol_set:
            raise NbaFormatError(f"unknown symbol {tokens[1]!r}", lineno)
        dst = parse_state(tokens[2], lineno)
        transitions.add((src, tokens[1], dst))

    return BuchiAutomaton(
        num_states=num_states,
        alphabet=tuple(alphabet),
        transitions=frozenset(transitions),
        initial=initial,
        accepting=accepting,
    )


def serialize_nba(aut: BuchiAutomaton) -> bytes:
    """Canonical .nba text: transitions sorted by (source, symbol index, target)."""
    index = {sym: i for i, sym in enumerate(aut.alphabet)}
    lines = [
        "nba",
        f"states {aut.num_states}",
        " ".join(["alphabet", *aut.alphabet]).rstrip(),
        " ".join(["init", *map(str, sorted(aut.initial))]),
        " ".join(["accept", *map(str, sorted(aut.accepting))]).rstrip(),
    ]
    for src, sym, dst in sorted(aut.transitions, key=lambda t: (t[0], index[t[1]], t[2])):
        lines.append(f"{src} {sym} {dst}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_lasso(text: str) -> Lasso:
    """Parse ``stem | cycle`` lasso syntax, e.g. ``a a | b a`` or ``| a``."""
    if text.count("|") != 1:
        raise LassoFormatError("lasso text must contain exactly one '|'")
    stem_text, cycle_text = text.split("|")
    cycle = tuple(cycle_text.split())
    if not cycle:
        raise LassoFormatError("lasso cycle must contain at least one symbol")
    return Lasso(stem=tuple(stem_text.split()), cycle=cycle)


def format_lasso(lasso: Lasso) -> str:
    """Inverse of :func:`parse_lasso`; empty stems render as ``| ...``."""
    return (" ".join(lasso.stem) + " | " + " ".join(lasso.cycle)).strip()
