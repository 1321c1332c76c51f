"""Ground-truth lasso membership, lasso enumeration, and split-tree levels.

The membership decision works on the product of automaton states with cycle
positions: a lasso is accepted exactly when some product node holding an
accepting state lies on a cycle reachable after the stem.  A second,
independently coded decision procedure based on boundary-relation powers
backs the first one in the tests.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from itertools import product

from .nba import BuchiAutomaton, Lasso, successors


@dataclass(frozen=True)
class LassoVerdict:
    """Membership decision plus, when accepting, an ultimately periodic witness run.

    ``prefix_states`` covers run times ``0..T`` and ``loop_states`` times
    ``T..T+L`` with ``loop_states[0] == prefix_states[-1]`` and
    ``loop_states[-1] == loop_states[0]``; the loop visits an accepting state
    and its length is a multiple of the cycle length.
    """

    accepted: bool
    prefix_states: tuple[int, ...] | None = None
    loop_states: tuple[int, ...] | None = None

    def run_prefix(self, n: int) -> tuple[int, ...]:
        """First ``n`` states of the witness run."""
        if not self.accepted or self.prefix_states is None or self.loop_states is None:
            raise ValueError("no witness run on a rejecting verdict")
        states = list(self.prefix_states)
        while len(states) < n:
            states.extend(self.loop_states[1:])
        return tuple(states[:n])


def _stem_layers(aut: BuchiAutomaton, stem: tuple[str, ...]) -> list[frozenset[int]]:
    layers = [frozenset(aut.initial)]
    for symbol in stem:
        layers.append(successors(aut, layers[-1], symbol))
    return layers


def _product_edges(aut: BuchiAutomaton, cycle: tuple[str, ...], node: tuple[int, int]):
    q, j = node
    for target in sorted(aut.successors_of(q, cycle[j])):
        yield (target, (j + 1) % len(cycle))


def nba_accepts_lasso(aut: BuchiAutomaton, lasso: Lasso) -> LassoVerdict:
    """Decide membership of ``stem . cycle^ω`` and recover a witness run if accepted."""
    layers = _stem_layers(aut, lasso.stem)
    starts = sorted((q, 0) for q in layers[-1])
    # Forward reachability over (state, cycle position) with parent pointers.
    parents: dict[tuple[int, int], tuple[int, int] | None] = {node: None for node in starts}
    frontier = deque(starts)
    while frontier:
        node = frontier.popleft()
        for succ in _product_edges(aut, lasso.cycle, node):
            if succ not in parents:
                parents[succ] = node
                frontier.append(succ)

    anchor = None
    loop_nodes: list[tuple[int, int]] | None = None
    for candidate in sorted(n for n in parents if n[0] in aut.accepting):
        loop_nodes = _shortest_cycle(aut, lasso.cycle, candidate)
        if loop_nodes is not None:
            anchor = candidate
            break
    if anchor is None or loop_nodes is None:
        return LassoVerdict(accepted=False)

    # Product path from a post-stem start node to the anchor, then the stem run.
    path_nodes = [anchor]
    while parents[path_nodes[0]] is not None:
        path_nodes.insert(0, parents[path_nodes[0]])  # type: ignore[arg-type]
    stem_run = _stem_run(aut, lasso.stem, layers, path_nodes[0][0])
    prefix = tuple(stem_run) + tuple(q for q, _ in path_nodes[1:])
    loop = tuple(q for q, _ in loop_nodes)
    return LassoVerdict(accepted=True, prefix_states=prefix, loop_states=loop)


def _shortest_cycle(
    aut: BuchiAutomaton, cycle: tuple[str, ...], node: tuple[int, int]
) -> list[tuple[int, int]] | None:
    """Shortest non-empty product path from ``node`` back to itself, or None."""
    parents: dict[tuple[int, int], tuple[int, int]] = {}
    frontier: deque[tuple[int, int]] = deque([node])
    while frontier:
        current = frontier.popleft()
        for succ in _product_edges(aut, cycle, current):
            if succ == node:
                path = [current]
                while path[0] != node:
                    path.insert(0, parents[path[0]])
                return path + [node]
            if succ not in parents:
                parents[succ] = current
                frontier.append(succ)
    return None


def _stem_run(
    aut: BuchiAutomaton,
    stem: tuple[str, ...],
    layers: list[frozenset[int]],
    target: int,
) -> list[int]:
    """A concrete run over the stem ending in ``target``, rebuilt backwards."""
    run = [target]
    for i in range(len(stem), 0, -1):
        current = run[0]
        for candidate in sorted(layers[i - 1]):
            if current in aut.successors_of(candidate, stem[i - 1]):
                run.insert(0, candidate)
                break
        else:  # pragma: no cover - layers guarantee a predecessor
            raise AssertionError("stem layer without predecessor")
    return run


def nba_accepts_lasso_by_powers(aut: BuchiAutomaton, lasso: Lasso) -> bool:
    """Independent decision procedure: powers of the one-cycle boundary relation.

    Builds the relation "some run over one full cycle goes from p to q,
    visiting an accepting state or not", composes it up to the pigeonhole
    bound, and looks for an accepting self-loop reachable from the post-stem
    states.
    """
    start_states = _stem_layers(aut, lasso.stem)[-1]
    base: dict[int, dict[int, bool]] = {p: {} for p in range(aut.num_states)}
    for p in range(aut.num_states):
        # Pairs (state, accepting seen at segment times 0..t-1) after t symbols.
        current = {(p, False)}
        for symbol in lasso.cycle:
            current = {
                (target, flag or q in aut.accepting)
                for q, flag in current
                for target in aut.successors_of(q, symbol)
            }
        for q, flag in current:
            base[p][q] = base[p].get(q, False) or flag

    reach = set(start_states)
    frontier = set(start_states)
    while frontier:
        frontier = {q for p in frontier for q in base[p]} - reach
        reach |= frontier

    # A flagged self-loop, if any exists, shows up within 2 * num_states powers.
    power = base
    for _ in range(2 * aut.num_states):
        if any(power[q].get(q, False) for q in reach):
            return True
        power = _compose(base, power)
    return False


def _compose(
    left: dict[int, dict[int, bool]], right: dict[int, dict[int, bool]]
) -> dict[int, dict[int, bool]]:
    out: dict[int, dict[int, bool]] = {p: {} for p in left}
    for p, mids in left.items():
        row = out[p]
        for mid, flag1 in mids.items():
            for q, flag2 in right[mid].items():
                row[q] = row.get(q, False) or flag1 or flag2
    return out


def enumerate_lassos(alphabet: tuple[str, ...], max_stem: int, max_cycle: int):
    """All lassos with bounded stem and cycle lengths, in length-lexicographic order.

    Stems of length ``0..max_stem`` in length-then-alphabet order, and for
    each stem all cycles of length ``1..max_cycle`` in the same order.
    """
    if max_cycle < 1:
        raise ValueError("max_cycle must be at least 1")
    stems = [
        stem
        for length in range(max_stem + 1)
        for stem in product(alphabet, repeat=length)
    ]
    cycles = [
        cycle
        for length in range(1, max_cycle + 1)
        for cycle in product(alphabet, repeat=length)
    ]
    for stem in stems:
        for cycle in cycles:
            yield Lasso(stem=stem, cycle=cycle)


def sample_lassos(alphabet: tuple[str, ...], count: int, max_stem: int, max_cycle: int, seed: int):
    """Reproducible random lassos within the given bounds."""
    if max_cycle < 1:
        raise ValueError("max_cycle must be at least 1")
    rng = random.Random(seed)
    for _ in range(count):
        stem_len = rng.randint(0, max_stem)
        cycle_len = rng.randint(1, max_cycle)
        yield Lasso(
            stem=tuple(rng.choice(alphabet) for _ in range(stem_len)),
            cycle=tuple(rng.choice(alphabet) for _ in range(cycle_len)),
        )


def split_tree_levels(
    aut: BuchiAutomaton, prefix: tuple[str, ...]
) -> tuple[tuple[frozenset[int], ...], ...]:
    """Levels of the reduced split tree along a finite prefix.

    Level 0 holds the initial set; each later level splits every set into its
    accepting successors followed by the non-accepting ones, keeps only the
    leftmost occurrence of each state, and drops empty sets.
    """
    level: tuple[frozenset[int], ...] = (frozenset(aut.initial),)
    levels = [level]
    for symbol in prefix:
        raw: list[frozenset[int]] = []
        for block in level:
            block_successors = successors(aut, block, symbol)
            raw.append(block_successors & aut.accepting)
            raw.append(block_successors - aut.accepting)
        claimed: set[int] = set()
        next_level: list[frozenset[int]] = []
        for block in raw:
            kept = block - claimed
            claimed |= block
            if kept:
                next_level.append(kept)
        level = tuple(next_level)
        levels.append(level)
    return tuple(levels)


def random_nba(
    num_states: int,
    alphabet: tuple[str, ...],
    density: float,
    accepting_fraction: float,
    seed: int,
) -> BuchiAutomaton:
    """Seed-reproducible random automaton; state 0 is the single initial state.

    Every potential transition is included with probability ``density`` and
    every state is accepting with probability ``accepting_fraction``.
    """
    rng = random.Random(seed)
    transitions: set[tuple[int, str, int]] = set()
    for src in range(num_states):
        for symbol in alphabet:
            for dst in range(num_states):
                if rng.random() < density:
                    transitions.add((src, symbol, dst))
    accepting = frozenset(q for q in range(num_states) if rng.random() < accepting_fraction)
    return BuchiAutomaton(
        num_states=num_states,
        alphabet=alphabet,
        transitions=frozenset(transitions),
        initial=frozenset({0}),
        accepting=accepting,
    )
