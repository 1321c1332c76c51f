"""The macrostate transition pipeline and parity automaton construction.

A transition from one ranked slice to the next runs four stages:

* ``step`` computes restricted successors per set and splits accepting states
  (left child, fresh rank) from non-accepting ones (right child, inherited
  rank).  Fresh ranks are pairwise distinct, assigned left to right.
* ``prune`` drops empty sets, relocating each surviving position's rank to the
  minimum over its block of trailing empties; ranks stranded before the first
  non-empty set die.  Surviving ranks that marked an empty set are green,
  ranks that did not survive are red.
* ``merge`` may union adjacent sets, constrained by the dominating rank: sets
  ranked below it stay singletons and the set holding it ends its interval.
  The choice of interval partition is the pluggable merge strategy.
* ``normalize`` compacts the distinct surviving ranks onto ``1..n`` while
  preserving their order.

The edge priority is ``2k`` when the dominating rank ``k`` (the minimum green
or red rank) is green and ``2k - 1`` otherwise; when no rank is active it is
``2(|Q|+1) - 1``.  If every set dies the successor is the unique empty sink
slice, entered and left with priority 1.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

from .nba import BuchiAutomaton, UnknownSymbolError, successors
from .parity import ParityAutomaton
from .slices import PreSlice, RankedSlice, format_slice, index_of
from .safra import unflatten


class CapacityError(RuntimeError):
    """The configured macrostate cap was exceeded during exploration."""


class InternalInvariantError(RuntimeError):
    """A pipeline-internal invariant failed; indicates a bug or bad input."""


_KINDS = ("ms", "safra", "max", "adaptive")


@dataclass(frozen=True)
class MergeStrategy:
    """Merge-stage policy: identity, green-subtree collapse, coarsest, or successor reuse.

    ``fallback`` names the policy an adaptive strategy applies when no already
    explored successor is reachable within ``partition_cap`` candidates.
    """

    kind: str
    fallback: str | None = None
    partition_cap: int = 4096

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.kind == "adaptive":
            if self.fallback not in ("ms", "safra", "max"):
                raise ValueError("adaptive strategies need a non-adaptive fallback")
        elif self.fallback is not None:
            raise ValueError("only adaptive strategies take a fallback")


MULLER_SCHUPP = MergeStrategy("ms")
SAFRA = MergeStrategy("safra")
MAX_COLLAPSE = MergeStrategy("max")
ADAPTIVE = MergeStrategy("adaptive", fallback="max")

STRATEGIES: dict[str, MergeStrategy] = {
    "ms": MULLER_SCHUPP,
    "safra": SAFRA,
    "max": MAX_COLLAPSE,
    "adaptive": ADAPTIVE,
}


def as_strategy(value: MergeStrategy | str) -> MergeStrategy:
    """Coerce a CLI token (``ms``/``safra``/``max``/``adaptive``) to a strategy."""
    if isinstance(value, MergeStrategy):
        return value
    try:
        return STRATEGIES[value]
    except KeyError:
        raise ValueError(f"unknown strategy {value!r}") from None


Interval = tuple[int, int]
IntervalPartition = tuple[Interval, ...]


@dataclass(frozen=True)
class TransitionOutcome:
    """Successor slice plus the priority-relevant event data of one transition."""

    successor: RankedSlice
    priority: int
    green: frozenset[int]
    red: frozenset[int]
    dominating: int


@dataclass(frozen=True)
class TransitionTrace:
    """Every intermediate stage of one transition, for diagnostics and checks."""

    source: RankedSlice
    symbol: str
    stepped: PreSlice
    pruned: PreSlice
    green: frozenset[int]
    red: frozenset[int]
    dominating: int
    priority: int
    partition: IntervalPartition
    merged: PreSlice
    successor: RankedSlice

    @property
    def outcome(self) -> TransitionOutcome:
        return TransitionOutcome(
            successor=self.successor,
            priority=self.priority,
            green=self.green,
            red=self.red,
            dominating=self.dominating,
        )


def restricted_successors(aut: BuchiAutomaton, slice_: RankedSlice, q: int, symbol: str) -> frozenset[int]:
    """Successors of ``q`` minus successors of all states in strictly earlier positions."""
    pos = index_of(slice_, q)
    stolen: set[int] = set()
    for block in slice_.sets[: pos - 1]:
        stolen |= successors(aut, block, symbol)
    return aut.successors_of(q, symbol) - stolen


def step(aut: BuchiAutomaton, slice_: RankedSlice, symbol: str) -> PreSlice:
    """Advance one split-tree level: per position, accepting then non-accepting successors."""
    if symbol not in aut.alphabet:
        raise UnknownSymbolError(f"symbol {symbol!r} not in alphabet")
    n = len(slice_)
    claimed: frozenset[int] = frozenset()
    sets: list[frozenset[int]] = []
    ranks: list[int] = []
    fresh = n + 1
    for block, rank in zip(slice_.sets, slice_.ranks):
        block_successors = successors(aut, block, symbol)
        restricted = block_successors - claimed
        claimed |= block_successors
        sets.append(restricted & aut.accepting)
        ranks.append(fresh)
        fresh += 1
        sets.append(restricted - aut.accepting)
        ranks.append(rank)
    return PreSlice(sets=tuple(sets), ranks=tuple(ranks))


def prune(pre: PreSlice) -> tuple[PreSlice, frozenset[int], frozenset[int]]:
    """Drop empty sets; relocate ranks leftward by block minimum.

    Returns the pruned pre-slice together with the green ranks (survivors
    that marked an empty set) and the red ranks (non-survivors).
    """
    occupied = [i for i, block in enumerate(pre.sets) if block]
    sets: list[frozenset[int]] = []
    ranks: list[int] = []
    for j, start in enumerate(occupied):
        end = occupied[j + 1] if j + 1 < len(occupied) else len(pre.sets)
        sets.append(pre.sets[start])
        ranks.append(min(pre.ranks[start:end]))
    surviving = set(ranks)
    empty_marks = {pre.ranks[i] for i, block in enumerate(pre.sets) if not block}
    green = frozenset(surviving & empty_marks)
    red = frozenset(set(pre.ranks) - surviving)
    return PreSlice(sets=tuple(sets), ranks=tuple(ranks)), green, red


def dominating_rank(green: frozenset[int], red: frozenset[int], num_states: int) -> tuple[int, int]:
    """Minimum active rank and the edge priority it induces.

    With no active ranks the dominating rank defaults to ``num_states + 1``
    and the priority is odd.
    """
    if green & red:
        raise InternalInvariantError(f"green and red overlap: {sorted(green & red)}")
    active = green | red
    k = min(active) if active else num_states + 1
    priority = 2 * k if k in green else 2 * k - 1
    return k, priority


def _forced_cuts(pre: PreSlice, k: int) -> set[int]:
    """Mandatory interval boundaries: around every rank below ``k``, after the rank-``k`` set."""
    n = len(pre)
    cuts: set[int] = set()
    for pos in range(1, n + 1):
        rank = pre.ranks[pos - 1]
        if rank < k:
            if pos < n:
                cuts.add(pos)
            if pos > 1:
                cuts.add(pos - 1)
        elif rank == k and pos < n:
            cuts.add(pos)
    return cuts


def _partition_from_cuts(n: int, cuts: Iterable[int]) -> IntervalPartition:
    intervals: list[Interval] = []
    lo = 1
    for cut in sorted(cuts):
        intervals.append((lo, cut))
        lo = cut + 1
    if n:
        intervals.append((lo, n))
    return tuple(intervals)


def iter_valid_partitions(pre: PreSlice, k: int) -> Iterator[IntervalPartition]:
    """All interval partitions permitted for the merge stage, coarsest first.

    Partitions with equally many intervals come in lexicographic order of
    their optional boundary positions; the all-singleton partition is always
    last and always present.
    """
    n = len(pre)
    if n == 0:
        yield ()
        return
    forced = _forced_cuts(pre, k)
    free = [c for c in range(1, n) if c not in forced]
    for size in range(len(free) + 1):
        for extra in itertools.combinations(free, size):
            yield _partition_from_cuts(n, forced.union(extra))


def valid_partitions(pre: PreSlice, k: int) -> list[IntervalPartition]:
    """Materialized :func:`iter_valid_partitions`; never empty."""
    return list(iter_valid_partitions(pre, k))


def is_valid_partition(pre: PreSlice, k: int, partition: IntervalPartition) -> bool:
    """Check contiguity, coverage, and the two dominating-rank constraints."""
    n = len(pre)
    if n == 0:
        return partition == ()
    expected_lo = 1
    for lo, hi in partition:
        if lo != expected_lo or hi < lo:
            return False
        expected_lo = hi + 1
        for pos in range(lo, hi + 1):
            rank = pre.ranks[pos - 1]
            if rank < k and lo != hi:
                return False
            if rank == k and hi != pos:
                return False
    return expected_lo == n + 1


def choose_partition(
    pre: PreSlice,
    k: int,
    green: frozenset[int],
    strategy: MergeStrategy | str,
    context: Iterable[RankedSlice] = (),
) -> IntervalPartition:
    """Pick the merge partition according to the strategy.

    ``ms`` keeps every position separate, ``max`` applies only the mandatory
    boundaries, ``safra`` additionally fuses the complete subtree of every
    green rank, and ``adaptive`` scans permitted partitions coarsest-first
    for one whose successor is already in ``context`` before falling back.
    """
    strategy = as_strategy(strategy)
    n = len(pre)
    if n == 0:
        return ()
    if strategy.kind == "ms":
        return _partition_from_cuts(n, range(1, n))
    if strategy.kind == "max":
        return _partition_from_cuts(n, _forced_cuts(pre, k))
    if strategy.kind == "safra":
        shape = unflatten(pre.ranks)
        cuts = set(range(1, n))
        for pos in range(1, n + 1):
            if pre.ranks[pos - 1] in green:
                span_lo = shape.left_boundary_of[pos - 1] + 1
                cuts.difference_update(range(span_lo, pos))
        return _partition_from_cuts(n, cuts)
    # adaptive: reuse an already constructed successor when permitted
    explored = context if isinstance(context, (set, frozenset, dict)) else set(context)
    candidates = itertools.islice(iter_valid_partitions(pre, k), strategy.partition_cap)
    for partition in candidates:
        if normalize(merge(pre, partition)) in explored:
            return partition
    return choose_partition(pre, k, green, MergeStrategy(strategy.fallback), context)


def merge(pre: PreSlice, partition: IntervalPartition) -> PreSlice:
    """Union the sets and keep the minimum rank within each interval."""
    sets: list[frozenset[int]] = []
    ranks: list[int] = []
    covered = 0
    for lo, hi in partition:
        if lo != covered + 1 or hi < lo or hi > len(pre):
            raise InternalInvariantError(f"partition {partition} does not tile 1..{len(pre)}")
        covered = hi
        block: set[int] = set()
        for member in pre.sets[lo - 1 : hi]:
            block |= member
        sets.append(frozenset(block))
        ranks.append(min(pre.ranks[lo - 1 : hi]))
    if covered != len(pre):
        raise InternalInvariantError(f"partition {partition} does not cover 1..{len(pre)}")
    return PreSlice(sets=tuple(sets), ranks=tuple(ranks))


def normalize(pre: PreSlice) -> RankedSlice:
    """Compact pairwise distinct ranks onto ``1..n`` preserving their order."""
    if not pre.sets:
        return RankedSlice(sets=(), ranks=())
    if any(not block for block in pre.sets):
        raise InternalInvariantError("normalize requires a pre-slice without empty sets")
    if len(set(pre.ranks)) != len(pre.ranks):
        raise InternalInvariantError(f"normalize requires pairwise distinct ranks, got {pre.ranks}")
    dense = {rank: i for i, rank in enumerate(sorted(pre.ranks), start=1)}
    return RankedSlice(sets=pre.sets, ranks=tuple(dense[r] for r in pre.ranks))


_EMPTY_SLICE = RankedSlice(sets=(), ranks=())
_EMPTY_PRE = PreSlice(sets=(), ranks=())


def transition_stages(
    aut: BuchiAutomaton,
    slice_: RankedSlice,
    symbol: str,
    strategy: MergeStrategy | str,
    context: Iterable[RankedSlice] = (),
) -> TransitionTrace:
    """Run step, prune, merge, and normalize, keeping every intermediate stage."""
    strategy = as_strategy(strategy)
    if symbol not in aut.alphabet:
        raise UnknownSymbolError(f"symbol {symbol!r} not in alphabet")
    if len(slice_) == 0:
        # Sink self-loop: rank 1 stays dead, so the edge keeps priority 1.
        return TransitionTrace(
            source=slice_,
            symbol=symbol,
            stepped=_EMPTY_PRE,
            pruned=_EMPTY_PRE,
            green=frozenset(),
            red=frozenset({1}),
            dominating=1,
            priority=1,
            partition=(),
            merged=_EMPTY_PRE,
            successor=_EMPTY_SLICE,
        )
    stepped = step(aut, slice_, symbol)
    pruned, green, red = prune(stepped)
    k, priority = dominating_rank(green, red, aut.num_states)
    partition = choose_partition(pruned, k, green, strategy, context)
    merged = merge(pruned, partition)
    successor = normalize(merged)
    return TransitionTrace(
        source=slice_,
        symbol=symbol,
        stepped=stepped,
        pruned=pruned,
        green=green,
        red=red,
        dominating=k,
        priority=priority,
        partition=partition,
        merged=merged,
        successor=successor,
    )


def transition(
    aut: BuchiAutomaton,
    slice_: RankedSlice,
    symbol: str,
    strategy: MergeStrategy | str,
    context: Iterable[RankedSlice] = (),
) -> TransitionOutcome:
    """One deterministic transition of the constructed parity automaton."""
    return transition_stages(aut, slice_, symbol, strategy, context).outcome


def initial_slice(aut: BuchiAutomaton) -> RankedSlice:
    """The starting macrostate: one set holding all initial states, rank 1."""
    return RankedSlice(sets=(frozenset(aut.initial),), ranks=(1,))


def determinize(
    aut: BuchiAutomaton,
    strategy: MergeStrategy | str = MULLER_SCHUPP,
    *,
    cap: int = 1_000_000,
    validate: bool = False,
) -> ParityAutomaton:
    """Breadth-first exploration of the macrostate graph into a parity automaton.

    Macrostates are deduplicated by structural slice equality and numbered in
    discovery order, so the output is a deterministic function of the input
    automaton and strategy.  ``validate`` re-checks the pipeline invariants on
    every generated transition.  Exceeding ``cap`` macrostates raises
    :class:`CapacityError`.
    """
    strategy = as_strategy(strategy)
    start = initial_slice(aut)
    ids: dict[RankedSlice, int] = {start: 0}
    edges: dict[tuple[int, str], tuple[int, int]] = {}
    queue: deque[RankedSlice] = deque([start])
    while queue:
        current = queue.popleft()
        src = ids[current]
        for symbol in aut.alphabet:
            trace = transition_stages(aut, current, symbol, strategy, context=ids)
            if validate:
                check_transition_invariants(aut, trace)
            succ = trace.successor
            if succ not in ids:
                if len(ids) >= cap:
                    raise CapacityError(f"macrostate cap of {cap} exceeded")
                ids[succ] = len(ids)
                queue.append(succ)
            edges[(src, symbol)] = (ids[succ], trace.priority)
    labels = {i: format_slice(s) for s, i in ids.items()}
    return ParityAutomaton(
        num_states=len(ids),
        alphabet=aut.alphabet,
        initial=0,
        edges=edges,
        labels=labels,
    )


def check_transition_invariants(aut: BuchiAutomaton, trace: TransitionTrace) -> None:
    """Assert conservation, disjointness, the parity rule, and partition constraints."""
    expected = successors(aut, trace.source.state_set, trace.symbol)
    for name, stage in (("step", trace.stepped), ("prune", trace.pruned), ("merge", trace.merged)):
        if stage.state_set != expected:
            raise InternalInvariantError(f"{name} changed the successor union")
        # PreSlice construction already enforces disjointness; re-assert cheaply.
        if sum(len(b) for b in stage.sets) != len(stage.state_set):
            raise InternalInvariantError(f"{name} produced overlapping sets")
    if trace.successor.state_set != expected:
        raise InternalInvariantError("normalize changed the successor union")
    if trace.green & trace.red:
        raise InternalInvariantError("green and red ranks overlap")
    active = trace.green | trace.red
    expected_k = min(active) if active else aut.num_states + 1
    if trace.dominating != expected_k:
        raise InternalInvariantError("dominating rank does not match the active ranks")
    even = trace.priority % 2 == 0
    if even != (trace.dominating in trace.green):
        raise InternalInvariantError("priority parity does not match the dominating event")
    expected_priority = 2 * trace.dominating if even else 2 * trace.dominating - 1
    if trace.priority != expected_priority:
        raise InternalInvariantError("priority value does not match the dominating rank")
    if not is_valid_partition(trace.pruned, trace.dominating, trace.partition):
        raise InternalInvariantError(f"merge partition {trace.partition} violates the constraints")
