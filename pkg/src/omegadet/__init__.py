"""Determinization of nondeterministic Büchi automata into parity automata.

The deterministic macrostates are ranked slices: ordered tuples of disjoint
state sets carrying age ranks, in bijection with ranked Safra trees.  One
pluggable merge stage selects between the Muller-Schupp update, the Safra
update, maximal collapse, and an adaptive successor-reuse heuristic.  A
brute-force lasso membership oracle provides the correctness ground truth.
"""
from .determinize import (
    ADAPTIVE,
    MAX_COLLAPSE,
    MULLER_SCHUPP,
    SAFRA,
    CapacityError,
    MergeStrategy,
    TransitionOutcome,
    as_strategy,
    choose_partition,
    determinize,
    dominating_rank,
    initial_slice,
    merge,
    normalize,
    prune,
    restricted_successors,
    step,
    transition,
    transition_stages,
    valid_partitions,
)
from .nba import (
    BuchiAutomaton,
    Lasso,
    format_lasso,
    parse_lasso,
    parse_nba,
    serialize_nba,
    successors,
)
from .oracle import (
    enumerate_lassos,
    nba_accepts_lasso,
    random_nba,
    split_tree_levels,
)
from .parity import ParityAutomaton, compact_priorities, parse_dpa, run_lasso, serialize_dpa
from .safra import SafraNode, TreeShape, format_tree, parse_tree, safra_to_slice, slice_to_safra, unflatten
from .slices import (
    PreSlice,
    RankedSlice,
    compare_profiles,
    format_slice,
    index_of,
    k_cut,
    left_boundary,
    parent,
    parse_slice,
    rank_profile,
    subtree_set,
)

__version__ = "0.1.0"
