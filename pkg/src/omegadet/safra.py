"""Ranked Safra trees and their bijection with ranked slices.

A ranked Safra tree is an ordered tree with pairwise disjoint, non-empty
state-set labels in which every parent outranks none of its children and
sibling ranks increase left to right; the root always holds rank 1.  Listing
the node labels in depth-first post-order recovers a ranked slice, and the
inverse direction rebuilds the tree from the parent relation induced by the
ranks.  ``unflatten`` computes that relation in linear time with a stack.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .slices import RankedSlice, _format_set


class InvalidTreeError(ValueError):
    """A ranked Safra tree invariant is violated."""


class TreeFormatError(ValueError):
    """Tree text cannot be parsed."""


@dataclass(frozen=True)
class SafraNode:
    """One tree node: reduced (non-redundant) label, rank, ordered children."""

    label: frozenset[int]
    rank: int
    children: tuple["SafraNode", ...] = ()


@dataclass(frozen=True)
class TreeShape:
    """Parent and left-subtree-boundary arrays of a rank tree.

    Entry ``i-1`` describes 1-based position ``i``; parents are positions or
    None for the root, boundaries are positions or 0 when none exists.
    ``work`` counts main-loop iterations plus stack pops and witnesses the
    linear running time (always at most ``3n``).
    """

    parent_of: tuple[int | None, ...]
    left_boundary_of: tuple[int, ...]
    work: int


def unflatten(ranks: Sequence[int]) -> TreeShape:
    """Recover parent and left-boundary relations from a ranking in one stack pass.

    Accepts any sequence of pairwise distinct positive ranks whose minimum
    sits at the last position (bijective rankings of ranked slices and the
    distinct-rank pre-slices that occur mid-pipeline).
    """
    n = len(ranks)
    if len(set(ranks)) != n:
        raise InvalidTreeError("ranks must be pairwise distinct")
    if n and ranks[-1] != min(ranks):
        raise InvalidTreeError("the minimum rank must sit at the last position")
    parent: list[int | None] = [None] * n
    boundary: list[int] = [0] * n
    stack: list[int] = []
    work = 0
    for i in range(n, 0, -1):
        work += 1
        while stack and ranks[i - 1] < ranks[stack[-1] - 1]:
            boundary[stack[-1] - 1] = i
            stack.pop()
            work += 1
        if stack:
            parent[i - 1] = stack[-1]
        stack.append(i)
    while stack:
        boundary[stack[-1] - 1] = 0
        stack.pop()
        work += 1
    return TreeShape(parent_of=tuple(parent), left_boundary_of=tuple(boundary), work=work)


def validate_tree(root: SafraNode) -> int:
    """Check all ranked Safra tree invariants; returns the node count."""
    labels_seen: set[int] = set()
    ranks: list[int] = []

    def visit(node: SafraNode) -> None:
        if not node.label:
            raise InvalidTreeError("node labels must be non-empty")
        if node.label & labels_seen:
            raise InvalidTreeError(f"labels are not disjoint: {sorted(node.label & labels_seen)} repeated")
        labels_seen.update(node.label)
        ranks.append(node.rank)
        previous_rank = None
        for child in node.children:
            if child.rank <= node.rank:
                raise InvalidTreeError("children must outrank their parent")
            if previous_rank is not None and child.rank <= previous_rank:
                raise InvalidTreeError("sibling ranks must increase left to right")
            previous_rank = child.rank
            visit(child)

    visit(root)
    n = len(ranks)
    if sorted(ranks) != list(range(1, n + 1)):
        raise InvalidTreeError(f"ranks {sorted(ranks)} are not a bijection onto 1..{n}")
    if root.rank != 1:
        raise InvalidTreeError("the root must hold rank 1")
    return n


def safra_to_slice(root: SafraNode) -> RankedSlice:
    """List node labels and ranks in depth-first post-order."""
    validate_tree(root)
    sets: list[frozenset[int]] = []
    ranks: list[int] = []

    def visit(node: SafraNode) -> None:
        for child in node.children:
            visit(child)
        sets.append(node.label)
        ranks.append(node.rank)

    visit(root)
    return RankedSlice(sets=tuple(sets), ranks=tuple(ranks))


def slice_to_safra(slice_: RankedSlice) -> SafraNode:
    """Rebuild the ranked Safra tree from the rank-tree relation of a slice."""
    n = len(slice_)
    if n == 0:
        raise InvalidTreeError("the empty slice has no tree form")
    shape = unflatten(slice_.ranks)
    children: list[list[SafraNode]] = [[] for _ in range(n + 1)]
    nodes: list[SafraNode | None] = [None] * (n + 1)
    # Children occupy lower positions than their parent, so one ascending pass suffices.
    for i in range(1, n + 1):
        node = SafraNode(
            label=slice_.sets[i - 1],
            rank=slice_.ranks[i - 1],
            children=tuple(children[i]),
        )
        nodes[i] = node
        p = shape.parent_of[i - 1]
        if p is not None:
            children[p].append(node)
    root = nodes[n]
    assert root is not None
    return root


def format_tree(root: SafraNode) -> str:
    """Nested ``{ids}:rank(child,...)`` rendering; round-trips with :func:`parse_tree`."""
    text = f"{_format_set(root.label)}:{root.rank}"
    if root.children:
        text += "(" + ",".join(format_tree(c) for c in root.children) + ")"
    return text


def parse_tree(text: str) -> SafraNode:
    """Parse the nested tree rendering produced by :func:`format_tree`."""
    node, pos = _parse_node(text, 0)
    if pos != len(text):
        raise TreeFormatError(f"trailing input at offset {pos + 1}")
    return node


def _parse_node(text: str, pos: int) -> tuple[SafraNode, int]:
    if pos >= len(text) or text[pos] != "{":
        raise TreeFormatError(f"expected '{{' at offset {pos + 1}")
    end = text.find("}", pos)
    if end < 0:
        raise TreeFormatError("unterminated label")
    ids_text = text[pos + 1 : end]
    try:
        ids = [int(t) for t in ids_text.split(",")] if ids_text else []
    except ValueError:
        raise TreeFormatError(f"bad state id in {ids_text!r}") from None
    pos = end + 1
    if pos >= len(text) or text[pos] != ":":
        raise TreeFormatError(f"expected ':' at offset {pos + 1}")
    pos += 1
    stop = pos
    while stop < len(text) and text[stop] not in "(,)":
        stop += 1
    try:
        rank = int(text[pos:stop])
    except ValueError:
        raise TreeFormatError(f"bad rank {text[pos:stop]!r}") from None
    pos = stop
    children: list[SafraNode] = []
    if pos < len(text) and text[pos] == "(":
        pos += 1
        while True:
            child, pos = _parse_node(text, pos)
            children.append(child)
            if pos < len(text) and text[pos] == ",":
                pos += 1
                continue
            if pos < len(text) and text[pos] == ")":
                pos += 1
                break
            raise TreeFormatError(f"expected ',' or ')' at offset {pos + 1}")
    return SafraNode(label=frozenset(ids), rank=rank, children=tuple(children)), pos
