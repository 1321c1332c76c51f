"""Command-line frontend: determinize, check, stats, roundtrip, trace.

Exit statuses: 0 on success or agreement, 1 on semantic disagreement or
invariant failure, 2 on usage or parse errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .determinize import (
    CapacityError,
    InternalInvariantError,
    as_strategy,
    determinize,
    initial_slice,
    transition_stages,
)
from .nba import (
    BuchiAutomaton,
    LassoFormatError,
    NbaFormatError,
    UnknownSymbolError,
    parse_lasso,
    parse_nba,
)
from .oracle import enumerate_lassos, nba_accepts_lasso, sample_lassos
from .parity import DpaFormatError, MissingEdgeError, ParityAutomaton, parse_dpa, run_lasso, serialize_dpa
from .safra import InvalidTreeError, TreeFormatError, format_tree, safra_to_slice, slice_to_safra
from .slices import InvalidSliceError, SliceFormatError, format_slice, parse_slice

_STRATEGY_TOKENS = ("ms", "safra", "max", "adaptive")

_USAGE_ERRORS = (
    NbaFormatError,
    DpaFormatError,
    SliceFormatError,
    TreeFormatError,
    LassoFormatError,
    UnknownSymbolError,
)
_SEMANTIC_ERRORS = (
    InvalidSliceError,
    InvalidTreeError,
    CapacityError,
    MissingEdgeError,
    InternalInvariantError,
)


class AlphabetMismatchError(ValueError):
    """NBA and DPA disagree on the (ordered) alphabet."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="omegadet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, *, output: bool = False) -> None:
        p.add_argument("--input", "-i", required=True, help="input .nba file")
        if output:
            p.add_argument("--output", "-o", help="output file (default: stdout)")
        p.add_argument("--strategy", choices=_STRATEGY_TOKENS, default="ms")
        p.add_argument("--cap", type=int, default=1_000_000, help="macrostate cap")

    p = sub.add_parser("determinize", help="translate a .nba file into a .dpa file")
    add_common(p, output=True)
    p.add_argument("--labels", action="store_true", help="annotate states with slice strings")
    p.set_defaults(handler=cmd_determinize)

    p = sub.add_parser("check", help="compare DPA decisions against the membership oracle")
    p.add_argument("--input", "-i", required=True, help="input .nba file")
    p.add_argument("--dpa", help="check this .dpa file instead of determinizing")
    p.add_argument("--strategy", choices=_STRATEGY_TOKENS, default="ms")
    p.add_argument("--cap", type=int, default=1_000_000)
    p.add_argument("--max-u", type=int, default=3, help="maximum stem length")
    p.add_argument("--max-v", type=int, default=3, help="maximum cycle length")
    p.add_argument("--random", type=int, default=None, metavar="N", help="sample N lassos instead")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("stats", help="macrostate and edge counts per merge strategy")
    p.add_argument("--input", "-i", required=True, help="input .nba file")
    p.add_argument("--cap", type=int, default=1_000_000)
    p.set_defaults(handler=cmd_stats)

    p = sub.add_parser("roundtrip", help="render a slice as a tree and recover it")
    p.add_argument("slice", help="canonical slice string, e.g. ({3}:4,{1}:2,{2}:3,{0}:1)")
    p.set_defaults(handler=cmd_roundtrip)

    p = sub.add_parser("trace", help="print every pipeline stage along a lasso")
    add_common(p)
    p.add_argument("lasso", help="lasso text, e.g. 'a a | b a' (empty stem: '| a')")
    p.set_defaults(handler=cmd_trace)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (*_USAGE_ERRORS, AlphabetMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _SEMANTIC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _load_nba(path: str) -> BuchiAutomaton:
    return parse_nba(Path(path).read_bytes())


def cmd_determinize(args) -> int:
    aut = _load_nba(args.input)
    dpa = determinize(aut, as_strategy(args.strategy), cap=args.cap)
    if not args.labels:
        dpa = ParityAutomaton(
            num_states=dpa.num_states,
            alphabet=dpa.alphabet,
            initial=dpa.initial,
            edges=dpa.edges,
        )
    data = serialize_dpa(dpa)
    if args.output:
        Path(args.output).write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8"))
    return 0


def cmd_check(args) -> int:
    aut = _load_nba(args.input)
    if args.dpa is not None:
        dpa = parse_dpa(Path(args.dpa).read_bytes())
        if dpa.alphabet != aut.alphabet:
            raise AlphabetMismatchError(
                f"alphabet mismatch: nba {aut.alphabet} vs dpa {dpa.alphabet}"
            )
    else:
        dpa = determinize(aut, as_strategy(args.strategy), cap=args.cap)
    if args.random is not None:
        lassos = sample_lassos(aut.alphabet, args.random, args.max_u, args.max_v, args.seed)
    else:
        lassos = enumerate_lassos(aut.alphabet, args.max_u, args.max_v)
    checked = 0
    for lasso in lassos:
        verdict = nba_accepts_lasso(aut, lasso)
        run = run_lasso(dpa, lasso)
        checked += 1
        if verdict.accepted != run.accepted:
            lasso_text = " ".join(lasso.stem) + " | " + " ".join(lasso.cycle)
            print(f"disagreement on lasso: {lasso_text.strip()}")
            if verdict.accepted:
                print(f"  nba accepts, witness prefix {verdict.prefix_states} loop {verdict.loop_states}")
            else:
                print("  nba rejects (no accepting run)")
            word = "accepts" if run.accepted else "rejects"
            print(f"  dpa {word}, recurring states {run.loop_states}, min priority {run.min_priority}")
            return 1
    print(f"checked {checked} lassos: agreement")
    return 0


def cmd_stats(args) -> int:
    aut = _load_nba(args.input)
    print(f"{'strategy':<10} {'states':>8} {'edges':>8}")
    for token in _STRATEGY_TOKENS:
        try:
            dpa = determinize(aut, as_strategy(token), cap=args.cap)
        except CapacityError:
            print(f"{token:<10} {'cap exceeded (> ' + str(args.cap) + ')':>8}")
            continue
        print(f"{token:<10} {dpa.num_states:>8} {len(dpa.edges):>8}")
    return 0


def cmd_roundtrip(args) -> int:
    slice_ = parse_slice(args.slice)
    tree = slice_to_safra(slice_)
    recovered = safra_to_slice(tree)
    print(format_tree(tree))
    print(format_slice(recovered))
    return 0 if recovered == slice_ else 1


def _format_rank_set(ranks) -> str:
    return "{" + ",".join(map(str, sorted(ranks))) + "}"


def cmd_trace(args) -> int:
    aut = _load_nba(args.input)
    lasso = parse_lasso(args.lasso)
    strategy = as_strategy(args.strategy)
    current = initial_slice(aut)
    context = {current}
    print(f"initial: {format_slice(current)}")

    step_no = 0

    def advance(symbol: str) -> int:
        nonlocal current, step_no
        step_no += 1
        trace = transition_stages(aut, current, symbol, strategy, context)
        print(f"step {step_no}: symbol {symbol}")
        print(f"  slice:     {format_slice(trace.source)}")
        print(f"  step:      {format_slice(trace.stepped)}")
        print(f"  prune:     {format_slice(trace.pruned)}")
        green = _format_rank_set(trace.green)
        red = _format_rank_set(trace.red)
        print(f"  events:    G={green} R={red} k={trace.dominating} priority={trace.priority}")
        intervals = "".join(f"[{lo},{hi}]" for lo, hi in trace.partition)
        print(f"  merge:     {format_slice(trace.merged)}  intervals {intervals}")
        print(f"  normalize: {format_slice(trace.successor)}")
        if len(trace.successor) == 0:
            print("  note:      sink (all runs died)")
        current = trace.successor
        context.add(current)
        if len(context) > args.cap:
            raise CapacityError(f"macrostate cap of {args.cap} exceeded")
        return trace.priority

    for symbol in lasso.stem:
        advance(symbol)

    first_seen: dict = {}
    boundaries: list = []
    segment_minimums: list[int] = []
    while current not in first_seen:
        first_seen[current] = len(boundaries)
        boundaries.append(current)
        segment_min = None
        for symbol in lasso.cycle:
            priority = advance(symbol)
            segment_min = priority if segment_min is None else min(segment_min, priority)
        assert segment_min is not None
        segment_minimums.append(segment_min)
    min_priority = min(segment_minimums[first_seen[current] :])
    verdict = "accept" if min_priority % 2 == 0 else "reject"
    print(f"verdict: {verdict} (min recurring priority {min_priority})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
