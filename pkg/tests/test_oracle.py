from omegadet.determinize import MULLER_SCHUPP, initial_slice, transition
from omegadet.nba import Lasso, parse_nba
from omegadet.oracle import (
    enumerate_lassos,
    nba_accepts_lasso,
    nba_accepts_lasso_by_powers,
    random_nba,
    sample_lassos,
    split_tree_levels,
)

from .conftest import assert_valid_witness, build_corpus


def test_accepts_small(small_nba):
    lasso = Lasso(stem=(), cycle=("a",))
    verdict = nba_accepts_lasso(small_nba, lasso)
    assert verdict.accepted
    assert verdict.prefix_states == (0, 1) and verdict.loop_states == (1, 1)
    assert_valid_witness(small_nba, lasso, verdict)


def test_rejects_without_accepting_states():
    aut = parse_nba(b"nba\nstates 2\nalphabet a b\ninit 0\naccept\n0 a 1\n1 a 0\n0 b 0\n")
    for lasso in enumerate_lassos(aut.alphabet, 2, 2):
        assert not nba_accepts_lasso(aut, lasso).accepted


def test_accepts_medium(medium_nba):
    lasso = Lasso(stem=(), cycle=("a",))
    verdict = nba_accepts_lasso(medium_nba, lasso)
    assert verdict.accepted
    # State 2 loops on a and is accepting.
    assert verdict.prefix_states == (0, 2) and verdict.loop_states == (2, 2)
    assert_valid_witness(medium_nba, lasso, verdict)


def test_witnesses_are_valid_runs():
    for seed in range(30):
        aut = random_nba(1 + seed % 5, ("a", "b"), 0.4, 0.4, 2100 + seed)
        for lasso in enumerate_lassos(aut.alphabet, 2, 2):
            verdict = nba_accepts_lasso(aut, lasso)
            if verdict.accepted:
                assert_valid_witness(aut, lasso, verdict)


def test_implementations_agree():
    for seed in range(60):
        aut = random_nba(1 + seed % 5, ("a", "b")[: 1 + seed % 2], 0.4, 0.4, 3100 + seed)
        for lasso in enumerate_lassos(aut.alphabet, 2, 2):
            assert nba_accepts_lasso(aut, lasso).accepted == nba_accepts_lasso_by_powers(aut, lasso)


def test_enumerate_lassos_tiny():
    got = list(enumerate_lassos(("a",), 1, 1))
    assert got == [Lasso((), ("a",)), Lasso(("a",), ("a",))]


def test_enumerate_lassos_cycles_only():
    got = list(enumerate_lassos(("a", "b"), 0, 2))
    cycles = [lasso.cycle for lasso in got]
    assert cycles == [("a",), ("b",), ("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]
    assert all(lasso.stem == () for lasso in got)


def test_enumerate_lassos_count():
    got = list(enumerate_lassos(("a", "b"), 2, 2))
    assert len(got) == 42
    assert len(set(got)) == 42


def test_enumerate_lassos_count_formula():
    for size, max_stem, max_cycle in ((1, 3, 2), (2, 3, 3), (3, 1, 2)):
        alphabet = ("a", "b", "c")[:size]
        stems = sum(size**i for i in range(max_stem + 1))
        cycles = sum(size**j for j in range(1, max_cycle + 1))
        assert len(list(enumerate_lassos(alphabet, max_stem, max_cycle))) == stems * cycles


def test_sample_lassos_reproducible():
    first = list(sample_lassos(("a", "b"), 50, 3, 3, seed=7))
    second = list(sample_lassos(("a", "b"), 50, 3, 3, seed=7))
    assert first == second
    assert len(first) == 50


def test_split_tree_levels_small(small_nba):
    levels = split_tree_levels(small_nba, ("a", "a", "a"))
    f = frozenset
    assert levels == (
        (f({0}),),
        (f({1}), f({0})),
        (f({1}), f({2}), f({0})),
        (f({1}), f({2}), f({0})),
    )


def test_split_tree_levels_empty_prefix(small_nba):
    assert split_tree_levels(small_nba, ()) == ((frozenset({0}),),)


def test_split_tree_levels_match_macrostates():
    # With the identity merge, the macrostate tuples are exactly the levels
    # with ranks erased.
    for aut in build_corpus(count=25, master_seed=515151):
        for lasso in enumerate_lassos(aut.alphabet, 1, 2):
            word = lasso.stem + lasso.cycle + lasso.cycle
            levels = split_tree_levels(aut, word)
            current = initial_slice(aut)
            for depth, symbol in enumerate(word):
                assert current.sets == levels[depth]
                current = transition(aut, current, symbol, MULLER_SCHUPP).successor
            assert current.sets == levels[len(word)]


def test_split_tree_levels_disjoint_and_bounded(small_nba, wide_nba):
    for aut in (small_nba, wide_nba):
        for levels in (split_tree_levels(aut, ("a",) * 6),):
            for level in levels:
                union: set[int] = set()
                for block in level:
                    assert block and not (block & union)
                    union |= block
                assert len(level) <= aut.num_states


def test_random_nba_reproducible():
    first = random_nba(5, ("a", "b"), 0.4, 0.4, 99)
    second = random_nba(5, ("a", "b"), 0.4, 0.4, 99)
    assert first == second
