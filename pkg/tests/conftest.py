import random

import pytest
from hypothesis import HealthCheck, settings

from omegadet.nba import BuchiAutomaton, parse_nba
from omegadet.oracle import random_nba

settings.register_profile("repo", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


# Three-state automaton over one letter: a loop on 0, a split 0 -> 1, and a
# 1 <-> 2 ping-pong around the accepting state 1.  Accepts a^omega.
SMALL_NBA = b"""nba
states 3
alphabet a
init 0
accept 1
0 a 0
0 a 1
1 a 1
1 a 2
2 a 1
"""

# Four states, accepting 2 and 3: state 0 loops and spawns 2 (self-looping)
# and 3 (which only feeds the dead-endish state 1).
MEDIUM_NBA = b"""nba
states 4
alphabet a
init 0
accept 2 3
0 a 0
0 a 2
0 a 3
2 a 2
3 a 1
"""

# The medium automaton plus two setup letters b and c that steer the initial
# macrostate into the prepared slice ({1}:2,{2}:3,{0}:1) after reading "b c".
MEDIUM_STAGED_NBA = MEDIUM_NBA.replace(
    b"alphabet a", b"alphabet a b c"
) + b"""0 b 3
0 b 0
3 c 1
0 c 2
0 c 0
"""

# Six states, accepting 2, 3 and 5, with a rich single-letter transition
# structure producing simultaneous green and red events mid-run.
WIDE_NBA = b"""nba
states 6
alphabet a
init 0
accept 2 3 5
0 a 0
0 a 1
0 a 5
0 a 4
1 a 1
2 a 2
2 a 1
3 a 3
3 a 1
3 a 2
4 a 4
4 a 5
4 a 3
5 a 5
"""

# The wide automaton plus four setup letters reaching the prepared slice
# ({2}:3,{3}:5,{1}:2,{5}:6,{4}:4,{0}:1) after reading "b c d e".
WIDE_STAGED_NBA = WIDE_NBA.replace(b"alphabet a", b"alphabet a b c d e") + b"""0 b 3
0 b 0
3 c 2
3 c 1
0 c 0
2 d 2
1 d 1
0 d 5
0 d 0
2 e 2
1 e 3
1 e 1
5 e 5
5 e 4
0 e 0
"""


@pytest.fixture
def small_nba() -> BuchiAutomaton:
    return parse_nba(SMALL_NBA)


@pytest.fixture
def medium_nba() -> BuchiAutomaton:
    return parse_nba(MEDIUM_NBA)


@pytest.fixture
def medium_staged_nba() -> BuchiAutomaton:
    return parse_nba(MEDIUM_STAGED_NBA)


@pytest.fixture
def wide_nba() -> BuchiAutomaton:
    return parse_nba(WIDE_NBA)


@pytest.fixture
def wide_staged_nba() -> BuchiAutomaton:
    return parse_nba(WIDE_STAGED_NBA)


def build_corpus(count: int = 300, master_seed: int = 20260808) -> list[BuchiAutomaton]:
    """Seed-reproducible random automata: up to 5 states, up to 2 letters."""
    rng = random.Random(master_seed)
    automata = []
    for _ in range(count):
        num_states = rng.randint(1, 5)
        alphabet = ("a", "b")[: rng.randint(1, 2)]
        automata.append(random_nba(num_states, alphabet, 0.4, 0.4, rng.randrange(2**32)))
    return automata


def assert_valid_witness(aut, lasso, verdict) -> None:
    """Structural validity of an accepting witness run."""
    prefix, loop = verdict.prefix_states, verdict.loop_states
    assert verdict.accepted and prefix is not None and loop is not None
    assert prefix[0] in aut.initial
    assert loop[0] == prefix[-1] and loop[-1] == loop[0]
    assert len(loop) > 1 and (len(loop) - 1) % len(lasso.cycle) == 0
    run = verdict.run_prefix(len(prefix) + 2 * (len(loop) - 1))
    for i in range(len(run) - 1):
        assert run[i + 1] in aut.successors_of(run[i], lasso.symbol_at(i))
    assert any(q in aut.accepting for q in loop[:-1])
