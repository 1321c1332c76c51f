import subprocess
import sys

import pytest

from .conftest import MEDIUM_STAGED_NBA, SMALL_NBA, WIDE_STAGED_NBA


def run_cli(*args: str, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "omegadet.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


@pytest.fixture
def small_file(tmp_path):
    path = tmp_path / "small.nba"
    path.write_bytes(SMALL_NBA)
    return path


@pytest.fixture
def medium_staged_file(tmp_path):
    path = tmp_path / "medium.nba"
    path.write_bytes(MEDIUM_STAGED_NBA)
    return path


@pytest.fixture
def wide_staged_file(tmp_path):
    path = tmp_path / "wide.nba"
    path.write_bytes(WIDE_STAGED_NBA)
    return path


def test_determinize_writes_dpa(small_file, tmp_path):
    out = tmp_path / "small.dpa"
    result = run_cli("determinize", "-i", str(small_file), "-o", str(out), "--strategy", "ms", "--labels")
    assert result.returncode == 0, result.stderr
    text = out.read_text()
    assert "states 3" in text
    assert "label 2 ({1}:3,{2}:2,{0}:1)" in text
    assert "2 a 2 4" in text


def test_determinize_without_labels(small_file):
    result = run_cli("determinize", "-i", str(small_file))
    assert result.returncode == 0
    assert "label" not in result.stdout


def test_determinize_priority_three_edge(medium_staged_file):
    result = run_cli("determinize", "-i", str(medium_staged_file), "--strategy", "safra", "--labels")
    assert result.returncode == 0
    lines = result.stdout.splitlines()
    state = next(
        line.split()[1]
        for line in lines
        if line.startswith("label") and line.endswith("({1}:2,{2}:3,{0}:1)")
    )
    edge = next(line for line in lines if line.startswith(f"{state} a "))
    assert edge.split()[3] == "3"


def test_determinize_unknown_strategy(small_file):
    result = run_cli("determinize", "-i", str(small_file), "--strategy", "bogus")
    assert result.returncode == 2


def test_determinize_cap_exceeded(small_file):
    result = run_cli("determinize", "-i", str(small_file), "--cap", "1")
    assert result.returncode == 1
    assert "cap" in result.stderr


def test_determinize_parse_error(tmp_path):
    bad = tmp_path / "bad.nba"
    bad.write_text("nba\nstates 1\nalphabet a\ninit 0\naccept\n0 a 7\n")
    result = run_cli("determinize", "-i", str(bad))
    assert result.returncode == 2
    assert "line 6" in result.stderr


def test_check_agreement(small_file):
    result = run_cli("check", "-i", str(small_file), "--strategy", "ms", "--max-u", "3", "--max-v", "3")
    assert result.returncode == 0
    assert "agreement" in result.stdout


def test_check_all_strategies(medium_staged_file):
    for strategy in ("ms", "safra", "max", "adaptive"):
        result = run_cli("check", "-i", str(medium_staged_file), "--strategy", strategy, "--max-u", "2", "--max-v", "2")
        assert result.returncode == 0, result.stdout + result.stderr


def test_check_corrupted_priority(small_file, tmp_path):
    produced = run_cli("determinize", "-i", str(small_file)).stdout
    corrupted = produced.replace("2 a 2 4", "2 a 2 3")
    assert corrupted != produced
    dpa_file = tmp_path / "broken.dpa"
    dpa_file.write_text(corrupted)
    result = run_cli("check", "-i", str(small_file), "--dpa", str(dpa_file))
    assert result.returncode == 1
    assert "disagreement on lasso: | a" in result.stdout


def test_check_alphabet_mismatch(small_file, tmp_path):
    dpa_file = tmp_path / "other.dpa"
    dpa_file.write_text("dpa\nstates 1\nalphabet x\ninit 0\n0 x 0 2\n")
    result = run_cli("check", "-i", str(small_file), "--dpa", str(dpa_file))
    assert result.returncode == 2
    assert "mismatch" in result.stderr


def test_check_random_reproducible(medium_staged_file):
    args = ("check", "-i", str(medium_staged_file), "--random", "200", "--seed", "7")
    first = run_cli(*args)
    second = run_cli(*args)
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout


def test_stats_small(small_file):
    result = run_cli("stats", "-i", str(small_file))
    assert result.returncode == 0
    lines = {line.split()[0]: line.split()[1:] for line in result.stdout.splitlines()[1:]}
    assert lines["ms"] == ["3", "3"]
    assert lines["adaptive"] == ["3", "3"]
    # The collapsing strategies fold {1} into {1,2} after a green event,
    # which costs one extra macrostate on this automaton.
    assert lines["safra"] == ["4", "4"]
    assert lines["max"] == ["4", "4"]


def test_stats_no_transitions(tmp_path):
    path = tmp_path / "dead.nba"
    path.write_text("nba\nstates 2\nalphabet a\ninit 0\naccept 1\n")
    result = run_cli("stats", "-i", str(path))
    assert result.returncode == 0
    for line in result.stdout.splitlines()[1:]:
        assert line.split()[1] == "2"


def test_roundtrip_demo():
    result = run_cli("roundtrip", "({3}:4,{1}:2,{2}:3,{0}:1)")
    assert result.returncode == 0
    assert result.stdout.splitlines() == [
        "{0}:1({1}:2({3}:4),{2}:3)",
        "({3}:4,{1}:2,{2}:3,{0}:1)",
    ]


def test_roundtrip_single():
    result = run_cli("roundtrip", "({0}:1)")
    assert result.returncode == 0
    assert result.stdout.splitlines() == ["{0}:1", "({0}:1)"]


def test_roundtrip_rank_placement():
    assert run_cli("roundtrip", "({0}:2,{1}:1)").returncode == 0
    rejected = run_cli("roundtrip", "({0}:1,{1}:2)")
    assert rejected.returncode == 1
    assert "rank 1" in rejected.stderr or "rightmost" in rejected.stderr


def test_roundtrip_malformed():
    assert run_cli("roundtrip", "({0}:1").returncode == 2


def test_trace_medium(medium_staged_file):
    result = run_cli("trace", "-i", str(medium_staged_file), "--strategy", "safra", "b c | a")
    assert result.returncode == 0
    assert "priority=3" in result.stdout
    assert "verdict: accept" in result.stdout


def test_trace_wide_events(wide_staged_file):
    result = run_cli("trace", "-i", str(wide_staged_file), "--strategy", "ms", "b c d e | a")
    assert result.returncode == 0
    assert "G={2,6}" in result.stdout
    assert "k=2" in result.stdout


def test_trace_sink_notice(tmp_path):
    path = tmp_path / "dead.nba"
    path.write_text("nba\nstates 1\nalphabet a\ninit 0\naccept 0\n")
    result = run_cli("trace", "-i", str(path), "| a")
    assert result.returncode == 0
    assert "priority=1" in result.stdout
    assert "sink" in result.stdout
    assert "verdict: reject" in result.stdout


def test_outputs_deterministic(medium_staged_file, tmp_path):
    for strategy in ("ms", "safra", "max", "adaptive"):
        first = run_cli("determinize", "-i", str(medium_staged_file), "--strategy", strategy, "--labels")
        second = run_cli("determinize", "-i", str(medium_staged_file), "--strategy", strategy, "--labels")
        assert first.returncode == second.returncode == 0
        assert first.stdout == second.stdout
