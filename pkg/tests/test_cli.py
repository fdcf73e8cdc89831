import io
import subprocess
import sys

import pytest

from cspsym.cli import run_command


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def gen(tmp_path):
    def make(name, *extra):
        d = tmp_path / name
        code, out, _ = run("gen", name, "--out", d, *extra)
        assert code == 0 and "wrote" in out
        return d / "system.sys"
    return make


def test_example_sync_passes(gen):
    code, out, _ = run("sys", "check-sync", gen("two-process-sync-io"))
    assert code == 0
    assert out.splitlines()[0].startswith("# sys check-sync limits max_states=")
    assert "verdict=pass" in out and "states=48" in out


def test_example_symmetry_both_methods(gen):
    path = gen("two-process-sync-io")
    for method in ("automaton", "enumerate"):
        code, out, _ = run("sys", "check-symmetry", path, "--method", method)
        assert code == 0 and "group_size=2" in out


def test_deadlock_explore_fails_with_trace(gen, tmp_path):
    trace = tmp_path / "t.txt"
    code, out, _ = run("sys", "check-sync", gen("two-process-deadlock-in"), "--trace", trace)
    assert code == 1 and "terminal_deadlocked=1" in out
    assert trace.read_text().splitlines()[-1] == "# outcome deadlocked"


def test_buffer_pair_fails(gen):
    path = gen("buffer")
    code, out, _ = run("sys", "check-sync", path, "--pairs", "R0,R1")
    assert code == 1 and "witness1=pair R0,R1 never communicates directly" in out
    code, out, _ = run("sys", "explore", path)
    assert code == 0 and "terminal_properly-terminated=" in out


def test_asymmetric_symmetry_fails(gen):
    code, out, _ = run("sys", "check-symmetry", gen("asymmetric"))
    assert code == 1 and "renamed computation missing" in out


def test_election_check(gen):
    code, out, _ = run("sys", "check-election", gen("knockout"))
    assert code == 0 and "leaders=P0,P1" in out


def test_limits_give_unknown(gen, monkeypatch):
    path = gen("two-process-sync-io")
    code, out, _ = run("sys", "check-sync", path, "--max-states", 5)
    assert code == 2 and "verdict=unknown" in out
    monkeypatch.setenv("CSPSYM_MAX_STATES", "5")
    code, out, _ = run("sys", "explore", path)
    assert code == 2 and "max_states=5" in out
    monkeypatch.setenv("CSPSYM_MAX_STATES", "lots")
    assert run("sys", "explore", path)[0] == 3


def test_sample(gen, tmp_path):
    path = gen("two-process-deadlock-in")
    code, out, _ = run("sys", "sample", path, "--seeds", "1..50")
    assert code == 1 and "runs_deadlocked=" in out and "witness_seed=" in out
    path = gen("two-process-sync-io")
    trace = tmp_path / "s.txt"
    code, out, _ = run("sys", "sample", path, "--seeds", "1..20", "--pairs", "all", "--trace", trace)
    assert code == 0 and "runs_properly-terminated=20" in out and "runs_missing_pairs=0" in out
    assert trace.exists()


def test_sample_truncation_is_unknown(tmp_path):
    (tmp_path / "loop.csp").write_text("do [ true -> skip ] od\n")
    (tmp_path / "s.sys").write_text("vertex a\nuse loop.csp as loop\nat a run loop\n")
    code, out, _ = run("sys", "sample", tmp_path / "s.sys", "--seeds", "1..3", "--max-steps", 10)
    assert code == 2 and "runs_truncated=3" in out


def test_graph_and_ext_commands(tmp_path):
    code, out, _ = run("gen", "three-cycle", "--out", tmp_path)
    assert code == 0
    code, out, _ = run("graph", "check", tmp_path / "three-cycle.graph")
    assert code == 0 and "peer_to_peer=true" in out
    code, out, _ = run("gen", "slicing", "--out", tmp_path)
    assert code == 0
    code, out, _ = run("ext", "slice", tmp_path / "slicing.ext", "--sigma", "(1 2)",
                       "--iota", "(1 2)(2a 1a 2c 1b 2b 1c)", "--reps", "2")
    assert code == 0 and "(1 2)" in out


def test_deterministic_output(gen):
    path = gen("buffer")
    assert run("sys", "check-sync", path, "--pairs", "R0,R1") == run("sys", "check-sync", path, "--pairs", "R0,R1")


@pytest.mark.parametrize("argv", [
    ["sys", "check-sync", "missing.sys"],
    ["gen", "nonsense"],
    ["sys", "sample", "x.sys", "--seeds", "9..1"],
    ["graph"],
    ["sys", "check-sync", "--bogus"],
])
def test_input_errors(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _, err = run(*argv)
    assert code == 3


def test_bad_program_reports_line(tmp_path):
    (tmp_path / "bad.csp").write_text("x := \n")
    (tmp_path / "s.sys").write_text("vertex a\nuse bad.csp as bad\nat a run bad\n")
    code, _, err = run("sys", "explore", tmp_path / "s.sys")
    assert code == 3 and "error:" in err


def test_buffer_network_is_not_p2p(gen):
    code, out, _ = run("graph", "check", gen("buffer").parent / "network.graph")
    assert code == 1 and "peer_to_peer=false" in out


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "cspsym.cli", "gen", "two-vertex"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "P0" in r.stdout
