import pytest
from hypothesis import given, settings, strategies as st

from cspsym.checkers import (
    FAIL,
    PASS,
    UNKNOWN,
    CheckPreconditionError,
    Limits,
    PropertyReport,
    _pairs,
    check_electoral,
    check_pairwise_sync,
    check_symmetric,
    missing_pairs,
    missing_pairs_bruteforce,
    pair_coverage,
    rename_computation,
    swap,
    terminal_values,
)
from cspsym.engine import Computation, computations, explore, rename_step
from cspsym.graph import Network, Permutation, automorphisms
from cspsym.library import (
    gen_asymmetric,
    gen_buffer_system,
    gen_sync_io,
    gen_two_process_deadlock_in,
    gen_two_process_sync_io,
    knockout_transform,
    three_cycle,
)

from conftest import permutations_of
from systems import pair, single

SMALL = [gen_two_process_sync_io, gen_two_process_deadlock_in, gen_buffer_system, gen_asymmetric,
         lambda: gen_sync_io(Network(["a", "b"], [("a", "b"), ("b", "a")]))]
BIG_CAP = Limits(cap=250_000)


def _decoded(g, q):
    pairs = _pairs(q)
    m = missing_pairs(g, pairs)[g.initial]
    return {p for i, p in enumerate(pairs) if m >> i & 1}


@pytest.mark.parametrize("factory", SMALL)
def test_bitsets_match_enumeration(factory):
    sys = factory()
    g = explore(sys)
    for q in [sys.vertices, sys.vertices[:2], sys.vertices[1:]]:
        assert _decoded(g, q) == missing_pairs_bruteforce(g, q, BIG_CAP.cap)


def test_sync_example_passes():
    r = check_pairwise_sync(gen_two_process_sync_io())
    assert r.verdict == PASS and r.stats["states"] == 48 and r.stats["computations"] == 1440


def test_sync_deadlock_fails_with_deadlock_witness():
    r = check_pairwise_sync(gen_two_process_deadlock_in())
    assert r.verdict == FAIL
    (c,) = [w for w in r.witnesses if isinstance(w, Computation)]
    assert c.outcome == "deadlocked"


def test_sync_buffer_fails_on_pair():
    r = check_pairwise_sync(gen_buffer_system(), ["R0", "R1"])
    assert r.verdict == FAIL
    assert r.witnesses[0] == "pair R0,R1 never communicates directly"
    c = r.witnesses[1]
    assert c.outcome == "properly-terminated"
    assert frozenset(["R0", "R1"]) not in c.comm_pairs()


def test_sync_unknown_vertex():
    with pytest.raises(CheckPreconditionError):
        check_pairwise_sync(gen_buffer_system(), ["R0", "nope"])


def test_sync_unknown_on_limit():
    r = check_pairwise_sync(gen_two_process_sync_io(), limits=Limits(max_states=20))
    assert r.verdict == UNKNOWN and r.stats["limit"] == "states"
    assert "verdict=unknown" in r.lines()


def test_sync_fails_on_divergence():
    r = check_pairwise_sync(single("do [ true -> skip ] od"))
    assert r.verdict == FAIL and "divergent" in r.reason


def test_pair_coverage():
    sys = gen_buffer_system()
    c = next(iter(computations(explore(sys))))
    cov = pair_coverage(c, sys.vertices)
    assert frozenset(["R0", "R0'"]) in cov and frozenset(["R0", "R1"]) not in cov


def test_failing_report_needs_witness():
    with pytest.raises(ValueError):
        PropertyReport("x", FAIL)


def test_electoral_knockout_passes():
    r = check_electoral(knockout_transform(gen_two_process_sync_io()))
    assert r.verdict == PASS and r.stats["leaders"] == "P0,P1"


def test_electoral_requires_leader_variable():
    with pytest.raises(CheckPreconditionError):
        check_electoral(gen_two_process_sync_io())


def test_electoral_disagreement_fails():
    sys = pair("leader := @a", "leader := @b", edges=())
    r = check_electoral(sys)
    assert r.verdict == FAIL and "a=a, b=b" in r.witnesses[0]


def test_electoral_leader_must_name_a_process():
    sys = pair("leader := 1", "leader := 1", edges=())
    assert check_electoral(sys).verdict == FAIL


def test_electoral_agreement_passes():
    sys = pair("leader := @b", "leader := @b", edges=())
    r = check_electoral(sys)
    assert r.passed and terminal_values(explore(sys), "leader")[0]["a"].name == "b"


def test_electoral_deadlock_fails():
    sys = pair("leader := @a; @b ? x", "leader := @a; @a ? x")
    assert check_electoral(sys).verdict == FAIL


@pytest.mark.parametrize("method", ["automaton", "enumerate"])
def test_symmetry_example(method):
    sys = gen_two_process_sync_io()
    r = check_symmetric(sys, automorphisms(sys.network), method=method)
    assert r.verdict == PASS and r.stats["group_size"] == 2


@pytest.mark.parametrize("method", ["automaton", "enumerate"])
def test_symmetry_asymmetric_fails(method):
    sys = gen_asymmetric()
    r = check_symmetric(sys, automorphisms(sys.network), method=method)
    assert r.verdict == FAIL
    c = r.witnesses[1]
    assert c.steps[4].kind == "comm" and c.steps[4].actors == ("Q0", "Q1")


@pytest.mark.parametrize("factory", SMALL)
def test_symmetry_methods_agree(factory):
    sys = factory()
    group = automorphisms(sys.network)
    a = check_symmetric(sys, group)
    b = check_symmetric(sys, group, BIG_CAP, method="enumerate")
    assert a.verdict == b.verdict


def test_symmetry_trivial_group_passes():
    sys = gen_asymmetric()
    assert check_symmetric(sys, [Permutation.identity(sys.vertices)]).passed


def test_symmetry_domain_mismatch():
    sys = gen_asymmetric()
    with pytest.raises(CheckPreconditionError):
        check_symmetric(sys, [Permutation.identity(["x", "y"])])


def test_symmetry_unknown_on_limits():
    sys = gen_two_process_sync_io()
    group = automorphisms(sys.network)
    assert check_symmetric(sys, group, Limits(max_depth=3)).verdict == UNKNOWN
    assert check_symmetric(sys, group, Limits(cap=5), method="enumerate").verdict == UNKNOWN


def test_symmetry_unknown_on_divergence():
    sys = pair("do [ true -> skip ] od", "do [ true -> skip ] od", edges=())
    assert check_symmetric(sys, [swap("a", "b", sys.vertices)]).verdict == UNKNOWN


def test_symmetry_sync_io_three_cycle():
    sys = gen_sync_io(three_cycle())
    r = check_symmetric(sys, automorphisms(sys.network))
    assert r.passed and r.stats["group_size"] == 3


_COMPS = list(computations(explore(gen_two_process_sync_io())))
_VERTS = ["P0", "P1"]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(_COMPS), permutations_of(_VERTS))
def test_renaming_round_trips(c, p):
    assert rename_computation(rename_computation(c, p), p.inverse()).labels == c.labels
    ident = Permutation.identity(_VERTS)
    assert rename_computation(c, ident).labels == c.labels


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(_COMPS))
def test_renaming_swaps_actors(c):
    p = swap("P0", "P1", _VERTS)
    for a, b in zip(c.steps, rename_computation(c, p).steps):
        assert tuple(p(x) for x in a.actors) == b.actors
        assert rename_step(a, p).kind == a.kind


def test_report_lines_indent_witness():
    r = check_pairwise_sync(gen_buffer_system(), ["R0", "R1"])
    lines = r.lines()
    assert lines[:2] == ["property=pairwise-sync", "verdict=fail"]
    assert any(line.startswith("  1 ") for line in lines)
