"""Acceptance criteria 1-11.

Run with ``pytest tests/test_acceptance.py`` (a PASS/FAIL line per criterion
is printed in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

import functools
import sys
import time
from pathlib import Path

from hypothesis import given, settings

sys.path.insert(0, str(Path(__file__).parent))

from cspsym.checkers import (  # noqa: E402
    _pairs,
    check_electoral,
    check_pairwise_sync,
    check_symmetric,
    missing_pairs,
    missing_pairs_bruteforce,
    pair_coverage,
    terminal_values,
)
from cspsym.engine import PROPER, explore, random_run, replay  # noqa: E402
from cspsym.extension import (  # noqa: E402
    identifying_structure,
    respects_blocks,
    slice_orbits,
    trivial_extension,
)
from cspsym.graph import (  # noqa: E402
    Network,
    Permutation,
    automorphisms,
    automorphisms_bruteforce,
    is_automorphism,
    wamoti,
)
from cspsym.lang import check_dialect  # noqa: E402
from cspsym.lang.values import Vertex  # noqa: E402
from cspsym.library import (  # noqa: E402
    GENERATORS,
    NETWORKS,
    SLICING_IOTA,
    SLICING_SIGMA,
    gen_asymmetric,
    gen_buffer_system,
    gen_election_sync_in,
    gen_sync_io,
    gen_two_process_deadlock_in,
    gen_two_process_sync_io,
    hub_network,
    knockout_transform,
    slicing_extension,
    three_cycle,
    two_vertex_network,
)

from conftest import networks  # noqa: E402
from systems import REFERENCE_TRACE, pair, single  # noqa: E402

RESULTS: dict[int, str] = {}


def criterion(n: int, title: str):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                RESULTS[n] = f"criterion {n:2d} FAIL {title}"
                raise
            RESULTS[n] = f"criterion {n:2d} PASS {title}"
        return run
    return wrap


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


@criterion(1, "two-process i/o example: exploration, sync, symmetry, trace replay")
def test_criterion_01_example():
    sys_ = gen_two_process_sync_io()
    with Timer() as t:
        g = explore(sys_)
    assert t.seconds < 5
    assert g.complete and g.acyclic
    assert set(g.terminal.values()) == {PROPER}
    assert check_pairwise_sync(sys_, ["P0", "P1"]).passed
    group = automorphisms(sys_.network)
    assert {str(p) for p in group} == {"id", "(P0 P1)"}
    assert check_symmetric(sys_, group).passed
    c = replay(sys_, REFERENCE_TRACE)
    assert c.outcome == PROPER
    assert [(",".join(sorted(s.actors)), s.text()) for s in c.steps] == REFERENCE_TRACE


@criterion(2, "the i/o program has exactly one in-dialect violation")
def test_criterion_02_dialect_gap():
    sys_ = gen_two_process_sync_io()
    for v in sys_.vertices:
        assert check_dialect(sys_.body(v), "io") == []
    (violation,) = check_dialect(sys_.processes["P0"].program, "in")
    assert "output guard" in violation.message


@criterion(3, "input-only variant deadlocks on some computations")
def test_criterion_03_deadlock():
    with Timer() as t:
        g = explore(gen_two_process_deadlock_in())
    assert t.seconds < 5
    tags = g.tags()
    assert tags.get("deadlocked", 0) >= 1 and tags.get(PROPER, 0) >= 1


@criterion(4, "buffered system delivers names without direct R0-R1 communication")
def test_criterion_04_buffer():
    sys_ = gen_buffer_system()
    g = explore(sys_)
    assert g.complete and g.acyclic
    assert set(g.terminal.values()) == {PROPER}
    assert not [s for s in g.steps() if s.kind == "comm" and set(s.actors) == {"R0", "R1"}]
    r = check_pairwise_sync(sys_, ["R0", "R1"])
    assert r.verdict == "fail"
    for final in terminal_values(g, "x"):
        assert final["R0"] == Vertex("R1") and final["R1"] == Vertex("R0")


@criterion(5, "output-guard synchronizer on the 3-cycle and the 2-vertex net")
def test_criterion_05_sync_io():
    for net in (three_cycle(), two_vertex_network()):
        sys_ = gen_sync_io(net)
        with Timer() as t:
            assert check_pairwise_sync(sys_).passed
            assert check_symmetric(sys_, automorphisms(net)).passed
        assert t.seconds < 60


@criterion(6, "knockout transform yields an electoral system with one winner")
def test_criterion_06_knockout():
    with Timer() as t:
        sys_ = knockout_transform(gen_two_process_sync_io())
        assert check_electoral(sys_).passed
        g = explore(sys_)
    assert t.seconds < 30
    leaders = terminal_values(g, "leader")
    for win, lead in zip(terminal_values(g, "winning"), leaders):
        winners = [v for v, flag in win.items() if flag is True]
        assert len(winners) == 1
        assert all(x == Vertex(winners[0]) for x in lead.values())


@criterion(7, "orbit slicing on the two-block instance")
def test_criterion_07_slicing():
    x = slicing_extension()
    sigma = Permutation.from_cycles(SLICING_SIGMA, x.base.vertices)
    iota = Permutation.from_cycles(SLICING_IOTA, x.ext.vertices)
    with Timer() as t:
        s = slice_orbits(x, sigma, iota, representatives=["2"])
    assert t.seconds < 1
    expected = {u: iota(u) for u in x.partition["1"] | {"2"}}
    expected.update({u: iota.apply_power(u, 5) for u in x.partition["2"] - {"2"}})
    assert s == Permutation(expected)
    assert {frozenset(o) for o in s.orbits()} == {
        frozenset(o) for o in [("1", "2"), ("2a", "1c"), ("2c", "1a"), ("2b", "1b")]}
    assert is_automorphism(x.ext, s)
    assert s.is_well_balanced() and s.period() == 2
    assert s.image(x.base.vertices) == set(x.base.vertices)
    assert all(s.image(x.partition[u]) == x.partition[s(u)] for u in x.base.vertices)
    assert respects_blocks(x, s)


@criterion(8, "identifying structure over the 3-cycle, checked by brute force")
def test_criterion_08_identifying_structure():
    with Timer() as t:
        h = identifying_structure(trivial_extension(three_cycle()))
        assert len(h.ext.vertices) == 3 + 3 * 3
        group = automorphisms_bruteforce(h.ext, by_degree=True)
        for p in group:
            assert p.image(h.base.vertices) == set(h.base.vertices)
            assert all(p.image(h.partition[v]) == h.partition[p(v)] for v in h.base.vertices)
        assert wamoti(h.ext)
    assert t.seconds < 60
    assert len(group) == 3


@criterion(9, "input-only synchronizers without well-balanced symmetry")
def test_criterion_09_not_wamoti():
    net = hub_network()
    assert len(automorphisms(net)) == 1
    with Timer() as t:
        sys_ = gen_election_sync_in(net, hub="1")
        assert check_pairwise_sync(sys_).passed
    assert t.seconds < 300
    sys_ = GENERATORS["positive-sync-in"]()
    for v in sys_.vertices:
        assert check_dialect(sys_.body(v), "in") == []
    full = len(_pairs(sys_.vertices))
    with Timer() as t:
        for seed in range(1, 501):
            c = random_run(sys_, seed)
            assert c.outcome == PROPER, seed
            assert len(pair_coverage(c, sys_.vertices)) == full, seed
    assert t.seconds < 300


@criterion(10, "asymmetric program is caught with a witness")
def test_criterion_10_asymmetry():
    sys_ = gen_asymmetric()
    with Timer() as t:
        r = check_symmetric(sys_, automorphisms(sys_.network))
    assert t.seconds < 5
    assert r.verdict == "fail"
    (c,) = [w for w in r.witnesses if hasattr(w, "steps")]
    assert c.steps and any(s.kind == "comm" for s in c.steps)


ORACLE_SYSTEMS = [
    gen_two_process_sync_io,
    gen_two_process_deadlock_in,
    gen_asymmetric,
    lambda: gen_sync_io(two_vertex_network()),
    lambda: knockout_transform(gen_two_process_sync_io()),
    lambda: pair("@b ! 1; @b ? x", "@a ? y; @a ! 2"),
    lambda: pair("if [ true -> @b ! 1 [] true -> skip ] fi", "do [ @a ? y -> skip ] od"),
    lambda: single("x := 1"),
]


@settings(max_examples=200, deadline=None)
@given(networks(min_size=1, max_size=6))
def _pruned_equals_bruteforce(net):
    assert automorphisms(net) == automorphisms_bruteforce(net)


@criterion(11, "pruned search and bitset coverage agree with their oracles")
def test_criterion_11_oracles():
    _pruned_equals_bruteforce()
    for f in NETWORKS.values():
        net = f()
        if len(net.vertices) <= 6:
            assert automorphisms(net) == automorphisms_bruteforce(net)
    checked = 0
    for f in ORACLE_SYSTEMS:
        g = explore(f())
        if not g.acyclic or g.count_computations() > 10_000:
            continue
        vs = g.system.vertices
        for q in [vs] + [list(p) for p in _pairs(vs)]:
            pairs = _pairs(q)
            bits = missing_pairs(g, pairs)[g.initial]
            assert {p for i, p in enumerate(pairs) if bits >> i & 1} == missing_pairs_bruteforce(g, q)
        checked += 1
    assert checked >= 6


def main() -> int:
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    failed = 0
    for t in tests:
        try:
            t()
        except Exception:
            failed += 1
    for n in sorted(RESULTS):
        print(RESULTS[n])
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
