import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cspsym.graph import (
    GraphError,
    GraphFormatError,
    Network,
    Permutation,
    SearchBoundExceeded,
    automorphisms,
    automorphisms_bruteforce,
    check_invariant,
    directly_connected,
    is_automorphism,
    is_group,
    is_peer_to_peer,
    orbits,
    parse_graph,
    period,
    strongly_connected,
    wamoti,
)
from cspsym.library import buffer_network, example_graph_h, positive_network, three_cycle

from conftest import networks, permutations_of, perms


def cycle(n):
    vs = [str(i) for i in range(1, n + 1)]
    return Network(vs, [(vs[i], vs[(i + 1) % n]) for i in range(n)])


# -- networks and files -----------------------------------------------------


def test_network_rejects_self_loop():
    with pytest.raises(GraphError):
        Network(["a"], [("a", "a")])


def test_network_rejects_unknown_endpoint():
    with pytest.raises(GraphError):
        Network(["a"], [("a", "b")])


def test_parse_graph_roundtrip():
    net = buffer_network()
    assert parse_graph(net.to_text()) == net


def test_parse_graph_reports_line():
    with pytest.raises(GraphFormatError) as exc:
        parse_graph("vertex a\nvertex b\nedge a -> c\n", "g.txt")
    assert exc.value.line == 3
    assert "g.txt:3" in str(exc.value)


def test_parse_graph_duplicate_vertex():
    with pytest.raises(GraphFormatError):
        parse_graph("vertex a\nvertex a\n")


def test_parse_graph_self_loop():
    with pytest.raises(GraphFormatError):
        parse_graph("vertex a\nedge a -> a\n")


# -- connectivity -----------------------------------------------------------


def test_strongly_connected_examples():
    assert strongly_connected(three_cycle())
    assert not strongly_connected(Network("12", [("1", "2")]))
    assert strongly_connected(buffer_network())
    assert strongly_connected(Network(["x"]))


def test_directly_connected_examples():
    assert directly_connected(three_cycle())
    assert not directly_connected(buffer_network())
    assert directly_connected(Network("12", [("1", "2"), ("2", "1")]))


@given(networks())
def test_strong_connectivity_matches_networkx(net):
    g = nx.DiGraph()
    g.add_nodes_from(net.vertices)
    g.add_edges_from(net.edges)
    assert strongly_connected(net) == nx.is_strongly_connected(g)


# -- permutations -----------------------------------------------------------


def test_cycle_notation():
    p = Permutation.from_cycles("(1 2 3)(4 5)", "123456")
    assert p("1") == "2" and p("3") == "1" and p("6") == "6"
    assert str(p) == "(1 2 3)(4 5)"
    assert period(p) == 6
    assert not p.is_well_balanced()


def test_cycle_notation_rejects_repeats():
    with pytest.raises(GraphError):
        Permutation.from_cycles("(1 2)(2 3)", "123")


def test_period_examples():
    assert period(Permutation.identity("abc")) == 1
    assert period(Permutation.from_cycles("(a b)", "ab")) == 2
    tau = Permutation.from_cycles("(1 3)(2 4)", "1234")
    assert period(tau) == 2
    assert sorted(map(sorted, orbits(tau))) == [["1", "3"], ["2", "4"]]


def test_composition_is_function_composition():
    p = Permutation.from_cycles("(1 2)", "123")
    q = Permutation.from_cycles("(2 3)", "123")
    assert (p * q)("2") == p(q("2")) == "3"
    assert (q * p)("1") == q(p("1")) == "3"


@given(perms())
def test_period_is_least_identity_power(p):
    k = p.period()
    assert (p ** k).is_identity()
    assert all(not (p ** j).is_identity() for j in range(1, k))


@given(perms())
def test_orbits_partition_domain(p):
    obs = p.orbits()
    assert sum(len(o) for o in obs) == len(p.domain)
    assert set().union(*obs) == set(p.domain)
    for o in obs:
        assert p.image(o) == o


@given(perms())
def test_inverse(p):
    assert (p * p.inverse()).is_identity()
    assert Permutation.from_cycles(str(p), p.domain) == p


# -- automorphisms ----------------------------------------------------------


def test_three_cycle_group():
    group = automorphisms(three_cycle())
    assert len(group) == 3
    assert set(group) == set(automorphisms_bruteforce(three_cycle()))


def test_two_vertex_group():
    net = Network("12", [("1", "2"), ("2", "1")])
    assert {str(p) for p in automorphisms(net)} == {"id", "(1 2)"}


def test_example_h_group():
    group = automorphisms(example_graph_h())
    assert {str(p) for p in group} == {"id", "(1 3)(2 4)"}


def test_positive_network_invariant_classes():
    net = positive_network()
    group = automorphisms(net)
    assert len(group) == 6
    assert check_invariant({"1", "2"}, group)
    assert check_invariant({"3", "4", "5"}, group)
    assert not check_invariant({"1", "3"}, group)
    assert wamoti(net) == []


def test_search_bound():
    with pytest.raises(SearchBoundExceeded):
        automorphisms(cycle(5), bound=4)


@settings(max_examples=150, deadline=None)
@given(networks(max_size=6))
def test_pruned_search_matches_bruteforce(net):
    fast = automorphisms(net)
    assert set(fast) == set(automorphisms_bruteforce(net))
    assert len(fast) == len(set(fast))
    assert is_group(fast)


@settings(max_examples=100, deadline=None)
@given(networks(max_size=6))
def test_pruned_search_matches_networkx(net):
    g = nx.DiGraph()
    g.add_nodes_from(net.vertices)
    g.add_edges_from(net.edges)
    expected = {Permutation(m) for m in nx.algorithms.isomorphism.DiGraphMatcher(g, g).isomorphisms_iter()}
    assert set(automorphisms(net)) == expected


@given(st.data())
def test_is_automorphism_agrees_with_group(data):
    net = data.draw(networks(max_size=5))
    p = data.draw(permutations_of(net.vertices))
    assert is_automorphism(net, p) == (p in set(automorphisms(net)))


# -- peer-to-peer -----------------------------------------------------------


def test_three_cycle_is_p2p():
    rep = is_peer_to_peer(three_cycle())
    assert rep.ok
    assert {str(p) for p in rep.wamoti} == {"(1 2 3)", "(1 3 2)"}


def test_buffer_network_is_not_p2p():
    rep = is_peer_to_peer(buffer_network())
    assert not rep.ok
    assert rep.strongly_connected and not rep.directly_connected
    assert ("R0", "R1") in rep.missing_pairs


def test_single_vertex_is_not_p2p():
    assert not is_peer_to_peer(Network(["a"])).ok


@settings(max_examples=100, deadline=None)
@given(networks(max_size=6))
def test_degree_partitioned_bruteforce_is_complete(net):
    assert automorphisms_bruteforce(net, by_degree=True) == automorphisms_bruteforce(net)
