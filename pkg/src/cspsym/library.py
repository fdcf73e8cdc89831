"""Concrete networks, systems and program transformations.

Named networks and extensions are reconstructions of small textbook
examples; generators return instantiated :class:`System` objects whose
programs can be printed as DSL text and parsed back.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Mapping

from .extension import ExtendedNetwork
from .graph import (
    DEFAULT_SEARCH_BOUND,
    Network,
    Permutation,
    automorphisms,
    directly_connected,
    is_peer_to_peer,
    strongly_connected,
)
from .lang.parser import parse_program
from .lang.syntax import (
    Assign,
    Binary,
    Branch,
    Lit,
    Program,
    Recv,
    Repeat,
    Select,
    Send,
    Stmt,
    TRUE,
    TagExpr,
    Unary,
    VarRef,
    has_communication,
    peer_name,
    vertex_lit,
)
from .lang.system import System, admits, check_dialect, instantiate
from .lang.values import Atom, Int


class LibraryError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Networks


def two_vertex_network(a: str = "P0", b: str = "P1") -> Network:
    return Network([a, b], [(a, b), (b, a)])


def three_cycle() -> Network:
    return Network(["1", "2", "3"], [("1", "2"), ("2", "3"), ("3", "1")])


def buffer_network() -> Network:
    return Network(["R0", "R0'", "R1", "R1'"],
                   [("R0", "R0'"), ("R0'", "R1"), ("R1", "R1'"), ("R1'", "R0")])


def example_graph_h() -> Network:
    """Four vertices whose only non-trivial automorphism is (1 3)(2 4)."""
    return Network("1234", [("1", "2"), ("3", "4"), ("2", "3"), ("4", "1"), ("1", "3"), ("3", "1"),
                            ("2", "4"), ("4", "2"), ("2", "1"), ("4", "3")])


def positive_network() -> Network:
    """Two hubs joined both ways to everything, three voters on a one-way triangle."""
    edges = [("1", "2"), ("2", "1")]
    for c in "12":
        for v in "345":
            edges += [(c, v), (v, c)]
    edges += [("3", "4"), ("4", "5"), ("5", "3")]
    return Network("12345", edges)


def hub_network() -> Network:
    return Network("123", [("1", "2"), ("2", "1"), ("1", "3"), ("3", "1"), ("3", "2")])


NETWORKS: dict[str, Callable[[], Network]] = {
    "two-vertex": two_vertex_network,
    "three-cycle": three_cycle,
    "buffer": buffer_network,
    "example-h": example_graph_h,
    "positive": positive_network,
    "hub": hub_network,
}


# ---------------------------------------------------------------------------
# Extensions


def _ext(base: Network, helpers: Mapping[str, list[str]], edges) -> ExtendedNetwork:
    vertices = list(base.vertices) + [h for hs in helpers.values() for h in hs]
    part = {v: frozenset([v, *helpers.get(v, [])]) for v in base.vertices}
    return ExtendedNetwork(base, Network(vertices, edges), part)


def p2p_extension() -> ExtendedNetwork:
    """The 3-cycle with three helpers per peer (12 vertices)."""
    base = three_cycle()
    succ = {"1": "2", "2": "3", "3": "1"}
    edges = []
    for v, s in succ.items():
        edges += [(v, s), (v + "c", s), (v + "a", s + "a"),
                  (v, v + "a"), (v + "a", v), (v, v + "b"), (v + "b", v + "c")]
    return _ext(base, {v: [v + "a", v + "b", v + "c"] for v in succ}, edges)


def slicing_extension() -> ExtendedNetwork:
    base = two_vertex_network("1", "2")
    helpers = {v: [v + "a", v + "b", v + "c"] for v in "12"}
    edges = [("1", "2"), ("2", "1")]
    for v, hs in helpers.items():
        for h in hs:
            edges += [(v, h), (h, v)]
    return _ext(base, helpers, edges)


SLICING_SIGMA = "(1 2)"
SLICING_IOTA = "(1 2)(2a 1a 2c 1b 2b 1c)"


def gsym_extension() -> ExtendedNetwork:
    """Base 1<->2 extended to the directed 4-cycle 1 -> 1a -> 2 -> 2a -> 1."""
    base = two_vertex_network("1", "2")
    return _ext(base, {"1": ["1a"], "2": ["2a"]},
                [("1", "1a"), ("1a", "2"), ("2", "2a"), ("2a", "1")])


def multi_orbit_extension() -> ExtendedNetwork:
    """Base ``example_graph_h`` with two helpers per peer (12 vertices)."""
    base = example_graph_h()
    helpers = {v: [v + "a", v + "b"] for v in base.vertices}
    edges = list(base.edges)
    for v, hs in helpers.items():
        for h in hs:
            edges += [(v, h), (h, v)]
    return _ext(base, helpers, edges)


MULTI_ORBIT_SIGMA = "(1 3)(2 4)"
MULTI_ORBIT_IOTA = "(1 3)(2 4)(1a 3a 1b 3b)(2a 4a 2b 4b)"


EXTENSIONS: dict[str, Callable[[], ExtendedNetwork]] = {
    "p2p-ext": p2p_extension,
    "slicing": slicing_extension,
    "gsym": gsym_extension,
    "multi-orbit": multi_orbit_extension,
}


# ---------------------------------------------------------------------------
# Small helpers for building programs


def _checked(sys: System, dialect: str) -> System:
    bad = admits(sys.network, sys)
    if not bad:
        raise LibraryError(f"network does not admit the system: {bad.offending}")
    for v in sys.vertices:
        vs = check_dialect(sys.body(v), dialect)
        if vs:
            raise LibraryError(f"process {v} violates the {dialect} dialect: {vs[0]}")
    return sys


def _concrete(net: Network, bodies: Mapping[str, tuple[Stmt, ...]], atoms=(), name="system",
              prog_name: Callable[[str], str] = lambda v: "p_" + _ident(v)) -> System:
    progs = {v: (Program(prog_name(v), (), tuple(atoms), tuple(bodies[v])), {}) for v in net.vertices}
    return instantiate(net, progs, name)


def _ident(v: str) -> str:
    return "".join(c if c.isalnum() or c == "_" else "_" for c in v)


def _v(name: str) -> Lit:
    return vertex_lit(name)


def _var(name: str, index: str | None = None) -> VarRef:
    return VarRef(name, None if index is None else _v(index))


def _assign(pairs) -> Assign:
    pairs = list(pairs)
    return Assign(tuple(t for t, _ in pairs), tuple(e for _, e in pairs))


def _select(branches) -> Select:
    return Select(tuple(branches))


def _eq(a, b) -> Binary:
    return Binary("=", a, b)


# ---------------------------------------------------------------------------
# Two-process examples


SYNC_IO_PROGRAM = """\
program syncio(PEER)
recd := false;
sent := false;
do [
     not recd & PEER ? x -> recd := true
  [] not sent & PEER ! self -> sent := true
] od
"""

DEADLOCK_IN_PROGRAM = """\
program syncin(PEER)
recd := false;
sent := false;
do [
     not recd & PEER ? x -> recd := true
  [] not sent -> PEER ! self; sent := true
] od
"""

BUFFER_MAIN_PROGRAM = """\
program main(IN, OUT)
recd := false;
sent := false;
do [
     not recd & IN ? x -> recd := true
  [] not sent -> OUT ! self; sent := true
] od
"""

BUFFER_PROGRAM = """\
program buffer(IN, OUT)
IN ? y;
OUT ! y
"""

ASYMMETRIC_PROGRAM = """\
program asym(PEER)
if [
     self = @Q0 -> PEER ! self
  [] self = @Q1 -> PEER ? x
] fi
"""


def gen_two_process_sync_io() -> System:
    net = two_vertex_network()
    prog = parse_program(SYNC_IO_PROGRAM, "syncio.csp")
    sys = instantiate(net, {"P0": (prog, {"PEER": "P1"}), "P1": (prog, {"PEER": "P0"})}, "sync-io")
    return _checked(sys, "io")


def gen_two_process_deadlock_in() -> System:
    net = two_vertex_network("P0'", "P1'")
    prog = parse_program(DEADLOCK_IN_PROGRAM, "syncin.csp")
    sys = instantiate(net, {"P0'": (prog, {"PEER": "P1'"}), "P1'": (prog, {"PEER": "P0'"})},
                      "deadlock-in")
    return _checked(sys, "in")


def gen_buffer_system() -> System:
    net = buffer_network()
    main = parse_program(BUFFER_MAIN_PROGRAM, "main.csp")
    buf = parse_program(BUFFER_PROGRAM, "buffer.csp")
    sys = instantiate(net, {
        "R0": (main, {"IN": "R1'", "OUT": "R0'"}),
        "R1": (main, {"IN": "R0'", "OUT": "R1'"}),
        "R0'": (buf, {"IN": "R0", "OUT": "R1"}),
        "R1'": (buf, {"IN": "R1", "OUT": "R0"}),
    }, "buffer")
    return _checked(sys, "in")


def gen_asymmetric() -> System:
    net = two_vertex_network("Q0", "Q1")
    prog = parse_program(ASYMMETRIC_PROGRAM, "asym.csp")
    sys = instantiate(net, {"Q0": (prog, {"PEER": "Q1"}), "Q1": (prog, {"PEER": "Q0"})}, "asymmetric")
    return _checked(sys, "io")


# ---------------------------------------------------------------------------
# Pairwise synchronization on peer-to-peer networks (output guards)


def sync_io_body(net: Network, v: str) -> tuple[Stmt, ...]:
    w_in = net.predecessors(v)
    w_out = net.successors(v)
    peers = sorted(set(w_in) | set(w_out))
    init = _assign((_var("sync", w), Lit(False)) for w in peers)
    branches = []
    for w in w_in:
        branches.append(Branch(Unary("not", _var("sync", w)), Recv(_v(w), _var("x")),
                               (Assign((_var("sync", w),), (TRUE,)),)))
    for w in w_out:
        branches.append(Branch(Unary("not", _var("sync", w)), Send(_v(w), Lit(Int(0))),
                               (Assign((_var("sync", w),), (TRUE,)),)))
    body: list[Stmt] = []
    if peers:
        body.append(init)
    if branches:
        body.append(Repeat(tuple(branches)))
    return tuple(body)


def gen_sync_io(net: Network, check: bool = True, bound: int = DEFAULT_SEARCH_BOUND) -> System:
    """Each vertex waits for all its neighbours in parallel, one flag per neighbour."""
    if check:
        rep = is_peer_to_peer(net, bound)
        if not rep.ok:
            raise LibraryError("network is not peer-to-peer: " + "; ".join(rep.lines()))
    bodies = {v: sync_io_body(net, v) for v in net.vertices}
    return _checked(_concrete(net, bodies, name="sync-io-net"), "io")


# ---------------------------------------------------------------------------
# Spanning-tree broadcast


def spanning_tree(net: Network, root: str) -> dict[str, str | None]:
    """Parent map of the breadth-first tree from ``root`` (lexicographic tie-break)."""
    if root not in net.vertices:
        raise LibraryError(f"root {root!r} is not a vertex")
    parent: dict[str, str | None] = {root: None}
    q = deque([root])
    while q:
        a = q.popleft()
        for b in net.successors(a):
            if b not in parent:
                parent[b] = a
                q.append(b)
    return parent


def tree_children(parent: Mapping[str, str | None]) -> dict[str, list[str]]:
    kids: dict[str, list[str]] = {v: [] for v in parent}
    for v, p in parent.items():
        if p is not None:
            kids[p].append(v)
    return {v: sorted(k) for v, k in kids.items()}


def spanning_tree_broadcast(net: Network, root: str, var: str = "payload",
                            payload=None) -> dict[str, tuple[Stmt, ...]]:
    """Per-vertex fragments broadcasting ``payload`` from ``root`` along a BFS tree.

    The root stores the payload (``self`` by default) in ``var`` and sends it
    to its tree children; every other vertex accepts it once through an input
    guard over all its in-neighbours and forwards it to its own children.
    """
    if root not in net.vertices:
        raise LibraryError(f"root {root!r} is not a vertex")
    if not strongly_connected(net):
        raise LibraryError("broadcast needs a strongly connected network")
    parent = spanning_tree(net, root)
    kids = tree_children(parent)
    if len(net.vertices) == 1:
        return {root: ()}
    target = _var(var)
    out = {}
    for v in net.vertices:
        forward = tuple(Send(_v(c), target) for c in kids[v])
        if v == root:
            value = _v(root) if payload is None else payload
            out[v] = (Assign((target,), (value,)),) + forward
        else:
            recv = _select(Branch(TRUE, Recv(_v(w), target), ()) for w in net.predecessors(v))
            out[v] = (recv,) + forward
    return out


def _broadcast_from_any(net: Network, v: str, roots: Iterable[str], var: str,
                        root_value, leader_var: str | None = None) -> tuple[Stmt, ...]:
    """Broadcast where the root is decided at run time by ``leader_var``.

    Runs the fragment of the tree rooted at ``r`` under the branch
    ``leader = r``.
    """
    leader_var = leader_var or "leader"
    branches = []
    for r in sorted(roots):
        frag = spanning_tree_broadcast(net, r, var, root_value if r == v else None)[v]
        if r == v and root_value is None:
            frag = (Assign((_var(var),), (_v(r),)),) + frag[1:]
        branches.append(Branch(_eq(_var(leader_var), _v(r)), None, frag))
    return (_select(branches),)


# ---------------------------------------------------------------------------
# Knockout transform: pairwise synchronizer -> electoral system


def knockout_transform(sys: System, members: Iterable[str] | None = None,
                       check_members: bool = False) -> System:
    """Piggyback a ``winning`` flag on every direct exchange among ``members``.

    After each communication between two members the sender sends its
    ``winning`` flag the same way and the receiver drops out if that flag
    was true. Afterwards the single remaining winner sets ``leader`` to its
    own name and broadcasts it; everybody else stores the received name.
    """
    p = set(sys.vertices if members is None else members)
    if not p <= set(sys.vertices):
        raise LibraryError("members must be vertices of the system")
    if not any(has_communication(sys.body(v)) for v in p):
        raise LibraryError("no communications to instrument")
    net = sys.network
    bodies = {}
    for v in sys.vertices:
        body = _instrument(sys.body(v), v, p) if v in p else sys.body(v)
        winner = Branch(_var("winning"), None,
                        (Assign((_var("leader"),), (_v(v),)),)
                        + spanning_tree_broadcast(net, v, "leader")[v][1:])
        others = sorted(p - {v})
        loser_body = _receive_leader(net, v, others)
        if v in p:
            final = (Select((winner, Branch(Unary("not", _var("winning")), None, loser_body))),)
            body = (Assign((_var("winning"),), (TRUE,)),) + body + final
        else:
            body = body + loser_body
        bodies[v] = body
    dialect = "in" if all(not check_dialect(sys.body(v), "in") for v in sys.vertices) else "io"
    return _checked(_concrete(net, bodies, name=sys.name + "-knockout"), dialect)


def _receive_leader(net: Network, v: str, roots: list[str]) -> tuple[Stmt, ...]:
    """Accept the leader's name from any in-neighbour, then forward per the leader's tree."""
    if not roots:
        return ()
    leader = _var("leader")
    recv = _select(Branch(TRUE, Recv(_v(w), leader), ()) for w in net.predecessors(v))
    branches = []
    for r in roots:
        kids = tree_children(spanning_tree(net, r))[v]
        branches.append(Branch(_eq(leader, _v(r)), None, tuple(Send(_v(c), leader) for c in kids)))
    if all(not b.body for b in branches):
        return (recv,)
    return (recv, _select(branches))


def _instrument(stmts: tuple[Stmt, ...], v: str, p: set[str]) -> tuple[Stmt, ...]:
    out: list[Stmt] = []
    for s in stmts:
        if isinstance(s, (Send, Recv)):
            out.append(s)
            out.extend(_after(s, v, p))
        elif isinstance(s, (Select, Repeat)):
            bs = []
            for b in s.branches:
                body = _instrument(b.body, v, p)
                if b.comm is not None:
                    body = _after(b.comm, v, p) + body
                bs.append(Branch(b.cond, b.comm, body, b.pos))
            out.append(type(s)(tuple(bs)))
        else:
            out.append(s)
    return tuple(out)


def _after(c, v: str, p: set[str]) -> tuple[Stmt, ...]:
    w = peer_name(c.peer)
    if w not in p or w == v:
        return ()
    if isinstance(c, Send):
        return (Send(_v(w), _var("winning")),)
    rival = _var("rival")
    return (Recv(_v(w), rival),
            Assign((_var("winning"),), (Binary("and", _var("winning"), Unary("not", rival)),)))


# ---------------------------------------------------------------------------
# Pairwise synchronization with input guards only


@dataclass(frozen=True)
class Phase:
    """A program prefix per vertex that ends with ``leader`` set everywhere."""

    bodies: Mapping[str, tuple[Stmt, ...]]
    atoms: tuple[str, ...]
    leaders: frozenset[str]  # vertices that can end up as leader


def stub_election(net: Network, leader: str) -> Phase:
    return Phase({v: (Assign((_var("leader"),), (_v(leader),)),) for v in net.vertices}, (),
                 frozenset([leader]))


def gen_election_sync_in(net: Network, hub: str | None = None, election: Phase | None = None,
                         bound: int = DEFAULT_SEARCH_BOUND) -> System:
    """Election, hub announcement, arrival ordering at the hub, commanded exchanges.

    ``hub=None`` lets the elected leader act as hub itself. A stub election
    (leader fixed to ``hub``) is only accepted when the network has no
    non-trivial automorphism.
    """
    if not strongly_connected(net) or not directly_connected(net):
        raise LibraryError("network must be strongly and directly connected")
    if election is None:
        if hub is None:
            raise LibraryError("a stub election needs an explicit hub")
        if len(automorphisms(net, bound)) != 1:
            raise LibraryError("stub election is only allowed when the automorphism group is trivial")
        election = stub_election(net, hub)
    for v, body in election.bodies.items():
        if check_dialect(body, "in"):
            raise LibraryError(f"election phase at {v} uses output guards")
    hubs = sorted(election.leaders) if hub is None else [hub]
    for h in hubs:
        bad = [a for a in net.vertices if a != h and not (net.has_edge(h, a) and net.has_edge(a, h))]
        if bad:
            raise LibraryError(f"hub {h} is not connected both ways to {bad}")
    if hub is not None and hub not in net.vertices:
        raise LibraryError(f"hub {hub!r} is not a vertex")

    bodies = {}
    for v in net.vertices:
        body = list(election.bodies[v])
        body += _broadcast_from_any(net, v, election.leaders, "coord",
                                    _v(hub) if hub is not None else _v(v))
        roles = []
        for h in hubs:
            part = _coordinator(net, h) if h == v else _follower(net, v, h)
            roles.append(Branch(_eq(_var("coord"), _v(h)), None, part))
        body.append(_select(roles))
        bodies[v] = tuple(body)
    atoms = tuple(sorted(set(election.atoms) | {"contact", "listen"}))
    return _checked(_concrete(net, bodies, atoms, name="election-sync-in"), "in")


def _contact_direction(net: Network, a: str, b: str):
    """Who contacts whom for the pair (a, b): returns ``(cond, a_first)`` or a static choice.

    ``a`` contacts ``b`` iff (a, b) is an edge and either a arrived earlier
    or (b, a) is not an edge; otherwise ``b`` contacts ``a``.
    """
    ab, ba = net.has_edge(a, b), net.has_edge(b, a)
    if ab and ba:
        return Binary("<", _var("order", a), _var("order", b))
    return Lit(ab)


def _coordinator(net: Network, h: str) -> tuple[Stmt, ...]:
    others = [w for w in net.vertices if w != h]
    body: list[Stmt] = [
        _assign([(_var("order", w), Lit(Int(-1))) for w in others] + [(_var("count"), Lit(Int(0)))]),
    ]
    if others:
        body.append(Repeat(tuple(
            Branch(_eq(_var("order", w), Lit(Int(-1))), Recv(_v(w), _var("x")),
                   (Assign((_var("order", w),), (_var("count"),)),
                    Assign((_var("count"),), (Binary("+", _var("count"), Lit(Int(1))),))))
            for w in others)))
    for a, b in combinations(others, 2):
        a_first = (Send(_v(a), _tag("contact", b)), Send(_v(b), _tag("listen", a)))
        b_first = (Send(_v(b), _tag("contact", a)), Send(_v(a), _tag("listen", b)))
        cond = _contact_direction(net, a, b)
        if cond == Lit(True):
            body.extend(a_first)
        elif cond == Lit(False):
            body.extend(b_first)
        else:
            body.append(Select((Branch(cond, None, a_first),
                                Branch(Unary("not", cond), None, b_first))))
    return tuple(body)


def _tag(tag: str, v: str) -> TagExpr:
    return TagExpr(tag, _v(v))


def _follower(net: Network, c: str, h: str) -> tuple[Stmt, ...]:
    rest = [w for w in net.vertices if w not in (c, h)]
    m = _var("m")
    body: list[Stmt] = [Send(_v(h), Lit(Int(0))), Assign((_var("num"),), (Lit(Int(len(rest))),))]
    cmds = []
    for w in rest:
        if net.has_edge(c, w):
            cmds.append(Branch(_eq(m, _tag("contact", w)), None, (Send(_v(w), Lit(Int(0))),)))
        if net.has_edge(w, c):
            cmds.append(Branch(_eq(m, _tag("listen", w)), None, (Recv(_v(w), _var("x")),)))
    if rest:
        step = (_select(cmds), Assign((_var("num"),), (Binary("-", _var("num"), Lit(Int(1))),)))
        body.append(Repeat((Branch(Binary("<", Lit(Int(0)), _var("num")), Recv(_v(h), m), step),)))
    return tuple(body)


# ---------------------------------------------------------------------------
# Majority election on the two-candidate / three-voter network


def gen_election_majority_in(net: Network, bound: int = DEFAULT_SEARCH_BOUND) -> Phase:
    """Candidates collect voter tokens; whoever holds at least two wins and broadcasts.

    Each candidate starts its requests at a non-deterministically chosen
    voter and proceeds along the voters' cycle. A voter hands its token to
    the first requester and answers ``win`` or ``lose`` to each request.
    """
    if len(net.vertices) != 5:
        raise LibraryError("expected the five-vertex two-candidate network")
    cands, voters = _classes(net)
    if len(cands) != 2 or len(voters) != 3:
        raise LibraryError("expected two candidates and three voters")
    ring = _voter_ring(net, voters)
    bodies = {}
    for c in cands:
        starts = []
        for k in range(len(ring)):
            order = ring[k:] + ring[:k]
            seq: list[Stmt] = []
            for w in order:
                seq += [Send(_v(w), Lit(Int(0))), Recv(_v(w), _var("ans")),
                        Select((Branch(_eq(_var("ans"), Lit(Atom("win"))), None,
                                       (Assign((_var("tokens"),),
                                               (Binary("+", _var("tokens"), Lit(Int(1))),)),)),
                                Branch(_eq(_var("ans"), Lit(Atom("lose"))), None, ())))]
            starts.append(Branch(TRUE, None, tuple(seq)))
        win = Binary("<", Lit(Int(1)), _var("tokens"))
        winner = (Assign((_var("leader"),), (_v(c),)),) + spanning_tree_broadcast(net, c, "leader")[c][1:]
        loser = _receive_leader(net, c, [x for x in cands if x != c])
        bodies[c] = (Assign((_var("tokens"),), (Lit(Int(0)),)), Select(tuple(starts)),
                     Select((Branch(win, None, winner), Branch(Unary("not", win), None, loser))))
    for w in voters:
        init = _assign([(_var("given"), Lit(False))] + [(_var("heard", c), Lit(False)) for c in cands])
        branches = []
        for c in cands:
            reply = Select((Branch(_var("given"), None, (Send(_v(c), Lit(Atom("lose"))),)),
                            Branch(Unary("not", _var("given")), None,
                                   (Send(_v(c), Lit(Atom("win"))), Assign((_var("given"),), (TRUE,))))))
            branches.append(Branch(Unary("not", _var("heard", c)), Recv(_v(c), _var("req")),
                                   (Assign((_var("heard", c),), (TRUE,)), reply)))
        bodies[w] = (init, Repeat(tuple(branches))) + _receive_leader(net, w, cands)
    return Phase(bodies, ("lose", "win"), frozenset(cands))


def _classes(net: Network) -> tuple[list[str], list[str]]:
    full = [v for v in net.vertices
            if all(net.has_edge(v, w) and net.has_edge(w, v) for w in net.vertices if w != v)]
    rest = [v for v in net.vertices if v not in full]
    return full, rest


def _voter_ring(net: Network, voters: list[str]) -> list[str]:
    start = voters[0]
    ring = [start]
    while True:
        nxt = [w for w in net.successors(ring[-1]) if w in voters]
        if len(nxt) != 1:
            raise LibraryError("voters must form a directed cycle")
        if nxt[0] == start:
            break
        ring.append(nxt[0])
    if len(ring) != len(voters):
        raise LibraryError("voters must form a single directed cycle")
    return ring


def majority_election_system(net: Network) -> System:
    """The election phase on its own, as a runnable system."""
    ph = gen_election_majority_in(net)
    return _checked(_concrete(net, ph.bodies, ph.atoms, name="majority-election"), "in")


# ---------------------------------------------------------------------------
# Registry used by the command line


def _positive_sync() -> System:
    net = positive_network()
    return gen_election_sync_in(net, hub="1", election=gen_election_majority_in(net))


GENERATORS: dict[str, Callable[..., System]] = {
    "two-process-sync-io": gen_two_process_sync_io,
    "two-process-deadlock-in": gen_two_process_deadlock_in,
    "buffer": gen_buffer_system,
    "asymmetric": gen_asymmetric,
    "sync-io": lambda net=None: gen_sync_io(net or three_cycle()),
    "knockout": lambda net=None: knockout_transform(gen_sync_io(net) if net else gen_two_process_sync_io()),
    "election-sync-in": lambda net=None: gen_election_sync_in(net or hub_network(), hub=(net or hub_network()).vertices[0]),
    "majority-election": lambda net=None: majority_election_system(net or positive_network()),
    "positive-sync-in": lambda net=None: _positive_sync() if net is None else
        gen_election_sync_in(net, hub=net.vertices[0], election=gen_election_majority_in(net)),
}


def group_of(net: Network, bound: int = DEFAULT_SEARCH_BOUND) -> list[Permutation]:
    return automorphisms(net, bound)
