"""Symmetry-preserving extensions of peer-to-peer networks.

An extension attaches helper vertices to every peer: the peers form the
base network, helpers live in per-peer blocks, and the blocks must be
respected by (lifts of) every base automorphism.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .graph import (
    DEFAULT_SEARCH_BOUND,
    GraphBuilder,
    GraphFormatError,
    Network,
    Permutation,
    _check_name,
    automorphisms,
    is_automorphism,
    iter_automorphisms,
    parse_graph_line,
    reachable,
    strongly_connected,
)


class ExtensionError(ValueError):
    pass


class PreconditionError(ExtensionError):
    def __init__(self, condition: str):
        self.condition = condition
        super().__init__(f"precondition violated: {condition}")


@dataclass(frozen=True)
class ExtendedNetwork:
    base: Network
    ext: Network
    partition: Mapping[str, frozenset[str]]

    def __post_init__(self):
        part = {v: frozenset(s) for v, s in sorted(self.partition.items())}
        object.__setattr__(self, "partition", part)
        if set(part) != set(self.base.vertices):
            raise ExtensionError("partition keys must be exactly the base vertices")
        covered: set[str] = set()
        for v, block in part.items():
            if covered & block:
                raise ExtensionError(f"block of {v!r} overlaps another block")
            covered |= block
        if covered != set(self.ext.vertices):
            raise ExtensionError("blocks do not cover the extension vertices exactly")
        if not set(self.base.vertices) <= set(self.ext.vertices):
            raise ExtensionError("base vertices must be extension vertices")

    def __hash__(self):
        return hash((self.base, self.ext, tuple(self.partition.items())))

    def block_of(self) -> dict[str, str]:
        """Map each extension vertex to the base vertex owning its block."""
        return {u: v for v, block in self.partition.items() for u in block}

    def to_text(self) -> str:
        lines = [f"base vertex {v}" for v in self.base.vertices]
        lines += [f"base edge {a} -> {b}" for a, b in self.base.sorted_edges()]
        lines += self.ext.to_text().splitlines()
        for v, block in self.partition.items():
            lines.append(f"partition {v} : " + " ".join(sorted(block)))
        return "\n".join(lines) + "\n"


def trivial_extension(net: Network) -> ExtendedNetwork:
    return ExtendedNetwork(net, net, {v: frozenset([v]) for v in net.vertices})


def quotient(ext: Network, partition: Mapping[str, Iterable[str]]) -> Network:
    owner = {u: v for v, block in partition.items() for u in block}
    edges = {(owner[a], owner[b]) for a, b in ext.edges if owner[a] != owner[b]}
    return Network(partition.keys(), edges)


def parse_extension(text: str, source: str = "<extension>") -> ExtendedNetwork:
    """Parse an extension file.

    ``vertex``/``edge`` lines describe the extension graph, ``partition v : ...``
    lines give the blocks. Base edges come from ``base edge a -> b`` lines;
    without any ``base`` lines the base is the quotient of the extension.
    """
    ext = GraphBuilder(source)
    base = GraphBuilder(source)
    partition: dict[str, frozenset[str]] = {}
    placed: dict[str, int] = {}
    has_base = False
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("partition"):
            head, sep, rest = body[len("partition"):].partition(":")
            owner = head.strip()
            if not sep or not owner:
                raise GraphFormatError("expected 'partition <base-vertex> : <name> ...'", lineno, source)
            _check_name(owner, lineno, source)
            if owner in partition:
                raise GraphFormatError(f"duplicate partition for {owner!r}", lineno, source)
            members = rest.split()
            for m in members:
                _check_name(m, lineno, source)
                if m in placed:
                    raise GraphFormatError(f"vertex {m!r} already placed on line {placed[m]}",
                                           lineno, source)
                placed[m] = lineno
            partition[owner] = frozenset(members)
        elif body.startswith("base "):
            item = parse_graph_line(body[5:], lineno, source)
            if item is not None:
                has_base = True
                base.add(*item, lineno)
        else:
            item = parse_graph_line(body, lineno, source)
            if item is not None:
                ext.add(*item, lineno)
    ext_net = ext.build()
    missing = set(ext_net.vertices) - set(placed)
    if missing:
        raise GraphFormatError(f"vertices not covered by any partition: {sorted(missing)}", None, source)
    if has_base:
        base_net = base.build()
    else:
        base_net = quotient(ext_net, partition)
    try:
        return ExtendedNetwork(base_net, ext_net, partition)
    except ExtensionError as exc:
        raise GraphFormatError(str(exc), None, source) from exc


# ---------------------------------------------------------------------------
# Verification of the four extension conditions


@dataclass(frozen=True)
class ExtensionReport:
    contains_main: bool
    missing_main: tuple[str, ...]
    blocks_connected: bool
    unconnected_pair: tuple[str, str] | None
    cross_edges: bool
    cross_edge_witness: tuple[str, str] | None
    lifts: bool
    lift_witnesses: tuple[tuple[Permutation, Permutation], ...]
    failing_sigma: Permutation | None
    ext_strongly_connected: bool = field(default=False)

    @property
    def ok(self) -> bool:
        return self.contains_main and self.blocks_connected and self.cross_edges and self.lifts

    def __bool__(self):
        return self.ok

    def lines(self) -> list[str]:
        def b(x):
            return str(x).lower()
        out = [f"cond_i_main_in_block={b(self.contains_main)}"]
        if self.missing_main:
            out.append("cond_i_witness=" + ",".join(self.missing_main))
        out.append(f"cond_ii_blocks_strongly_connected={b(self.blocks_connected)}")
        if self.unconnected_pair:
            out.append("cond_ii_witness=" + ",".join(self.unconnected_pair))
        out.append(f"cond_iii_cross_edges_match_base={b(self.cross_edges)}")
        if self.cross_edge_witness:
            out.append("cond_iii_witness=" + ",".join(self.cross_edge_witness))
        out.append(f"cond_iv_automorphisms_lift={b(self.lifts)}")
        for sigma, iota in self.lift_witnesses:
            out.append(f"cond_iv_lift {sigma} => {iota}")
        if self.failing_sigma is not None:
            out.append(f"cond_iv_witness={self.failing_sigma}")
        out.append(f"ext_strongly_connected={b(self.ext_strongly_connected)}")
        out.append(f"extension_valid={b(self.ok)}")
        return out


def lift(x: ExtendedNetwork, sigma: Permutation, bound: int = DEFAULT_SEARCH_BOUND) -> Permutation | None:
    """Find an automorphism of the extension that extends ``sigma`` and maps blocks to blocks."""
    candidates: dict[str, frozenset[str]] = {}
    for v, block in x.partition.items():
        target = x.partition[sigma(v)]
        candidates[v] = frozenset([sigma(v)])
        for u in block - {v}:
            candidates[u] = target - {sigma(v)}
    return next(iter_automorphisms(x.ext, bound, candidates), None)


def verify_extension(x: ExtendedNetwork, bound: int = DEFAULT_SEARCH_BOUND) -> ExtensionReport:
    missing = tuple(v for v, block in x.partition.items() if v not in block)

    unconnected = None
    for v, block in x.partition.items():
        fwd = reachable(x.ext, v)
        bwd = _coreach(x.ext, v)
        for u in sorted(block - {v}):
            if u not in fwd or u not in bwd:
                unconnected = (v, u)
                break
        if unconnected:
            break

    owner = x.block_of()
    cross = {(owner[a], owner[b]) for a, b in x.ext.edges if owner[a] != owner[b]}
    cross_witness = None
    for pair in sorted(cross ^ set(x.base.edges)):
        cross_witness = pair
        break

    witnesses = []
    failing = None
    for sigma in automorphisms(x.base, bound):
        iota = lift(x, sigma, bound)
        if iota is None:
            failing = sigma
            break
        witnesses.append((sigma, iota))

    return ExtensionReport(
        contains_main=not missing,
        missing_main=missing,
        blocks_connected=unconnected is None,
        unconnected_pair=unconnected,
        cross_edges=cross_witness is None,
        cross_edge_witness=cross_witness,
        lifts=failing is None,
        lift_witnesses=tuple(witnesses),
        failing_sigma=failing,
        ext_strongly_connected=strongly_connected(x.ext),
    )


def _coreach(net: Network, v: str) -> set[str]:
    seen = {v}
    todo = [v]
    while todo:
        a = todo.pop()
        for b in net.predecessors(a):
            if b not in seen:
                seen.add(b)
                todo.append(b)
    return seen


# ---------------------------------------------------------------------------
# G-symmetry filter


def respects_blocks(x: ExtendedNetwork, p: Permutation) -> bool:
    base = set(x.base.vertices)
    if p.image(base) != base:
        return False
    return all(p.image(block) == x.partition[p(v)] for v, block in x.partition.items())


def g_automorphisms(x: ExtendedNetwork, bound: int = DEFAULT_SEARCH_BOUND) -> list[Permutation]:
    return [p for p in automorphisms(x.ext, bound) if respects_blocks(x, p)]


# ---------------------------------------------------------------------------
# Orbit slicing


def slice_orbits(
    x: ExtendedNetwork,
    sigma: Permutation,
    iota: Permutation,
    representatives: Iterable[str] | None = None,
) -> Permutation:
    """Build a well-balanced, block-respecting automorphism from a lift of ``sigma``.

    Inside the block of each representative ``v`` the map jumps ahead to
    ``iota ** (p_u - p + 1)`` where ``p_u`` is the iota-orbit size of ``u``
    and ``p`` the period of ``sigma``; elsewhere it agrees with ``iota``.
    One representative is taken per sigma-orbit, the least one unless
    ``representatives`` says otherwise.
    """
    if not is_automorphism(x.base, sigma):
        raise PreconditionError("sigma is not an automorphism of the base network")
    if sigma.period() <= 1 or not sigma.is_well_balanced():
        raise PreconditionError("sigma is not a non-trivial well-balanced automorphism")
    if not is_automorphism(x.ext, iota):
        raise PreconditionError("iota is not an automorphism of the extension")
    if any(iota(v) != sigma(v) for v in x.base.vertices):
        raise PreconditionError("iota does not extend sigma")
    if any(iota.image(block) != x.partition[sigma(v)] for v, block in x.partition.items()):
        raise PreconditionError("iota does not map each block onto the block of sigma(v)")

    if iota.is_well_balanced():
        return iota

    p = sigma.period()
    sigma_orbits = sigma.orbits()
    if representatives is None:
        reps = [min(o) for o in sigma_orbits]
    else:
        reps = list(representatives)
        for o in sigma_orbits:
            if len([r for r in reps if r in o]) != 1:
                raise PreconditionError(f"need exactly one representative in sigma-orbit {sorted(o)}")
        if not set(reps) <= set(x.base.vertices):
            raise PreconditionError("representatives must be base vertices")

    out = {}
    sliced = set()
    for v in reps:
        for u in x.partition[v]:
            sliced.add(u)
            out[u] = iota.apply_power(u, iota.orbit_size(u) - p + 1)
    for u in x.ext.vertices:
        if u not in sliced:
            out[u] = iota(u)
    result = Permutation(out)
    _check_sliced(x, sigma, result)
    return result


def _check_sliced(x: ExtendedNetwork, sigma: Permutation, s: Permutation) -> None:
    problems = []
    if not is_automorphism(x.ext, s):
        problems.append("not an automorphism")
    if not s.is_well_balanced():
        problems.append("not well-balanced")
    if s.period() != sigma.period():
        problems.append("period differs from sigma")
    if any(s(v) != sigma(v) for v in x.base.vertices):
        problems.append("restriction to base differs from sigma")
    if not respects_blocks(x, s):
        problems.append("blocks not respected")
    if problems:
        raise AssertionError("sliced permutation fails: " + ", ".join(problems))


# ---------------------------------------------------------------------------
# Identifying structure


def id_vertex(v: str, k: int) -> str:
    return f"{v}.id{k}"


def identifying_structure(
    x: ExtendedNetwork,
    check: bool = False,
    bound: int = DEFAULT_SEARCH_BOUND,
) -> ExtendedNetwork:
    """Attach a chain of ``K = |V'|`` fresh vertices to each peer.

    The chain ``v -> i1 -> i2 -> ... -> iK`` with back edges ``i(k+1) -> v``
    and ``iK -> w`` for every ``w`` in the block of ``v`` singles out the
    peers, so every automorphism of the result keeps the peer set and the
    enlarged blocks in step. ``check=True`` verifies this by enumerating the
    automorphisms of the result (subject to ``bound``).
    """
    K = len(x.ext.vertices)
    taken = set(x.ext.vertices)
    vertices = list(x.ext.vertices)
    edges = set(x.ext.edges)
    partition = {}
    for v in x.base.vertices:
        chain = [id_vertex(v, k) for k in range(1, K + 1)]
        clash = taken.intersection(chain)
        if clash:
            raise ExtensionError(f"fresh vertex name clash: {sorted(clash)}")
        vertices += chain
        edges.add((v, chain[0]))
        for k in range(K - 1):
            edges.add((chain[k], chain[k + 1]))
            edges.add((chain[k + 1], v))
        for w in x.partition[v]:
            edges.add((chain[-1], w))
        partition[v] = x.partition[v] | frozenset(chain)
    h = ExtendedNetwork(x.base, Network(vertices, edges), partition)
    if check:
        check_identifying_structure(x, h, bound)
    return h


def extend_over_structure(x: ExtendedNetwork, sigma: Permutation) -> Permutation:
    """Extend a block-respecting automorphism of ``x.ext`` by ``i_{v,k} -> i_{sigma(v),k}``."""
    K = len(x.ext.vertices)
    m = dict(sigma.items())
    for v in x.base.vertices:
        for k in range(1, K + 1):
            m[id_vertex(v, k)] = id_vertex(sigma(v), k)
    return Permutation(m)


def check_identifying_structure(x: ExtendedNetwork, h: ExtendedNetwork,
                                bound: int = DEFAULT_SEARCH_BOUND) -> list[Permutation]:
    """Assert the structural guarantees of :func:`identifying_structure`; returns Aut(H)."""
    expected = len(x.ext.vertices) + len(x.base.vertices) * len(x.ext.vertices)
    if len(h.ext.vertices) != expected:
        raise AssertionError(f"expected {expected} vertices, got {len(h.ext.vertices)}")
    group = automorphisms(h.ext, bound)
    for p in group:
        if not respects_blocks(h, p):
            raise AssertionError(f"automorphism {p} of H does not respect peers/blocks")
    filtered = [s for s in g_automorphisms(x, bound) if s.period() > 1 and s.is_well_balanced()]
    if filtered:
        ext_sigma = extend_over_structure(x, filtered[0])
        if ext_sigma not in group or not ext_sigma.is_well_balanced():
            raise AssertionError("extension of a filtered wamoti member is not in wamoti(H)")
    return group
