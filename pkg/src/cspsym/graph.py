"""Directed communication networks, vertex permutations and automorphisms.

Vertex names are opaque strings; everything that iterates over vertices does
so in lexicographic order so that reports are reproducible.
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from functools import reduce
from itertools import permutations, product
from typing import Iterable, Iterator, Mapping

DEFAULT_SEARCH_BOUND = 12

NAME_RE = re.compile(r"[A-Za-z0-9_.']+\Z")


class GraphError(ValueError):
    """Malformed network or permutation."""


class GraphFormatError(GraphError):
    def __init__(self, message: str, line: int | None = None, source: str = "<graph>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


class SearchBoundExceeded(RuntimeError):
    """Raised instead of silently truncating a factorial search."""

    def __init__(self, size: int, bound: int):
        self.size = size
        self.bound = bound
        super().__init__(f"automorphism search over {size} vertices exceeds bound {bound}")


class Network:
    """A directed graph without self-loops.

    >>> n = Network(["1", "2", "3"], [("1", "2"), ("2", "3"), ("3", "1")])
    >>> n.successors("1")
    ('2',)
    """

    __slots__ = ("vertices", "edges", "_succ", "_pred", "_hash")

    def __init__(self, vertices: Iterable[str], edges: Iterable[tuple[str, str]] = ()):
        vs = tuple(sorted(set(vertices)))
        es = frozenset((a, b) for a, b in edges)
        vset = set(vs)
        for a, b in es:
            if a == b:
                raise GraphError(f"self-loop on vertex {a!r}")
            if a not in vset or b not in vset:
                raise GraphError(f"edge {a!r} -> {b!r} has an undeclared endpoint")
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", es)
        succ: dict[str, list[str]] = {v: [] for v in vs}
        pred: dict[str, list[str]] = {v: [] for v in vs}
        for a, b in es:
            succ[a].append(b)
            pred[b].append(a)
        object.__setattr__(self, "_succ", {v: tuple(sorted(s)) for v, s in succ.items()})
        object.__setattr__(self, "_pred", {v: tuple(sorted(p)) for v, p in pred.items()})
        object.__setattr__(self, "_hash", hash((vs, es)))

    def __setattr__(self, name, value):
        raise AttributeError("Network is immutable")

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Network({list(self.vertices)!r}, {sorted(self.edges)!r})"

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        return v in self._succ

    def has_edge(self, a: str, b: str) -> bool:
        return (a, b) in self.edges

    def successors(self, v: str) -> tuple[str, ...]:
        return self._succ[v]

    def predecessors(self, v: str) -> tuple[str, ...]:
        return self._pred[v]

    def sorted_edges(self) -> list[tuple[str, str]]:
        return sorted(self.edges)

    def to_text(self) -> str:
        lines = [f"vertex {v}" for v in self.vertices]
        lines += [f"edge {a} -> {b}" for a, b in self.sorted_edges()]
        return "\n".join(lines) + "\n"


def parse_graph_line(line: str, lineno: int, source: str) -> tuple[str, tuple[str, ...]] | None:
    """Parse one ``vertex``/``edge`` line. Returns ``None`` for blanks and comments."""
    text = line.split("#", 1)[0].strip()
    if not text:
        return None
    words = text.split()
    if words[0] == "vertex":
        if len(words) != 2:
            raise GraphFormatError("expected 'vertex <name>'", lineno, source)
        _check_name(words[1], lineno, source)
        return "vertex", (words[1],)
    if words[0] == "edge":
        if len(words) != 4 or words[2] != "->":
            raise GraphFormatError("expected 'edge <name> -> <name>'", lineno, source)
        _check_name(words[1], lineno, source)
        _check_name(words[3], lineno, source)
        return "edge", (words[1], words[3])
    raise GraphFormatError(f"unknown directive {words[0]!r}", lineno, source)


def _check_name(name: str, lineno: int, source: str) -> None:
    if not NAME_RE.match(name):
        raise GraphFormatError(f"invalid vertex name {name!r}", lineno, source)


class GraphBuilder:
    """Accumulates vertex/edge declarations and applies the file-format rules."""

    def __init__(self, source: str = "<graph>"):
        self.source = source
        self.vertices: list[str] = []
        self.edges: list[tuple[str, str, int]] = []
        self._seen: set[str] = set()

    def add(self, kind: str, args: tuple[str, ...], lineno: int) -> None:
        if kind == "vertex":
            (name,) = args
            if name in self._seen:
                raise GraphFormatError(f"duplicate vertex {name!r}", lineno, self.source)
            self._seen.add(name)
            self.vertices.append(name)
        else:
            a, b = args
            if a == b:
                raise GraphFormatError(f"self-loop edge on {a!r}", lineno, self.source)
            self.edges.append((a, b, lineno))

    def build(self) -> Network:
        for a, b, lineno in self.edges:
            for end in (a, b):
                if end not in self._seen:
                    raise GraphFormatError(f"edge endpoint {end!r} is not a declared vertex",
                                           lineno, self.source)
        return Network(self.vertices, [(a, b) for a, b, _ in self.edges])


def parse_graph(text: str, source: str = "<graph>") -> Network:
    """Parse the line-oriented graph format (``vertex v`` / ``edge a -> b``)."""
    builder = GraphBuilder(source)
    for lineno, line in enumerate(text.splitlines(), 1):
        item = parse_graph_line(line, lineno, source)
        if item is not None:
            builder.add(*item, lineno)
    return builder.build()


# ---------------------------------------------------------------------------
# Permutations


class Permutation:
    """A bijection of a finite set of vertex names onto itself.

    Composition follows function notation: ``(p * q)(x) == p(q(x))``.
    """

    __slots__ = ("_m", "_hash")

    def __init__(self, mapping: Mapping[str, str]):
        m = dict(mapping)
        if set(m.values()) != set(m):
            raise GraphError("mapping is not a bijection of its domain")
        object.__setattr__(self, "_m", m)
        object.__setattr__(self, "_hash", hash(frozenset(m.items())))

    def __setattr__(self, name, value):
        raise AttributeError("Permutation is immutable")

    @classmethod
    def identity(cls, domain: Iterable[str]) -> Permutation:
        return cls({v: v for v in domain})

    @classmethod
    def from_cycles(cls, text: str, domain: Iterable[str]) -> Permutation:
        """Parse cycle notation such as ``(1 2 3)(1a 2a)``; unmentioned points are fixed."""
        m = {v: v for v in domain}
        seen: set[str] = set()
        body = text.strip()
        if body in ("", "()", "id"):
            return cls(m)
        for cyc in re.findall(r"\(([^()]*)\)", body):
            pts = cyc.replace(",", " ").split()
            for x in pts:
                if x not in m:
                    raise GraphError(f"cycle point {x!r} is not in the domain")
                if x in seen:
                    raise GraphError(f"point {x!r} appears twice in cycle notation")
                seen.add(x)
            for i, x in enumerate(pts):
                m[x] = pts[(i + 1) % len(pts)]
        if re.sub(r"\([^()]*\)", "", body).strip():
            raise GraphError(f"malformed cycle notation {text!r}")
        return cls(m)

    @property
    def domain(self) -> tuple[str, ...]:
        return tuple(sorted(self._m))

    def __call__(self, v: str) -> str:
        return self._m[v]

    def get(self, v: str, default: str | None = None) -> str | None:
        return self._m.get(v, default)

    def items(self):
        return sorted(self._m.items())

    def image(self, vs: Iterable[str]) -> frozenset[str]:
        return frozenset(self._m[v] for v in vs)

    def __mul__(self, other: Permutation) -> Permutation:
        if set(self._m) != set(other._m):
            raise GraphError("cannot compose permutations on different domains")
        return Permutation({v: self._m[other._m[v]] for v in other._m})

    def inverse(self) -> Permutation:
        return Permutation({w: v for v, w in self._m.items()})

    def __pow__(self, k: int) -> Permutation:
        if k < 0:
            return self.inverse() ** (-k)
        out = {}
        for v in self._m:
            w = v
            for _ in range(k % self.orbit_size(v)):
                w = self._m[w]
            out[v] = w
        return Permutation(out)

    def apply_power(self, v: str, k: int) -> str:
        for _ in range(k):
            v = self._m[v]
        return v

    def orbit(self, v: str) -> tuple[str, ...]:
        out = [v]
        w = self._m[v]
        while w != v:
            out.append(w)
            w = self._m[w]
        return tuple(out)

    def orbit_size(self, v: str) -> int:
        return len(self.orbit(v))

    def orbits(self) -> list[frozenset[str]]:
        """Orbits as sets, ordered by their least element."""
        seen: set[str] = set()
        out = []
        for v in sorted(self._m):
            if v not in seen:
                o = self.orbit(v)
                seen.update(o)
                out.append(frozenset(o))
        return out

    def cycles(self) -> list[tuple[str, ...]]:
        """Cycles starting at their least element, fixed points omitted."""
        out = []
        for o in self.orbits():
            if len(o) > 1:
                out.append(self.orbit(min(o)))
        return out

    def period(self) -> int:
        return reduce(math.lcm, (len(o) for o in self.orbits()), 1)

    def is_identity(self) -> bool:
        return all(v == w for v, w in self._m.items())

    def is_well_balanced(self) -> bool:
        return len({len(o) for o in self.orbits()}) <= 1

    def restrict(self, vs: Iterable[str]) -> Permutation:
        vs = set(vs)
        if self.image(vs) != vs:
            raise GraphError("restriction domain is not invariant")
        return Permutation({v: self._m[v] for v in vs})

    def extends(self, other: Permutation) -> bool:
        return all(self._m.get(v) == w for v, w in other._m.items())

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self._m == other._m

    def __hash__(self):
        return self._hash

    def __str__(self):
        cyc = self.cycles()
        if not cyc:
            return "id"
        return "".join("(" + " ".join(c) + ")" for c in cyc)

    def __repr__(self):
        return f"Permutation({str(self)!r})"

    def sort_key(self) -> tuple[str, ...]:
        return tuple(self._m[v] for v in sorted(self._m))


def period(p: Permutation) -> int:
    return p.period()


def orbits(p: Permutation) -> list[frozenset[str]]:
    return p.orbits()


def is_well_balanced(p: Permutation) -> bool:
    return p.is_well_balanced()


# ---------------------------------------------------------------------------
# Connectivity


def _reach(start: str, nbrs) -> set[str]:
    seen = {start}
    todo = deque([start])
    while todo:
        v = todo.popleft()
        for w in nbrs(v):
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def reachable(net: Network, start: str) -> set[str]:
    return _reach(start, net.successors)


def strongly_connected(net: Network) -> bool:
    if len(net.vertices) <= 1:
        return True
    root = net.vertices[0]
    n = len(net.vertices)
    return len(_reach(root, net.successors)) == n and len(_reach(root, net.predecessors)) == n


def directly_connected(net: Network) -> bool:
    vs = net.vertices
    for i, a in enumerate(vs):
        for b in vs[i + 1:]:
            if (a, b) not in net.edges and (b, a) not in net.edges:
                return False
    return True


def missing_direct_pairs(net: Network) -> list[tuple[str, str]]:
    vs = net.vertices
    return [(a, b) for i, a in enumerate(vs) for b in vs[i + 1:]
            if (a, b) not in net.edges and (b, a) not in net.edges]


# ---------------------------------------------------------------------------
# Automorphisms


def is_automorphism(net: Network, p: Permutation) -> bool:
    if set(p.domain) != set(net.vertices):
        return False
    return all((p(a), p(b)) in net.edges for a, b in net.edges)


def iter_automorphisms(
    net: Network,
    bound: int = DEFAULT_SEARCH_BOUND,
    candidates: Mapping[str, Iterable[str]] | None = None,
) -> Iterator[Permutation]:
    """Backtracking search over vertex images, pruned by degree signatures.

    ``candidates`` optionally restricts the allowed images of each vertex;
    it is how extension lifting and block-respecting searches are expressed.
    Results come out in lexicographic order of the image tuple.
    """
    n = len(net.vertices)
    if n > bound:
        raise SearchBoundExceeded(n, bound)
    edges = net.edges
    sig = {v: (len(net.predecessors(v)), len(net.successors(v))) for v in net.vertices}
    allowed: dict[str, list[str]] = {}
    for v in net.vertices:
        pool = net.vertices if candidates is None or v not in candidates else sorted(candidates[v])
        allowed[v] = [w for w in pool if w in sig and sig[w] == sig[v]]
    # most constrained first, then by name; keeps the search deterministic
    order = sorted(net.vertices, key=lambda v: (len(allowed[v]), v))
    mapping: dict[str, str] = {}
    used: set[str] = set()
    found: list[dict[str, str]] = []

    def extend(i: int) -> Iterator[dict[str, str]]:
        if i == n:
            yield dict(mapping)
            return
        v = order[i]
        for w in allowed[v]:
            if w in used:
                continue
            ok = True
            for u, img in mapping.items():
                if ((u, v) in edges) != ((img, w) in edges) or ((v, u) in edges) != ((w, img) in edges):
                    ok = False
                    break
            if not ok:
                continue
            mapping[v] = w
            used.add(w)
            yield from extend(i + 1)
            del mapping[v]
            used.discard(w)

    if candidates is None:
        # full enumeration: sort for a canonical order
        found = list(extend(0))
        found.sort(key=lambda m: tuple(m[v] for v in net.vertices))
        for m in found:
            yield Permutation(m)
    else:
        for m in extend(0):
            yield Permutation(m)


def automorphisms(net: Network, bound: int = DEFAULT_SEARCH_BOUND) -> list[Permutation]:
    """All edge-preserving permutations of ``net``, in lexicographic image order."""
    return list(iter_automorphisms(net, bound))


def automorphisms_bruteforce(net: Network, by_degree: bool = False) -> list[Permutation]:
    """Filter candidate permutations one by one; the independent oracle.

    By default all |V|! permutations are tried. ``by_degree=True`` tries
    every permutation that keeps each (in-degree, out-degree) class in
    place, a complete candidate set since automorphisms preserve degrees.
    """
    vs = net.vertices
    if not by_degree:
        cands = (dict(zip(vs, img)) for img in permutations(vs))
    else:
        classes: dict[tuple[int, int], list[str]] = {}
        for v in vs:
            classes.setdefault((len(net.predecessors(v)), len(net.successors(v))), []).append(v)
        groups = list(classes.values())
        cands = (
            {a: b for grp, img in zip(groups, imgs) for a, b in zip(grp, img)}
            for imgs in product(*(permutations(g) for g in groups))
        )
    out = []
    for m in cands:
        p = Permutation(m)
        if is_automorphism(net, p):
            out.append(p)
    return sorted(out, key=lambda p: tuple(p(v) for v in vs))


def wamoti(net: Network, bound: int = DEFAULT_SEARCH_BOUND) -> list[Permutation]:
    """Non-trivial well-balanced automorphisms."""
    return [p for p in automorphisms(net, bound) if p.period() > 1 and p.is_well_balanced()]


def check_invariant(w: Iterable[str], group: Iterable[Permutation]) -> bool:
    ws = frozenset(w)
    return all(p.image(ws) == ws for p in group)


def is_group(perms: Iterable[Permutation]) -> bool:
    ps = set(perms)
    if not ps:
        return False
    dom = next(iter(ps)).domain
    if Permutation.identity(dom) not in ps:
        return False
    return all(p.inverse() in ps for p in ps) and all(p * q in ps for p in ps for q in ps)


@dataclass(frozen=True)
class PeerToPeerReport:
    enough_vertices: bool
    strongly_connected: bool
    directly_connected: bool
    wamoti: tuple[Permutation, ...] = field(default=())
    missing_pairs: tuple[tuple[str, str], ...] = field(default=())

    @property
    def ok(self) -> bool:
        return (self.enough_vertices and self.strongly_connected
                and self.directly_connected and bool(self.wamoti))

    def __bool__(self):
        return self.ok

    def lines(self) -> list[str]:
        return [
            f"at_least_two_vertices={str(self.enough_vertices).lower()}",
            f"strongly_connected={str(self.strongly_connected).lower()}",
            f"directly_connected={str(self.directly_connected).lower()}",
            f"wamoti_nonempty={str(bool(self.wamoti)).lower()}",
            f"peer_to_peer={str(self.ok).lower()}",
        ]


def is_peer_to_peer(net: Network, bound: int = DEFAULT_SEARCH_BOUND) -> PeerToPeerReport:
    return PeerToPeerReport(
        enough_vertices=len(net.vertices) >= 2,
        strongly_connected=strongly_connected(net),
        directly_connected=directly_connected(net),
        wamoti=tuple(wamoti(net, bound)),
        missing_pairs=tuple(missing_direct_pairs(net)),
    )
