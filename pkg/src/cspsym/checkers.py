"""System-level properties decided over explored state graphs.

Pairwise synchronization, electoral systems and semantic symmetry. Every
check returns a :class:`PropertyReport`; an incomplete exploration yields the
verdict ``unknown`` and never ``pass``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .engine import (
    DEFAULT_COMPUTATION_CAP,
    DEFAULT_MAX_DEPTH,
    DEFAULT_MAX_STATES,
    PROPER,
    CapExceeded,
    Computation,
    ExplorationLimit,
    StateGraph,
    Step,
    computations,
    explore,
    rename_label,
    rename_step,
)
from .graph import Permutation
from .lang.syntax import assigned_names
from .lang.system import System
from .lang.values import VarKey, Vertex, show

PASS = "pass"
FAIL = "fail"
UNKNOWN = "unknown"

LEADER = "leader"


class CheckPreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class Limits:
    max_states: int = DEFAULT_MAX_STATES
    max_depth: int = DEFAULT_MAX_DEPTH
    cap: int = DEFAULT_COMPUTATION_CAP

    def header(self) -> str:
        return f"limits max_states={self.max_states} max_depth={self.max_depth} cap={self.cap}"


@dataclass
class PropertyReport:
    prop: str
    verdict: str
    witnesses: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    reason: str = ""

    def __post_init__(self):
        if self.verdict == FAIL and not self.witnesses:
            raise ValueError("a failing report needs a witness")

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def lines(self) -> list[str]:
        out = [f"property={self.prop}", f"verdict={self.verdict}"]
        for k in sorted(self.stats):
            out.append(f"{k}={self.stats[k]}")
        if self.reason:
            out.append(f"reason={self.reason}")
        for i, w in enumerate(self.witnesses, 1):
            if isinstance(w, Computation):
                out.append(f"witness{i}=computation outcome={w.outcome} steps={len(w)}")
                out.extend("  " + line for line in w.lines())
            else:
                out.append(f"witness{i}={w}")
        return out


def _explore(sys: System, limits: Limits, prop: str) -> StateGraph | PropertyReport:
    try:
        return explore(sys, limits.max_states, limits.max_depth)
    except ExplorationLimit as exc:
        return PropertyReport(prop, UNKNOWN, stats=dict(exc.stats), reason=str(exc))


def _stats(g: StateGraph) -> dict:
    st = g.stats()
    st["acyclic"] = str(g.acyclic).lower()
    if g.acyclic:
        st["computations"] = g.count_computations()
    for tag, n in sorted(g.tags().items()):
        st[f"terminal_{tag}"] = n
    return st


def _termination(g: StateGraph, prop: str, stats: dict) -> PropertyReport | None:
    """Fail unless all computations are finite and properly terminated."""
    if not g.acyclic:
        cyc = _cycle_witness(g)
        return PropertyReport(prop, FAIL, [cyc], stats, "divergent computation exists")
    for s, tag in sorted(g.terminal.items()):
        if tag != PROPER:
            c = Computation(tuple(g.path_to(s)), tag)
            return PropertyReport(prop, FAIL, [c], stats, f"{tag} computation exists")
    return None


def _cycle_witness(g: StateGraph) -> str:
    placed = set(g.order)
    for s in range(len(g.states)):
        if s not in placed:
            prefix = g.path_to(s)
            return f"cycle through state {s} reached after {len(prefix)} steps"
    return "cycle"


# ---------------------------------------------------------------------------
# Pairwise synchronization


def _pairs(q: Iterable[str]) -> list[frozenset[str]]:
    return [frozenset(p) for p in combinations(sorted(set(q)), 2)]


def pair_bits(pairs: Sequence[frozenset[str]]) -> dict[frozenset[str], int]:
    return {p: 1 << i for i, p in enumerate(pairs)}


def missing_pairs(g: StateGraph, pairs: Sequence[frozenset[str]]) -> list[int]:
    """Per state: bitset of pairs missed by at least one maximal path from it."""
    bits = pair_bits(pairs)
    full = (1 << len(pairs)) - 1
    miss = [0] * len(g.states)
    for s in reversed(g.order):
        ts = g.transitions[s]
        if not ts:
            miss[s] = full
            continue
        m = 0
        for st, t in ts:
            b = bits.get(frozenset(st.actors), 0) if st.kind == "comm" else 0
            m |= miss[t] & ~b
        miss[s] = m
    return miss


def missing_pairs_bruteforce(g: StateGraph, q: Iterable[str], cap: int = DEFAULT_COMPUTATION_CAP) -> set:
    """Oracle: union over all maximal paths of the pairs each one misses."""
    pairs = _pairs(q)
    out = set()
    for c in computations(g, cap):
        covered = c.comm_pairs()
        out.update(p for p in pairs if p not in covered)
    return out


def check_pairwise_sync(sys: System, q: Iterable[str] | None = None,
                        limits: Limits = Limits()) -> PropertyReport:
    prop = "pairwise-sync"
    q = sorted(set(sys.vertices if q is None else q))
    unknown = set(q) - set(sys.vertices)
    if unknown:
        raise CheckPreconditionError(f"not vertices of the system: {sorted(unknown)}")
    g = _explore(sys, limits, prop)
    if isinstance(g, PropertyReport):
        return g
    stats = _stats(g)
    stats["pairs"] = len(_pairs(q))
    bad = _termination(g, prop, stats)
    if bad:
        return bad
    pairs = _pairs(q)
    miss = missing_pairs(g, pairs)
    if miss[g.initial] == 0:
        return PropertyReport(prop, PASS, stats=stats)
    bit = miss[g.initial] & -miss[g.initial]
    pair = pairs[bit.bit_length() - 1]
    c = _missing_path(g, miss, bit, pair)
    return PropertyReport(prop, FAIL, [f"pair {','.join(sorted(pair))} never communicates directly", c],
                          stats, "missing direct communication")


def _missing_path(g: StateGraph, miss: list[int], bit: int, pair) -> Computation:
    s = g.initial
    path = []
    while g.transitions[s]:
        for st, t in g.transitions[s]:
            covers = st.kind == "comm" and frozenset(st.actors) == pair
            if not covers and miss[t] & bit:
                path.append(st)
                s = t
                break
        else:  # pragma: no cover - miss[] guarantees a continuation
            raise AssertionError("inconsistent coverage bitsets")
    return Computation(tuple(path), g.terminal[s])


def pair_coverage(c: Computation, q: Iterable[str]) -> set[frozenset[str]]:
    """Pairs of ``q`` that communicate directly somewhere in ``c``."""
    covered = c.comm_pairs()
    return {p for p in _pairs(q) if p in covered}


# ---------------------------------------------------------------------------
# Electoral systems


def check_electoral(sys: System, limits: Limits = Limits(), var: str = LEADER) -> PropertyReport:
    prop = "electoral"
    lacking = [v for v in sys.vertices if var not in assigned_names(sys.body(v))]
    if lacking:
        raise CheckPreconditionError(f"processes without a '{var}' variable: {lacking}")
    g = _explore(sys, limits, prop)
    if isinstance(g, PropertyReport):
        return g
    stats = _stats(g)
    bad = _termination(g, prop, stats)
    if bad:
        return bad
    leaders = set()
    key = VarKey(var)
    for s in sorted(g.terminal):
        vals = {v: g.interp.store(g.states[s], v).get(key) for v in sys.vertices}
        distinct = set(vals.values())
        if len(distinct) != 1 or not isinstance(next(iter(distinct)), Vertex) \
                or next(iter(distinct)).name not in sys.vertices:
            c = Computation(tuple(g.path_to(s)), g.terminal[s])
            shown = ", ".join(f"{v}={'unset' if x is None else show(x)}" for v, x in vals.items())
            return PropertyReport(prop, FAIL, [f"terminal leaders: {shown}", c], stats,
                                  "leader variables disagree or name no process")
        leaders |= distinct
    stats["leaders"] = ",".join(sorted(x.name for x in leaders))
    return PropertyReport(prop, PASS, stats=stats)


def terminal_values(g: StateGraph, var: str) -> list[dict[str, object]]:
    key = VarKey(var)
    return [{v: g.interp.store(g.states[s], v).get(key) for v in g.system.vertices}
            for s in sorted(g.terminal)]


# ---------------------------------------------------------------------------
# Symmetry


def rename_computation(c: Computation, p: Permutation) -> Computation:
    return Computation(tuple(rename_step(st, p) for st in c.steps), c.outcome)


def _renamed_inclusion(g: StateGraph, p: Permutation) -> Computation | None:
    """Search for a computation whose renaming under ``p`` is not a computation.

    Runs the graph against a subset construction of itself: a pair
    ``(s, S)`` means "after some path to ``s``, its renamed label sequence
    leads to exactly the states ``S``". A witness exists iff some reachable
    pair has a step without renamed counterpart from ``S``, or ``s`` is
    terminal while ``S`` holds no terminal state.
    """
    index = [dict() for _ in g.states]
    for s, ts in enumerate(g.transitions):
        for st, t in ts:
            index[s].setdefault(st.label, []).append(t)
    start = (g.initial, frozenset([g.initial]))
    parent = {start: None}
    q = deque([start])
    while q:
        node = q.popleft()
        s, S = node
        ts = g.transitions[s]
        if not ts:
            if not any(not g.transitions[u] for u in S):
                return _trace(parent, node, None, g.terminal[s])
            continue
        for st, t in ts:
            lab = rename_label(st.label, p)
            T = frozenset(x for u in S for x in index[u].get(lab, ()))
            if not T:
                return _trace(parent, node, st, None)
            nxt = (t, T)
            if nxt not in parent:
                parent[nxt] = (node, st)
                q.append(nxt)
    return None


def _trace(parent, node, last: Step | None, outcome) -> Computation:
    steps = []
    while parent[node] is not None:
        node, st = parent[node]
        steps.append(st)
    steps.reverse()
    if last is not None:
        steps.append(last)
    return Computation(tuple(steps), outcome or "prefix")


def check_symmetric(sys: System, group: Iterable[Permutation], limits: Limits = Limits(),
                    method: str = "automaton") -> PropertyReport:
    """Every renamed computation must again be a computation.

    ``method="automaton"`` decides this on the state graph without listing
    computations; ``method="enumerate"`` compares computation sets directly
    (subject to ``limits.cap``).
    """
    prop = "symmetry"
    group = sorted(set(group), key=Permutation.sort_key)
    for p in group:
        if set(p.domain) != set(sys.vertices):
            raise CheckPreconditionError(f"permutation {p} is not defined on the system's vertices")
    g = _explore(sys, limits, prop)
    if isinstance(g, PropertyReport):
        return g
    stats = _stats(g)
    stats["group_size"] = len(group)
    if not g.acyclic:
        return PropertyReport(prop, UNKNOWN, stats=stats, reason="divergent computations exist")
    if method == "enumerate":
        return _symmetric_enumerate(g, group, limits, stats)
    for p in group:
        w = _renamed_inclusion(g, p)
        if w is not None:
            return PropertyReport(prop, FAIL, [f"permutation {p}: renamed computation missing", w],
                                  stats, "renamed computation is not a computation")
    return PropertyReport(prop, PASS, stats=stats)


def _symmetric_enumerate(g: StateGraph, group, limits: Limits, stats: dict) -> PropertyReport:
    prop = "symmetry"
    try:
        comps = list(computations(g, limits.cap))
    except CapExceeded as exc:
        return PropertyReport(prop, UNKNOWN, stats=stats, reason=str(exc))
    labels = {c.labels for c in comps}
    for p in group:
        renamed: dict = {}
        for c in comps:
            r = tuple(renamed[lab] if lab in renamed else renamed.setdefault(lab, rename_label(lab, p))
                      for lab in c.labels)
            if r not in labels:
                return PropertyReport(prop, FAIL, [f"permutation {p}: renamed computation missing", c],
                                      stats, "renamed computation is not a computation")
    return PropertyReport(prop, PASS, stats=stats)


def swap(a: str, b: str, domain: Iterable[str]) -> Permutation:
    m = {v: v for v in domain}
    m[a], m[b] = b, a
    return Permutation(m)
