"""Operational semantics and explicit-state exploration.

Each instantiated process body is compiled into a small control-flow graph.
A process state is ``(pc, open, store)``: the node index (or END/FAILED),
the branches whose Boolean part held at the last guard evaluation (``None``
when the process is not waiting at a guard) and the variable store as a
sorted tuple of ``(VarKey, value)`` pairs. A system state is the tuple of
process states in vertex order.

Step granularity: one step per assignment, one atomic guard-evaluation step
per arrival at a selection or repetition, one joint step per rendezvous and
one local step for taking an open pure-Boolean branch.
"""

from __future__ import annotations

import dataclasses
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

from .lang.syntax import (
    Assign,
    Binary,
    Expr,
    Lit,
    Recv,
    Repeat,
    Select,
    Send,
    Stmt,
    TagExpr,
    Unary,
    VarRef,
    peer_name,
)
from .lang.parser import format_comm, format_expr
from .lang.system import System
from .lang.values import Int, Tagged, VarKey, Vertex, in_range, show

END = -1
FAILED = -2

DEFAULT_MAX_STATES = 1_000_000
DEFAULT_MAX_DEPTH = 10_000
DEFAULT_COMPUTATION_CAP = 100_000

PROPER = "properly-terminated"
DEADLOCK = "deadlocked"
FAILURE = "failed"
TRUNCATED = "truncated"


class EvalError(Exception):
    pass


class ExplorationLimit(Exception):
    def __init__(self, message: str, graph: "StateGraph", stats: dict):
        super().__init__(message)
        self.graph = graph
        self.stats = stats


class Divergent(Exception):
    pass


class CapExceeded(Exception):
    pass


class ReplayError(Exception):
    def __init__(self, index: int, wanted: str, enabled: list[str]):
        self.index = index
        self.wanted = wanted
        self.enabled = enabled
        opts = "; ".join(enabled) or "none"
        super().__init__(f"step {index}: {wanted!r} is not enabled (enabled: {opts})")


# ---------------------------------------------------------------------------
# Expressions


def var_key(v: VarRef) -> VarKey:
    if v.index is None:
        return VarKey(v.name)
    name = peer_name(v.index)
    if name is None:
        raise EvalError(f"uninstantiated index in {v.name}")
    return VarKey(v.name, name)


def evaluate(e: Expr, store: dict):
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, VarRef):
        k = var_key(e)
        if k not in store:
            raise EvalError(f"undefined variable {k}")
        return store[k]
    if isinstance(e, Unary):
        x = evaluate(e.operand, store)
        if e.op == "not":
            return not _bool(x, "not")
        return _int(-_num(x, "-"))
    if isinstance(e, Binary):
        op = e.op
        if op == "and":
            return _bool(evaluate(e.left, store), op) and _bool(evaluate(e.right, store), op)
        if op == "or":
            return _bool(evaluate(e.left, store), op) or _bool(evaluate(e.right, store), op)
        a = evaluate(e.left, store)
        b = evaluate(e.right, store)
        if op == "=":
            return a == b
        if op == "/=":
            return a != b
        if op == "<":
            return _num(a, op) < _num(b, op)
        if op == "+":
            return _int(_num(a, op) + _num(b, op))
        if op == "-":
            return _int(_num(a, op) - _num(b, op))
        raise EvalError(f"unknown operator {op}")
    if isinstance(e, TagExpr):
        arg = evaluate(e.arg, store)
        if not isinstance(arg, Vertex):
            raise EvalError(f"{e.tag}(...) needs a vertex argument, got {show(arg)}")
        return Tagged(e.tag, arg)
    raise EvalError(f"cannot evaluate {e!r}")


def _bool(x, op):
    if not isinstance(x, bool):
        raise EvalError(f"'{op}' expects a Boolean, got {show(x)}")
    return x


def _num(x, op):
    if not isinstance(x, Int):
        raise EvalError(f"'{op}' expects an integer, got {show(x)}")
    return x.n


def _int(n: int) -> Int:
    if not in_range(n):
        raise EvalError(f"integer {n} out of range")
    return Int(n)


# ---------------------------------------------------------------------------
# Compilation to control-flow graphs


@dataclass(frozen=True)
class GuardNode:
    repeat: bool
    branches: tuple  # of (cond, comm | None, body entry)
    exit: int | None


def compile_body(body: tuple[Stmt, ...]) -> tuple[list, int]:
    nodes: list = []

    def seq(stmts, cont: int) -> int:
        for s in reversed(stmts):
            cont = one(s, cont)
        return cont

    def one(s, cont: int) -> int:
        idx = len(nodes)
        if isinstance(s, Assign):
            nodes.append(("assign", s, cont))
        elif isinstance(s, Send):
            nodes.append(("send", s, cont))
        elif isinstance(s, Recv):
            nodes.append(("recv", s, cont))
        elif isinstance(s, Repeat):
            nodes.append(None)
            bs = tuple((b.cond, b.comm, seq(b.body, idx)) for b in s.branches)
            nodes[idx] = ("guard", GuardNode(True, bs, cont))
        elif isinstance(s, Select):
            nodes.append(None)
            bs = tuple((b.cond, b.comm, seq(b.body, cont)) for b in s.branches)
            nodes[idx] = ("guard", GuardNode(False, bs, None))
        else:
            raise TypeError(f"not a statement: {s!r}")
        return idx

    entry = seq(body, END)
    return nodes, entry


# ---------------------------------------------------------------------------
# Steps


class Step(NamedTuple):
    """A computation step.

    ``kind`` is one of ``local``, ``guard``, ``exit``, ``fail``, ``comm``.
    ``actors`` is ``(v,)`` or ``(sender, receiver)``. ``detail`` is the
    name-bearing description used for comparison and renaming. ``move``
    holds the state updates and is not part of the step's identity.
    """

    kind: str
    actors: tuple[str, ...]
    detail: tuple
    move: tuple = ()

    @property
    def label(self) -> tuple:
        return (self.kind, self.actors, self.detail)

    def text(self) -> str:
        return describe(self)

    def sort_key(self):
        return (tuple(sorted(self.actors)), self.kind, describe(self))


def _branch_desc(cond, comm):
    return (cond, comm)


def describe(st: Step) -> str:
    d = st.detail
    if st.kind == "comm":
        a, b, val, var = d
        return f"send {show(val)} from {a.name} to {b.name}'s variable {var}"
    if st.kind == "guard":
        return "evaluate Boolean guards"
    if st.kind == "exit":
        return "evaluate Boolean guards and exit repetition"
    if st.kind == "fail":
        return f"fail: {d[1]}" if d[0] == "error" else "evaluate Boolean guards and fail"
    tag = d[0]
    if tag == "assign":
        pairs = sorted(d[1], key=lambda kv: str(kv[0]))
        vals = ", ".join(show(v) for _, v in pairs)
        names = ", ".join(str(k) for k, _ in pairs)
        return f"assign {vals} to {names}"
    if tag == "choose":
        return f"choose branch {format_expr(d[1][0])}"
    return str(d)


def guard_text(open_set) -> list[str]:
    """Open branches of a guard step in readable form (for reports)."""
    out = []
    for cond, comm in open_set:
        s = format_expr(cond)
        if comm is not None:
            s += " & " + format_comm(comm)
        out.append(s)
    return sorted(out)


def format_step(idx: int, st: Step) -> str:
    return f"{idx} {st.kind} {','.join(sorted(st.actors))} {describe(st)}"


# ---------------------------------------------------------------------------
# The interpreter


class Interpreter:
    """Enabled-step computation and step application for one system."""

    def __init__(self, sys: System):
        self.sys = sys
        self.vertices = sys.vertices
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.cfgs = []
        entries = []
        for v in self.vertices:
            nodes, entry = compile_body(sys.body(v))
            self.cfgs.append(nodes)
            entries.append(entry)
        self.initial = tuple((e, None, ()) for e in entries)

    # -- per-process helpers -------------------------------------------------

    def _local(self, i: int, ps) -> tuple[list[Step], list, list]:
        """Local steps of process ``i`` plus its send and receive offers."""
        v = self.vertices[i]
        pc, open_, store_t = ps
        if pc < 0:
            return [], [], []
        node = self.cfgs[i][pc]
        store = dict(store_t)
        kind = node[0]
        if kind == "assign":
            _, s, nxt = node
            try:
                vals = [evaluate(e, store) for e in s.values]
                keys = [var_key(t) for t in s.targets]
            except EvalError as exc:
                return [_fail_step(v, i, str(exc))], [], []
            upd = tuple(zip(keys, vals))
            st = Step("local", (v,), ("assign", frozenset(upd)), ((i, nxt, None, upd),))
            return [st], [], []
        if kind == "send":
            _, s, nxt = node
            try:
                val = evaluate(s.expr, store)
            except EvalError as exc:
                return [_fail_step(v, i, str(exc))], [], []
            return [], [(peer_name(s.peer), val, nxt)], []
        if kind == "recv":
            _, s, nxt = node
            return [], [], [(peer_name(s.peer), var_key(s.target), nxt)]
        g: GuardNode = node[1]
        if open_ is None:
            return [self._guard_step(i, v, g, pc, store)], [], []
        steps, sends, recvs = [], [], []
        for bi in open_:
            cond, comm, entry = g.branches[bi]
            if comm is None:
                steps.append(Step("local", (v,), ("choose", _branch_desc(cond, None)),
                                  ((i, entry, None, ()),)))
            elif isinstance(comm, Send):
                sends.append((peer_name(comm.peer), evaluate(comm.expr, store), entry))
            else:
                recvs.append((peer_name(comm.peer), var_key(comm.target), entry))
        return steps, sends, recvs

    def _guard_step(self, i: int, v: str, g: GuardNode, pc: int, store: dict) -> Step:
        opened = []
        try:
            for bi, (cond, comm, _) in enumerate(g.branches):
                c = evaluate(cond, store)
                if not isinstance(c, bool):
                    raise EvalError(f"guard {format_expr(cond)} is not Boolean")
                if c:
                    if isinstance(comm, Send):
                        evaluate(comm.expr, store)
                    opened.append(bi)
        except EvalError as exc:
            return _fail_step(v, i, str(exc))
        desc = frozenset(_branch_desc(g.branches[bi][0], g.branches[bi][1]) for bi in opened)
        if opened:
            return Step("guard", (v,), ("guard", desc), ((i, pc, tuple(opened), ()),))
        if g.repeat:
            return Step("exit", (v,), ("exit",), ((i, g.exit, None, ()),))
        return Step("fail", (v,), ("closed",), ((i, FAILED, None, ()),))

    # -- system level --------------------------------------------------------

    def enabled_steps(self, state) -> list[Step]:
        steps: list[Step] = []
        sends = []
        recvs = []
        for i, ps in enumerate(state):
            st, sd, rc = self._local(i, ps)
            steps.extend(st)
            sends.append(sd)
            recvs.append(rc)
        for a, offers in enumerate(sends):
            va = self.vertices[a]
            for target, val, a_next in offers:
                b = self.index.get(target)
                if b is None:
                    continue
                for source, key, b_next in recvs[b]:
                    if source != va:
                        continue
                    move = ((a, a_next, None, ()), (b, b_next, None, ((key, val),)))
                    steps.append(Step("comm", (va, target),
                                      (Vertex(va), Vertex(target), val, key), move))
        steps = list(dict.fromkeys(steps))
        steps.sort(key=Step.sort_key)
        return steps

    def apply_step(self, state, st: Step):
        procs = list(state)
        for i, pc, open_, upd in st.move:
            _, _, store_t = procs[i]
            if upd:
                store = dict(store_t)
                store.update(upd)
                store_t = tuple(sorted(store.items()))
            procs[i] = (pc, open_, store_t)
        return tuple(procs)

    def classify(self, state) -> str:
        pcs = [ps[0] for ps in state]
        if any(pc == FAILED for pc in pcs):
            return FAILURE
        if all(pc == END for pc in pcs):
            return PROPER
        return DEADLOCK

    def store(self, state, v: str) -> dict:
        return dict(state[self.index[v]][2])


def _fail_step(v: str, i: int, msg: str) -> Step:
    return Step("fail", (v,), ("error", msg), ((i, FAILED, None, ()),))


def enabled_steps(sys: System, state) -> list[Step]:
    return Interpreter(sys).enabled_steps(state)


def apply_step(sys: System, state, st: Step):
    return Interpreter(sys).apply_step(state, st)


def initial_state(sys: System):
    return Interpreter(sys).initial


# ---------------------------------------------------------------------------
# State graphs


@dataclass
class StateGraph:
    system: System
    interp: Interpreter
    states: list
    transitions: list  # per state: list of (Step, target id)
    terminal: dict  # state id -> classification
    complete: bool = True
    acyclic: bool = True
    order: list = field(default_factory=list)  # topological order if acyclic
    depth: int = 0

    initial: int = 0

    def __len__(self):
        return len(self.states)

    @property
    def num_transitions(self) -> int:
        return sum(len(t) for t in self.transitions if t)

    def tags(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for tag in self.terminal.values():
            out[tag] = out.get(tag, 0) + 1
        return out

    def steps(self) -> Iterator[Step]:
        for ts in self.transitions:
            for st, _ in ts or ():
                yield st

    def count_computations(self) -> int:
        if not self.acyclic:
            raise Divergent("state graph has a cycle: divergent computations exist")
        n = [0] * len(self.states)
        for s in reversed(self.order):
            ts = self.transitions[s]
            n[s] = 1 if not ts else sum(n[t] for _, t in ts)
        return n[self.initial]

    def path_to(self, target: int) -> list[Step]:
        """A shortest step sequence from the initial state to ``target``."""
        parent = {self.initial: None}
        q = deque([self.initial])
        while q:
            s = q.popleft()
            if s == target:
                break
            for st, t in self.transitions[s] or ():
                if t not in parent:
                    parent[t] = (s, st)
                    q.append(t)
        out = []
        s = target
        while parent.get(s) is not None:
            s, st = parent[s]
            out.append(st)
        return out[::-1]

    def stats(self) -> dict:
        return {"states": len(self.states), "transitions": self.num_transitions,
                "depth": self.depth, "terminals": len(self.terminal)}

    def to_text(self) -> str:
        lines = []
        for s, ts in enumerate(self.transitions):
            ts = ts or ()
            tag = self.terminal.get(s)
            lines.append(f"state {s}" + (f" [{tag}]" if tag else ""))
            for st, t in ts:
                lines.append(f"  {s} -> {t} {st.kind} {','.join(sorted(st.actors))} {describe(st)}")
        return "\n".join(lines) + "\n"


def explore(sys: System, max_states: int = DEFAULT_MAX_STATES,
            max_depth: int = DEFAULT_MAX_DEPTH) -> StateGraph:
    """Breadth-first construction of the full state graph."""
    it = Interpreter(sys)
    states = [it.initial]
    index = {it.initial: 0}
    transitions: list = [None]
    depth_of = [0]
    terminal: dict[int, str] = {}
    q = deque([0])
    g = StateGraph(sys, it, states, transitions, terminal)
    while q:
        s = q.popleft()
        d = depth_of[s]
        steps = it.enabled_steps(states[s])
        if steps and d >= max_depth:
            g.complete = False
            transitions[s] = []
            raise ExplorationLimit(f"depth limit {max_depth} reached", g,
                                   {**g.stats(), "frontier": len(q) + 1, "limit": "depth"})
        out = []
        for st in steps:
            nxt = it.apply_step(states[s], st)
            t = index.get(nxt)
            if t is None:
                if len(states) >= max_states:
                    g.complete = False
                    transitions[s] = out
                    raise ExplorationLimit(f"state limit {max_states} reached", g,
                                           {**g.stats(), "frontier": len(q) + 1, "limit": "states"})
                t = len(states)
                index[nxt] = t
                states.append(nxt)
                transitions.append(None)
                depth_of.append(d + 1)
                g.depth = max(g.depth, d + 1)
                q.append(t)
            out.append((st, t))
        transitions[s] = out
        if not out:
            terminal[s] = it.classify(states[s])
    g.order, g.acyclic = _toposort(transitions)
    return g


def _toposort(transitions) -> tuple[list[int], bool]:
    indeg = [0] * len(transitions)
    for ts in transitions:
        for _, t in ts:
            indeg[t] += 1
    q = deque(i for i, d in enumerate(indeg) if d == 0)
    order = []
    while q:
        s = q.popleft()
        order.append(s)
        for _, t in transitions[s]:
            indeg[t] -= 1
            if indeg[t] == 0:
                q.append(t)
    return order, len(order) == len(transitions)


# ---------------------------------------------------------------------------
# Computations


@dataclass(frozen=True)
class Computation:
    steps: tuple[Step, ...]
    outcome: str

    @property
    def labels(self) -> tuple:
        return tuple(s.label for s in self.steps)

    def __len__(self):
        return len(self.steps)

    def lines(self) -> list[str]:
        return [format_step(i, s) for i, s in enumerate(self.steps, 1)]

    def comm_pairs(self) -> set[frozenset[str]]:
        return {frozenset(s.actors) for s in self.steps if s.kind == "comm"}


def computations(g: StateGraph, cap: int = DEFAULT_COMPUTATION_CAP) -> Iterator[Computation]:
    """All maximal paths of a complete acyclic state graph, in a fixed order."""
    if not g.complete:
        raise ValueError("state graph is incomplete")
    if not g.acyclic:
        raise Divergent("divergent: the state graph has a cycle")
    count = 0
    path: list[Step] = []
    stack: list[tuple[int, int, Step | None]] = [(g.initial, 0, None)]
    while stack:
        s, k, st = stack.pop()
        del path[k:]
        if st is not None:
            path.append(st)
        ts = g.transitions[s]
        if not ts:
            count += 1
            if count > cap:
                raise CapExceeded(f"more than {cap} computations")
            yield Computation(tuple(path), g.terminal[s])
            continue
        for step, t in reversed(ts):
            stack.append((t, len(path), step))


def random_run(sys: System, seed: int, max_steps: int = DEFAULT_MAX_DEPTH) -> Computation:
    it = Interpreter(sys)
    rng = random.Random(seed)
    state = it.initial
    path = []
    while True:
        steps = it.enabled_steps(state)
        if not steps:
            return Computation(tuple(path), it.classify(state))
        if len(path) >= max_steps:
            return Computation(tuple(path), TRUNCATED)
        st = rng.choice(steps)
        path.append(st)
        state = it.apply_step(state, st)


def replay(sys: System, trace: Sequence[tuple[str, str]]) -> Computation:
    """Replay ``(actors, text)`` pairs, e.g. ``("P0,P1", "send P0 from P0 to P1's variable x")``.

    Every step must be enabled in turn and the final state must be terminal.
    """
    it = Interpreter(sys)
    state = it.initial
    path = []
    for n, (actors, text) in enumerate(trace, 1):
        want = (",".join(sorted(a.strip() for a in actors.split(","))), text.strip())
        steps = it.enabled_steps(state)
        rendered = [(",".join(sorted(s.actors)), describe(s)) for s in steps]
        try:
            st = steps[rendered.index(want)]
        except ValueError:
            raise ReplayError(n, f"{want[0]}: {want[1]}", [f"{a}: {t}" for a, t in rendered]) from None
        path.append(st)
        state = it.apply_step(state, st)
    left = it.enabled_steps(state)
    if left:
        raise ReplayError(len(trace) + 1, "<end of computation>",
                          [f"{','.join(sorted(s.actors))}: {describe(s)}" for s in left])
    return Computation(tuple(path), it.classify(state))


# ---------------------------------------------------------------------------
# Renaming


def rename_value(obj, f):
    """Map every vertex name inside ``obj`` through ``f``."""
    if isinstance(obj, Vertex):
        return Vertex(f(obj.name))
    if isinstance(obj, VarKey):
        return VarKey(obj.name, f(obj.index)) if obj.index else obj
    if isinstance(obj, Tagged):
        return Tagged(obj.tag, rename_value(obj.arg, f))
    if isinstance(obj, tuple):
        return tuple(rename_value(x, f) for x in obj)
    if isinstance(obj, frozenset):
        return frozenset(rename_value(x, f) for x in obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        changes = {fl.name: rename_value(getattr(obj, fl.name), f) for fl in dataclasses.fields(obj)}
        return dataclasses.replace(obj, **changes)
    return obj


def rename_label(label: tuple, f) -> tuple:
    kind, actors, detail = label
    return (kind, tuple(f(a) for a in actors), rename_value(detail, f))


def rename_step(st: Step, f) -> Step:
    return Step(st.kind, tuple(f(a) for a in st.actors), rename_value(st.detail, f))
