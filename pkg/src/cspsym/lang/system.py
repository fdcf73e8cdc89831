"""Process systems: programs bound to the vertices of a network."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Mapping

from ..graph import GraphBuilder, GraphFormatError, Network, parse_graph, parse_graph_line
from .parser import format_comm, format_program, parse_program
from .syntax import (
    Assign,
    Binary,
    Branch,
    Expr,
    Lit,
    PeerRef,
    PeerSpec,
    Program,
    Recv,
    Repeat,
    Select,
    SelfRef,
    Send,
    Stmt,
    TagExpr,
    Unary,
    VarRef,
    assigned_names,
    branches_of,
    peer_name,
    walk,
)
from .values import Vertex

DIALECTS = ("in", "io")


class SystemDefinitionError(ValueError):
    """Invalid system construction (unbound placeholder, unknown vertex, ...)."""


@dataclass(frozen=True)
class Process:
    program: Program
    binding: Mapping[str, str]
    body: tuple[Stmt, ...]  # instantiated: no placeholders, no self


@dataclass(frozen=True)
class System:
    network: Network
    processes: Mapping[str, Process]
    name: str = "system"

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.network.vertices

    def body(self, v: str) -> tuple[Stmt, ...]:
        return self.processes[v].body

    def atoms(self) -> tuple[str, ...]:
        out = set()
        for p in self.processes.values():
            out.update(p.program.atoms)
        return tuple(sorted(out))


# ---------------------------------------------------------------------------
# Dialects


@dataclass(frozen=True)
class Violation:
    message: str
    pos: tuple[int, int] | None = None

    def __str__(self):
        if self.pos:
            return f"{self.pos[0]}:{self.pos[1]}: {self.message}"
        return self.message


def check_dialect(prog: Program | tuple[Stmt, ...], dialect: str) -> list[Violation]:
    """Guards may carry receives only (``in``) or receives and sends (``io``)."""
    if dialect not in DIALECTS:
        raise ValueError(f"unknown dialect {dialect!r}")
    body = prog.body if isinstance(prog, Program) else prog
    out = []
    if dialect == "in":
        for b in branches_of(body):
            if isinstance(b.comm, Send):
                out.append(Violation(f"output guard '{format_comm(b.comm)}' not allowed in CSP[in]",
                                     b.comm.pos or b.pos))
    return out


def system_dialect_violations(sys: System, dialect: str) -> dict[str, list[Violation]]:
    out = {}
    for v, p in sys.processes.items():
        vs = check_dialect(p.body, dialect)
        if vs:
            out[v] = vs
    return out


# ---------------------------------------------------------------------------
# Instantiation


class _Binder:
    def __init__(self, owner: str, binding: Mapping[str, str], vertices: set[str]):
        self.owner = owner
        self.binding = binding
        self.vertices = vertices

    def vertex(self, name: str) -> Lit:
        if name not in self.vertices:
            raise SystemDefinitionError(f"process {self.owner}: {name!r} is not a vertex of the network")
        return Lit(Vertex(name))

    def peer(self, p: PeerSpec) -> Lit:
        if isinstance(p, PeerRef):
            if p.name not in self.binding:
                raise SystemDefinitionError(f"process {self.owner}: unbound placeholder {p.name!r}")
            return self.vertex(self.binding[p.name])
        if isinstance(p, SelfRef):
            return self.vertex(self.owner)
        return self.vertex(p.value.name)

    def var(self, v: VarRef) -> VarRef:
        if v.index is None:
            return v
        return VarRef(v.name, self.peer(v.index))

    def expr(self, e: Expr) -> Expr:
        if isinstance(e, (PeerRef, SelfRef)):
            return self.peer(e)
        if isinstance(e, Lit):
            if isinstance(e.value, Vertex):
                return self.vertex(e.value.name)
            return e
        if isinstance(e, VarRef):
            return self.var(e)
        if isinstance(e, Unary):
            return Unary(e.op, self.expr(e.operand))
        if isinstance(e, Binary):
            return Binary(e.op, self.expr(e.left), self.expr(e.right))
        if isinstance(e, TagExpr):
            return TagExpr(e.tag, self.expr(e.arg))
        raise TypeError(e)

    def comm(self, c):
        if isinstance(c, Send):
            return replace(c, peer=self.peer(c.peer), expr=self.expr(c.expr))
        return replace(c, peer=self.peer(c.peer), target=self.var(c.target))

    def stmts(self, body: tuple[Stmt, ...]) -> tuple[Stmt, ...]:
        return tuple(self.stmt(s) for s in body)

    def stmt(self, s: Stmt) -> Stmt:
        if isinstance(s, Assign):
            return Assign(tuple(self.var(t) for t in s.targets), tuple(self.expr(v) for v in s.values))
        if isinstance(s, (Send, Recv)):
            return self.comm(s)
        bs = tuple(
            replace(b, cond=self.expr(b.cond),
                    comm=None if b.comm is None else self.comm(b.comm),
                    body=self.stmts(b.body))
            for b in s.branches
        )
        return Select(bs) if isinstance(s, Select) else Repeat(bs)


def instantiate(
    net: Network,
    bindings: Mapping[str, tuple[Program, Mapping[str, str]]],
    name: str = "system",
) -> System:
    """Bind a program to each vertex, resolving placeholders and ``self``."""
    vertices = set(net.vertices)
    unknown = set(bindings) - vertices
    if unknown:
        raise SystemDefinitionError(f"bindings for non-vertices: {sorted(unknown)}")
    missing = vertices - set(bindings)
    if missing:
        raise SystemDefinitionError(f"no program bound at vertices: {sorted(missing)}")
    procs = {}
    for v in net.vertices:
        prog, binding = bindings[v]
        binding = dict(binding)
        extra = set(binding) - set(prog.params)
        if extra:
            raise SystemDefinitionError(f"process {v}: binding for undeclared placeholders {sorted(extra)}")
        unbound = set(prog.params) - set(binding)
        if unbound:
            raise SystemDefinitionError(f"process {v}: unbound placeholders {sorted(unbound)}")
        for ph, target in binding.items():
            if target not in vertices:
                raise SystemDefinitionError(f"process {v}: placeholder {ph} bound to non-vertex {target!r}")
        body = _Binder(v, binding, vertices).stmts(prog.body)
        procs[v] = Process(prog, binding, body)
    return System(net, procs, name)


# ---------------------------------------------------------------------------
# Admission


@dataclass(frozen=True)
class AdmitsReport:
    offending: tuple[tuple[str, str], ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.offending

    def __bool__(self):
        return self.ok


def admits(net: Network, sys: System) -> AdmitsReport:
    """Every send v->w and every receive at w from v needs the edge (v, w)."""
    bad = []
    for v in sys.vertices:
        for s in walk(sys.body(v)):
            if isinstance(s, Send):
                w = peer_name(s.peer)
                if (v, w) not in net.edges:
                    bad.append((v, format_comm(s)))
            elif isinstance(s, Recv):
                w = peer_name(s.peer)
                if (w, v) not in net.edges:
                    bad.append((v, format_comm(s)))
    return AdmitsReport(tuple(bad))


def declares_variable(sys: System, name: str) -> dict[str, bool]:
    return {v: name in assigned_names(sys.body(v)) for v in sys.vertices}


# ---------------------------------------------------------------------------
# System files


class SystemFormatError(ValueError):
    def __init__(self, message: str, line: int | None, source: str):
        self.line = line
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


def parse_system(text: str, source: str = "<system>", base_dir: str | None = None,
                 loader=None) -> System:
    """Parse a system file.

    Directives: ``network <file>`` or inline ``vertex``/``edge`` lines,
    ``use <file> as <name>``, ``at <vertex> run <name> [with P=v, ...]``.
    ``loader(path)`` reads referenced files (defaults to the filesystem,
    relative to ``base_dir``).
    """
    base_dir = base_dir or "."

    def read(path: str) -> str:
        if loader is not None:
            return loader(path)
        full = path if os.path.isabs(path) else os.path.join(base_dir, path)
        with open(full, encoding="utf-8") as fh:
            return fh.read()

    graph = GraphBuilder(source)
    net_file = None
    programs: dict[str, Program] = {}
    runs: dict[str, tuple[str, dict[str, str], int]] = {}
    name = "system"
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        head = words[0]
        if head in ("vertex", "edge"):
            try:
                item = parse_graph_line(line, lineno, source)
            except GraphFormatError as exc:
                raise SystemFormatError(str(exc).split(": ", 1)[-1], lineno, source) from exc
            graph.add(*item, lineno)
        elif head == "name" and len(words) == 2:
            name = words[1]
        elif head == "network":
            if len(words) != 2:
                raise SystemFormatError("expected 'network <file>'", lineno, source)
            net_file = words[1]
        elif head == "use":
            if len(words) != 4 or words[2] != "as":
                raise SystemFormatError("expected 'use <file> as <name>'", lineno, source)
            if words[3] in programs:
                raise SystemFormatError(f"duplicate program name {words[3]!r}", lineno, source)
            programs[words[3]] = parse_program(read(words[1]), source=words[1])
        elif head == "at":
            if len(words) < 4 or words[2] != "run":
                raise SystemFormatError("expected 'at <vertex> run <name> [with P=v, ...]'",
                                        lineno, source)
            vertex, prog = words[1], words[3]
            binding: dict[str, str] = {}
            rest = line.split(None, 4)[4] if len(words) > 4 else ""
            if rest:
                if not rest.startswith("with"):
                    raise SystemFormatError("expected 'with' after the program name", lineno, source)
                for item in rest[4:].split(","):
                    item = item.strip()
                    if not item:
                        continue
                    key, eq, val = item.partition("=")
                    if not eq:
                        raise SystemFormatError(f"bad binding {item!r}", lineno, source)
                    binding[key.strip()] = val.strip()
            if vertex in runs:
                raise SystemFormatError(f"vertex {vertex!r} assigned twice", lineno, source)
            if prog not in programs:
                raise SystemFormatError(f"unknown program {prog!r}", lineno, source)
            runs[vertex] = (prog, binding, lineno)
        else:
            raise SystemFormatError(f"unknown directive {head!r}", lineno, source)
    if net_file is not None:
        if graph.vertices or graph.edges:
            raise SystemFormatError("both 'network' and inline graph lines given", None, source)
        net = parse_graph(read(net_file), source=net_file)
    else:
        net = graph.build()
    try:
        return instantiate(net, {v: (programs[p], b) for v, (p, b, _) in runs.items()}, name)
    except SystemDefinitionError as exc:
        raise SystemFormatError(str(exc), None, source) from exc


def load_system(path: str) -> System:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_system(text, source=path, base_dir=os.path.dirname(path) or ".")


def system_files(sys: System) -> dict[str, str]:
    """Render a system as files: ``network.graph``, one ``.csp`` per program, ``system.sys``."""
    files = {"network.graph": sys.network.to_text()}
    seen: dict[Program, str] = {}
    lines = [f"name {sys.name}", "network network.graph"]
    for v in sys.vertices:
        proc = sys.processes[v]
        if proc.program not in seen:
            pname = proc.program.name
            base = pname
            k = 1
            while pname in seen.values():
                k += 1
                pname = f"{base}_{k}"
            seen[proc.program] = pname
            files[f"{pname}.csp"] = format_program(proc.program)
            lines.append(f"use {pname}.csp as {pname}")
    for v in sys.vertices:
        proc = sys.processes[v]
        line = f"at {v} run {seen[proc.program]}"
        if proc.binding:
            line += " with " + ", ".join(f"{k}={val}" for k, val in sorted(proc.binding.items()))
        lines.append(line)
    files["system.sys"] = "\n".join(lines) + "\n"
    return files


def write_system(sys: System, out_dir: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    for fname, text in system_files(sys).items():
        with open(os.path.join(out_dir, fname), "w", encoding="utf-8") as fh:
            fh.write(text)
    return os.path.join(out_dir, "system.sys")
