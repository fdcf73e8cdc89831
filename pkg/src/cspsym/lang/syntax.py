"""Abstract syntax of mini-CSP programs.

All nodes are frozen dataclasses, so programs can be shared freely and
compared structurally. Source positions are carried along but ignored by
equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .values import Value, Vertex

Pos = Optional[tuple[int, int]]


# -- expressions -------------------------------------------------------------


@dataclass(frozen=True)
class Lit:
    value: Value


@dataclass(frozen=True)
class SelfRef:
    pass


@dataclass(frozen=True)
class PeerRef:
    """A peer placeholder, bound to a concrete vertex at instantiation."""

    name: str


@dataclass(frozen=True)
class VarRef:
    name: str
    index: Optional["PeerSpec"] = None


@dataclass(frozen=True)
class Unary:
    op: str  # "not" | "-"
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # "and" "or" "=" "/=" "<" "+" "-"
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class TagExpr:
    tag: str
    arg: "Expr"


Expr = Union[Lit, SelfRef, PeerRef, VarRef, Unary, Binary, TagExpr]
PeerSpec = Union[PeerRef, Lit, SelfRef]

TRUE = Lit(True)


# -- statements --------------------------------------------------------------


@dataclass(frozen=True)
class Assign:
    targets: tuple[VarRef, ...]
    values: tuple[Expr, ...]


@dataclass(frozen=True)
class Send:
    peer: PeerSpec
    expr: Expr
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Recv:
    peer: PeerSpec
    target: VarRef
    pos: Pos = field(default=None, compare=False, repr=False)


Comm = Union[Send, Recv]


@dataclass(frozen=True)
class Branch:
    cond: Expr
    comm: Optional[Comm]
    body: tuple["Stmt", ...]
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Select:
    branches: tuple[Branch, ...]


@dataclass(frozen=True)
class Repeat:
    branches: tuple[Branch, ...]


Stmt = Union[Assign, Send, Recv, Select, Repeat]


@dataclass(frozen=True)
class Program:
    name: str
    params: tuple[str, ...]
    atoms: tuple[str, ...]
    body: tuple[Stmt, ...]


# -- helpers -----------------------------------------------------------------


def vertex_lit(name: str) -> Lit:
    return Lit(Vertex(name))


def peer_name(spec: PeerSpec) -> str | None:
    """Concrete vertex named by an instantiated peer spec, else ``None``."""
    if isinstance(spec, Lit) and isinstance(spec.value, Vertex):
        return spec.value.name
    return None


def walk(stmts: tuple[Stmt, ...]):
    """Yield every statement (pre-order), including guard communications."""
    for s in stmts:
        yield s
        if isinstance(s, (Select, Repeat)):
            for b in s.branches:
                if b.comm is not None:
                    yield b.comm
                yield from walk(b.body)


def branches_of(stmts: tuple[Stmt, ...]):
    for s in walk(stmts):
        if isinstance(s, (Select, Repeat)):
            yield from s.branches


def assigned_names(stmts: tuple[Stmt, ...]) -> set[str]:
    out = set()
    for s in walk(stmts):
        if isinstance(s, Assign):
            out.update(t.name for t in s.targets)
        elif isinstance(s, Recv):
            out.add(s.target.name)
    return out


def has_communication(stmts: tuple[Stmt, ...]) -> bool:
    return any(isinstance(s, (Send, Recv)) for s in walk(stmts))
