"""Runtime values of mini-CSP programs.

Booleans are plain Python ``bool``. Integers are wrapped in :class:`Int` so
that ``True`` and ``1`` never collide inside hashed states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

INT_MIN = -64
INT_MAX = 63


@dataclass(frozen=True, slots=True)
class Int:
    n: int

    def __str__(self):
        return str(self.n)


@dataclass(frozen=True, slots=True)
class Atom:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Vertex:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Tagged:
    tag: str
    arg: Vertex

    def __str__(self):
        return f"{self.tag}({self.arg.name})"


Value = Union[bool, Int, Atom, Vertex, Tagged]


@dataclass(frozen=True, order=True, slots=True)
class VarKey:
    """A variable name, optionally indexed by a vertex (``sync[P1]``)."""

    name: str
    index: str = ""

    def __str__(self):
        return f"{self.name}[{self.index}]" if self.index else self.name


def show(v: Value) -> str:
    """Human-readable rendering used in traces and reports."""
    if v is True:
        return "true"
    if v is False:
        return "false"
    return str(v)


def in_range(n: int) -> bool:
    return INT_MIN <= n <= INT_MAX
