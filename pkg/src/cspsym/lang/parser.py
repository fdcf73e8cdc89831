"""Recursive-descent parser and pretty-printer for the mini-CSP DSL.

Grammar (``--`` starts a comment)::

    program  ::= [ "program" NAME [ "(" NAME { "," NAME } ")" ] ]
                 [ "atoms" NAME { "," NAME } ] stmts
    stmts    ::= [ stmt { ";" stmt } [ ";" ] ]
    stmt     ::= var { "," var } ":=" expr { "," expr }
               | peer "!" expr | peer "?" var
               | "if" branches "fi" | "do" branches "od" | "skip"
    branches ::= "[" branch { "[]" branch } "]"
    branch   ::= guard "->" stmts
    guard    ::= expr | expr "&" comm | comm
    var      ::= NAME [ "[" peer "]" ]
    peer     ::= NAME | "@"VERTEX | "self"
    expr     ::= literals true/false/INT/@VERTEX, self, atoms, tag(expr),
                 variables, peers, "not" "and" "or" "=" "/=" "<" "+" "-", parens
"""

from __future__ import annotations

import re
from dataclasses import dataclass

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
    TRUE,
    Unary,
    VarRef,
)
from .values import Atom, Int, Tagged, Vertex

KEYWORDS = {"program", "atoms", "if", "fi", "do", "od", "not", "and", "or",
            "true", "false", "self", "skip"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<vertex>@[A-Za-z0-9_.']+)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>:=|->|\[\]|/=|[!?;,&=<+\-()\[\]])
""", re.VERBOSE)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int, source: str = "<program>"):
        self.line = line
        self.col = col
        self.source = source
        super().__init__(f"{source}:{line}:{col}: {message}")


@dataclass
class Token:
    kind: str  # "ident" "int" "vertex" "op" "kw" "eof"
    text: str
    line: int
    col: int


def tokenize(text: str, source: str = "<program>") -> list[Token]:
    out = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, source)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "ident" and m.group() in KEYWORDS:
            out.append(Token("kw", m.group(), line, col))
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, col))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class _Parser:
    def __init__(self, text: str, source: str):
        self.toks = tokenize(text, source)
        self.i = 0
        self.source = source
        self.params: set[str] = set()
        self.atoms: set[str] = set()

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "kw") and t.text == text

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        t = tok or self.tok
        return ParseError(message, t.line, t.col, self.source)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        t = self.tok
        self.i += 1
        return t

    def ident(self, what: str = "name") -> Token:
        if self.tok.kind != "ident":
            raise self.error(f"expected {what}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    # -- program

    def program(self) -> Program:
        name, params, atoms = "main", [], []
        if self.at("program"):
            self.i += 1
            name = self.ident("program name").text
            if self.at("("):
                self.i += 1
                params.append(self.ident("placeholder").text)
                while self.at(","):
                    self.i += 1
                    params.append(self.ident("placeholder").text)
                self.expect(")")
        if self.at("atoms"):
            self.i += 1
            atoms.append(self.ident("atom").text)
            while self.at(","):
                self.i += 1
                atoms.append(self.ident("atom").text)
        clash = set(params) & set(atoms)
        if clash:
            raise self.error(f"names declared as both placeholder and atom: {sorted(clash)}")
        self.params = set(params)
        self.atoms = set(atoms)
        body = self.stmts()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return Program(name, tuple(params), tuple(atoms), body)

    def stmts(self) -> tuple[Stmt, ...]:
        out: list[Stmt] = []
        while not (self.tok.kind == "eof" or self.at("[]") or self.at("]")):
            s = self.stmt()
            if s is not None:
                out.append(s)
            if self.at(";"):
                self.i += 1
                continue
            break
        return tuple(out)

    def stmt(self) -> Stmt | None:
        if self.at("skip"):
            self.i += 1
            return None
        if self.at("if"):
            self.i += 1
            bs = self.branches()
            self.expect("fi")
            return Select(bs)
        if self.at("do"):
            self.i += 1
            bs = self.branches()
            self.expect("od")
            return Repeat(bs)
        if self.comm_ahead():
            return self.comm()
        if self.tok.kind != "ident":
            raise self.error(f"expected a statement, found {self.tok.text or 'end of input'!r}")
        targets = [self.var()]
        while self.at(","):
            self.i += 1
            targets.append(self.var())
        self.expect(":=")
        values = [self.expr()]
        while self.at(","):
            self.i += 1
            values.append(self.expr())
        if len(values) != len(targets):
            raise self.error(f"{len(targets)} targets but {len(values)} values")
        return Assign(tuple(targets), tuple(values))

    def comm_ahead(self) -> bool:
        t = self.tok
        if t.kind in ("ident", "vertex") or (t.kind == "kw" and t.text == "self"):
            nxt = self.peek()
            return nxt.kind == "op" and nxt.text in ("!", "?")
        return False

    def comm(self) -> Send | Recv:
        start = self.tok
        peer = self.peer()
        if self.at("!"):
            self.i += 1
            return Send(peer, self.expr(), pos=(start.line, start.col))
        self.expect("?")
        return Recv(peer, self.var(), pos=(start.line, start.col))

    def peer(self) -> PeerSpec:
        t = self.tok
        if t.kind == "vertex":
            self.i += 1
            return Lit(Vertex(t.text[1:]))
        if t.kind == "kw" and t.text == "self":
            self.i += 1
            return SelfRef()
        if t.kind == "ident":
            if t.text not in self.params:
                raise self.error(f"undeclared peer placeholder {t.text!r}")
            self.i += 1
            return PeerRef(t.text)
        raise self.error(f"expected a peer, found {t.text or 'end of input'!r}")

    def var(self) -> VarRef:
        t = self.ident("variable")
        if t.text in self.params or t.text in self.atoms:
            raise self.error(f"{t.text!r} is not a variable", t)
        index = None
        if self.at("["):
            self.i += 1
            index = self.peer()
            self.expect("]")
        return VarRef(t.text, index)

    def branches(self) -> tuple[Branch, ...]:
        self.expect("[")
        out = [self.branch()]
        while self.at("[]"):
            self.i += 1
            out.append(self.branch())
        self.expect("]")
        return tuple(out)

    def branch(self) -> Branch:
        start = self.tok
        cond: Expr = TRUE
        comm = None
        if self.comm_ahead():
            comm = self.comm()
        else:
            cond = self.expr()
            if self.at("&"):
                self.i += 1
                if not self.comm_ahead():
                    raise self.error("expected a communication after '&'")
                comm = self.comm()
        if self.at("&"):
            raise self.error("two communications in one guard")
        self.expect("->")
        body = self.stmts()
        return Branch(cond, comm, body, pos=(start.line, start.col))

    # -- expressions

    def expr(self) -> Expr:
        e = self.and_expr()
        while self.at("or"):
            self.i += 1
            e = Binary("or", e, self.and_expr())
        return e

    def and_expr(self) -> Expr:
        e = self.not_expr()
        while self.at("and"):
            self.i += 1
            e = Binary("and", e, self.not_expr())
        return e

    def not_expr(self) -> Expr:
        if self.at("not"):
            self.i += 1
            return Unary("not", self.not_expr())
        return self.cmp_expr()

    def cmp_expr(self) -> Expr:
        e = self.add_expr()
        for op in ("=", "/=", "<"):
            if self.at(op):
                self.i += 1
                return Binary(op, e, self.add_expr())
        return e

    def add_expr(self) -> Expr:
        e = self.unary()
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            e = Binary(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.at("-"):
            self.i += 1
            if self.tok.kind == "int":
                n = int(self.tok.text)
                self.i += 1
                return Lit(Int(-n))
            return Unary("-", self.unary())
        return self.primary()

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return Lit(Int(int(t.text)))
        if t.kind == "vertex":
            self.i += 1
            return Lit(Vertex(t.text[1:]))
        if t.kind == "kw":
            if t.text in ("true", "false"):
                self.i += 1
                return Lit(t.text == "true")
            if t.text == "self":
                self.i += 1
                return SelfRef()
        if self.at("("):
            self.i += 1
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            if t.text in self.atoms:
                self.i += 1
                if self.at("("):
                    self.i += 1
                    arg = self.expr()
                    self.expect(")")
                    return TagExpr(t.text, arg)
                return Lit(Atom(t.text))
            if t.text in self.params:
                self.i += 1
                return PeerRef(t.text)
            return self.var()
        raise self.error(f"expected an expression, found {t.text or 'end of input'!r}")


def parse_program(text: str, source: str = "<program>") -> Program:
    return _Parser(text, source).program()


# ---------------------------------------------------------------------------
# Pretty-printing (inverse of parse_program on ASTs)


def format_value(v) -> str:
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, Int):
        return str(v.n)
    if isinstance(v, Vertex):
        return "@" + v.name
    if isinstance(v, Atom):
        return v.name
    if isinstance(v, Tagged):
        return f"{v.tag}(@{v.arg.name})"
    raise TypeError(f"not a value: {v!r}")


def format_peer(p: PeerSpec) -> str:
    if isinstance(p, PeerRef):
        return p.name
    if isinstance(p, SelfRef):
        return "self"
    return format_value(p.value)


def format_var(v: VarRef) -> str:
    if v.index is None:
        return v.name
    return f"{v.name}[{format_peer(v.index)}]"


def format_expr(e: Expr, nested: bool = False) -> str:
    if isinstance(e, Lit):
        return format_value(e.value)
    if isinstance(e, SelfRef):
        return "self"
    if isinstance(e, PeerRef):
        return e.name
    if isinstance(e, VarRef):
        return format_var(e)
    if isinstance(e, TagExpr):
        return f"{e.tag}({format_expr(e.arg)})"
    if isinstance(e, Unary) and e.op == "-":
        return f"-({format_expr(e.operand)})"
    if isinstance(e, Unary):
        s = f"not {format_expr(e.operand, True)}"
    elif isinstance(e, Binary):
        s = f"{format_expr(e.left, True)} {e.op} {format_expr(e.right, True)}"
    else:
        raise TypeError(f"not an expression: {e!r}")
    return f"({s})" if nested else s


def format_comm(c) -> str:
    if isinstance(c, Send):
        return f"{format_peer(c.peer)} ! {format_expr(c.expr)}"
    return f"{format_peer(c.peer)} ? {format_var(c.target)}"


def format_stmts(stmts, indent: int = 0) -> list[str]:
    pad = "  " * indent
    if not stmts:
        return [pad + "skip"]
    lines: list[str] = []
    for k, s in enumerate(stmts):
        sep = ";" if k < len(stmts) - 1 else ""
        if isinstance(s, Assign):
            lhs = ", ".join(format_var(t) for t in s.targets)
            rhs = ", ".join(format_expr(v) for v in s.values)
            lines.append(f"{pad}{lhs} := {rhs}{sep}")
        elif isinstance(s, (Send, Recv)):
            lines.append(pad + format_comm(s) + sep)
        else:
            open_kw, close_kw = ("if", "fi") if isinstance(s, Select) else ("do", "od")
            lines.append(f"{pad}{open_kw} [")
            for j, b in enumerate(s.branches):
                lines.append(f"{pad}  {'   ' if j == 0 else '[] '}{format_guard(b)} ->")
                lines.extend(format_stmts(b.body, indent + 3))
            lines.append(f"{pad}] {close_kw}{sep}")
    return lines


def format_guard(b: Branch) -> str:
    if b.comm is None:
        return format_expr(b.cond)
    if b.cond == TRUE:
        return format_comm(b.comm)
    return f"{format_expr(b.cond)} & {format_comm(b.comm)}"


def format_program(p: Program) -> str:
    head = f"program {p.name}"
    if p.params:
        head += "(" + ", ".join(p.params) + ")"
    lines = [head]
    if p.atoms:
        lines.append("atoms " + ", ".join(p.atoms))
    lines.extend(format_stmts(p.body))
    return "\n".join(lines) + "\n"
