"""Equations over named discrete functions with a single unknown.

Grammar (infix, binary calls written between their arguments)::

    equation ::= ['solve' IDENT ':'] expr '=' IDENT
    expr     ::= term [NAME term]
    term     ::= '(' expr ')' | NAME '(' expr {',' expr} ')' | IDENT

Without a ``solve v :`` prefix the unknown is whichever of ``x`` / ``y`` occurs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .alphabet import Alphabet
from .errors import ParseError, ValidationError
from .function import DiscreteFunction

DEFAULT_UNKNOWNS = ("x", "y")


@dataclass(frozen=True)
class Unknown:
    name: str


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Node", ...]


Node = Union[Unknown, Param, Call]


@dataclass(frozen=True, eq=False)
class Equation:
    lhs: Node
    rhs: Param
    bindings: Mapping[str, DiscreteFunction]
    params: tuple[str, ...]
    unknown: str

    @property
    def alpha(self) -> Alphabet:
        return next(iter(self.bindings.values())).alpha

    def __str__(self) -> str:
        return f"solve {self.unknown} : {format_node(self.lhs)} = {self.rhs.name}"


def format_node(node: Node, top: bool = True) -> str:
    if isinstance(node, (Unknown, Param)):
        return node.name
    if len(node.args) == 2:
        body = f"{format_node(node.args[0], False)} {node.name} {format_node(node.args[1], False)}"
        return body if top else f"({body})"
    return f"{node.name}(" + ", ".join(format_node(a) for a in node.args) + ")"


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1):
            toks.append(("id", m.group(1), m.start(1)))
        elif m.group(2):
            ch = m.group(2)
            if ch not in "(),=:":
                raise ParseError(f"unexpected character {ch!r}", 1, m.start(2) + 1)
            toks.append((ch, ch, m.start(2)))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str, bindings: Mapping[str, DiscreteFunction]):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.bindings = bindings

    def peek(self, k: int = 0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else ("eof", "", len(self.text))

    def fail(self, msg: str, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, 1, tok[2] + 1)

    def take(self, kind: str):
        tok = self.peek()
        if tok[0] != kind:
            self.fail(f"expected {kind!r}, found {tok[1] or 'end of input'!r}")
        self.i += 1
        return tok

    def expr(self):
        left = self.term()
        if self.peek()[0] == "id":
            name = self.take("id")
            right = self.term()
            return ("call", name, (left, right))
        return left

    def term(self):
        tok = self.peek()
        if tok[0] == "(":
            self.i += 1
            e = self.expr()
            self.take(")")
            return e
        if tok[0] == "id":
            self.i += 1
            if self.peek()[0] == "(" and tok[1] in self.bindings:
                self.i += 1
                args = [self.expr()]
                while self.peek()[0] == ",":
                    self.i += 1
                    args.append(self.expr())
                self.take(")")
                return ("call", tok, tuple(args))
            return ("id", tok)
        self.fail("expected a term")


def parse_equation(text: str, bindings: Mapping[str, DiscreteFunction]) -> Equation:
    """Parse and validate; see the module docstring for the grammar."""
    if not bindings:
        raise ValidationError("an equation needs at least one bound function")
    alphas = {f.alpha for f in bindings.values()}
    if len(alphas) != 1:
        raise ValidationError("bound functions live in different alphabets")
    text = "\n".join(ln.split("#", 1)[0] for ln in text.splitlines()).replace("\n", " ").strip()
    p = _Parser(text, bindings)
    declared = None
    if p.peek()[1] == "solve" and p.peek(1)[0] == "id":
        p.i += 1
        declared = p.take("id")[1]
        if p.peek()[0] == ",":
            p.fail("only one unknown may be declared")
        p.take(":")
    raw = p.expr()
    p.take("=")
    rhs_tok = p.take("id")
    if p.peek()[0] != "eof":
        p.fail("unexpected text after the right-hand side")

    names: list[str] = []

    def collect(node) -> None:
        if node[0] == "id":
            name = node[1][1]
            if name in bindings:
                p.fail(f"function {name!r} used as a value", node[1])
            if name not in names:
                names.append(name)
        else:
            tok = node[1]
            if tok[1] not in bindings:
                p.fail(f"unknown function name {tok[1]!r}", tok)
            for a in node[2]:
                collect(a)

    collect(raw)
    if declared is not None:
        if declared not in names:
            raise ValidationError(f"declared unknown {declared!r} does not occur in the equation")
        unknown = declared
    else:
        found = [u for u in DEFAULT_UNKNOWNS if u in names]
        if not found:
            raise ValidationError("the equation has no unknown (use 'solve <name> :')")
        if len(found) > 1:
            raise ValidationError(f"two distinct unknown symbols: {', '.join(found)}")
        unknown = found[0]
    rhs = rhs_tok[1]
    if rhs == unknown:
        raise ValidationError("the right-hand side must be a parameter, not the unknown")
    if rhs in bindings:
        raise ValidationError(f"right-hand side {rhs!r} is a function name")

    def build(node) -> Node:
        if node[0] == "id":
            name = node[1][1]
            return Unknown(name) if name == unknown else Param(name)
        tok, args = node[1], node[2]
        fn = bindings[tok[1]]
        if fn.arity != len(args):
            raise ValidationError(f"{tok[1]!r} has arity {fn.arity} but is applied to {len(args)} arguments")
        return Call(tok[1], tuple(build(a) for a in args))

    lhs = build(raw)
    params = tuple(n for n in names if n not in (unknown, rhs)) + (rhs,)
    return Equation(lhs, Param(rhs), dict(bindings), params, unknown)
