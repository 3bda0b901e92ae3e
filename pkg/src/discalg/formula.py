"""Superposition formulas: unary functions applied to sums of variables.

Text syntax, one top-level term per line::

    (0,0,-1){(0,0,1)[(1,0,0)@1 + (0,-1,-1)@2] + (0,-1,-1)@3}
    + (0,0,1){(0,0,1)[(1,0,0)@1 + (0,-1,-1)@2] + (-1,-1,0)@3}

``@k`` is variable k; innermost groups use ``[...]``, enclosing ones ``{...}``;
``0`` is the empty sum.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .alphabet import Alphabet, MultiValue, sum_table
from .errors import ParseError, UsageError
from .function import MASK_DTYPE, DiscreteFunction, format_unary, parse_unary


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Apply:
    fn: DiscreteFunction
    inner: "Expr"


@dataclass(frozen=True)
class Sum:
    parts: tuple["Expr", ...] = ()


Expr = Union[Var, Apply, Sum]


def variables(e: Expr) -> set[int]:
    if isinstance(e, Var):
        return {e.index}
    if isinstance(e, Apply):
        return variables(e.inner)
    out: set[int] = set()
    for p in e.parts:
        out |= variables(p)
    return out


def unaries(e: Expr) -> list[DiscreteFunction]:
    if isinstance(e, Var):
        return []
    if isinstance(e, Apply):
        return [e.fn] + unaries(e.inner)
    return [u for p in e.parts for u in unaries(p)]


def count_terms(e: Expr) -> int:
    return len(e.parts) if isinstance(e, Sum) else 1


@lru_cache(maxsize=4096)
def image_table(u: DiscreteFunction) -> tuple[int, ...]:
    """Union image of every mask under ``u``."""
    n = u.alpha.size
    cells = [int(c) for c in u.table]
    out = [0] * (1 << n)
    for m in range(1, 1 << n):
        low = m & -m
        out[m] = out[m ^ low] | cells[low.bit_length() - 1]
    return tuple(out)


def _eval(e: Expr, masks: Sequence[int], st) -> int:
    if isinstance(e, Var):
        try:
            return masks[e.index - 1]
        except IndexError:
            raise UsageError(f"variable @{e.index} is unbound") from None
    if isinstance(e, Apply):
        return image_table(e.fn)[_eval(e.inner, masks, st)]
    acc = 1
    for p in e.parts:
        acc = st[acc][_eval(p, masks, st)]
    return acc


def eval_formula(e: Expr, args: Sequence[MultiValue], alpha: Alphabet | None = None) -> MultiValue:
    """Value of ``e`` with ``@k`` bound to ``args[k-1]``."""
    if alpha is None:
        if not args:
            raise UsageError("cannot infer the alphabet without arguments")
        alpha = args[0].alpha
    if any(v < 1 for v in variables(e)):
        raise UsageError("variable indices start at 1")
    masks = [a.mask for a in args]
    return MultiValue(alpha, _eval(e, masks, sum_table(alpha.size)))


def formula_table(e: Expr, alpha: Alphabet, arity: int) -> DiscreteFunction:
    """Evaluate ``e`` at every point of ``A^arity`` at once."""
    n = alpha.size
    st = np.array(sum_table(n), dtype=MASK_DTYPE)
    grids = np.indices((n,) * arity)
    cache: dict[int, np.ndarray] = {}

    def go(x: Expr) -> np.ndarray:
        if isinstance(x, Var):
            if not 1 <= x.index <= arity:
                raise UsageError(f"variable @{x.index} is unbound")
            return np.left_shift(1, grids[x.index - 1])
        if isinstance(x, Apply):
            key = id(x.fn)
            if key not in cache:
                cache[key] = np.array(image_table(x.fn), dtype=MASK_DTYPE)
            return cache[key][go(x.inner)]
        acc = np.ones((n,) * arity, dtype=MASK_DTYPE)
        for p in x.parts:
            acc = st[acc, go(p)]
        return acc

    return DiscreteFunction(alpha, arity, go(e))


# -- printing ------------------------------------------------------------------

def _has_group(e: Expr) -> bool:
    return isinstance(e, Apply) and (isinstance(e.inner, Sum) or _has_group(e.inner)) or isinstance(e, Sum)


def _group(s: Sum) -> str:
    body = " + ".join(_fmt(p) for p in s.parts) if s.parts else "0"
    if any(_has_group(p) for p in s.parts):
        return "{" + body + "}"
    return "[" + body + "]"


def _fmt(e: Expr) -> str:
    if isinstance(e, Var):
        return f"@{e.index}"
    if isinstance(e, Sum):
        return _group(e)
    return format_unary(e.fn) + _fmt(e.inner)


def format_formula(e: Expr) -> str:
    """Top-level sums print one term per line; the result ends with a newline."""
    if isinstance(e, Sum):
        if not e.parts:
            return "0\n"
        lines = [_fmt(e.parts[0])] + ["+ " + _fmt(p) for p in e.parts[1:]]
        return "\n".join(lines) + "\n"
    return _fmt(e) + "\n"


def dump_formula(e: Expr, alpha: Alphabet, arity: int) -> str:
    return f"formula N={alpha.size} M={arity}\n" + format_formula(e)


# -- parsing -------------------------------------------------------------------

class _Reader:
    def __init__(self, text: str, alpha: Alphabet, line_offset: int = 0):
        self.s = text
        self.i = 0
        self.alpha = alpha
        self.line_offset = line_offset

    def where(self, i: int | None = None) -> tuple[int, int]:
        i = self.i if i is None else i
        line = self.s.count("\n", 0, i) + 1 + self.line_offset
        col = i - (self.s.rfind("\n", 0, i) + 1) + 1
        return line, col

    def fail(self, msg: str, i: int | None = None):
        raise ParseError(msg, *self.where(i))

    def skip(self) -> None:
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        self.skip()
        return self.s[self.i] if self.i < len(self.s) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            self.fail(f"expected {ch!r}")
        self.i += 1

    def literal(self) -> DiscreteFunction:
        start = self.i
        end = self.s.find(")", start)
        if end < 0:
            self.fail("unterminated unary literal")
        try:
            fn = parse_unary(self.s[start : end + 1], self.alpha)
        except ParseError as exc:
            self.fail(exc.message, start)
        self.i = end + 1
        return fn

    def var(self) -> Var:
        self.expect("@")
        m = re.match(r"\d+", self.s[self.i :])
        if not m:
            self.fail("expected a variable index after '@'")
        self.i += m.end()
        return Var(int(m.group()))

    def group(self) -> Sum:
        opener = self.peek()
        closer = {"[": "]", "{": "}"}[opener]
        self.i += 1
        s = self.sum(closer)
        self.expect(closer)
        return s

    def atom(self) -> Expr:
        ch = self.peek()
        if ch == "@":
            return self.var()
        if ch in "[{":
            return self.group()
        if ch == "(":
            fn = self.literal()
            return Apply(fn, self.atom())
        self.fail("expected a term" if ch else "unexpected end of formula")

    def sum(self, closer: str = "") -> Sum:
        if self.peek() == "0":
            self.i += 1
            return Sum(())
        parts = [self.atom()]
        while self.peek() == "+":
            self.i += 1
            parts.append(self.atom())
        return Sum(tuple(parts))


def parse_formula(text: str, alpha: Alphabet, line_offset: int = 0) -> Sum:
    """Parse a formula body; the top level is always returned as a :class:`Sum`."""
    r = _Reader(text, alpha, line_offset)
    s = r.sum()
    if r.peek():
        r.fail(f"unexpected {r.peek()!r}")
    return s


_FORMULA_HEADER = re.compile(r"^formula N=(\d+) M=(\d+)$")


def load_formula(text: str, alpha: Alphabet | None = None) -> tuple[Sum, Alphabet, int]:
    head, _, body = text.partition("\n")
    m = _FORMULA_HEADER.match(head.strip())
    if not m:
        raise ParseError("expected header 'formula N=<n> M=<m>'", 1, 1)
    n, arity = int(m.group(1)), int(m.group(2))
    if alpha is None:
        alpha = Alphabet.standard(n)
    elif alpha.size != n:
        raise ParseError(f"header says N={n} but the alphabet has {alpha.size} symbols", 1, 1)
    e = parse_formula(body, alpha, line_offset=1)
    bad = [v for v in variables(e) if not 1 <= v <= arity]
    if bad:
        raise ParseError(f"variable @{bad[0]} outside 1..{arity}", 1, 1)
    return e, alpha, arity
