"""Dense tables ``A^M -> subsets of A`` and their text formats."""

from __future__ import annotations

import itertools
import re
from typing import Callable, Iterator, Sequence

import numpy as np

from .alphabet import Alphabet, MultiValue
from .errors import ParseError, UsageError

MASK_DTYPE = np.int64


class DiscreteFunction:
    """A multi-valued function of ``arity`` variables over ``alpha``.

    ``table`` is an ``(N,)*arity`` array of cell masks indexed by residues,
    first variable on axis 0.  Instances are immutable and hashable.
    """

    __slots__ = ("alpha", "arity", "table", "name", "_hash")

    def __init__(self, alpha: Alphabet, arity: int, table, name: str | None = None):
        if arity < 1:
            raise UsageError("arity must be at least 1; express constants with a false variable")
        n = alpha.size
        arr = np.array(table, dtype=MASK_DTYPE)
        if arr.size != n**arity:
            raise UsageError(f"table has {arr.size} cells, expected {n}^{arity}")
        arr = arr.reshape((n,) * arity)
        if arr.min() < 0 or arr.max() > alpha.full_mask:
            raise UsageError("table cell outside the alphabet")
        arr.flags.writeable = False
        self.alpha = alpha
        self.arity = arity
        self.table = arr
        self.name = name
        self._hash = None

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_callable(
        cls, alpha: Alphabet, arity: int, fn: Callable[[tuple[int, ...]], int], name: str | None = None
    ) -> "DiscreteFunction":
        """Build from ``fn(residue tuple) -> mask``."""
        n = alpha.size
        cells = [fn(p) for p in itertools.product(range(n), repeat=arity)]
        return cls(alpha, arity, cells, name)

    @classmethod
    def constant(cls, alpha: Alphabet, arity: int, mask: int, name: str | None = None) -> "DiscreteFunction":
        return cls(alpha, arity, np.full((alpha.size,) * arity, mask), name)

    @classmethod
    def zero(cls, alpha: Alphabet, arity: int) -> "DiscreteFunction":
        return cls.constant(alpha, arity, 1, "o")

    @classmethod
    def from_display(cls, alpha: Alphabet, arity: int, cells: Sequence[int], name: str | None = None):
        """Cells listed row-major in display (label) order, first variable slowest."""
        n = alpha.size
        disp = np.array(cells, dtype=MASK_DTYPE).reshape((n,) * arity)
        table = np.empty_like(disp)
        table[np.ix_(*[alpha.residues] * arity)] = disp
        return cls(alpha, arity, table, name)

    def with_name(self, name: str | None) -> "DiscreteFunction":
        return DiscreteFunction(self.alpha, self.arity, self.table, name)

    # -- inspection -----------------------------------------------------------

    def cell(self, point: Sequence[int]) -> int:
        return int(self.table[tuple(point)])

    def display_table(self) -> np.ndarray:
        """The table re-indexed by display position instead of residue."""
        return self.table[np.ix_(*[self.alpha.residues] * self.arity)]

    def points(self) -> Iterator[tuple[int, ...]]:
        """Residue tuples in display row-major order."""
        return itertools.product(self.alpha.residues, repeat=self.arity)

    def is_single_valued(self) -> bool:
        t = self.table
        return bool(np.all((t != 0) & ((t & (t - 1)) == 0)))

    def graph_size(self) -> int:
        return int(sum(bin(int(m)).count("1") for m in self.table.flat))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiscreteFunction):
            return NotImplemented
        return (
            self.alpha == other.alpha
            and self.arity == other.arity
            and np.array_equal(self.table, other.table)
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.alpha, self.arity, self.table.tobytes()))
        return self._hash

    def __repr__(self) -> str:
        if self.arity == 1:
            body = format_unary(self)
        else:
            body = f"M={self.arity}"
        tag = f" {self.name}" if self.name else ""
        return f"<DiscreteFunction{tag} N={self.alpha.size} {body}>"


def equal(f: DiscreteFunction, g: DiscreteFunction) -> bool:
    return f == g


def _check_args(f: DiscreteFunction, args: Sequence) -> None:
    if len(args) != f.arity:
        raise UsageError(f"function of arity {f.arity} called with {len(args)} arguments")


def evaluate(f: DiscreteFunction, args: Sequence[int]) -> MultiValue:
    """The stored cell at a point given by residues."""
    _check_args(f, args)
    n = f.alpha.size
    if any(not (0 <= a < n) for a in args):
        raise UsageError(f"argument outside alphabet: {tuple(args)}")
    return MultiValue(f.alpha, int(f.table[tuple(args)]))


def evaluate_setwise(f: DiscreteFunction, args: Sequence[MultiValue], strict: bool = False) -> MultiValue:
    """Evaluate at set-valued arguments.

    Default (relational) semantics: the union of the cells over every tuple of
    the Cartesian product.  ``strict=True`` instead collapses to the empty set
    as soon as any reachable cell is empty.  Either way an empty argument
    gives the empty set.
    """
    _check_args(f, args)
    for a in args:
        if a.alpha != f.alpha:
            raise UsageError("argument alphabet differs from the function's")
    return MultiValue(f.alpha, setwise_mask(f, [a.mask for a in args], strict))


def setwise_mask(f: DiscreteFunction, masks: Sequence[int], strict: bool = False) -> int:
    n = f.alpha.size
    members = [[r for r in range(n) if m >> r & 1] for m in masks]
    if any(not m for m in members):
        return 0
    out = 0
    for p in itertools.product(*members):
        cell = int(f.table[p])
        if strict and cell == 0:
            return 0
        out |= cell
    return out


# -- unary literal -------------------------------------------------------------

def format_unary(f: DiscreteFunction) -> str:
    if f.arity != 1:
        raise UsageError("unary literal needs an arity-1 function")
    cells = f.display_table()
    return "(" + ",".join(f.alpha.format_mask(int(m)) for m in cells) + ")"


def parse_unary(text: str, alpha: Alphabet) -> DiscreteFunction:
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise ParseError(f"unary literal must be parenthesised: {text!r}")
    parts = [p.strip() for p in text[1:-1].split(",")]
    if len(parts) != alpha.size:
        raise ParseError(f"unary literal {text!r} needs {alpha.size} cells, got {len(parts)}")
    return DiscreteFunction.from_display(alpha, 1, [alpha.parse_mask(p) for p in parts])


def unary(alpha: Alphabet, text: str) -> DiscreteFunction:
    """Shorthand: ``unary(A3, "(1,-1,0)")``."""
    return parse_unary(text, alpha)


# -- table file format -----------------------------------------------------------

_HEADER = re.compile(r"^dfun N=(\d+) M=(\d+)(?: name=(\S+))?$")


def format_table(f: DiscreteFunction) -> str:
    alpha = f.alpha
    n, m = alpha.size, f.arity
    head = f"dfun N={n} M={m}" + (f" name={f.name}" if f.name else "")
    lines = [head]
    disp = f.display_table()
    if m <= 2:
        blocks = [((), disp if m == 2 else disp.reshape(n, 1))]
    else:
        blocks = []
        for tail in itertools.product(range(n), repeat=m - 2):
            blocks.append((tail, disp[(slice(None), slice(None)) + tail]))
    for tail, block in blocks:
        if tail:
            labels = " ".join(alpha.labels[i] for i in tail)
            lines.append(f"# var3..var{m} = {labels}")
        for i, row in enumerate(block):
            cells = " ".join(alpha.format_mask(int(c)) for c in row)
            lines.append(f"{alpha.labels[i]}: {cells}")
    return "\n".join(lines) + "\n"


def parse_table(text: str, alpha: Alphabet | None = None) -> DiscreteFunction:
    """Parse the ``dfun`` table format; ``alpha`` defaults to the standard alphabet of size N."""
    lines = text.splitlines()
    rows = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if not rows:
        raise ParseError("empty table text", 1, 1)
    lineno, head = rows[0]
    match = _HEADER.match(head.strip())
    if not match:
        raise ParseError("expected header 'dfun N=<n> M=<m> [name=<id>]'", lineno, 1)
    n, m, name = int(match.group(1)), int(match.group(2)), match.group(3)
    if m < 1:
        raise ParseError("M must be at least 1", lineno, head.index("M=") + 1)
    if alpha is None:
        if n < 2:
            raise ParseError("N must be at least 2", lineno, head.index("N=") + 1)
        alpha = Alphabet.standard(n)
    elif alpha.size != n:
        raise ParseError(f"header says N={n} but the alphabet has {alpha.size} symbols", lineno, 1)
    ncols = n if m >= 2 else 1
    tails = list(itertools.product(range(n), repeat=max(m - 2, 0)))
    disp = np.zeros((n,) * m, dtype=MASK_DTYPE)
    body = iter(rows[1:])
    last_line = lineno

    def next_row() -> tuple[int, str]:
        try:
            return next(body)
        except StopIteration:
            raise ParseError("table ended early", last_line + 1, 1) from None

    for tail in tails:
        if m >= 3:
            lineno, ln = next_row()
            last_line = lineno
            expect = f"# var3..var{m} = " + " ".join(alpha.labels[i] for i in tail)
            if ln.strip() != expect:
                raise ParseError(f"expected block comment {expect!r}", lineno, 1)
        for i in range(n):
            lineno, ln = next_row()
            last_line = lineno
            label, sep, rest = ln.partition(":")
            if not sep or label.strip() != alpha.labels[i]:
                raise ParseError(f"expected row label '{alpha.labels[i]}:'", lineno, 1)
            col = len(label) + 2
            cells = rest.split()
            if len(cells) != ncols:
                raise ParseError(f"expected {ncols} cells, found {len(cells)}", lineno, col)
            for j, tok in enumerate(cells):
                try:
                    mask = alpha.parse_mask(tok)
                except ParseError as exc:
                    raise ParseError(exc.message, lineno, ln.index(tok, col - 1) + 1) from None
                if m == 1:
                    disp[i] = mask
                else:
                    disp[(i, j) + tail] = mask
    extra = next(body, None)
    if extra is not None:
        raise ParseError("unexpected text after the last block", extra[0], 1)
    table = np.empty_like(disp)
    table[np.ix_(*[alpha.residues] * m)] = disp
    return DiscreteFunction(alpha, m, table, name)


def show_table(f: DiscreteFunction, var_names: Sequence[str] | None = None) -> str:
    """Human layout: binary tables as a grid, higher arities as side-by-side blocks."""
    alpha = f.alpha
    n, m = alpha.size, f.arity
    disp = f.display_table()
    fmt = alpha.format_mask
    if m == 1:
        return format_unary(f) + "\n"
    if var_names is None:
        var_names = [f"x{i + 1}" for i in range(m)]
    blocks: list[list[list[str]]] = []
    tails = list(itertools.product(range(n), repeat=m - 2))
    for tail in tails:
        corner = ",".join(f"{var_names[2 + k]}={alpha.labels[t]}" for k, t in enumerate(tail))
        grid = [[corner] + list(alpha.labels)]
        for i in range(n):
            grid.append([alpha.labels[i]] + [fmt(int(disp[(i, j) + tail])) for j in range(n)])
        blocks.append(grid)
    width = max(len(c) for b in blocks for row in b for c in row)
    out = []
    for r in range(n + 1):
        out.append(" | ".join(" ".join(c.rjust(width) for c in b[r]) for b in blocks).rstrip())
    return "\n".join(out) + "\n"


def random_function(
    alpha: Alphabet, arity: int, rng: np.random.Generator, kind: str = "multi"
) -> DiscreteFunction:
    """``kind``: 'single' (one value per cell), 'multi' (any subset, empty included),
    'partial' (at most one value per cell)."""
    n = alpha.size
    shape = (n,) * arity
    if kind == "single":
        table = np.left_shift(1, rng.integers(0, n, size=shape))
    elif kind == "multi":
        table = rng.integers(0, 1 << n, size=shape)
    elif kind == "partial":
        r = rng.integers(0, n + 1, size=shape)
        table = np.where(r == n, 0, np.left_shift(1, np.minimum(r, n - 1)))
    else:
        raise UsageError(f"unknown random kind {kind!r}")
    return DiscreteFunction(alpha, arity, table)


def all_unaries(alpha: Alphabet, kind: str = "multi") -> list[DiscreteFunction]:
    """Every unary function: 8^3 = 512 for N=3 with kind='multi', 27 with 'single'."""
    n = alpha.size
    choices = [1 << r for r in range(n)] if kind == "single" else list(range(1 << n))
    return [DiscreteFunction(alpha, 1, cells) for cells in itertools.product(choices, repeat=n)]
