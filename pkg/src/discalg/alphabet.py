"""Finite cyclic alphabets and set-valued table cells.

Internally every element is a residue ``0..N-1`` and every cell is a bit mask
over residues (bit ``r`` set means residue ``r`` is a member).  Labels such as
``-1``/``0``/``1`` or ``-e``/``o``/``e`` only exist at the parse/print layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence, Union

from .errors import ParseError, UsageError

Label = Union[str, int]

EMPTY_TEXT = "N"
MEMBER_SEP = "*"


@lru_cache(maxsize=None)
def sum_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Minkowski sum of masks, ``sum_table(n)[a][b]``; empty is absorbing."""
    size = 1 << n
    members = [[r for r in range(n) if m >> r & 1] for m in range(size)]
    rows = []
    for a in range(size):
        row = []
        for b in range(size):
            out = 0
            for x in members[a]:
                for y in members[b]:
                    out |= 1 << ((x + y) % n)
            row.append(out)
        rows.append(tuple(row))
    return tuple(rows)


@dataclass(frozen=True)
class Alphabet:
    """An ``N``-symbol alphabet with addition mod ``N``.

    ``labels[i]`` is the i-th symbol in display (ascending) order and
    ``residues[i]`` the residue it denotes.
    """

    labels: tuple[str, ...]
    residues: tuple[int, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        n = len(self.labels)
        if n < 2:
            raise UsageError("an alphabet needs at least two symbols")
        if len(self.residues) != n or sorted(self.residues) != list(range(n)):
            raise UsageError(f"residues {self.residues} are not a permutation of 0..{n - 1}")
        if len(set(self.labels)) != n:
            raise UsageError(f"duplicate labels in {self.labels}")
        for lab in self.labels:
            if not lab or any(ch in lab for ch in " \t,()[]{}*@:=#") or lab == EMPTY_TEXT:
                raise UsageError(f"label {lab!r} clashes with the text syntax")
        object.__setattr__(self, "_index", dict(zip(self.labels, self.residues)))

    @classmethod
    def standard(cls, n: int) -> "Alphabet":
        """Labels ``-(N-2) .. 0, 1``; for ``N=3`` this is ``-1, 0, 1`` with ``-1`` = residue 2.

        The element 1 is always last, so selectors and value carriers keep the
        ``(0,...,0,1)`` / ``(-1,...,-1,0)`` shapes for every ``N``.
        """
        return _standard(n)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def residue(self, label: Label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise UsageError(f"{label!r} is not a symbol of {self}") from None

    def label(self, residue: int) -> str:
        return self.labels[self.residues.index(residue)]

    def neg(self, residue: int) -> int:
        return (-residue) % self.size

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.size

    def format_mask(self, mask: int) -> str:
        if mask == 0:
            return EMPTY_TEXT
        return MEMBER_SEP.join(lab for lab, r in zip(self.labels, self.residues) if mask >> r & 1)

    def parse_mask(self, text: str) -> int:
        """Inverse of :meth:`format_mask`; members must be distinct and ascending."""
        if text == EMPTY_TEXT:
            return 0
        parts = text.split(MEMBER_SEP)
        positions = []
        for part in parts:
            if part not in self._index:
                raise ParseError(f"unknown symbol {part!r} in cell {text!r}")
            positions.append(self.labels.index(part))
        if positions != sorted(set(positions)):
            raise ParseError(f"cell {text!r} must list distinct members in ascending order")
        mask = 0
        for pos in positions:
            mask |= 1 << self.residues[pos]
        return mask

    def relabeled(self, labels: Sequence[str]) -> "Alphabet":
        return Alphabet(tuple(labels), self.residues)

    def __str__(self) -> str:
        return "{" + ",".join(self.labels) + "}"


@lru_cache(maxsize=None)
def _standard(n: int) -> Alphabet:
    if n < 2:
        raise UsageError("an alphabet needs at least two symbols")
    low = -(n - 2)
    values = range(low, low + n)
    return Alphabet(tuple(str(v) for v in values), tuple(v % n for v in values))


@dataclass(frozen=True)
class MultiValue:
    """A subset of an alphabet: the content of one table cell."""

    alpha: Alphabet
    mask: int

    def __post_init__(self) -> None:
        if self.mask < 0 or self.mask > self.alpha.full_mask:
            raise UsageError(f"mask {self.mask:#x} exceeds alphabet {self.alpha}")

    @classmethod
    def of(cls, alpha: Alphabet, *labels: Label) -> "MultiValue":
        mask = 0
        for lab in labels:
            mask |= 1 << alpha.residue(lab)
        return cls(alpha, mask)

    @classmethod
    def parse(cls, alpha: Alphabet, text: str) -> "MultiValue":
        return cls(alpha, alpha.parse_mask(text))

    @classmethod
    def empty(cls, alpha: Alphabet) -> "MultiValue":
        return cls(alpha, 0)

    @classmethod
    def singleton(cls, alpha: Alphabet, residue: int) -> "MultiValue":
        return cls(alpha, 1 << residue)

    def __iter__(self) -> Iterator[int]:
        """Member residues in display order."""
        return (r for r in self.alpha.residues if self.mask >> r & 1)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __contains__(self, residue: object) -> bool:
        return isinstance(residue, int) and 0 <= residue < self.alpha.size and bool(self.mask >> residue & 1)

    def __bool__(self) -> bool:
        return self.mask != 0

    def labels(self) -> list[str]:
        return [self.alpha.label(r) for r in self]

    def __str__(self) -> str:
        return self.alpha.format_mask(self.mask)


def element_sum(a: int, b: int, alpha: Alphabet) -> int:
    """``(a + b) mod N`` on residues."""
    return alpha.add(a, b)


def mv_sum(a: MultiValue, b: MultiValue, alpha: Alphabet | None = None) -> MultiValue:
    """Minkowski sum of two cells; the empty cell is absorbing."""
    alpha = alpha or a.alpha
    if a.alpha != alpha or b.alpha != alpha:
        raise UsageError("mv_sum operands live in different alphabets")
    return MultiValue(alpha, sum_table(alpha.size)[a.mask][b.mask])


def mv_sum_all(values: Iterable[MultiValue], alpha: Alphabet) -> MultiValue:
    """Fold of :func:`mv_sum`; the sum of nothing is ``{0}``."""
    acc = MultiValue.singleton(alpha, 0)
    for v in values:
        acc = mv_sum(acc, v, alpha)
    return acc
