"""Trivial decomposition of a multi-valued function into a superposition of unary functions.

Every point ``p`` with a cell other than exactly ``{0}`` contributes one term
``V_p[ row(p1) @1 + col(p2) @2 + ... ]`` whose inner sum equals 1 only at
``p``; the value function ``V_p`` sends 1 to the cell and everything else
to 0.  When ``N < M + 1`` a flat sum can no longer isolate ``p`` and the
variables are merged pairwise from the left, an indicator re-normalising
each partial sum to 0/1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .alphabet import Alphabet
from .errors import UsageError, ValidationError
from .formula import Apply, Expr, Sum, Var, formula_table
from .function import DiscreteFunction


@lru_cache(maxsize=None)
def row_selector(alpha: Alphabet, t: int) -> DiscreteFunction:
    """1 at residue ``t``, 0 elsewhere."""
    return DiscreteFunction.from_callable(alpha, 1, lambda p: 1 << (1 if p[0] == t else 0))


@lru_cache(maxsize=None)
def col_selector(alpha: Alphabet, t: int) -> DiscreteFunction:
    """0 at residue ``t``, -1 elsewhere."""
    minus_one = alpha.size - 1
    return DiscreteFunction.from_callable(alpha, 1, lambda p: 1 << (0 if p[0] == t else minus_one))


@lru_cache(maxsize=None)
def indicator(alpha: Alphabet) -> DiscreteFunction:
    """``(0,...,0,1)``: keeps 1 and sends every other element to 0."""
    return row_selector(alpha, 1)


@lru_cache(maxsize=None)
def value_function(alpha: Alphabet, mask: int) -> DiscreteFunction:
    """``(0,...,0,v)``: sends 1 to the cell ``mask`` and everything else to 0."""
    return DiscreteFunction.from_callable(alpha, 1, lambda p: mask if p[0] == 1 else 1)


def uses_flat_form(n: int, arity: int) -> bool:
    return n >= arity + 1


@dataclass(frozen=True)
class Term:
    point: tuple[int, ...]
    value: DiscreteFunction
    locations: tuple[DiscreteFunction, ...]

    def expr(self, flat: bool) -> Expr:
        arity = len(self.point)
        selectors = self.locations[:arity]
        if flat:
            inner: Expr = Sum(tuple(Apply(g, Var(j + 1)) for j, g in enumerate(selectors)))
            return Apply(self.value, inner)
        inds = self.locations[arity:]
        level: Expr = Sum((Apply(selectors[0], Var(1)), Apply(selectors[1], Var(2))))
        for j in range(2, arity):
            level = Sum((Apply(inds[j - 2], level), Apply(selectors[j], Var(j + 1))))
        return Apply(self.value, level)


@dataclass(frozen=True)
class TrivialDecomposition:
    alpha: Alphabet
    arity: int
    terms: tuple[Term, ...]
    pruned: frozenset = field(default_factory=frozenset)

    @property
    def flat(self) -> bool:
        return uses_flat_form(self.alpha.size, self.arity)

    def render(self) -> Sum:
        return Sum(tuple(t.expr(self.flat) for t in self.terms))

    def term_at(self, point: Sequence[int]) -> Term:
        point = tuple(point)
        for t in self.terms:
            if t.point == point:
                return t
        if point in self.pruned:
            return _make_term(self.alpha, point, 1)
        raise UsageError(f"{point} is not a point of this decomposition")

    def points(self) -> list[tuple[int, ...]]:
        return [t.point for t in self.terms]


def _make_term(alpha: Alphabet, point: tuple[int, ...], mask: int) -> Term:
    arity = len(point)
    locs = [row_selector(alpha, point[0])] + [col_selector(alpha, c) for c in point[1:]]
    if not uses_flat_form(alpha.size, arity):
        locs += [indicator(alpha)] * (arity - 2)
    return Term(point, value_function(alpha, mask), tuple(locs))


def trivial_decompose(f: DiscreteFunction, prune: bool = True) -> TrivialDecomposition:
    """One term per point in display row-major order; points whose cell is exactly
    ``{0}`` are dropped unless ``prune=False``."""
    alpha = f.alpha
    if alpha.size < 3:
        raise ValidationError("decomposition needs at least three symbols; two-symbol functions are not supported")
    terms = []
    pruned = []
    for p in f.points():
        mask = f.cell(p)
        if prune and mask == 1:
            pruned.append(p)
            continue
        terms.append(_make_term(alpha, p, mask))
    return TrivialDecomposition(alpha, f.arity, tuple(terms), frozenset(pruned))


def decompose(f: DiscreteFunction, prune: bool = True) -> Sum:
    return trivial_decompose(f, prune).render()


def round_trips(f: DiscreteFunction, prune: bool = True) -> bool:
    return formula_table(decompose(f, prune), f.alpha, f.arity) == f


def accessor_V(d: TrivialDecomposition, point: Sequence[int]) -> DiscreteFunction:
    """Value function of the term at ``point``; pruned points answer the all-zero function."""
    _check_point(d, point)
    return d.term_at(point).value


def accessor_P(d: TrivialDecomposition, point: Sequence[int], j: int) -> DiscreteFunction:
    """Location function ``j`` (1-based) of the term at ``point``."""
    _check_point(d, point)
    locs = d.term_at(point).locations
    if not 1 <= j <= len(locs):
        raise UsageError(f"location index {j} outside 1..{len(locs)}")
    return locs[j - 1]


def _check_point(d: TrivialDecomposition, point: Sequence[int]) -> None:
    if len(point) != d.arity or any(not 0 <= c < d.alpha.size for c in point):
        raise UsageError(f"{tuple(point)} is not a point of an arity-{d.arity} function")


def isolating_selectors(n: int, arity: int, target: Sequence[int] | None = None) -> list[tuple]:
    """Brute force every choice of one single-valued unary per variable whose
    flat sum takes one value exactly at ``target`` (default: the all-zero-residue
    point) and other values elsewhere, separating it with a unary value carrier.

    Returns each witness as a tuple of unary tables (tuples of residues).
    """
    target = tuple(target) if target is not None else (0,) * arity
    unary_tables = list(itertools.product(range(n), repeat=n))
    points = list(itertools.product(range(n), repeat=arity))
    found = []
    for choice in itertools.product(unary_tables, repeat=arity):
        at_target = sum(choice[j][target[j]] for j in range(arity)) % n
        if all(
            sum(choice[j][p[j]] for j in range(arity)) % n != at_target for p in points if p != target
        ):
            found.append(choice)
    return found
