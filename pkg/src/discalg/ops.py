"""The special operators: commutation, tension-compression, superposition, false variables.

Every operator has a ``*_tables`` kernel working on raw mask arrays with
arbitrary leading batch axes (the last ``arity`` axes are the variables), and
a thin wrapper over :class:`DiscreteFunction`.  The law suite drives the
kernels directly to sweep hundreds of thousands of cases at once.

Set-valued arguments follow relational semantics: a function is its graph
relation and every operator is a relational construction on it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .alphabet import Alphabet, sum_table
from .errors import ParseError, UsageError
from .function import MASK_DTYPE, DiscreteFunction, parse_unary


@lru_cache(maxsize=None)
def _sum_array(n: int) -> np.ndarray:
    return np.array(sum_table(n), dtype=MASK_DTYPE)


def _bits(n: int) -> np.ndarray:
    return np.left_shift(1, np.arange(n, dtype=MASK_DTYPE))


def mask_to_rel(tables: np.ndarray, n: int) -> np.ndarray:
    """Append a boolean output axis: ``rel[..., r]`` is membership of residue r."""
    return (tables[..., None] >> np.arange(n, dtype=MASK_DTYPE)) & 1 == 1


def rel_to_mask(rel: np.ndarray) -> np.ndarray:
    n = rel.shape[-1]
    return (rel.astype(MASK_DTYPE) * _bits(n)).sum(axis=-1)


# -- role permutations -----------------------------------------------------------

@dataclass(frozen=True)
class RolePermutation:
    """Roles of a commutation: ``roles[:-1]`` are the new argument roles, ``roles[-1]``
    the new result role.  Role ``k >= 1`` is original argument k, role 0 the result."""

    roles: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.roles) != list(range(len(self.roles))) or len(self.roles) < 2:
            raise UsageError(f"{self.roles} is not a permutation of 0..{len(self.roles) - 1}")

    @classmethod
    def of(cls, *roles: int) -> "RolePermutation":
        return cls(tuple(roles))

    @classmethod
    def identity(cls, arity: int) -> "RolePermutation":
        return cls(tuple(range(1, arity + 1)) + (0,))

    @classmethod
    def parse(cls, text: str) -> "RolePermutation":
        m = re.fullmatch(r"\s*C\s*[(\[]\s*([\d\s,]+)[)\]]\s*", text)
        if not m:
            raise ParseError(f"bad commutation {text!r}; expected e.g. C(1,0,2)")
        return cls(tuple(int(t) for t in m.group(1).split(",")))

    @property
    def arity(self) -> int:
        return len(self.roles) - 1

    def _position(self, role: int) -> int:
        return role - 1 if role else self.arity

    def then(self, other: "RolePermutation") -> "RolePermutation":
        """The single commutation equal to applying ``self`` first and ``other`` second."""
        if other.arity != self.arity:
            raise UsageError("commutations of different arity")
        return RolePermutation(tuple(self.roles[self._position(r)] for r in other.roles))

    def inverse(self) -> "RolePermutation":
        for cand in all_role_permutations(self.arity):
            if self.then(cand) == RolePermutation.identity(self.arity):
                return cand
        raise AssertionError("unreachable")

    def __str__(self) -> str:
        return "C(" + ",".join(map(str, self.roles)) + ")"


def all_role_permutations(arity: int) -> list[RolePermutation]:
    from itertools import permutations

    return [RolePermutation(p) for p in permutations(range(arity + 1))]


# -- kernels ---------------------------------------------------------------------

def commute_tables(tables: np.ndarray, arity: int, perm: RolePermutation, n: int) -> np.ndarray:
    if perm.arity != arity:
        raise UsageError(f"{perm} needs arity {perm.arity}, got {arity}")
    rel = mask_to_rel(tables, n)
    lead = rel.ndim - arity - 1
    # role k>=1 sits on axis lead+k-1, role 0 on the last axis
    src = [lead + r - 1 if r else rel.ndim - 1 for r in perm.roles]
    rel = np.transpose(rel, list(range(lead)) + src)
    return rel_to_mask(rel)


def _place(vec: np.ndarray, arity: int, k: int) -> np.ndarray:
    """Reshape ``(*batch, N)`` so the N axis lines up with variable k of an arity-M table."""
    return vec.reshape(vec.shape[:-1] + (1,) * (k - 1) + (vec.shape[-1],) + (1,) * (arity - k))


def tension_arg_tables(tables: np.ndarray, arity: int, k: int, unary: np.ndarray, n: int) -> np.ndarray:
    """``result(.., x_k, ..) = union of tables(.., u, ..) over u in unary(x_k)``."""
    if not 1 <= k <= arity:
        raise UsageError(f"argument position {k} outside 1..{arity}")
    axis = tables.ndim - arity + k - 1
    out = None
    for u in range(n):
        fu = np.take(tables, [u], axis=axis)
        sel = _place((unary >> u) & 1 == 1, arity, k)
        part = np.where(sel, fu, 0)
        out = part if out is None else out | part
    return out


def converse_tables(unary: np.ndarray, n: int) -> np.ndarray:
    rel = mask_to_rel(unary, n)
    return rel_to_mask(np.swapaxes(rel, -1, -2))


def tension_result_tables(tables: np.ndarray, arity: int, unary: np.ndarray, n: int) -> np.ndarray:
    """Image of every cell under the converse of ``unary``."""
    conv = converse_tables(unary, n)
    out = None
    for s in range(n):
        image = conv[..., s].reshape(conv.shape[:-1] + (1,) * arity)
        part = np.where((tables >> s) & 1 == 1, image, 0)
        out = part if out is None else out | part
    return out


def superpose_tables(tables: Sequence[np.ndarray], n: int) -> np.ndarray:
    st = _sum_array(n)
    acc = tables[0]
    for t in tables[1:]:
        acc = st[acc, t]
    return acc


def false_variable_tables(tables: np.ndarray, arity: int, k: int, n: int) -> np.ndarray:
    if not 1 <= k <= arity + 1:
        raise UsageError(f"insert position {k} outside 1..{arity + 1}")
    axis = tables.ndim - arity + k - 1
    grown = np.expand_dims(tables, axis)
    shape = list(grown.shape)
    shape[axis] = n
    return np.broadcast_to(grown, shape).copy()


# -- function-level wrappers -----------------------------------------------------

def _same_alpha(*fs: DiscreteFunction) -> Alphabet:
    alpha = fs[0].alpha
    if any(f.alpha != alpha for f in fs[1:]):
        raise UsageError("functions live in different alphabets")
    return alpha


def _need_unary(b: DiscreteFunction) -> None:
    if b.arity != 1:
        raise UsageError("expected a function of one variable")


def commute(f: DiscreteFunction, perm: RolePermutation | Sequence[int]) -> DiscreteFunction:
    """Permute argument/result roles of the graph relation of ``f``."""
    if not isinstance(perm, RolePermutation):
        perm = RolePermutation(tuple(perm))
    n = f.alpha.size
    return DiscreteFunction(f.alpha, f.arity, commute_tables(f.table, f.arity, perm, n))


def converse(b: DiscreteFunction) -> DiscreteFunction:
    _need_unary(b)
    return DiscreteFunction(b.alpha, 1, converse_tables(b.table, b.alpha.size))


def compose_unary(b1: DiscreteFunction, b2: DiscreteFunction) -> DiscreteFunction:
    """``b1 b2``: apply ``b2`` first, then ``b1``."""
    _need_unary(b1)
    _need_unary(b2)
    alpha = _same_alpha(b1, b2)
    return DiscreteFunction(alpha, 1, tension_arg_tables(b1.table, 1, 1, b2.table, alpha.size))


def tension_arg(f: DiscreteFunction, k: int, b: DiscreteFunction) -> DiscreteFunction:
    """``f T_k b``: substitute ``b(x_k)`` for argument k."""
    _need_unary(b)
    alpha = _same_alpha(f, b)
    return DiscreteFunction(alpha, f.arity, tension_arg_tables(f.table, f.arity, k, b.table, alpha.size))


def tension_result(f: DiscreteFunction, b: DiscreteFunction) -> DiscreteFunction:
    """``f T_0 b``: map every cell through the converse of ``b``.

    Called with ``converse(g)`` this applies ``g`` itself to the results.
    """
    _need_unary(b)
    alpha = _same_alpha(f, b)
    return DiscreteFunction(alpha, f.arity, tension_result_tables(f.table, f.arity, b.table, alpha.size))


def superpose(fs: Sequence[DiscreteFunction]) -> DiscreteFunction:
    """Pointwise Minkowski sum."""
    if not fs:
        raise UsageError("superpose needs at least one function")
    alpha = _same_alpha(*fs)
    if any(f.arity != fs[0].arity for f in fs):
        raise UsageError("superposed functions must share an arity")
    return DiscreteFunction(alpha, fs[0].arity, superpose_tables([f.table for f in fs], alpha.size))


def add_false_variable(f: DiscreteFunction, k: int) -> DiscreteFunction:
    """Insert an ignored variable so that it becomes argument k of the result."""
    n = f.alpha.size
    return DiscreteFunction(f.alpha, f.arity + 1, false_variable_tables(f.table, f.arity, k, n))


# -- textual operator specs (used by the CLI) ------------------------------------

@dataclass(frozen=True)
class OpSpec:
    kind: str  # "C", "T", "FALSE", "SUM"
    perm: RolePermutation | None = None
    position: int | None = None
    unary: DiscreteFunction | None = None


def parse_op(text: str, alpha: Alphabet) -> OpSpec:
    """``C(1,0,2)``, ``T1:(1,-1,0)``, ``T0:conv((1,0,0))``, ``FALSE@3``, ``SUM``."""
    s = text.strip()
    if s == "SUM":
        return OpSpec("SUM")
    if s.startswith("C"):
        return OpSpec("C", perm=RolePermutation.parse(s))
    m = re.fullmatch(r"FALSE@(\d+)", s)
    if m:
        return OpSpec("FALSE", position=int(m.group(1)))
    m = re.fullmatch(r"T(\d+):(.+)", s)
    if m:
        arg = m.group(2).strip()
        conv = re.fullmatch(r"conv\((.+)\)", arg)
        b = parse_unary(conv.group(1) if conv else arg, alpha)
        if conv:
            b = converse(b)
        return OpSpec("T", position=int(m.group(1)), unary=b)
    raise ParseError(f"unrecognised operator {text!r}")


def apply_op(spec: OpSpec, f: DiscreteFunction) -> DiscreteFunction:
    if spec.kind == "C":
        return commute(f, spec.perm)
    if spec.kind == "FALSE":
        return add_false_variable(f, spec.position)
    if spec.kind == "T":
        if spec.position == 0:
            return tension_result(f, spec.unary)
        return tension_arg(f, spec.position, spec.unary)
    raise UsageError(f"{spec.kind} is not a single-function operator")
