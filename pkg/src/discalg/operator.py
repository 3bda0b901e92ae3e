"""The same algebra one level up: symbols that denote unary functions.

The level-1 alphabet ``{-e, o, e}`` has the residues of ``{-1, 0, 1}``, so
every level-0 routine runs unchanged on it; this module supplies the
relabelling, the denotation of symbols as level-0 unary functions, and the
interpretation of level-1 results back at level 0.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from .alphabet import Alphabet, sum_table
from .decompose import Term, TrivialDecomposition
from .errors import UsageError
from .formula import Apply, Expr, Sum, Var, _eval, variables
from .function import DiscreteFunction, unary
from .solver import PipelineResult, PipelineTrace, two_branch_pipeline

OPERATOR_LABELS = ("-e", "o", "e")


def operator_alphabet() -> Alphabet:
    return Alphabet.standard(3).relabeled(OPERATOR_LABELS)


@dataclass(frozen=True)
class OperatorAlphabetBinding:
    """Level-1 symbols and the level-0 unary function each one stands for."""

    level1: Alphabet
    base: Alphabet
    denotation: Mapping[str, DiscreteFunction] = field(hash=False)

    @classmethod
    def standard(cls) -> "OperatorAlphabetBinding":
        base = Alphabet.standard(3)
        den = {
            "-e": unary(base, "(1,0,-1)"),
            "o": unary(base, "(0,0,0)"),
            "e": unary(base, "(-1,0,1)"),
        }
        return cls(operator_alphabet(), base, den)

    def denote(self, residue: int) -> DiscreteFunction:
        return self.denotation[self.level1.label(residue)]

    def symbol_sum(self, a: int, b: int) -> int:
        return self.level1.add(a, b)

    def homomorphism_failures(self) -> list[tuple[str, str]]:
        """Symbol pairs whose sum does not denote the pointwise sum of their denotations."""
        bad = []
        st = sum_table(self.base.size)
        for a in self.level1.residues:
            for b in self.level1.residues:
                lhs = self.denote(self.symbol_sum(a, b)).table
                rhs = [st[int(x)][int(y)] for x, y in zip(self.denote(a).table, self.denote(b).table)]
                if list(map(int, lhs)) != rhs:
                    bad.append((self.level1.label(a), self.level1.label(b)))
        return bad

    @property
    def zero(self) -> str:
        """The zero operator symbol (the level-1 ``o``)."""
        return self.level1.label(0)


def relabel(obj: Any, alpha: Alphabet) -> Any:
    """Re-bind tables, formulas and decompositions to an alphabet with the same residues."""
    if isinstance(obj, DiscreteFunction):
        if obj.alpha.residues != alpha.residues:
            raise UsageError("relabelling needs identical residue orders")
        return DiscreteFunction(alpha, obj.arity, obj.table, obj.name)
    if isinstance(obj, Var):
        return obj
    if isinstance(obj, Apply):
        return Apply(relabel(obj.fn, alpha), relabel(obj.inner, alpha))
    if isinstance(obj, Sum):
        return Sum(tuple(relabel(p, alpha) for p in obj.parts))
    if isinstance(obj, Term):
        return Term(obj.point, relabel(obj.value, alpha), tuple(relabel(g, alpha) for g in obj.locations))
    if isinstance(obj, TrivialDecomposition):
        return TrivialDecomposition(alpha, obj.arity, tuple(relabel(t, alpha) for t in obj.terms), obj.pruned)
    if isinstance(obj, PipelineTrace):
        return PipelineTrace(
            relabel(obj.decomposition, alpha),
            [relabel(f, alpha) for f in obj.first_branch],
            [relabel(f, alpha) for f in obj.second_branch],
            [relabel(f, alpha) for f in obj.lifted],
            [relabel(f, alpha) for f in obj.valued],
            relabel(obj.psi5, alpha),
            relabel(obj.W, alpha),
            relabel(obj.solution, alpha),
        )
    if isinstance(obj, PipelineResult):
        return PipelineResult(relabel(obj.formula, alpha), relabel(obj.trace, alpha))
    if isinstance(obj, tuple):
        return tuple(relabel(x, alpha) for x in obj)
    if isinstance(obj, list):
        return [relabel(x, alpha) for x in obj]
    return obj


def lift(routine: Callable, binding: OperatorAlphabetBinding | None = None) -> Callable:
    """The "high" version of a level-0 routine: inputs are moved onto the level-1
    alphabet, the unchanged routine runs there, and results stay at level 1."""
    binding = binding or OperatorAlphabetBinding.standard()
    level1 = binding.level1

    @functools.wraps(routine)
    def high(*args, **kwargs):
        args = tuple(relabel(a, level1) for a in args)
        kwargs = {k: relabel(v, level1) for k, v in kwargs.items()}
        return relabel(routine(*args, **kwargs), level1)

    return high


def solve_operator_equation(
    theta1: DiscreteFunction, theta2: DiscreteFunction, theta3: DiscreteFunction
) -> PipelineResult:
    """Formula solution of ``(y th1 f) th3 (y th2 g) = h`` over level-1 tables."""
    return lift(two_branch_pipeline)(theta1, theta2, theta3)


def interpret(
    formula: Expr,
    args: Mapping[int, str | int],
    binding: OperatorAlphabetBinding | None = None,
) -> list[DiscreteFunction]:
    """Evaluate a level-1 formula and read each resulting symbol as a level-0 function.

    ``args`` maps variable index to a level-1 symbol (label or residue).  A
    multi-valued result yields several functions, a no-valued one none.
    """
    binding = binding or OperatorAlphabetBinding.standard()
    level1 = binding.level1
    needed = variables(formula)
    missing = needed - set(args)
    if missing:
        raise UsageError(f"unbound parameter @{min(missing)}")
    arity = max(needed, default=0)
    masks = []
    for k in range(1, arity + 1):
        sym = args.get(k, 0)
        r = sym if isinstance(sym, int) else level1.residue(sym)
        masks.append(1 << r)
    mask = _eval(relabel(formula, level1), masks, sum_table(3))
    return [binding.denote(r) for r in level1.residues if mask >> r & 1]

