"""Solving equations: exhaustive substitution, an independent verifier, and the
seven-step symbolic route for two-branch equations ``(x p1 a) p3 (x p2 b) = c``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .decompose import TrivialDecomposition, trivial_decompose
from .equation import Call, Equation, Node, Param, Unknown
from .errors import UsageError, ValidationError
from .formula import Sum
from .function import DiscreteFunction, setwise_mask
from .ops import (
    RolePermutation,
    add_false_variable,
    commute,
    converse,
    superpose,
    tension_result,
)

SOLVE_PERMUTATION = RolePermutation.of(2, 3, 0, 1)


def _eval_lhs(eq: Equation, node: Node, env: dict[str, int], strict: bool) -> int:
    if isinstance(node, (Unknown, Param)):
        return env[node.name]
    fn = eq.bindings[node.name]
    return setwise_mask(fn, [_eval_lhs(eq, a, env, strict) for a in node.args], strict)


def lhs_value(eq: Equation, x: int, params: tuple[int, ...], strict: bool = False) -> int:
    """Mask of the left-hand side with the unknown set to residue ``x``."""
    env = {name: 1 << v for name, v in zip(eq.params, params)}
    env[eq.unknown] = 1 << x
    return _eval_lhs(eq, eq.lhs, env, strict)


def semantic_solve(eq: Equation, strict: bool = False) -> DiscreteFunction:
    """Solution table ``W(params)``: all ``x`` whose left-hand side can take the rhs value."""
    alpha = eq.alpha
    n = alpha.size
    rhs_pos = len(eq.params) - 1

    def cell(point: tuple[int, ...]) -> int:
        target = point[rhs_pos]
        out = 0
        for x in range(n):
            if lhs_value(eq, x, point, strict) >> target & 1:
                out |= 1 << x
        return out

    return DiscreteFunction.from_callable(alpha, len(eq.params), cell, name="W")


@dataclass(frozen=True)
class Violation:
    params: tuple[int, ...]
    x: int
    kind: str  # "unsound": listed but fails; "incomplete": satisfies but missing


@dataclass
class SolutionReport:
    checked: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_solution(eq: Equation, W: DiscreteFunction) -> SolutionReport:
    """Re-verify every cell of ``W`` by direct substitution."""
    if W.arity != len(eq.params) or W.alpha != eq.alpha:
        raise UsageError("solution shape does not match the equation")
    report = SolutionReport()
    n = eq.alpha.size
    rhs_pos = len(eq.params) - 1
    for point in itertools.product(range(n), repeat=W.arity):
        cell = W.cell(point)
        for x in range(n):
            report.checked += 1
            holds = bool(lhs_value(eq, x, point) >> point[rhs_pos] & 1)
            listed = bool(cell >> x & 1)
            if listed and not holds:
                report.violations.append(Violation(point, x, "unsound"))
            elif holds and not listed:
                report.violations.append(Violation(point, x, "incomplete"))
    return report


# -- two-branch symbolic pipeline ----------------------------------------------------

@dataclass
class PipelineTrace:
    decomposition: TrivialDecomposition  # of psi3
    first_branch: list[DiscreteFunction]  # psi1 T0 conv(g_i1)
    second_branch: list[DiscreteFunction]  # psi2 T0 conv(g_i2)
    lifted: list[DiscreteFunction]  # psi_i3, arity 3 over (x, a, b)
    valued: list[DiscreteFunction]  # psi_i4 = psi_i3 T0 conv(f_i)
    psi5: DiscreteFunction
    W: DiscreteFunction
    solution: TrivialDecomposition  # of W

    def named(self) -> dict[str, DiscreteFunction]:
        """Every intermediate under a stable file-friendly name."""
        out: dict[str, DiscreteFunction] = {}
        for i, (s1, s2, th, v) in enumerate(
            zip(self.first_branch, self.second_branch, self.lifted, self.valued), start=1
        ):
            out[f"step2_{i}_first"] = s1
            out[f"step2_{i}_second"] = s2
            out[f"theta{i}"] = th
            out[f"step4_{i}"] = v
        out["theta7"] = self.psi5
        out["W"] = self.W
        return out


@dataclass
class PipelineResult:
    formula: Sum
    trace: PipelineTrace


def two_branch_pipeline(
    psi1: DiscreteFunction, psi2: DiscreteFunction, psi3: DiscreteFunction
) -> PipelineResult:
    """Formula solution of ``(x psi1 a) psi3 (x psi2 b) = c`` built only from the
    special operators, following the decomposition of ``psi3`` term by term."""
    for f in (psi1, psi2, psi3):
        if f.arity != 2:
            raise ValidationError("the two-branch pipeline needs binary functions")
    alpha = psi3.alpha
    if psi1.alpha != alpha or psi2.alpha != alpha:
        raise ValidationError("the three functions must share one alphabet")
    if alpha.size != 3:
        raise ValidationError("the symbolic pipeline is defined for three-symbol alphabets")

    d3 = trivial_decompose(psi3)
    if not d3.terms:
        # an all-zero psi3 still has to pass empty branch values through
        d3 = trivial_decompose(psi3, prune=False)
    first, second, lifted, valued = [], [], [], []
    for term in d3.terms:
        g1, g2 = term.locations[0], term.locations[1]
        s1 = tension_result(psi1, converse(g1))
        s2 = tension_result(psi2, converse(g2))
        # (x, a) gains a false third variable b; (x, b) gains a false middle variable a
        theta = superpose([add_false_variable(s1, 3), add_false_variable(s2, 2)])
        first.append(s1)
        second.append(s2)
        lifted.append(theta)
        valued.append(tension_result(theta, converse(term.value)))
    psi5 = superpose(valued)
    W = commute(psi5, SOLVE_PERMUTATION).with_name("W")
    dW = trivial_decompose(W)
    trace = PipelineTrace(d3, first, second, lifted, valued, psi5, W, dW)
    return PipelineResult(dW.render(), trace)


def two_branch_names(eq: Equation) -> tuple[str, str, str] | None:
    """``(psi1, psi2, psi3)`` binding names when ``eq`` has the two-branch shape
    with parameters ``(a, b, c)`` in that order, else ``None``."""
    lhs = eq.lhs
    if not (isinstance(lhs, Call) and len(lhs.args) == 2):
        return None
    left, right = lhs.args
    for br in (left, right):
        if not (isinstance(br, Call) and len(br.args) == 2):
            return None
        if not (isinstance(br.args[0], Unknown) and isinstance(br.args[1], Param)):
            return None
    names = (left.args[1].name, right.args[1].name, eq.rhs.name)
    if len(set(names)) != 3 or eq.params != names:
        return None
    if any(eq.bindings[n].arity != 2 for n in (left.name, right.name, lhs.name)):
        return None
    return left.name, right.name, lhs.name
