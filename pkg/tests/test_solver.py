import itertools

import numpy as np
import pytest

from conftest import DATA, load
from discalg.alphabet import Alphabet
from discalg.equation import Call, Param, Unknown, parse_equation
from discalg.errors import ParseError, ValidationError
from discalg.formula import count_terms, format_formula, formula_table, unaries
from discalg.function import DiscreteFunction, random_function
from discalg.solver import (
    check_solution,
    semantic_solve,
    two_branch_names,
    two_branch_pipeline,
)

A3 = Alphabet.standard(3)
TWO_BRANCH = "(x psi1 a) psi3 (x psi2 b) = c"


def r(label):
    return A3.residue(label)


@pytest.fixture
def eq(omegas):
    return parse_equation(TWO_BRANCH, dict(zip(("psi1", "psi2", "psi3"), omegas)))


def test_parse_two_branch(eq):
    assert eq.unknown == "x" and eq.params == ("a", "b", "c")
    assert eq.lhs == Call("psi3", (Call("psi1", (Unknown("x"), Param("a"))), Call("psi2", (Unknown("x"), Param("b")))))
    assert two_branch_names(eq) == ("psi1", "psi2", "psi3")


def test_parse_one_branch():
    e = parse_equation("x f a = c", {"f": load("linear")})
    assert e.lhs == Call("f", (Unknown("x"), Param("a")))
    assert two_branch_names(e) is None


def test_repeated_subtree_is_legal():
    e = parse_equation("(y q a) q (y q a) = c", {"q": load("omega1")})
    assert e.unknown == "y" and e.params == ("a", "c")


def test_declared_unknown_and_prefix_calls():
    e = parse_equation("solve t : f(t, f(a, t)) = c  # comment", {"f": load("omega1")})
    assert e.unknown == "t"
    assert str(e) == "solve t : t f (a f t) = c"


def test_equation_file_parses(omegas):
    text = (DATA / "twobranch.eq").read_text()
    e = parse_equation(text, dict(zip(("psi1", "psi2", "psi3"), omegas)))
    assert e.params == ("a", "b", "c")


@pytest.mark.parametrize(
    "text, error",
    [
        ("(x g a) f (x f b) = c", ParseError),
        ("a f b = c", ValidationError),
        ("(x f a) f (y f b) = c", ValidationError),
        ("x f a = x", ValidationError),
        ("f(x) = c", ValidationError),
        ("x f a = c extra", ParseError),
        ("x f = c", ParseError),
        ("solve z : x f a = c", ValidationError),
    ],
)
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse_equation(text, {"f": load("omega1")})


def test_parse_error_column():
    with pytest.raises(ParseError) as exc:
        parse_equation("x f a = c $", {"f": load("omega1")})
    assert exc.value.column == 11


def test_semantic_solution_cells(eq):
    W = semantic_solve(eq)
    assert W == load("W")
    assert W.cell((r(-1), r(-1), r(-1))) == 1 << r(-1)
    assert W.cell((0, r(-1), r(-1))) == 1 << r(1)
    assert W.cell((r(-1), 0, r(-1))) == 0
    assert W.cell((0, 0, r(-1))) == 0b111


def test_linear_one_branch_solution():
    lin = load("linear")
    W = semantic_solve(parse_equation("x e a = c", {"e": lin}))
    for a, c in itertools.product(range(3), repeat=2):
        assert W.cell((a, c)) == 1 << ((c - a) % 3)


def test_all_empty_psi3_gives_empty(omegas):
    none = load("nowhere")
    e = parse_equation(TWO_BRANCH, {"psi1": omegas[0], "psi2": omegas[1], "psi3": none})
    W = semantic_solve(e)
    assert not W.table.any()
    assert formula_table(two_branch_pipeline(omegas[0], omegas[1], none).formula, A3, 3) == W


def test_check_solution_accepts_and_flags(eq):
    W = semantic_solve(eq)
    assert check_solution(eq, W).ok
    table = np.array(W.table)
    p = (r(-1), 0, r(-1))
    table[p] |= 1
    report = check_solution(eq, DiscreteFunction(A3, 3, table))
    assert len(report.violations) == 1
    assert report.violations[0].kind == "unsound" and report.violations[0].params == p
    table[p] = 0
    table[(0, 0, r(-1))] = 1
    assert {v.kind for v in check_solution(eq, DiscreteFunction(A3, 3, table)).violations} == {"incomplete"}


def test_pipeline_trace_matches_tables(omegas):
    res = two_branch_pipeline(*omegas)
    t = res.trace
    for i in range(6):
        assert t.lifted[i] == load(f"theta{i + 1}")
        assert t.valued[i] == load(f"step4_{i + 1}")
    assert t.psi5 == load("theta7")
    assert t.W == load("step6")
    assert set(t.named()) >= {"theta1", "theta6", "theta7", "step4_1", "step2_1_first", "W"}


def test_step2_identity(omegas):
    # first-branch tables are the g-image of psi1, checked against a direct map
    res = two_branch_pipeline(*omegas)
    for term, s1 in zip(res.trace.decomposition.terms, res.trace.first_branch):
        g = term.locations[0]
        for p in omegas[0].points():
            v = omegas[0].cell(p).bit_length() - 1
            assert s1.cell(p) == g.cell((v,))


def test_pipeline_formula(omegas, eq):
    res = two_branch_pipeline(*omegas)
    assert count_terms(res.formula) == 24
    assert formula_table(res.formula, A3, 3) == semantic_solve(eq)
    assert all(u.arity == 1 for u in unaries(res.formula))
    first = format_formula(res.formula).splitlines()[0]
    assert first == "(0,0,-1){(0,0,1)[(1,0,0)@1 + (0,-1,-1)@2] + (0,-1,-1)@3}"


def test_pipeline_rejects_bad_shapes(omegas):
    with pytest.raises(ValidationError):
        two_branch_pipeline(omegas[0], omegas[1], load("W"))
    a4 = Alphabet.standard(4)
    f4 = random_function(a4, 2, np.random.default_rng(0), "single")
    with pytest.raises(ValidationError):
        two_branch_pipeline(f4, f4, f4)


def test_pipeline_agrees_for_single_valued_branches(rng):
    # the pipeline matches the oracle whenever psi1 and psi2 have at most one value per cell
    for kind1, kind3 in [("single", "multi"), ("partial", "multi"), ("single", "partial")]:
        for _ in range(40):
            p1 = random_function(A3, 2, rng, kind1)
            p2 = random_function(A3, 2, rng, kind1)
            p3 = random_function(A3, 2, rng, kind3)
            e = parse_equation(TWO_BRANCH, {"psi1": p1, "psi2": p2, "psi3": p3})
            assert two_branch_pipeline(p1, p2, p3).trace.W == semantic_solve(e)


def test_pipeline_over_approximates_for_set_valued_branches(rng):
    # with set-valued branches every term picks its branch values on its own,
    # so the pipeline answer always contains the exact one
    for _ in range(50):
        p1, p2, p3 = (random_function(A3, 2, rng, "multi") for _ in range(3))
        e = parse_equation(TWO_BRANCH, {"psi1": p1, "psi2": p2, "psi3": p3})
        exact = semantic_solve(e).table
        assert not (exact & ~two_branch_pipeline(p1, p2, p3).trace.W.table).any()


def test_set_valued_branch_counterexample():
    # psi1(0, 1) = {-1,0,1}, psi2 = 0, psi3(-1, 0) = psi3(0, 0) = 1, zero elsewhere.
    # At x=0, a=1, b=0 the left side is psi3({-1,0,1}, 0) = {0,1}, so c=-1 has no solution.
    # The pipeline sums one term per nonzero psi3 point; each term reads psi1 on its own,
    # giving {0,1} + {0,1} = {-1,0,1} and a spurious x=0.
    p1 = DiscreteFunction.from_callable(A3, 2, lambda p: 0b111 if p == (0, 1) else 1)
    p2 = DiscreteFunction.zero(A3, 2)
    p3 = DiscreteFunction.from_callable(A3, 2, lambda p: 0b010 if p in {(r(-1), 0), (0, 0)} else 1)
    e = parse_equation(TWO_BRANCH, {"psi1": p1, "psi2": p2, "psi3": p3})
    point = (r(1), 0, r(-1))
    assert semantic_solve(e).cell(point) == 0
    assert two_branch_pipeline(p1, p2, p3).trace.W.cell(point) == 0b001


def test_all_zero_psi3_keeps_empty_branches():
    p1 = DiscreteFunction.from_callable(A3, 2, lambda p: 0 if p == (1, 0) else 1)
    zero = DiscreteFunction.zero(A3, 2)
    e = parse_equation(TWO_BRANCH, {"psi1": p1, "psi2": zero, "psi3": zero})
    assert two_branch_pipeline(p1, zero, zero).trace.W == semantic_solve(e)


def test_strict_semantics_option(eq):
    assert semantic_solve(eq, strict=True) == semantic_solve(eq)
