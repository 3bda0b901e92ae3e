import itertools

import numpy as np
import pytest

from conftest import DATA, load, load_op
from discalg.alphabet import Alphabet
from discalg.decompose import decompose, round_trips, trivial_decompose
from discalg.equation import parse_equation
from discalg.errors import UsageError
from discalg.formula import Var, format_formula, formula_table
from discalg.function import DiscreteFunction, format_unary, random_function, unary
from discalg.operator import (
    OperatorAlphabetBinding,
    interpret,
    lift,
    operator_alphabet,
    relabel,
    solve_operator_equation,
)
from discalg.ops import add_false_variable, commute, converse, superpose, tension_arg, tension_result
from discalg.solver import semantic_solve, two_branch_pipeline

A3 = Alphabet.standard(3)
L1 = operator_alphabet()
B = OperatorAlphabetBinding.standard()
SYMBOLS = ("-e", "o", "e")


def test_denotations():
    assert format_unary(B.denotation["-e"]) == "(1,0,-1)"
    assert format_unary(B.denotation["o"]) == "(0,0,0)"
    assert format_unary(B.denotation["e"]) == "(-1,0,1)"
    assert B.zero == "o"


def test_homomorphism_all_pairs():
    assert B.homomorphism_failures() == []


def test_plus_table_is_level_one_addition():
    plus = load_op("op_plus")
    for a, b in itertools.product(range(3), repeat=2):
        assert plus.cell((a, b)) == 1 << L1.add(a, b)


def test_high_decomposition_of_singular_operator():
    want = "(o,o,e)[(o,o,e)@1 + (-e,-e,o)@2]\n"
    assert format_formula(lift(decompose)(load_op("op_singular"))) == want


@pytest.mark.parametrize("arity", [2, 3])
def test_level_one_round_trips(arity, rng):
    for _ in range(50):
        f = relabel(random_function(A3, arity, rng), L1)
        assert round_trips(f)


def test_high_identity_commutation(rng):
    f = relabel(random_function(A3, 2, rng), L1)
    assert lift(commute)(f, (1, 2, 0)) == f


def test_structural_isomorphism_across_ops(rng):
    for _ in range(30):
        f, g = random_function(A3, 2, rng), random_function(A3, 2, rng)
        b = random_function(A3, 1, rng)
        hf, hg, hb = (relabel(x, L1) for x in (f, g, b))
        assert lift(commute)(hf, (0, 2, 1)) == relabel(commute(f, (0, 2, 1)), L1)
        assert lift(tension_arg)(hf, 1, hb) == relabel(tension_arg(f, 1, b), L1)
        assert lift(tension_result)(hf, hb) == relabel(tension_result(f, b), L1)
        assert lift(superpose)([hf, hg]) == relabel(superpose([f, g]), L1)
        assert lift(add_false_variable)(hf, 3) == relabel(add_false_variable(f, 3), L1)
        assert lift(converse)(hb) == relabel(converse(b), L1)
        assert lift(decompose)(hf) == relabel(decompose(f), L1)


def test_relabel_requires_same_residues():
    other = Alphabet(("p", "q", "r"), (0, 1, 2))
    with pytest.raises(UsageError):
        relabel(DiscreteFunction.zero(A3, 2), other)


def test_operator_solution_first_term():
    res = solve_operator_equation(load_op("theta_op1"), load_op("theta_op2"), load_op("theta_op3"))
    first = format_formula(res.formula).splitlines()[0]
    assert first == "(o,o,-e){(o,o,e)[(e,o,o)@1 + (o,-e,-e)@2] + (o,-e,-e)@3}"
    assert len(res.formula.parts) == 24


def test_operator_solution_is_relabelled_level_zero(omegas):
    thetas = [load_op(f"theta_op{i}") for i in (1, 2, 3)]
    assert [relabel(o, L1) for o in omegas] == thetas
    high = solve_operator_equation(*thetas)
    low = two_branch_pipeline(*omegas)
    assert high.formula == relabel(low.formula, L1)
    assert high.trace.W == relabel(low.trace.W, L1)


def test_constant_zero_theta3_gives_empty_or_full(omegas):
    t1, t2 = load_op("theta_op1"), load_op("theta_op2")
    t3 = DiscreteFunction.constant(L1, 2, 1 << L1.residue("o"))
    eq = parse_equation("solve y : (y phi1 f) phi3 (y phi2 g) = h", {"phi1": t1, "phi2": t2, "phi3": t3})
    W = semantic_solve(eq)
    assert set(np.unique(W.table)) <= {0, 7}
    assert solve_operator_equation(t1, t2, t3).trace.W == W


def test_interpret_variable():
    [fn] = interpret(Var(1), {1: "e"})
    assert format_unary(fn) == "(-1,0,1)"


def test_interpret_solution_at_all_minus_e():
    thetas = [load_op(f"theta_op{i}") for i in (1, 2, 3)]
    res = solve_operator_equation(*thetas)
    got = interpret(res.formula, {1: "-e", 2: "-e", 3: "-e"})
    t1, t2, t3 = thetas
    me = L1.residue("-e")
    want = []
    for y in L1.residues:
        u = t1.cell((y, me)).bit_length() - 1
        v = t2.cell((y, me)).bit_length() - 1
        if t3.cell((u, v)) >> me & 1:
            want.append(B.denote(y))
    assert got == want


def test_interpret_empty_cell():
    W = relabel(load("W"), L1)
    e = decompose(W)
    pts = [p for p in W.points() if W.cell(p) == 0]
    assert pts
    args = {k + 1: L1.label(v) for k, v in enumerate(pts[0])}
    assert interpret(e, args) == []


def test_interpret_unbound():
    with pytest.raises(UsageError):
        interpret(Var(2), {1: "e"})


def test_operator_equation_file():
    text = (DATA / "operator.eq").read_text()
    thetas = {f"phi{i}": load_op(f"theta_op{i}") for i in (1, 2, 3)}
    eq = parse_equation(text, thetas)
    assert eq.unknown == "y" and eq.params == ("f", "g", "h")
    assert semantic_solve(eq) == relabel(load("W"), L1)


def test_depth_two_tower():
    # operators over operators: a second relabelling of the same residues
    L2 = L1.relabeled(["-E", "O", "E"])
    f = relabel(load_op("op_singular"), L2)
    assert format_formula(decompose(f)) == "(O,O,E)[(O,O,E)@1 + (-E,-E,O)@2]\n"
