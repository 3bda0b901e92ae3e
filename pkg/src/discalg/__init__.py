"""Multi-valued discrete functions over cyclic alphabets, their special operators,
trivial decomposition into superpositions of unary functions, and equation solving."""

from .alphabet import Alphabet, MultiValue, element_sum, mv_sum, mv_sum_all
from .decompose import (
    TrivialDecomposition,
    accessor_P,
    accessor_V,
    decompose,
    isolating_selectors,
    round_trips,
    trivial_decompose,
)
from .equation import Equation, parse_equation
from .errors import DiscalgError, ParseError, UsageError, ValidationError
from .formula import (
    Apply,
    Sum,
    Var,
    dump_formula,
    eval_formula,
    format_formula,
    formula_table,
    load_formula,
    parse_formula,
)
from .function import (
    DiscreteFunction,
    evaluate,
    evaluate_setwise,
    format_table,
    parse_table,
    random_function,
    show_table,
    unary,
)
from .laws import LawReport, run_laws
from .operator import (
    OperatorAlphabetBinding,
    interpret,
    lift,
    operator_alphabet,
    relabel,
    solve_operator_equation,
)
from .ops import (
    RolePermutation,
    add_false_variable,
    commute,
    compose_unary,
    converse,
    superpose,
    tension_arg,
    tension_result,
)
from .solver import check_solution, semantic_solve, two_branch_pipeline

__all__ = [name for name in dir() if not name.startswith("_")]
