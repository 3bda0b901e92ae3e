"""Executable composition laws for the special operators on binary functions.

Each check compares two constructions by table equality over a seeded sample
(or an exhaustive domain) and reports one :class:`LawResult` per law entry.
The heavy sweeps run on the batched kernels from :mod:`discalg.ops`.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .alphabet import Alphabet
from .decompose import (
    accessor_P,
    accessor_V,
    trivial_decompose,
)
from .formula import Apply, Sum, Var, formula_table
from .function import MASK_DTYPE, DiscreteFunction, format_table
from .ops import (
    RolePermutation,
    commute_tables,
    compose_unary,
    superpose_tables,
    tension_arg,
    tension_arg_tables,
    tension_result,
    tension_result_tables,
)

N = 3
ARITY = 2
DEFAULT_SAMPLES = 500
DEFAULT_TABLE4_BINARIES = 20

# Header order of the commutation tables.
PERM_ORDER = ("C(1,2,0)", "C(1,0,2)", "C(0,2,1)", "C(2,1,0)", "C(2,0,1)", "C(0,1,2)")

# (row, column) -> single commutation equal to applying row first, then column.
COMMUTATION_TABLE: dict[tuple[str, str], str] = {}
_T2_ROWS = {
    "C(1,2,0)": ("C(1,2,0)", "C(1,0,2)", "C(0,2,1)", "C(2,1,0)", "C(2,0,1)", "C(0,1,2)"),
    "C(1,0,2)": ("C(1,0,2)", "C(1,2,0)", "C(2,0,1)", "C(0,1,2)", "C(0,2,1)", "C(2,1,0)"),
    "C(0,2,1)": ("C(0,2,1)", "C(0,1,2)", "C(1,2,0)", "C(2,0,1)", "C(2,1,0)", "C(1,0,2)"),
    "C(2,1,0)": ("C(2,1,0)", "C(2,0,1)", "C(0,1,2)", "C(1,2,0)", "C(1,0,2)", "C(0,2,1)"),
    "C(2,0,1)": ("C(2,0,1)", "C(2,1,0)", "C(1,0,2)", "C(0,2,1)", "C(0,1,2)", "C(1,2,0)"),
    "C(0,1,2)": ("C(0,1,2)", "C(0,2,1)", "C(2,1,0)", "C(1,0,2)", "C(1,2,0)", "C(2,0,1)"),
}
for _row, _entries in _T2_ROWS.items():
    for _col, _e in zip(PERM_ORDER, _entries):
        COMMUTATION_TABLE[(_row, _col)] = _e

# (tension slot k, commutation) -> slot m with commute(f T_k b, C) = commute(f, C) T_m b.
# Slot 0 is the result slot.
TENSION_COMMUTATION_TABLE: dict[tuple[int, str], int] = {}
_T3_ROWS = {1: (1, 1, 0, 2, 0, 2), 2: (2, 0, 2, 1, 1, 0), 0: (0, 2, 1, 0, 2, 1)}
for _k, _slots in _T3_ROWS.items():
    for _col, _m in zip(PERM_ORDER, _slots):
        TENSION_COMMUTATION_TABLE[(_k, _col)] = _m

# (row slot i, column slot j) -> "merge" when (f T_i b1) T_j b2 = f T_i (b1 b2),
# otherwise "swap" when it equals (f T_j b2) T_i b1.
TENSION_TENSION_TABLE: dict[tuple[int, int], str] = {
    (i, j): "merge" if i == j else "swap" for i in (1, 2, 0) for j in (1, 2, 0)
}

OUT_OF_SCOPE = (
    "superposition then C(0,2,1) or C(1,0,2): no simple form",
    "superposition then T0: no simple form",
    "decomposition of C(0,2,1)(f) or C(1,0,2)(f): no simple form",
    "decomposition of f T1/T2 for set-valued b: terms lose correlation",
    "decomposition and decomposition: none",
)


@dataclass
class LawResult:
    law: str
    entry: str
    cases: int
    failures: int
    seed: int
    counterexample: dict[str, str] | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"LAW {self.law} {self.entry} {verdict} n={self.cases} seed={self.seed}"


@dataclass
class LawReport:
    seed: int
    samples: int
    results: list[LawResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> list[str]:
        return [r.line() for r in self.results]

    def text(self) -> str:
        return "".join(ln + "\n" for ln in self.lines())

    def summary(self) -> dict:
        return {
            "seed": self.seed,
            "samples": self.samples,
            "passed": sum(r.passed for r in self.results),
            "failed": sum(not r.passed for r in self.results),
            "entries": [
                {
                    "law": r.law,
                    "entry": r.entry,
                    "status": "PASS" if r.passed else "FAIL",
                    "cases": r.cases,
                    "failures": r.failures,
                    **({"counterexample": r.counterexample} if r.counterexample else {}),
                }
                for r in self.results
            ],
            "out_of_scope": list(OUT_OF_SCOPE),
        }


# -- sampling ---------------------------------------------------------------------

def _alpha() -> Alphabet:
    return Alphabet.standard(N)


def _rng(seed: int, stream: str) -> np.random.Generator:
    return np.random.default_rng([seed, *stream.encode()])


def sample_binaries(rng: np.random.Generator, count: int) -> np.ndarray:
    """Half single-valued, half arbitrary subsets (empty and full cells included)."""
    single = np.left_shift(1, rng.integers(0, N, size=(count, N, N))).astype(MASK_DTYPE)
    multi = rng.integers(0, 1 << N, size=(count, N, N), dtype=MASK_DTYPE)
    pick = (np.arange(count) % 2 == 1)[:, None, None]
    return np.where(pick, multi, single)


def all_unary_tables(kind: str = "multi") -> np.ndarray:
    """Every unary table: ``multi`` gives all 512, ``partial`` the 64 with at most one value."""
    cells = range(1 << N) if kind == "multi" else (0, 1, 2, 4)
    return np.array(list(itertools.product(cells, repeat=N)), dtype=MASK_DTYPE)


def _fn(table: np.ndarray, arity: int = ARITY) -> DiscreteFunction:
    return DiscreteFunction(_alpha(), arity, table)


def _witness(**tables: np.ndarray) -> dict[str, str]:
    return {k: format_table(_fn(v, v.ndim)) for k, v in tables.items()}


def _first_bad(bad: np.ndarray) -> tuple[int, ...] | None:
    idx = np.argwhere(bad)
    return tuple(int(i) for i in idx[0]) if len(idx) else None


# -- table 2 ----------------------------------------------------------------------

def check_commutation_group(samples: int = DEFAULT_SAMPLES, seed: int = 0) -> list[LawResult]:
    psi = sample_binaries(_rng(seed, "table2"), samples)
    out = []
    for row, col in itertools.product(PERM_ORDER, PERM_ORDER):
        p, q = RolePermutation.parse(row), RolePermutation.parse(col)
        e = RolePermutation.parse(COMMUTATION_TABLE[(row, col)])
        lhs = commute_tables(commute_tables(psi, ARITY, p, N), ARITY, q, N)
        rhs = commute_tables(psi, ARITY, e, N)
        bad = (lhs != rhs).reshape(samples, -1).any(axis=1)
        i = _first_bad(bad)
        out.append(
            LawResult("table2", f"{row}|{col}", samples, int(bad.sum()), seed,
                      None if i is None else _witness(psi=psi[i[0]]))
        )
    return out


def commutation_group_failures() -> list[str]:
    """Group axioms read off the transcribed table itself (closure, identity, inverses,
    associativity), plus agreement with permutation composition."""
    problems = []
    elems = PERM_ORDER
    table = COMMUTATION_TABLE
    if any(v not in elems for v in table.values()):
        problems.append("closure")
    ident = [e for e in elems if all(table[(e, x)] == x and table[(x, e)] == x for x in elems)]
    if len(ident) != 1:
        problems.append("identity")
    else:
        for x in elems:
            if not any(table[(x, y)] == ident[0] and table[(y, x)] == ident[0] for y in elems):
                problems.append(f"inverse of {x}")
    for a, b, c in itertools.product(elems, repeat=3):
        if table[(table[(a, b)], c)] != table[(a, table[(b, c)])]:
            problems.append(f"associativity at {a},{b},{c}")
            break
    for a, b in itertools.product(elems, repeat=2):
        if str(RolePermutation.parse(a).then(RolePermutation.parse(b))) != table[(a, b)]:
            problems.append(f"composition at {a},{b}")
            break
    rows = {tuple(table[(a, b)] for b in elems) for a in elems}
    if len(rows) != len(elems):
        problems.append("latin square")
    return problems


def check_s3_group(seed: int = 0) -> list[LawResult]:
    problems = commutation_group_failures()
    cases = len(PERM_ORDER) ** 3
    return [LawResult("table2", "group-S3", cases, len(problems), seed,
                      {"problems": "; ".join(problems)} if problems else None)]


# -- table 3 ----------------------------------------------------------------------

def _tension(tables: np.ndarray, slot: int, beta: np.ndarray) -> np.ndarray:
    if slot == 0:
        return tension_result_tables(tables, ARITY, beta, N)
    return tension_arg_tables(tables, ARITY, slot, beta, N)


def check_tension_commutation(samples: int = DEFAULT_SAMPLES, seed: int = 0) -> list[LawResult]:
    psi = sample_binaries(_rng(seed, "table3"), samples)[None]  # (1, S, 3, 3)
    betas = all_unary_tables()[:, None]  # (512, 1, 3)
    cases = samples * len(betas)
    out = []
    for k in (1, 2, 0):
        for col in PERM_ORDER:
            c = RolePermutation.parse(col)
            m = TENSION_COMMUTATION_TABLE[(k, col)]
            lhs = commute_tables(_tension(psi, k, betas), ARITY, c, N)
            rhs = _tension(commute_tables(psi, ARITY, c, N), m, betas)
            lhs, rhs = np.broadcast_arrays(lhs, rhs)
            bad = (lhs != rhs).any(axis=(-1, -2))
            i = _first_bad(bad)
            entry = f"T{k}|{col}"
            out.append(LawResult("table3", entry, cases, int(bad.sum()), seed,
                                 None if i is None else _witness(psi=psi[0, i[1]], beta=betas[i[0], 0])))
    return out


# -- table 4 ----------------------------------------------------------------------

def _compose_all(b1: np.ndarray, b2: np.ndarray) -> np.ndarray:
    """``b1 b2`` (``b2`` applied first) for every broadcast pair."""
    return tension_arg_tables(b1, 1, 1, b2, N)


def check_tension_tension(binaries: int = DEFAULT_TABLE4_BINARIES, seed: int = 0) -> list[LawResult]:
    psis = sample_binaries(_rng(seed, "table4"), binaries)
    u = all_unary_tables()
    b1 = u[:, None, :]  # (512, 1, 3)
    b2 = u[None, :, :]  # (1, 512, 3)
    both = _compose_all(b1, b2)  # (512, 512, 3)
    pairs = len(u) ** 2
    fails = {key: 0 for key in TENSION_TENSION_TABLE}
    witness: dict[tuple[int, int], dict] = {}
    for s, psi in enumerate(psis):
        for (i, j), kind in TENSION_TENSION_TABLE.items():
            lhs = _tension(_tension(psi, i, b1), j, b2)
            if kind == "merge":
                # on the result slot b1 b2 acts through converses: conv(b1 b2) = conv(b2) after conv(b1)
                rhs = _tension(psi, i, both)
            else:
                rhs = _tension(_tension(psi, j, b2), i, b1)
            lhs, rhs = np.broadcast_arrays(lhs, rhs)
            bad = (lhs != rhs).any(axis=(-1, -2))
            fails[(i, j)] += int(bad.sum())
            w = _first_bad(bad)
            if w is not None and (i, j) not in witness:
                witness[(i, j)] = _witness(psi=psi, beta1=u[w[0]], beta2=u[w[1]])
    out = []
    for (i, j) in TENSION_TENSION_TABLE:
        out.append(LawResult("table4", f"T{i}|T{j}", pairs * len(psis), fails[(i, j)], seed,
                             witness.get((i, j))))
    return out


# -- distribution laws ------------------------------------------------------------

TRANSPOSE = RolePermutation.parse("C(2,1,0)")


def _result(law: str, entry: str, cases: int, bad: list, seed: int) -> LawResult:
    return LawResult(law, entry, cases, len(bad), seed, bad[0] if bad else None)


def _selector_target(sel: DiscreteFunction, value: int) -> int:
    hits = [r for r in range(N) if int(sel.table[r]) == 1 << value]
    return hits[0] if len(hits) == 1 else -1


def check_distribution_laws(samples: int = DEFAULT_SAMPLES, seed: int = 0) -> list[LawResult]:
    rng = _rng(seed, "distribution")
    alpha = _alpha()
    first = sample_binaries(rng, samples)
    second = sample_binaries(rng, samples)
    third = sample_binaries(rng, samples)
    stacked = np.stack([first, second, third])  # (3, S, 3, 3)
    out: list[LawResult] = []

    # (6.1) the argument swap distributes over superposition
    lhs = commute_tables(superpose_tables(list(stacked), N), ARITY, TRANSPOSE, N)
    rhs = superpose_tables([commute_tables(t, ARITY, TRANSPOSE, N) for t in stacked], N)
    bad = (lhs != rhs).any(axis=(-1, -2))
    i = _first_bad(bad)
    out.append(LawResult("6.1", "C(2,1,0)|SUM", samples, int(bad.sum()), seed,
                         None if i is None else _witness(psi1=first[i[0]], psi2=second[i[0]], psi3=third[i[0]])))

    # (6.2) argument tension distributes over superposition for at-most-single-valued b
    betas = all_unary_tables("partial")
    idx = rng.integers(0, len(betas), size=samples)
    beta = betas[idx]
    for k, name in ((1, "6.2a"), (2, "6.2b")):
        lhs = tension_arg_tables(superpose_tables(list(stacked), N), ARITY, k, beta, N)
        rhs = superpose_tables([tension_arg_tables(t, ARITY, k, beta, N) for t in stacked], N)
        bad = (lhs != rhs).any(axis=(-1, -2))
        i = _first_bad(bad)
        out.append(LawResult(name, f"T{k}|SUM", samples, int(bad.sum()), seed,
                             None if i is None else _witness(psi1=first[i[0]], psi2=second[i[0]],
                                                             psi3=third[i[0]], beta=beta[i[0]])))

    fns = [_fn(t) for t in first]
    betas_fn = [_fn(b, 1) for b in beta]

    # (6.3) value functions follow the transposed point; selector targets swap
    bad = []
    for f in fns:
        d = trivial_decompose(f, prune=False)
        dt = trivial_decompose(_fn(commute_tables(f.table, ARITY, TRANSPOSE, N)), prune=False)
        for r, c in itertools.product(range(N), repeat=2):
            ok = accessor_V(dt, (r, c)) == accessor_V(d, (c, r))
            ok = ok and _selector_target(accessor_P(dt, (r, c), 1), 1) == _selector_target(accessor_P(d, (c, r), 2), 0)
            ok = ok and _selector_target(accessor_P(dt, (r, c), 2), 0) == _selector_target(accessor_P(d, (c, r), 1), 1)
            if not ok:
                bad.append(_witness(psi=f.table))
                break
    out.append(_result("6.3", "V,P|C(2,1,0)", samples, bad, seed))

    # (6.4) selectors of slot k composed with b decompose f T_k b
    for k, name in ((1, "6.4a"), (2, "6.4b")):
        bad = []
        for f, b in zip(fns, betas_fn):
            d = trivial_decompose(f, prune=False)
            parts = []
            for term in d.terms:
                locs = list(term.locations)
                locs[k - 1] = compose_unary(locs[k - 1], b)
                inner = Sum(tuple(Apply(g, Var(j)) for j, g in enumerate(locs, start=1)))
                parts.append(Apply(term.value, inner))
            if formula_table(Sum(tuple(parts)), alpha, ARITY) != tension_arg(f, k, b):
                bad.append(_witness(psi=f.table, beta=b.table))
        out.append(_result(name, f"P{k}|T{k}", samples, bad, seed))

    # (6.5) value functions of f T0 b carry the converse image of each cell
    bad = []
    for f, b in zip(fns, betas_fn):
        image = tension_result(f, b)
        d = trivial_decompose(image, prune=False)
        for p in f.points():
            v = accessor_V(d, p)
            want = tension_result(_fn(np.array([1, f.cell(p), 1]), 1), b).cell((1,))
            if v.cell((1,)) != want or v.cell((0,)) != 1 or v.cell((2,)) != 1:
                bad.append(_witness(psi=f.table, beta=b.table))
                break
    out.append(_result("6.5", "V|T0", samples, bad, seed))

    # (6.6) value slots add under superposition; locations are unchanged
    bad = []
    for t1, t2 in zip(first, second):
        f1, f2 = _fn(t1), _fn(t2)
        total = _fn(superpose_tables([t1, t2], N))
        d1, d2, ds = (trivial_decompose(g, prune=False) for g in (f1, f2, total))
        for p in total.points():
            v = accessor_V(ds, p)
            want = int(superpose_tables([np.array(accessor_V(d1, p).table), np.array(accessor_V(d2, p).table)], N)[1])
            same_locs = ds.term_at(p).locations == d1.term_at(p).locations == d2.term_at(p).locations
            if v.cell((1,)) != want or not same_locs:
                bad.append(_witness(psi1=t1, psi2=t2))
                break
    out.append(_result("6.6", "V,P|SUM", samples, bad, seed))
    return out


# -- orchestration ----------------------------------------------------------------

LAW_GROUPS: dict[str, Callable[[int, int], list[LawResult]]] = {
    "table2": lambda samples, seed: check_commutation_group(samples, seed) + check_s3_group(seed),
    "table3": lambda samples, seed: check_tension_commutation(samples, seed),
    "table4": lambda samples, seed: check_tension_tension(DEFAULT_TABLE4_BINARIES, seed),
    "distribution": lambda samples, seed: check_distribution_laws(samples, seed),
}


def run_laws(which: str = "all", samples: int = DEFAULT_SAMPLES, seed: int = 0) -> LawReport:
    """Run one group (``table2``, ``table3``, ``table4``, ``distribution``) or ``all``.

    Groups draw from independent seeded streams and run concurrently; the report
    lists them in the fixed group order regardless of completion order.
    """
    names = list(LAW_GROUPS) if which == "all" else [which]
    unknown = [n for n in names if n not in LAW_GROUPS]
    if unknown:
        from .errors import UsageError

        raise UsageError(f"unknown law group {unknown[0]!r}; choose from all, {', '.join(LAW_GROUPS)}")
    with ThreadPoolExecutor(max_workers=len(names)) as pool:
        futures = [pool.submit(LAW_GROUPS[n], samples, seed) for n in names]
        results = [r for fut in futures for r in fut.result()]
    return LawReport(seed, samples, results)
