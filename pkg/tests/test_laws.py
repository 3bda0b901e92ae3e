import json
import re

import numpy as np
import pytest

from discalg import laws
from discalg.laws import (
    COMMUTATION_TABLE,
    PERM_ORDER,
    TENSION_COMMUTATION_TABLE,
    check_commutation_group,
    check_distribution_laws,
    check_tension_commutation,
    check_tension_tension,
    commutation_group_failures,
    run_laws,
)

LINE = re.compile(r"^LAW \S+ \S+ (PASS|FAIL) n=\d+ seed=\d+$")


def test_table2_transcribed_entries():
    assert COMMUTATION_TABLE[("C(1,0,2)", "C(1,0,2)")] == "C(1,2,0)"
    assert COMMUTATION_TABLE[("C(0,2,1)", "C(2,1,0)")] == "C(2,0,1)"
    for x in PERM_ORDER:
        assert COMMUTATION_TABLE[("C(1,2,0)", x)] == x
    assert len(COMMUTATION_TABLE) == 36


def test_table3_transcribed_entries():
    assert TENSION_COMMUTATION_TABLE[(1, "C(1,0,2)")] == 1
    assert TENSION_COMMUTATION_TABLE[(1, "C(0,2,1)")] == 0
    assert len(TENSION_COMMUTATION_TABLE) == 18


def test_table2_is_s3():
    assert commutation_group_failures() == []


def test_group_check_catches_a_corrupted_table(monkeypatch):
    bad = dict(COMMUTATION_TABLE)
    bad[("C(1,0,2)", "C(1,0,2)")] = "C(0,1,2)"
    monkeypatch.setattr(laws, "COMMUTATION_TABLE", bad)
    assert commutation_group_failures()
    results = check_commutation_group(samples=20, seed=3)
    assert [r.entry for r in results if not r.passed] == ["C(1,0,2)|C(1,0,2)"]
    assert "psi" in next(r for r in results if not r.passed).counterexample


def test_table3_catches_a_wrong_slot(monkeypatch):
    bad = dict(TENSION_COMMUTATION_TABLE)
    bad[(1, "C(0,2,1)")] = 2
    monkeypatch.setattr(laws, "TENSION_COMMUTATION_TABLE", bad)
    failed = [r for r in check_tension_commutation(samples=10, seed=1) if not r.passed]
    assert [r.entry for r in failed] == ["T1|C(0,2,1)"]


def test_small_runs_pass():
    assert all(r.passed for r in check_commutation_group(50, 1))
    assert all(r.passed for r in check_tension_commutation(20, 1))
    assert all(r.passed for r in check_tension_tension(2, 1))
    assert all(r.passed for r in check_distribution_laws(60, 1))


def test_table4_identity_pair_is_trivial():
    psi = laws.sample_binaries(np.random.default_rng(0), 5)
    e = np.array([1 << 0, 1 << 1, 1 << 2])
    for slot in (0, 1, 2):
        assert np.array_equal(laws._tension(psi, slot, e), psi)


def test_distribution_law_entries():
    names = [r.law for r in check_distribution_laws(10, 0)]
    assert names == ["6.1", "6.2a", "6.2b", "6.3", "6.4a", "6.4b", "6.5", "6.6"]


def test_report_format_and_determinism():
    a = run_laws("table2", samples=30, seed=9)
    b = run_laws("table2", samples=30, seed=9)
    assert a.text() == b.text()
    assert all(LINE.match(ln) for ln in a.lines())
    assert len(a.lines()) == 37
    summary = a.summary()
    assert summary["seed"] == 9 and summary["failed"] == 0
    assert summary["out_of_scope"]
    json.dumps(summary)


def test_unknown_group():
    with pytest.raises(ValueError):
        run_laws("table9")
