from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from discalg.alphabet import Alphabet
from discalg.function import DiscreteFunction, parse_table
from discalg.operator import operator_alphabet

DATA = Path(__file__).parent / "data"


def load(name: str, alpha: Alphabet | None = None) -> DiscreteFunction:
    return parse_table((DATA / f"{name}.tbl").read_text(), alpha)


def load_op(name: str) -> DiscreteFunction:
    return load(name, operator_alphabet())


@pytest.fixture
def A3() -> Alphabet:
    return Alphabet.standard(3)


@pytest.fixture
def omegas():
    return load("omega1"), load("omega2"), load("omega3")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# -- acceptance summary ---------------------------------------------------------

_CRITERIA: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    item_marks = getattr(report, "criterion", None)
    if item_marks is None:
        return
    _CRITERIA.setdefault(item_marks, []).append((report.nodeid.split("::")[-1], report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        rep.criterion = mark.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        parts = _CRITERIA[n]
        ok = all(outcome == "passed" for _, outcome in parts)
        detail = ", ".join(f"{name}={outcome}" for name, outcome in parts)
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
