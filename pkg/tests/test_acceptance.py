"""Acceptance criteria: one test per criterion, each printing a PASS/FAIL line."""
import pytest

from relqfi.verify import SUITES, run_check

CRITERIA = [
    ("inertial", "inertial limit, closed form and ODE route"),
    ("thermality", "detailed balance and Planck factor from the numeric oracle"),
    ("expansion", "fourth-order residual of the drift expansion"),
    ("routes", "closed form, Bloch and SLD routes agree"),
    ("figures", "figure properties: symmetry, monotonicity, plateau, shape"),
    ("ultrarel", "ultra-relativistic limit and suppression factor"),
    ("derivatives", "analytic temperature derivative vs finite differences"),
    ("determinism", "byte-identical figure tables"),
]


def test_every_suite_is_covered():
    assert [name for name, _ in CRITERIA] == list(SUITES)


@pytest.mark.parametrize("name,label", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(name, label, capsys):
    result = run_check(name)
    with capsys.disabled():
        print(f"\n{result.line()}  [{label}]")
    assert result.passed, result.detail
