"""The acceptance battery: every criterion at its stated tolerance.

Runs the whole suite once (module scope) and asserts each criterion, with a
one-line pass/fail report per criterion and a wall-time budget check.
"""

import pytest

from ggconvex.acceptance import CRITERIA, run_all


@pytest.fixture(scope="module")
def report():
    return run_all()


@pytest.mark.parametrize("idx", range(len(CRITERIA)),
                         ids=[f"criterion_{i + 1}" for i in range(len(CRITERIA))])
def test_criterion(report, idx):
    res = report.results[idx]
    print(res.line())
    assert res.passed, res.details


def test_total_wall_time_budget(report):
    print(f"selftest wall time: {report.total_elapsed:.1f}s (budget 60s)")
    assert report.total_elapsed < 60.0
