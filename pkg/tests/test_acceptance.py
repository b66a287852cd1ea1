"""Acceptance gate: every top-level criterion at its stated tolerance.

Prints one PASS/FAIL line per criterion (run with -s to see them inline).
The battery itself lives in isoladder.report so the CLI `report` command and
this module exercise the same code.
"""

import pytest

from isoladder import report


@pytest.fixture(scope="module")
def context():
    return report._Context(lam=2.0, trunc=64)


@pytest.mark.parametrize("criterion", report.ALL_CRITERIA, ids=lambda fn: fn.__name__)
def test_criterion(criterion, context):
    result = criterion(context)
    status = "PASS" if result.passed else "FAIL"
    print(f"{status}  {result.name}  worst-ratio={result.measured:.3e}  ({result.seconds:.2f}s)")
    for label, value, tol, ok in result.parts:
        if not ok:
            print(f"      FAIL {label}: measured {value:.6e} vs tolerance {tol:.1e}")
    assert result.passed, f"{result.name}: worst normalized deviation {result.measured:.3e}"


def test_total_runtime_budget(context):
    import time

    start = time.perf_counter()
    results = [fn(context) for fn in report.ALL_CRITERIA]
    elapsed = time.perf_counter() - start
    print(f"full battery: {elapsed:.1f}s")
    assert all(r.passed for r in results)
    assert elapsed < 60.0
