"""Acceptance gate: every criterion runs at its stated tolerance.

One test per criterion; each prints its own pass/fail line so a plain
``pytest tests/test_acceptance.py -s`` doubles as the acceptance report.
The same checks back the ``nclp selftest`` command.
"""

import pytest

from nclp.selfcheck import CRITERIA, run_checks

NAMES = [name for name, _ in CRITERIA]

RUNTIME_BUDGETS = {
    "schatten-exactness": 5.0,
    "diagonal-closed-form": 60.0,
    "witness-norm": 10.0,
    "threshold": 1.0,
    "brute-force-oracle": 120.0,
}


@pytest.mark.parametrize("name", NAMES)
def test_criterion(name):
    result = run_checks(names=[name], printer=None)[0]
    status = "PASS" if result.passed else "FAIL"
    print(f"[{status}] {result.name} ({result.seconds:.1f}s): {result.detail}")
    assert result.passed, f"{result.name}: {result.detail}"
    budget = RUNTIME_BUDGETS.get(name)
    if budget is not None:
        assert result.seconds < budget, \
            f"{result.name} took {result.seconds:.1f}s (budget {budget:.0f}s)"
