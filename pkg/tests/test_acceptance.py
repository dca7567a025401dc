"""Acceptance gate: every criterion suite must pass at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion, or ``ccdlab check all`` for the same suites from the CLI.
"""

import pytest

from ccdlab.suites import SUITE_BUDGETS, SUITES, run_suite

CRITERIA = list(SUITES)


@pytest.mark.parametrize("name", CRITERIA)
def test_acceptance_criterion(name):
    result = run_suite(name)
    verdict = "PASS" if result.passed else "FAIL"
    print(f"\n[acceptance] {verdict} {name} ({result.elapsed_s:.1f}s)")
    for line in result.lines:
        print(f"[acceptance]     {line}")
    budget = SUITE_BUDGETS[name]
    if budget is not None:
        assert result.elapsed_s < budget, f"{name} exceeded its {budget}s budget"
    assert result.passed, f"criterion suite {name} failed"
