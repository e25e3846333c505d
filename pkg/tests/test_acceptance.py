"""One test per acceptance criterion; each prints its PASS/FAIL line (visible with ``-s``)."""

import pytest

from phase_contract.acceptance import CHECKS, run_check


@pytest.mark.slow
@pytest.mark.parametrize("number", range(1, len(CHECKS) + 1), ids=[name for name, _ in CHECKS])
def test_criterion(number):
    result = run_check(number)
    print(result.line())
    assert result.passed, result.line()
