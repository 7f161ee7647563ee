"""The twelve acceptance criteria at their stated tolerances.

Each criterion prints one PASS/FAIL line (visible with ``pytest -v``) and the
test fails when the criterion does.
"""
import pytest

from fibids.acceptance import CHECKS, run_check


@pytest.mark.parametrize("number", [c[0] for c in CHECKS],
                         ids=[f"criterion_{c[0]:02d}_{c[1].replace(' ', '_')}" for c in CHECKS])
def test_criterion(number, capsys):
    result = run_check(number)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
