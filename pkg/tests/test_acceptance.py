"""
Acceptance gate: every quantitative target runs at its stated tolerance and
prints one PASS/FAIL line.  `covarloop verify` runs the same suite.

One criterion (entanglement-optimized) is known not to be attainable by this
model at its stated tolerance; it is asserted as stated and allowed to fail.
"""

import pytest

from covarloop.acceptance import CHECKS


@pytest.mark.parametrize("name,check", CHECKS, ids=[name for name, _ in CHECKS])
def test_acceptance(name, check, capsys):
    result = check()
    with capsys.disabled():
        print(f"\n{'PASS' if result.passed else 'FAIL'}  {result.name}: {result.detail}")
    assert result.passed, f"{result.name}: {result.detail}"
