"""Acceptance criteria, one test per criterion. Each prints its pass/fail
line and sub-checks even when output capture is on."""

import pytest

from nftkit import acceptance


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number, capsys):
    result = acceptance.CRITERIA[number]()
    with capsys.disabled():
        print()
        print(result.line())
        for check in result.checks:
            print(f"    {check}")
    assert result.passed, result.line()
