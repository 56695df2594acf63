"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines, or use
``mnlck selftest`` for the JSON report.
"""

import json

import pytest

from mnlck.acceptance import CRITERIA, DEFAULT_SEED


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: c.__name__)
def test_criterion(criterion, capsys):
    result = criterion(DEFAULT_SEED)
    with capsys.disabled():
        print()
        print(result.line())
    assert result.passed, json.dumps(result.as_dict(), indent=2, default=str)
