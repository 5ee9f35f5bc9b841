"""Acceptance criteria, one test each.

Every criterion prints a single pass/fail line. The lines are also collected
and repeated in the terminal summary (see conftest.py), so they show up in a
plain ``pytest`` run. Tolerances and runtime budgets are enforced inside
``robustorbits.acceptance``.
"""
import pytest

from robustorbits.acceptance import CRITERIA

LINES: list[str] = []


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1))
def test_criterion(number):
    result = CRITERIA[number - 1]()
    line = result.line()
    print(line)
    LINES.append(line)
    assert result.passed, line
