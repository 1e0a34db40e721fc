"""Acceptance gate: the nine criteria, each at its stated tolerance.

Every criterion prints one PASS/FAIL line; the lines are repeated in the
terminal summary so they show up without ``-s``.
"""

import pytest

from heisgeo import verify

CRITERIA = list(enumerate(verify.CHECKS, start=1))
SUMMARY = []


@pytest.mark.parametrize("number,check", CRITERIA, ids=[name for _, (name, _) in CRITERIA])
def test_criterion(number, check):
    name, func = check
    rows = func()
    passed = all(r.passed for r in rows)
    detail = "; ".join(f"{r.name}: {r.got}" for r in rows)
    line = f"criterion {number} [{name}] {'PASS' if passed else 'FAIL'}  ({detail})"
    SUMMARY.append(line)
    print(line)
    for r in rows:
        print("    " + r.row())
    assert passed, "\n".join(r.row() for r in rows if not r.passed)
