"""Acceptance gate: every shipped guarantee, one test per criterion.

Each test prints a single PASS/FAIL line with the measured numbers, so
``pytest -v -s tests/test_acceptance.py`` doubles as the release report.
The same criteria back the ``levdens verify`` command.
"""

import pytest

from levdens.acceptance import CRITERIA, _Context, run_criterion

NAMES = [name for name, _, _ in CRITERIA]


@pytest.fixture(scope="module")
def ctx():
    # shared cache: expensive phase curves are built once across criteria
    return _Context()


@pytest.mark.parametrize("name", NAMES)
def test_criterion(name, ctx):
    r = run_criterion(name, ctx)
    status = "PASS" if r.passed else "FAIL"
    print(f"[{status}] {r.name}: {r.detail} ({r.elapsed:.1f}s)")
    assert r.passed, f"{r.name}: {r.detail}"
