"""Acceptance gate: every criterion must pass at its stated tolerance.

Run with -s to see one line per criterion; the same criteria back the
``acplus verify`` command.
"""
import pytest

from acplus.acceptance import REGISTRY


@pytest.mark.parametrize("name", list(REGISTRY))
def test_criterion(ws, name):
    result = REGISTRY[name](ws)
    print(result.line())
    assert result.passed, result.line()
