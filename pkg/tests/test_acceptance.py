"""Acceptance gate: runs every check in the built-in verification suite
and prints one pass/fail line per check.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines as they
are produced, or rely on pytest's captured output on failure.
"""

import pytest

from bergerflow import acceptance


@pytest.fixture(scope="module")
def results():
    return acceptance.run_checks()


def test_suite_is_complete(results):
    expected = {name for names, _ in acceptance.ALL_CHECKS for name in names}
    assert {r.name for r in results} == expected


@pytest.mark.parametrize(
    "name",
    [name for names, _ in acceptance.ALL_CHECKS for name in names],
)
def test_criterion(results, name):
    result = next(r for r in results if r.name == name)
    verdict = "PASS" if result.passed else "FAIL"
    line = (
        f"{verdict} {result.name}: measured={result.measured:.3e} "
        f"threshold={result.threshold:.3e}"
    )
    if result.note:
        line += f" ({result.note})"
    print(line)
    assert result.passed, line
