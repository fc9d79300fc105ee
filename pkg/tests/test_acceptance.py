"""All eleven acceptance criteria at their stated tolerances and time limits.

Each criterion prints one PASS/FAIL line straight to the terminal, so the
lines show up in a plain ``pytest -v`` log too."""

import pytest

from gammastat.acceptance import CRITERIA, run_criterion

RESULTS = {}


@pytest.mark.slow
@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    r = run_criterion(k)
    RESULTS[k] = r
    with capsys.disabled():
        print("\n" + r.line())
    assert r.passed, r.detail
    assert r.in_time, f"{r.seconds:.1f}s over the {r.limit:.0f}s limit"
