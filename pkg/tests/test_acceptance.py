"""Full acceptance suite: one test per criterion, printing its status line.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines.
"""

import pytest

from amtlab.verify import CRITERIA, run_criterion


@pytest.mark.slow
@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{c.number:02d}" for c in CRITERIA])
def test_criterion(crit):
    res = run_criterion(crit, quick=False)
    print(res.line())
    for c in res.checks:
        print(f"    {'ok ' if c.passed else 'BAD'} {c.label}: value={c.value!r} target={c.target!r} tol={c.tol!r}")
    assert res.passed, res.line()
