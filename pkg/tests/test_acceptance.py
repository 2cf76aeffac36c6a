"""Full-scale acceptance suites: case counts, tolerances and time limits as released.

Each test prints one PASS/FAIL line.  Run just these with

    pytest tests/test_acceptance.py -v -s
"""

import pytest

from logfield.checks import SUITES


@pytest.mark.parametrize(
    "fn, kwargs",
    [(fn, full) for fn, full, _ in SUITES],
    ids=[f"{i:02d}-{fn.__name__}" for i, (fn, _, _) in enumerate(SUITES, 1)],
)
def test_acceptance(fn, kwargs, capsys):
    res = fn(**kwargs)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.failures == 0, res.line()
    assert res.cases > 0
    assert res.elapsed <= res.limit, res.line()
