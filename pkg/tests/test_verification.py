import json

import pytest

from subordination.verification import (
    SUITES,
    CheckResult,
    _check,
    default_problems,
    report_json,
    run_suite,
    standard_grids,
)


def test_check_result_line():
    r = CheckResult("kernels", "demo", True, 1e-9, 1e-6, "note", 0.1)
    assert r.line().startswith("PASS kernels/demo")
    assert CheckResult("k", "d", False, 1.0, 0.5, "", 0.0).line().startswith("FAIL")
    assert r.to_dict()["measured"] == 1e-9


def test_check_modes_and_errors():
    assert _check("s", "le", lambda: (0.5, ""), 1.0).passed
    assert not _check("s", "le", lambda: (2.0, ""), 1.0).passed
    assert _check("s", "gt", lambda: (2.0, ""), 1.0, "gt").passed

    def boom():
        raise ArithmeticError("nope")
    res = _check("s", "err", boom, 1.0)
    assert not res.passed and "nope" in res.detail


def test_default_problems_are_valid():
    probs = default_problems()
    assert {"wave", "telegraph", "a1.9_1.5", "a1.5_1"} <= set(probs)
    assert probs["wave"].is_wave and probs["telegraph"].is_telegraph
    assert len(standard_grids()["tau_over_t"]) == 6


@pytest.mark.parametrize("suite", ["problem", "bernstein", "quadrature", "wright"])
def test_fast_suites_pass(suite):
    seen = []
    rows = run_suite(suite, progress=seen.append)
    assert rows and all(r.passed for r in rows), [r.line() for r in rows if not r.passed]
    assert seen == rows


def test_report_json():
    rows = run_suite("problem")
    data = json.loads(report_json(rows))
    assert [d["name"] for d in data] == [r.name for r in rows]


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("everything")
    assert "kernels" in SUITES and "solver" in SUITES
