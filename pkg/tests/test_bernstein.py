import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given

from subordination import check_bernstein_sqrt_g, check_cmf, check_concavity_scan, validate
from subordination.bernstein import MAX_ORDER, log_grid

from strategies import problems


class TestBernsteinSqrtG:
    def test_valid_two_term_passes(self, p19):
        rep = check_bernstein_sqrt_g(p19, order=6)
        assert rep.passed and rep.max_violation <= 1e-8
        assert rep.statement.startswith("sampled derivatives are consistent with")

    def test_wave_boundary_case(self, wave):
        assert check_bernstein_sqrt_g(wave, order=4).passed

    def test_bypassed_spread_fails(self):
        p = validate(1.9, 1.0, [(0.3, 1.0)], allow_spread=True)
        rep = check_bernstein_sqrt_g(p, order=2)
        assert rep.verdict == "fail"
        assert rep.worst_order == 2 and rep.worst_location > 0
        assert "violated" in rep.statement

    def test_verdict_iff_threshold(self):
        p = validate(1.9, 1.0, [(0.3, 1.0)], allow_spread=True)
        rep = check_bernstein_sqrt_g(p, order=2)
        loose = check_bernstein_sqrt_g(p, order=2, tol=rep.max_violation * 2)
        assert loose.passed and loose.max_violation == pytest.approx(rep.max_violation)

    def test_order_bounds(self, p19):
        with pytest.raises(ValueError):
            check_bernstein_sqrt_g(p19, order=1)
        with pytest.raises(ValueError):
            check_bernstein_sqrt_g(p19, order=MAX_ORDER + 1)

    def test_report_serialises(self, p19):
        rep = check_bernstein_sqrt_g(p19, grid_spec=(1e-2, 1e2, 5), order=2)
        data = json.loads(rep.to_json())
        assert data["verdict"] == "pass" and len(data["grid"]) == 5
        assert set(data["differences"]) == {"0", "1", "2"}

    @given(problems())
    def test_every_valid_problem_passes(self, p):
        rep = check_bernstein_sqrt_g(p, grid_spec=(1e-4, 1e4, 17), order=4)
        assert rep.passed, rep.statement


class TestCMF:
    def test_exponential(self):
        assert check_cmf(lambda s: mpmath.exp(-s)).passed

    def test_exponential_float_only(self):
        # no mpmath support: falls back to double precision with a noise floor
        assert check_cmf(lambda s: math.exp(-s), (1e-2, 10.0, 21), order=3).passed

    def test_sine_fails(self):
        assert not check_cmf(lambda s: mpmath.sin(s), (0.1, 10.0, 21), order=2).passed

    def test_telegraph_laplace_w(self):
        rep = check_cmf(lambda s: mpmath.exp(-mpmath.sqrt(s * s + s)) / s, order=4)
        assert rep.passed

    def test_exceptions_propagate(self):
        def bad(s):
            raise ZeroDivisionError("boom")
        with pytest.raises(ZeroDivisionError):
            check_cmf(bad)

    def test_grid_spec(self):
        assert np.allclose(log_grid((1.0, 100.0, 3)), [1.0, 10.0, 100.0])
        with pytest.raises(ValueError):
            log_grid((0.0, 1.0, 3))


class TestConcavityScan:
    def test_counterexample_1_9(self):
        s = check_concavity_scan(validate(1.9, 1.0, [(0.3, 1.0)], allow_spread=True))
        assert s is not None and s > 0

    def test_counterexample_1_8(self):
        s = check_concavity_scan(validate(1.8, 1.0, [(0.3, 1.0)], allow_spread=True))
        assert s is not None

    def test_no_witness(self, telegraph):
        assert check_concavity_scan(telegraph) is None
        assert check_concavity_scan(validate(1.5)) is None
