import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gamma

from subordination import validate
from subordination._errors import DegenerateIdentity, DomainError, GridTooCoarse
from subordination.kernels import pdf_phi
from subordination.quadrature import integrate_interval
from subordination.solver import (
    EigenExpansion,
    LineProblem,
    caputo_derivative,
    caputo_residual,
    composed_phi,
    dalembert,
    eigenmodes,
    line_solution,
    phi_profile,
    sine_coefficients,
    solve_interval,
    solve_line,
    telegraph_mode,
)

# Talbot inversion (mpmath, 30 digits) of g / (s (g + pi^2)), alpha = 1.8, alpha_1 = 1.5
U1_18_T1 = -0.46494203414246568


def box(x):
    return (np.abs(np.asarray(x, dtype=float)) <= 1.0).astype(float)


@pytest.fixture(scope="module")
def p18():
    return validate(1.8, 1.0, [(1.5, 1.0)])


class TestDalembert:
    def test_box_examples(self):
        assert dalembert(box, 0.0, 0.5) == 1.0
        assert dalembert(box, 0.0, 1.5) == 0.0
        assert dalembert(box, 0.0, 0.999) == 1.0
        # at x = 0 both shifts leave the support together
        assert dalembert(box, 0.0, 1.001) == 0.0
        assert dalembert(box, 0.5, 1.001) == 0.5

    def test_negative_time(self):
        with pytest.raises(DomainError):
            dalembert(box, 0.0, -1.0)

    def test_wave_solve_line_is_dalembert(self, wave):
        lp = LineProblem(box, np.linspace(-3, 3, 13), [0.0, 0.5, 2.0], breakpoints=(-1, 1),
                         support=(-1, 1))
        f = solve_line(wave, lp)
        for i, t in enumerate(lp.t_grid):
            assert np.array_equal(f.values[i], dalembert(box, lp.x_grid, t))
        assert f.meta["method"] == "dalembert"


class TestLine:
    def test_initial_value_recovered(self, p19):
        u = line_solution(p19, box, 1e-3, breakpoints=(-1, 1))
        assert u(0.0) == pytest.approx(1.0, abs=0.05)

    def test_mass_conserved(self, p19, cfg):
        prof = phi_profile(p19, 1.0, cfg)
        u = line_solution(p19, box, 1.0, cfg, breakpoints=(-1, 1), profile=prof)
        half = prof.end + 1.0
        res = integrate_interval(np.vectorize(u), -half, half, breakpoints=[-1, 0, 1], tol=1e-7)
        assert res.value == pytest.approx(2.0, abs=1e-4)

    def test_field_serialisation(self, p19):
        lp = LineProblem(box, [0.0, 2.0], [0.0, 1.0], breakpoints=(-1, 1), support=(-1, 1))
        f = solve_line(p19, lp)
        assert f.values.shape == (2, 2)
        assert f.values[0, 0] == 1.0 and f.values[0, 1] == 0.0
        assert 0.0 < f.values[1, 1] < f.values[1, 0] < 1.0
        data = json.loads(f.to_json())
        assert data["problem"]["alpha"] == 1.9 and len(data["u"]) == 2
        lines = f.to_csv().splitlines()
        assert lines[0].startswith("# problem") and "t,x,u" in lines

    def test_rejects_negative_time(self):
        with pytest.raises(DomainError):
            LineProblem(box, [0.0], [-1.0])


class TestModes:
    def test_telegraph_kernel_route(self, telegraph, cfg):
        t = np.linspace(0.0, 3.0, 7)
        lam = np.array([1.0, 4.0]) * np.pi ** 2
        kern = eigenmodes(telegraph, lam, t, cfg, method="kernel")
        ref = np.array([telegraph_mode(telegraph, v, t) for v in lam])
        assert np.max(np.abs(kern - ref)) <= 1e-5

    @pytest.mark.parametrize("lam", [0.1, 0.25, 1.0])
    def test_telegraph_closed_form_branches(self, telegraph, lam):
        # overdamped, critical and underdamped: u(0) = 1, u'(0) = 0 and the ODE
        t = np.linspace(0.0, 4.0, 4001)
        u = telegraph_mode(telegraph, lam, t)
        h = t[1] - t[0]
        assert u[0] == pytest.approx(1.0)
        assert (u[1] - u[0]) / h == pytest.approx(0.0, abs=1e-3)
        d2 = (u[2:] - 2 * u[1:-1] + u[:-2]) / h ** 2
        d1 = (u[2:] - u[:-2]) / (2 * h)
        assert np.max(np.abs(d2 + d1 + lam * u[1:-1])) <= 1e-5

    def test_laplace_oracle(self, p18, cfg):
        u = eigenmodes(p18, [np.pi ** 2], [1.0], cfg)[0, 0]
        assert u == pytest.approx(U1_18_T1, abs=1e-6)

    def test_start_and_bound(self, p18, cfg):
        lam = (np.arange(1, 5) * np.pi) ** 2
        modes = eigenmodes(p18, lam, [0.0, 1e-3, 1.0], cfg)
        assert np.all(modes[:, 0] == 1.0)
        assert np.max(np.abs(modes[:, 1] - 1.0)) <= 0.05
        assert np.max(np.abs(modes)) <= 1.0 + 1e-6

    def test_wave_periodic(self, wave):
        lam = (np.arange(1, 6) * np.pi) ** 2
        t = np.linspace(0.0, 2.0, 9)
        a = eigenmodes(wave, lam, t)
        assert np.max(np.abs(a - eigenmodes(wave, lam, t + 2.0))) <= 1e-12
        assert np.array_equal(a, eigenmodes(wave, lam, t, method="kernel"))

    def test_closed_form_refused(self, p18):
        with pytest.raises(DomainError):
            eigenmodes(p18, [1.0], [1.0], method="closed_form")

    def test_bad_arguments(self, p18):
        with pytest.raises(DomainError):
            eigenmodes(p18, [-1.0], [1.0])
        with pytest.raises(DomainError):
            eigenmodes(p18, [1.0], [-1.0])
        with pytest.raises(ValueError):
            eigenmodes(p18, [1.0], [1.0], method="spectral")


class TestInterval:
    def test_parseval_single_mode(self):
        coeffs, tail = sine_coefficients(lambda x: math.sqrt(2) * np.sin(3 * np.pi * x), 8)
        want = np.zeros(8)
        want[2] = 1.0
        assert np.max(np.abs(coeffs - want)) <= 1e-10 and tail <= 1e-10

    def test_parseval_tail(self):
        # v = x (1 - x): ||v||^2 = 1/30
        coeffs, tail = sine_coefficients(lambda x: x * (1 - x), 16)
        assert float(np.sum(coeffs ** 2)) + tail == pytest.approx(1 / 30, rel=1e-12)
        assert 0 < tail < 1e-8

    def test_telegraph_expansion(self, telegraph):
        field, exp = solve_interval(telegraph, lambda x: np.sin(np.pi * x), n_modes=4,
                                    x_grid=[0.5], t_grid=[0.0, 1.0])
        assert isinstance(exp, EigenExpansion)
        assert field.values[0, 0] == pytest.approx(1.0, abs=1e-12)
        assert field.values[1, 0] == pytest.approx(telegraph_mode(telegraph, np.pi ** 2, 1.0),
                                                   abs=1e-12)
        data = exp.to_dict()
        assert data["n_modes"] == 4 and len(data["modes"]) == 4
        json.dumps(data)

    def test_mode_count(self, telegraph):
        with pytest.raises(ValueError):
            solve_interval(telegraph, np.sin, n_modes=0)


def mittag_leffler_mode(t):
    """``E_{1.5}(-pi^2 t^1.5)`` by its power series in 60-digit arithmetic."""
    with mpmath.workdps(60):
        z = -mpmath.pi ** 2 * mpmath.mpf(t) ** 1.5
        s, k = mpmath.mpf(0), 0
        while True:
            term = z ** k / mpmath.gamma(1.5 * k + 1)
            s += term
            k += 1
            if k > 20 and abs(term) < mpmath.mpf(10) ** -40:
                return float(s)


class TestCaputo:
    @pytest.mark.parametrize("order", [0.5, 1.0, 1.5, 1.8, 2.0])
    def test_quadratic_exact(self, order):
        # D^q t^2 = 2 t^{2-q} / Gamma(3 - q), reproduced to rounding
        h = 1e-3
        t = np.arange(0, 1001) * h
        d = caputo_derivative(t ** 2, h, order)
        exact = 2 * t[1:-1] ** (2 - order) / gamma(3 - order)
        assert np.max(np.abs(d - exact)) <= 1e-8

    @pytest.mark.parametrize("order", [0.5, 1.3, 1.8])
    def test_second_order_on_cubic(self, order):
        errs = []
        for n in (200, 400):
            h = 1.0 / n
            t = np.arange(n + 1) * h
            d = caputo_derivative(t ** 3, h, order)
            exact = 6 * t[1:-1] ** (3 - order) / gamma(4 - order)
            keep = t[1:-1] >= 0.1
            errs.append(np.max(np.abs(d - exact)[keep]))
        assert math.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.1)

    def test_constant_has_zero_derivative(self):
        assert np.all(caputo_derivative(np.ones(20), 0.1, 1.5) == 0.0)

    def test_telegraph_residual(self, telegraph):
        t = np.linspace(0.0, 5.0, 2001)
        u = telegraph_mode(telegraph, np.pi ** 2, t)
        res = caputo_residual(telegraph, u, np.pi ** 2, t)
        assert res.residual <= res.error_estimate
        assert res.observed_order == pytest.approx(2.0, abs=0.05)

    def test_single_term_mittag_leffler(self):
        p = validate(1.5)
        t = np.linspace(0.0, 2.0, 401)
        u = np.array([mittag_leffler_mode(v) for v in t])
        res = caputo_residual(p, u, np.pi ** 2, t)
        assert res.residual <= res.error_estimate
        # u'' ~ t^{-1/2} at the origin limits the rate to 1.5
        assert res.observed_order == pytest.approx(1.5, abs=0.1)

    def test_single_term_mode_matches_series(self):
        u = eigenmodes(validate(1.5), [np.pi ** 2], [0.5, 1.0])[0]
        assert u == pytest.approx([mittag_leffler_mode(0.5), mittag_leffler_mode(1.0)], abs=1e-8)

    def test_zero_function_is_not_a_mode(self, telegraph):
        # u = 0 ignores u(0) = 1 but satisfies the homogeneous equation exactly
        t = np.linspace(0.0, 1.0, 11)
        res = caputo_residual(telegraph, np.zeros_like(t), 1.0, t)
        assert res.residual == 0.0

    def test_coarse_grid(self, telegraph):
        t = np.linspace(0.0, 5.0, 11)
        u = telegraph_mode(telegraph, 100 * np.pi ** 2, t)
        with pytest.raises(GridTooCoarse):
            caputo_residual(telegraph, u, 100 * np.pi ** 2, t)
        with pytest.raises(GridTooCoarse):
            caputo_residual(telegraph, u[:5], 1.0, t[:5])

    def test_grid_checks(self, telegraph):
        with pytest.raises(ValueError):
            caputo_residual(telegraph, np.ones(10), 1.0, np.linspace(0.1, 1, 10))
        with pytest.raises(ValueError):
            caputo_residual(telegraph, np.ones(10), 1.0, np.linspace(0, 1, 10) ** 2)


class TestComposition:
    def test_matches_direct_phi(self):
        p = validate(1.5, 1.0, [(0.5, 1.0)])
        vals = composed_phi(p, 1.0, [0.25, 0.5])
        for tau, v in zip((0.25, 0.5), vals):
            assert v == pytest.approx(pdf_phi(p, 1.0, tau), abs=1e-6)

    def test_requires_fractional_order(self, telegraph):
        with pytest.raises(DomainError):
            composed_phi(telegraph, 1.0, 0.5)

    def test_single_term_degenerate(self):
        with pytest.raises(DegenerateIdentity):
            composed_phi(validate(1.5), 1.0, 0.5)


@settings(max_examples=10)
@given(st.floats(-3, 3), st.floats(0, 3))
def test_dalembert_bounded(x, t):
    assert 0.0 <= dalembert(box, x, t) <= 1.0
