import math

import numpy as np
import pytest

from subordination import QuadratureConfig, integrate_oscillatory, inverse_laplace_oracle
from subordination._errors import BadSingularity, NoConvergence
from subordination.quadrature import integrate_interval, iterated_average


class TestConfig:
    def test_defaults(self):
        cfg = QuadratureConfig()
        assert (cfg.abs_tol, cfg.rel_tol, cfg.tail_eps) == (1e-9, 1e-9, 1e-12)

    @pytest.mark.parametrize("kw", [{"abs_tol": 0}, {"rel_tol": -1}, {"tail_eps": 0},
                                    {"max_panels": 4}, {"grading_exponent": 0.5}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            QuadratureConfig(**kw)

    def test_replace_round_trip(self):
        cfg = QuadratureConfig().replace(abs_tol=1e-6)
        assert cfg.abs_tol == 1e-6 and QuadratureConfig(**cfg.to_dict()) == cfg


class TestOscillatory:
    def test_exponential(self, cfg):
        res = integrate_oscillatory(lambda r: np.exp(-r), config=cfg)
        assert res.converged and abs(res.value - 1.0) <= cfg.abs_tol

    def test_dirichlet_acceleration(self, cfg):
        res = integrate_oscillatory(lambda r: np.sinc(r / np.pi), phase=lambda r: r, config=cfg)
        assert abs(res.value - math.pi / 2) <= 1e-8

    def test_graded_singularity(self, cfg):
        res = integrate_oscillatory(lambda r: r ** -0.5 * np.exp(-r), config=cfg,
                                    singular_exponent=0.5)
        assert res.value == pytest.approx(math.sqrt(math.pi), abs=1e-9)

    def test_truncation_point(self, cfg):
        res = integrate_oscillatory(lambda r: np.exp(-r) * np.cos(r), phase=lambda r: r,
                                    damping=lambda r: r, config=cfg)
        assert res.value == pytest.approx(0.5, abs=1e-9)
        assert math.exp(-res.truncation_point) <= cfg.tail_eps

    def test_bad_singularity(self, cfg):
        with pytest.raises(BadSingularity):
            integrate_oscillatory(lambda r: 1.0 / r * np.exp(-r), config=cfg)

    def test_budget(self):
        cfg = QuadratureConfig(max_panels=8)
        with pytest.raises(NoConvergence):
            integrate_oscillatory(lambda r: np.sin(r * r) * np.exp(-1e-4 * r),
                                  phase=lambda r: r * r, config=cfg)

    def test_halving_tolerance_does_not_hurt(self):
        def err(tol):
            cfg = QuadratureConfig(abs_tol=tol, rel_tol=tol)
            res = integrate_oscillatory(lambda r: r ** -0.5 * np.exp(-r) * np.cos(r),
                                        phase=lambda r: r, config=cfg, singular_exponent=0.5)
            exact = math.sqrt(math.pi) * math.cos(math.pi / 8) / 2 ** 0.25
            return abs(res.value - exact)
        assert err(5e-8) <= max(err(1e-7), 1e-15) * 1.5


class TestAveraging:
    def test_partial_sums_alternate(self):
        k = np.arange(1, 201)
        edges = np.concatenate([[0.0], k * math.pi])
        parts = [integrate_interval(lambda r: np.sinc(r / np.pi), a, b).value
                 for a, b in zip(edges[:-1], edges[1:])]
        sums = np.cumsum(parts)
        dev = sums - math.pi / 2
        assert np.all(np.sign(dev[1:]) != np.sign(dev[:-1]))
        assert abs(iterated_average(sums)[-1] - math.pi / 2) <= 1e-8


class TestTalbot:
    def test_heaviside(self):
        assert inverse_laplace_oracle(lambda s: 1 / s, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_sine(self):
        assert inverse_laplace_oracle(lambda s: 1 / (s * s + 1), math.pi / 2) == pytest.approx(
            1.0, abs=1e-12)

    def test_rejects_nonpositive_t(self):
        with pytest.raises(ValueError):
            inverse_laplace_oracle(lambda s: 1 / s, 0.0)
