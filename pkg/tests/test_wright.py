import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import gamma

from subordination import mainardi, single_term_kernel
from subordination._errors import PrecisionLoss
from subordination.quadrature import integrate_interval
from subordination.wright import ASYMPTOTIC_EXPONENT

# 60-digit mpmath series sums
PHI_075 = {0.0: 0.27581566283020931436, 0.5: 0.44502484123873669753,
           1.0: 0.60659854359027597898, 2.0: 0.22514007014896749913}


def _moment(beta, k):
    f = np.vectorize(lambda z: z ** k * mainardi(beta, z).value)
    return integrate_interval(f, 0.0, 60.0, breakpoints=[1.0, 3.0, 8.0], tol=1e-12).value


def test_value_at_zero():
    assert mainardi(0.5, 0.0).value == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)


def test_closed_form_half():
    assert mainardi(0.5, 1.0).value == pytest.approx(math.exp(-0.25) / math.sqrt(math.pi),
                                                      rel=1e-14)
    z = np.linspace(0.0, 10.0, 41)
    ref = np.exp(-z * z / 4) / math.sqrt(math.pi)
    assert max(abs(mainardi(0.5, v).value - r) for v, r in zip(z, ref)) <= 1e-12


@pytest.mark.parametrize("z", sorted(PHI_075))
def test_high_precision_series(z):
    assert mainardi(0.75, z).value == pytest.approx(PHI_075[z], rel=1e-12)


@pytest.mark.parametrize("beta", [0.6, 0.75, 0.9])
def test_normalisation(beta):
    assert _moment(beta, 0) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("beta", [0.6, 0.75, 0.9])
def test_first_moment(beta):
    assert _moment(beta, 1) == pytest.approx(1 / gamma(1 + beta), abs=1e-8)


def test_methods_agree_in_overlap():
    for beta, z in ((0.75, 1.5), (0.6, 2.0), (0.55, 2.0)):
        a = mainardi(beta, z, method="series").value
        b = mainardi(beta, z, method="integral").value
        assert b == pytest.approx(a, rel=1e-10)


def test_series_refuses_to_cancel():
    with pytest.raises(PrecisionLoss):
        mainardi(0.95, 10.0, method="series")


def test_asymptotic_switch_calibration():
    # the saddle-point form is exact for beta = 1/2: check that the switch
    # radius sits where the form is reached, then compare just below it
    z_switch = 2.0 * math.sqrt(ASYMPTOTIC_EXPONENT)
    assert mainardi(0.5, z_switch * 1.01).method == "asymptotic"
    ev = mainardi(0.5, z_switch * 0.99)
    assert ev.method != "asymptotic"
    exact = math.exp(-ev.z ** 2 / 4) / math.sqrt(math.pi)
    assert ev.value == pytest.approx(exact, rel=1e-8)


@given(st.sampled_from([0.55, 0.65, 0.75, 0.85, 0.95]), st.floats(0.0, 20.0))
def test_nonnegative(beta, z):
    assert mainardi(beta, z).value >= 0.0


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        mainardi(1.0, 1.0)
    with pytest.raises(ValueError):
        mainardi(0.5, -1.0)


class TestSingleTermKernel:
    def test_origin(self):
        # Phi_{3/4}(0) = 1 / Gamma(1/4)
        assert single_term_kernel(1.5, 1.0, 0.0) == pytest.approx(0.27581566283020931, rel=1e-14)

    def test_normalised(self):
        f = np.vectorize(lambda tau: single_term_kernel(1.5, 1.0, tau))
        res = integrate_interval(f, 0.0, 40.0, breakpoints=[1.0, 4.0], tol=1e-12)
        assert res.value == pytest.approx(1.0, abs=1e-9)

    def test_concentrates_as_alpha_to_2(self):
        f = np.vectorize(lambda tau: single_term_kernel(1.95, 1.0, tau))
        win = integrate_interval(f, 0.5, 1.5, breakpoints=[0.8, 0.9, 1.0, 1.1, 1.2],
                                 tol=1e-8).value
        assert win > 0.95

    def test_vectorised(self):
        vals = single_term_kernel(1.5, 2.0, [0.1, 0.5])
        assert vals.shape == (2,)
