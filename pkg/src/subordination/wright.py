"""Mainardi function and the single-term subordination kernel.

``Phi_beta(z) = sum_k (-z)^k / (k! Gamma(1 - beta - beta k))`` for
``0 < beta < 1``.  The power series cancels catastrophically once the terms
grow (for beta near 1 already at z ~ 2), so three evaluation routes are used:

``series``
    exact-sum (``math.fsum``) of the power series while the largest term stays
    within ``SERIES_CANCELLATION`` of the result;
``integral``
    the positive angle representation inherited from the one-sided stable
    density,

        Phi_beta(z) = z^{beta/(1-beta)} / ((1-beta) pi)
                      * int_0^pi A(u) exp(-z^{1/(1-beta)} A(u)) du,
        A(u) = sin(beta u)^{beta/(1-beta)} sin((1-beta) u) / sin(u)^{1/(1-beta)},

    whose integrand is non-negative so no cancellation occurs;
``asymptotic``
    the saddle-point leading term at ``u = 0``,

        Phi_beta(z) ~ z^{beta/(1-beta)} B exp(-Z B) / ((1-beta) sqrt(2 pi beta Z B)),

    with ``Z = z^{1/(1-beta)}`` and ``B = (1-beta) beta^{beta/(1-beta)}``,
    used once ``Z B`` exceeds ``ASYMPTOTIC_EXPONENT`` (values below ~1e-260).
    For beta = 1/2 the leading term is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, gammasgn, rgamma

from ._errors import PrecisionLoss
from .quadrature import integrate_interval

__all__ = ["WrightEval", "mainardi", "mainardi_values", "single_term_kernel"]

SERIES_CANCELLATION = 10.0
ASYMPTOTIC_EXPONENT = 600.0
_MAX_TERMS = 400


@dataclass(frozen=True)
class WrightEval:
    beta: float
    z: float
    value: float
    terms_used: int
    method: str


def _is_pole(beta, k):
    # Gamma(1 - beta - beta k) has a pole iff beta (k + 1) is a positive integer
    x = beta * (k + 1)
    return abs(x - round(x)) < 1e-12 * max(1.0, x)


def _series(beta, z):
    """Return (value, terms) or None when cancellation exceeds the budget."""
    if z == 0.0:
        return float(rgamma(1.0 - beta)), 1
    k = np.arange(_MAX_TERMS)
    arg = 1.0 - beta - beta * k
    poles = np.array([_is_pole(beta, kk) for kk in k])
    with np.errstate(divide="ignore", invalid="ignore"):
        log_abs = k * math.log(z) - gammaln(k + 1.0) - gammaln(arg)
    log_abs = np.where(poles, -np.inf, log_abs)
    peak = np.max(log_abs)
    if peak > 700.0:
        return None
    small = np.nonzero((log_abs < peak + math.log(1e-18)) & ~poles)[0]
    small = small[small > np.argmax(log_abs)]
    if small.size < 4:
        return None
    n = int(small[3]) + 1
    sign = np.where(k[:n] % 2 == 0, 1.0, -1.0) * gammasgn(arg[:n])
    terms = np.where(poles[:n], 0.0, sign * np.exp(log_abs[:n]))
    value = math.fsum(terms)
    # each term carries one rounding; accept only if the sum keeps ~13 digits
    if math.exp(peak) > SERIES_CANCELLATION * abs(value):
        return None
    return value, n


def _angle_integral(beta, z):
    q = 1.0 / (1.0 - beta)
    zz = z ** q
    b0 = (1.0 - beta) * beta ** (beta * q)

    def a_of(u):
        return np.sin(beta * u) ** (beta * q) * np.sin((1.0 - beta) * u) / np.sin(u) ** q

    def integrand(u):
        a = a_of(u)
        with np.errstate(over="ignore", invalid="ignore"):
            out = a * np.exp(-zz * (a - b0))
        return np.where(np.isfinite(out), out, 0.0)

    width = min(math.pi, 1.0 / math.sqrt(max(zz * b0 * beta, 1e-300)))
    brk = [w for w in (width, 4 * width, 16 * width) if w < math.pi]
    res = integrate_interval(integrand, 0.0, math.pi, breakpoints=brk, tol=1e-15 * b0)
    log_pref = beta * q * math.log(z) - zz * b0 - math.log((1.0 - beta) * math.pi)
    return math.exp(log_pref) * res.value, res.panels_used


def _asymptotic(beta, z):
    q = 1.0 / (1.0 - beta)
    zz = z ** q
    b0 = (1.0 - beta) * beta ** (beta * q)
    log_val = (beta * q * math.log(z) + math.log(b0) - zz * b0
               - math.log(1.0 - beta) - 0.5 * math.log(2 * math.pi * beta * zz * b0))
    return math.exp(log_val)


def mainardi(beta: float, z: float, *, method: str = "auto") -> WrightEval:
    """Evaluate ``Phi_beta(z)`` for ``0 < beta < 1`` and ``z >= 0``.

    ``method`` is ``"auto"`` or one of ``"series"``, ``"integral"``,
    ``"asymptotic"`` to force a route.  Forcing ``"series"`` where it cancels
    raises :class:`PrecisionLoss`.
    """
    beta = float(beta)
    z = float(z)
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta={beta} must lie in (0, 1)")
    if not z >= 0.0:
        raise ValueError(f"z={z} must be non-negative")
    if method not in ("auto", "series", "integral", "asymptotic"):
        raise ValueError(f"unknown method {method!r}")

    if method in ("auto", "series"):
        s = _series(beta, z)
        if s is not None:
            return WrightEval(beta, z, s[0], s[1], "series")
        if method == "series":
            raise PrecisionLoss(f"series for Phi_{beta:g}({z:g}) cancels beyond tolerance")
    if z == 0.0:
        return WrightEval(beta, z, float(rgamma(1.0 - beta)), 1, "series")
    exponent = z ** (1.0 / (1.0 - beta)) * (1.0 - beta) * beta ** (beta / (1.0 - beta))
    if method == "asymptotic" or (method == "auto" and exponent > ASYMPTOTIC_EXPONENT):
        return WrightEval(beta, z, _asymptotic(beta, z), 1, "asymptotic")
    value, used = _angle_integral(beta, z)
    return WrightEval(beta, z, value, used, "integral")


def mainardi_values(beta: float, z) -> np.ndarray:
    """Vectorised convenience wrapper returning only the values."""
    z = np.asarray(z, dtype=float)
    out = np.array([mainardi(beta, zi).value for zi in z.ravel()])
    return out.reshape(z.shape)


def single_term_kernel(alpha: float, t: float, tau, c: float = 1.0):
    """Subordination density of the single-term problem ``c D^alpha u = A u``.

    ``t^{-alpha/2} Phi_{alpha/2}(tau t^{-alpha/2})`` for ``c = 1``; a general
    ``c`` rescales ``tau`` by ``sqrt(c)``.
    """
    if not 1.0 < alpha < 2.0:
        raise ValueError(f"alpha={alpha} must lie in (1, 2)")
    if not t > 0:
        raise ValueError("t must be positive")
    beta = alpha / 2.0
    sc = math.sqrt(c)
    scale = t ** (-beta)
    tau = np.asarray(tau, dtype=float)
    vals = sc * scale * mainardi_values(beta, sc * tau * scale)
    return float(vals) if vals.ndim == 0 else vals
