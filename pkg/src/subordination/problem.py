"""Multi-term problem definition and its Laplace-domain symbols.

The equation is ``c D^alpha u + sum_j c_j D^{alpha_j} u = A u`` with Caputo
derivatives in time.  Everything downstream is driven by the symbol

    g(s) = c s^alpha + sum_j c_j s^{alpha_j}

and by the real and imaginary parts of its square root (or ``1/alpha`` root)
on the positive imaginary axis ``s = i r``.

Branches: every power is the principal one.  On ``s = i r`` with ``r > 0``
each term ``(i r)^beta`` has argument ``beta*pi/2 in (0, pi]`` so
``B(r) = Im g(ir) >= 0`` and ``theta = atan2(B, A)`` lies in ``[0, pi]``.
Fractional powers of ``g(ir)`` computed from this polar angle therefore never
cross the cut and no branch tracking is required.
"""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import mpmath
import numpy as np

from ._errors import (
    DomainError,
    NonPositiveCoefficient,
    NotApplicable,
    NotWaveLimit,
    OrderOutOfRange,
    OrdersNotDecreasing,
    SpreadTooLarge,
)

__all__ = [
    "MultiTermProblem",
    "SymbolEval",
    "validate",
    "g_eval",
    "sqrt_g",
    "root_g",
    "ab_eval",
    "k_eval",
    "k_pair",
    "root_symbol",
    "linear_symbol",
    "wavefront_symbol",
    "analyticity_angle",
    "cospi",
    "sinpi",
]


def cospi(x):
    """``cos(pi x)`` that is exact at multiples of 1/2."""
    x = np.asarray(x, dtype=float)
    y = np.mod(x, 2.0)
    out = np.cos(np.pi * y)
    out = np.where(y == 0.5, 0.0, out)
    out = np.where(y == 1.5, 0.0, out)
    out = np.where(y == 1.0, -1.0, out)
    out = np.where(y == 0.0, 1.0, out)
    return out[()] if out.ndim == 0 else out


def sinpi(x):
    """``sin(pi x)`` that is exact at multiples of 1/2."""
    x = np.asarray(x, dtype=float)
    y = np.mod(x, 2.0)
    out = np.sin(np.pi * y)
    out = np.where((y == 0.0) | (y == 1.0), 0.0, out)
    out = np.where(y == 0.5, 1.0, out)
    out = np.where(y == 1.5, -1.0, out)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class MultiTermProblem:
    """Orders and coefficients of the multi-term operator.

    Use :func:`validate` to construct instances; the constructor itself does
    not check the admissibility conditions.
    """

    alpha: float
    c: float = 1.0
    terms: tuple[tuple[float, float], ...] = ()
    unsafe: bool = field(default=False, compare=False)

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def orders(self) -> np.ndarray:
        return np.array([self.alpha] + [a for a, _ in self.terms], dtype=float)

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([self.c] + [cj for _, cj in self.terms], dtype=float)

    @property
    def alpha_min(self) -> float:
        """Smallest order present (``alpha_m``, or ``alpha`` when m = 0)."""
        return self.terms[-1][0] if self.terms else self.alpha

    @property
    def is_wave(self) -> bool:
        return self.alpha == 2.0 and self.m == 0

    @property
    def is_telegraph(self) -> bool:
        return self.alpha == 2.0 and self.m == 1 and self.terms[0][0] == 1.0

    @property
    def has_wavefront(self) -> bool:
        """True for the only two cases with a jump at ``x = t / sqrt(c)``."""
        return self.is_wave or self.is_telegraph

    @property
    def finite_speed(self) -> bool:
        return self.alpha == 2.0

    @property
    def speed(self) -> float:
        """Propagation speed ``1/sqrt(c)`` (meaningful when alpha = 2)."""
        return 1.0 / math.sqrt(self.c)

    @property
    def front_decay(self) -> float:
        """``lim_{s->inf} h(s)`` for alpha = 2; infinite unless there is a front."""
        if self.is_wave:
            return 0.0
        if self.is_telegraph:
            return self.terms[0][1] / (2.0 * math.sqrt(self.c))
        return math.inf

    def front_mass(self, t: float) -> float:
        """Weight of the point mass of ``phi(t, .)`` at ``tau = t/sqrt(c)``.

        Zero for every problem except the classical wave and telegraph cases.
        """
        if not self.has_wavefront:
            return 0.0
        return math.exp(-t * self.speed * self.front_decay)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "c": self.c,
            "terms": [[a, cj] for a, cj in self.terms],
        }

    def __str__(self) -> str:
        parts = [f"{self.c:g}*D^{self.alpha:g}"]
        parts += [f"{cj:g}*D^{a:g}" for a, cj in self.terms]
        return " + ".join(parts)


@dataclass(frozen=True)
class SymbolEval:
    r: float
    a: float
    b: float
    k_plus: float
    k_minus: float


def _as_terms(terms: Iterable[Sequence[float]]) -> tuple[tuple[float, float], ...]:
    out = []
    for item in terms:
        if len(item) != 2:
            raise OrderOutOfRange(f"term {item!r} must be an (order, coefficient) pair")
        out.append((float(item[0]), float(item[1])))
    return tuple(out)


def validate(alpha, c=1.0, terms=(), *, allow_spread=False) -> MultiTermProblem:
    """Check the admissible parameter set and build a :class:`MultiTermProblem`.

    Parameters
    ----------
    alpha : float
        Leading order, must lie in ``(1, 2]``.  ``alpha == 2`` is compared
        exactly.
    c : float
        Leading coefficient, ``c > 0``.
    terms : sequence of (order, coefficient)
        Lower-order terms in strictly decreasing order.
    allow_spread : bool
        Accept ``alpha - alpha_m > 1``.  The positivity of every kernel is then
        no longer guaranteed and the returned problem is flagged ``unsafe``.

    Raises
    ------
    OrderOutOfRange, NonPositiveCoefficient, OrdersNotDecreasing, SpreadTooLarge
    """
    alpha = float(alpha)
    c = float(c)
    terms = _as_terms(terms)
    if not (math.isfinite(alpha) and 1.0 < alpha <= 2.0):
        raise OrderOutOfRange(f"alpha={alpha} must lie in (1, 2]")
    if not (math.isfinite(c) and c > 0.0):
        raise NonPositiveCoefficient(f"c={c} must be positive")
    prev = alpha
    for j, (aj, cj) in enumerate(terms, start=1):
        if not (math.isfinite(aj) and aj > 0.0):
            raise OrderOutOfRange(f"alpha_{j}={aj} must be positive")
        if not (math.isfinite(cj) and cj > 0.0):
            raise NonPositiveCoefficient(f"c_{j}={cj} must be positive")
        if aj == prev:
            raise OrdersNotDecreasing(f"alpha_{j}={aj} duplicates a previous order")
        if aj > prev:
            raise OrdersNotDecreasing(
                f"alpha_{j}={aj} must be smaller than the preceding order {prev}"
            )
        prev = aj
    spread = alpha - prev
    unsafe = False
    if terms and spread > 1.0:
        if not allow_spread:
            raise SpreadTooLarge(
                f"alpha - alpha_m = {spread:g} exceeds 1; positivity is not guaranteed"
            )
        unsafe = True
    return MultiTermProblem(alpha=alpha, c=c, terms=terms, unsafe=unsafe)


# -- complex-plane evaluation (Laplace-domain oracles) ----------------------

def _is_mp(s) -> bool:
    return isinstance(s, (mpmath.mpf, mpmath.mpc))


def _cpow(s, a):
    if _is_mp(s):
        return mpmath.power(s, a)
    return np.power(np.asarray(s, dtype=complex), a)


def _check_cut(s):
    if _is_mp(s):
        bad = mpmath.im(s) == 0 and mpmath.re(s) <= 0
    else:
        arr = np.asarray(s, dtype=complex)
        bad = np.any((arr.imag == 0) & (arr.real <= 0))
    if bad:
        raise DomainError("s lies on the branch cut (-inf, 0]")


def g_eval(p: MultiTermProblem, s):
    """``g(s) = c s^alpha + sum c_j s^alpha_j`` on the principal branch.

    Accepts Python/NumPy complex scalars or arrays and mpmath numbers.
    """
    _check_cut(s)
    out = p.c * _cpow(s, p.alpha)
    for aj, cj in p.terms:
        out = out + cj * _cpow(s, aj)
    return out


def sqrt_g(p: MultiTermProblem, s):
    """Analytic continuation of ``sqrt(g(s))`` to ``C \\ (-inf, 0]``.

    Factored as ``s^{alpha_m/2} * sqrt(g(s)/s^{alpha_m})``; the second factor
    keeps ``|arg| < pi`` whenever ``alpha - alpha_m <= 1``, so this agrees with
    the principal ``sqrt(g(s))`` in the right half plane and stays analytic in
    the left half plane where the principal composition would jump.
    """
    return root_g(p, s, 0.5)


def root_g(p: MultiTermProblem, s, power):
    """Analytic continuation of ``g(s)^power`` for ``power`` in (0, 1]."""
    _check_cut(s)
    if power == 1.0:
        return g_eval(p, s)
    if power == 0.5:
        base = p.alpha_min
    else:
        base = p.alpha
    rest = p.c * _cpow(s, p.alpha - base)
    for aj, cj in p.terms:
        rest = rest + cj * _cpow(s, aj - base)
    lead = s if base * power == 1.0 else _cpow(s, base * power)
    if not _is_mp(s):
        lead = np.asarray(lead, dtype=complex)
    return lead * _cpow(rest, power)


# -- imaginary-axis symbols ---------------------------------------------------

@lru_cache(maxsize=256)
def _axis_trig(orders: tuple) -> tuple:
    half = np.asarray(orders, dtype=float) / 2.0
    return tuple(float(v) for v in cospi(half)), tuple(float(v) for v in sinpi(half))


def ab_eval(p: MultiTermProblem, r):
    """``A(r) = Re g(ir)`` and ``B(r) = Im g(ir)`` from the cosine/sine sums."""
    r = np.asarray(r, dtype=float)
    a = np.zeros_like(r)
    b = np.zeros_like(r)
    orders = tuple(float(o) for o in p.orders)
    cos_h, sin_h = _axis_trig(orders)
    for order, coef, co, si in zip(orders, p.coeffs, cos_h, sin_h):
        rp = coef * np.power(r, order)
        a = a + rp * co
        b = b + rp * si
    if a.ndim == 0:
        return float(a), float(b)
    return a, b


def _stable_sqrt(a, b):
    """Real and imaginary parts of the principal ``sqrt(a + i b)`` for ``b >= 0``.

    Uses the half-angle formulas with the well-conditioned branch first and
    the product identity ``2 K+ K- = B`` for the other, so ``K+`` is exactly
    zero for the pure wave symbol.
    """
    rho = np.hypot(a, b)
    pos = a >= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        big_p = np.sqrt(np.maximum(rho + a, 0.0) / 2.0)
        big_m = np.sqrt(np.maximum(rho - a, 0.0) / 2.0)
        kp = np.where(pos, big_p, np.where(big_m > 0, b / (2.0 * big_m), 0.0))
        km = np.where(pos, np.where(big_p > 0, b / (2.0 * big_p), 0.0), big_m)
    return kp, km


def k_pair(p: MultiTermProblem, r):
    """Vectorised ``(K+(r), K-(r))`` with ``K+ + i K- = sqrt(g(ir))``."""
    a, b = ab_eval(p, np.asarray(r, dtype=float))
    kp, km = _stable_sqrt(np.asarray(a), np.asarray(b))
    if np.ndim(kp) == 0:
        return float(kp), float(km)
    return kp, km


def k_eval(p: MultiTermProblem, r: float) -> SymbolEval:
    """Evaluate ``A, B, K+, K-`` at a single frequency ``r > 0``."""
    r = float(r)
    if not r > 0:
        raise DomainError(f"r={r} must be positive")
    a, b = ab_eval(p, r)
    kp, km = _stable_sqrt(np.float64(a), np.float64(b))
    return SymbolEval(r=r, a=a, b=b, k_plus=float(kp), k_minus=float(km))


def root_symbol(p: MultiTermProblem, r, power: float):
    """Real and imaginary parts ``(L+, L-)`` of ``g(ir)^power``.

    Polar form ``rho^power (cos(power*theta), sin(power*theta))`` with
    ``theta = atan2(B, A)`` in ``[0, pi]``.  ``L+ >= 0`` for ``power = 1/2``
    and for ``power <= 1/alpha`` because ``theta <= alpha*pi/2``.
    ``power = 1/2`` is routed through :func:`k_pair` and is identical to it.
    """
    if not 0.0 < power <= 1.0:
        raise DomainError(f"power={power} must lie in (0, 1]")
    if power == 0.5:
        return k_pair(p, r)
    a, b = ab_eval(p, np.asarray(r, dtype=float))
    rho = np.hypot(a, b)
    theta = np.arctan2(b, a)
    mag = np.power(rho, power)
    lp = mag * np.cos(power * theta)
    lm = mag * np.sin(power * theta)
    if np.ndim(lp) == 0:
        return float(lp), float(lm)
    return lp, lm


def clog1p(z):
    """``log(1 + z)`` for complex ``z``, accurate when ``|z|`` is small."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    re = 0.5 * np.log1p(x * (2.0 + x) + y * y)
    im = np.arctan2(y, 1.0 + x)
    return re + 1j * im


def cexpm1(w):
    """``exp(w) - 1`` for complex ``w`` without cancellation in the real part."""
    w = np.asarray(w, dtype=complex)
    a, b = w.real, w.imag
    sb = np.sin(0.5 * b)
    re = np.expm1(a) * np.cos(b) - 2.0 * sb * sb
    im = np.exp(a) * np.sin(b)
    return re + 1j * im


def _binomial_excess(z, power):
    """``(1 + z)^power - 1 - power z`` accurate for small and moderate ``|z|``."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < 0.1
    zs = z[small]
    term = power * zs
    acc = np.zeros_like(zs)
    for k in range(2, 24):
        term = term * (power - k + 1) / k * zs
        acc = acc + term
    out[small] = acc
    zl = z[~small]
    out[~small] = cexpm1(clog1p(zl) * power) - power * zl
    return out


def linear_symbol(p: MultiTermProblem, r):
    """Split ``g(ir)^{1/alpha} = kappa i r + (L+ + i D-)`` with ``kappa = c^{1/alpha}``.

    Returns ``(L+, D-, kappa, L+_excess)``.  With
    ``z = sum (c_j / c) (ir)^{alpha_j - alpha}`` the deviation from the
    linear part is ``kappa i r ((1 + z)^{1/alpha} - 1)``; its first-order
    piece ``kappa i r z / alpha`` is summed analytically and the remainder is
    evaluated without cancellation, so ``D-`` keeps full relative accuracy
    when it is small compared to ``kappa r``.  ``L+_excess`` is ``L+`` minus
    the first-order piece; when the only lower order is ``alpha - 1`` the
    first-order piece is the constant limit of ``L+`` and the excess is the
    (small) distance to it.  For ``alpha = 2`` this decomposes ``sqrt(g(ir))``.
    """
    r = np.asarray(r, dtype=float)
    shape = r.shape
    r = np.atleast_1d(r)
    z = np.zeros(r.shape, dtype=complex)
    for aj, cj in p.terms:
        e = aj - p.alpha
        z = z + (cj / p.c) * np.power(r, e) * (cospi(e / 2.0) + 1j * sinpi(e / 2.0))
    kappa = p.c ** (1.0 / p.alpha)
    power = 1.0 / p.alpha
    v = _binomial_excess(z, power)
    u = power * z + v
    lp = (-kappa * r * u.imag).reshape(shape)
    dm = (kappa * r * u.real).reshape(shape)
    excess = (-kappa * r * v.imag).reshape(shape)
    if lp.ndim == 0:
        return float(lp), float(dm), kappa, float(excess)
    return lp, dm, kappa, excess


def wavefront_symbol(p: MultiTermProblem, s):
    """``h(s) = sqrt(g(s)) - sqrt(c) s`` for the finite-speed case alpha = 2."""
    if p.alpha != 2.0:
        raise NotWaveLimit(f"h(s) is only defined for alpha = 2 (got {p.alpha})")
    root = sqrt_g(p, s)
    if _is_mp(s):
        return root - mpmath.sqrt(p.c) * s
    return root - math.sqrt(p.c) * np.asarray(s, dtype=complex)


def analyticity_angle(p: MultiTermProblem, eps: float = 0.0) -> float:
    """Half-angle ``(2 - alpha) pi / (2 alpha) - eps`` of the analyticity sector."""
    if p.alpha == 2.0:
        raise NotApplicable("the kernel is not analytic in a sector when alpha = 2")
    full = (2.0 - p.alpha) * math.pi / (2.0 * p.alpha)
    if eps < 0 or eps >= full:
        raise NotApplicable(f"eps={eps} must lie in [0, {full:.6g})")
    return full - eps
