"""Sampled checks of complete monotonicity and the Bernstein property.

A function ``f`` on ``(0, inf)`` is completely monotone when
``(-1)^n f^{(n)} >= 0`` for every ``n``, and Bernstein when ``f >= 0`` and
``f'`` is completely monotone, i.e. ``(-1)^{n-1} f^{(n)} >= 0`` for ``n >= 1``.
The checks below sample these sign conditions on a logarithmic grid with
central finite differences.  A finite sample can only be *consistent with*
the property; reports never claim more.

Derivatives use the step ``h = l delta`` (``delta = 1e-3``), with
``l = min(s, |f / f'|)``, and one Richardson
halving.  Whenever ``fn`` accepts ``mpmath.mpf`` input the differences are
formed in extended precision, so orders up to 6 are meaningful; for float-only
functions the tolerance is raised to the rounding level of the stencil.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy.special import comb

from .problem import MultiTermProblem

__all__ = [
    "MonotonicityReport",
    "check_bernstein_sqrt_g",
    "check_cmf",
    "check_concavity_scan",
    "log_grid",
    "sqrt_g_real",
]

DELTA = 1e-3
MAX_ORDER = 6
DEFAULT_GRID = (1e-4, 1e4, 81)
_DPS = 40


@dataclass
class MonotonicityReport:
    """Outcome of a sampled sign check.

    ``max_violation`` is the largest wrong-signed derivative found, measured
    relative to ``|f(s)| / l^n`` with ``l = min(s, |f / f'|)`` the local
    length scale; the verdict is ``"fail"``
    exactly when it exceeds ``tolerance``.
    """

    grid: list
    max_violation: float
    order_checked: int
    verdict: str
    worst_location: float | None
    worst_order: int | None
    tolerance: float
    property: str
    differences: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    @property
    def statement(self) -> str:
        if self.passed:
            return f"sampled derivatives are consistent with {self.property}"
        return (f"{self.property} violated at s={self.worst_location:.6g} "
                f"(order {self.worst_order}, relative size {self.max_violation:.3g})")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["statement"] = self.statement
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def log_grid(grid_spec=DEFAULT_GRID) -> np.ndarray:
    """Grid from ``(s_min, s_max, n)`` (log-spaced) or an explicit sequence."""
    if isinstance(grid_spec, tuple) and len(grid_spec) == 3:
        lo, hi, n = grid_spec
        if not 0 < lo < hi:
            raise ValueError("grid needs 0 < s_min < s_max")
        return np.geomspace(lo, hi, int(n))
    s = np.asarray(grid_spec, dtype=float).ravel()
    if s.size == 0 or np.any(s <= 0):
        raise ValueError("grid points must be positive")
    return s


def sqrt_g_real(p: MultiTermProblem) -> Callable:
    """``s -> sqrt(g(s))`` for real ``s > 0``, in mpmath arithmetic when given mpf."""
    orders = [mpmath.mpf(float(a)) for a in p.orders]
    coeffs = [mpmath.mpf(float(c)) for c in p.coeffs]

    def f(s):
        if isinstance(s, mpmath.mpf):
            return mpmath.sqrt(mpmath.fsum(c * s ** a for a, c in zip(orders, coeffs)))
        return math.sqrt(sum(float(c) * s ** float(a) for a, c in zip(orders, coeffs)))

    return f


def _accepts_mp(fn) -> bool:
    try:
        with mpmath.workdps(_DPS):
            v = fn(mpmath.mpf(1) / 3)
        return isinstance(v, (mpmath.mpf, mpmath.mpc))
    except Exception:
        return False


def _central(fn, s, h, n):
    k = np.arange(n + 1)
    w = comb(n, k) * (-1.0) ** k
    return sum(float(wk) * fn(s + float(n / 2.0 - kk) * h) for wk, kk in zip(w, k)) / h ** n


def _derivatives(fn, s, order, use_mp):
    """Scaled derivatives ``f^{(n)}(s) l^n / |f(s)|``, ``n = 0..order``, and ``l``.

    ``l = min(s, |f / f'|)`` is the local length scale; the step is
    ``h = l delta``.  Points where ``f`` vanishes return ``None``.
    """
    ctx = mpmath.workdps(_DPS) if use_mp else _nullcontext()
    with ctx:
        x = mpmath.mpf(float(s)) if use_mp else float(s)
        f0 = fn(x)
        if f0 == 0:
            return None
        h0 = x * DELTA * 1e-2
        slope = (fn(x + h0) - fn(x - h0)) / (2 * h0)
        ell = x if slope == 0 else min(x, abs(f0 / slope))
        h = ell * DELTA
        out = [1.0 if f0 > 0 else -1.0]
        for n in range(1, order + 1):
            d1 = _central(fn, x, h, n)
            d2 = _central(fn, x, h / 2, n)
            dn = (4 * d2 - d1) / 3
            out.append(float(mpmath.re(dn * ell ** n / abs(f0))) if use_mp
                       else float(dn * ell ** n / abs(f0)))
        return out, float(ell)


class _nullcontext:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def _sign_check(fn, grid, order, signs, tol, name, use_mp=None) -> MonotonicityReport:
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"order must lie in [0, {MAX_ORDER}]")
    s_all = log_grid(grid)
    if use_mp is None:
        use_mp = _accepts_mp(fn)
    eps = np.finfo(float).eps
    worst, where, worst_n = 0.0, None, None
    diffs: dict[int, list] = {n: [] for n in range(order + 1)}
    for s in s_all:
        res = _derivatives(fn, float(s), order, use_mp)
        d, ell = res if res is not None else ([0.0] * (order + 1), float(s))
        for n, dn in enumerate(d):
            diffs[n].append(dn)
            want = signs(n)
            bad = max(0.0, -want * dn)
            if not use_mp and n > 0:
                # rounding of f and of the abscissae s + k h in an n-th
                # difference of step l * delta / 2
                noise = 10.0 * eps * (s / ell) * 4.0 ** n / DELTA ** n
                bad = bad if bad > noise else 0.0
            if not math.isfinite(bad):
                bad = math.inf
            if bad > worst:
                worst, where, worst_n = bad, float(s), n
    verdict = "fail" if worst > tol else "pass"
    return MonotonicityReport(
        grid=[float(v) for v in s_all], max_violation=float(worst), order_checked=order,
        verdict=verdict, worst_location=where, worst_order=worst_n, tolerance=tol,
        property=name, differences={str(k): v for k, v in diffs.items()},
    )


def check_cmf(fn: Callable, grid_spec=DEFAULT_GRID, order: int = 4, *,
              tol: float = 1e-8) -> MonotonicityReport:
    """Sampled complete-monotonicity check ``(-1)^n fn^{(n)} >= 0``, ``n <= order``.

    Exceptions raised by ``fn`` propagate.
    """
    return _sign_check(fn, grid_spec, order, lambda n: (-1) ** n, tol,
                       "complete monotonicity")


def check_bernstein_sqrt_g(p: MultiTermProblem, grid_spec=DEFAULT_GRID, order: int = 4, *,
                           tol: float = 1e-8) -> MonotonicityReport:
    """Sampled Bernstein check of ``s -> sqrt(g(s))``.

    Checks ``sqrt(g) >= 0`` and ``(-1)^{n-1} d^n sqrt(g) / ds^n >= 0`` for
    ``n = 1..order``, in extended precision.
    """
    if order < 2:
        raise ValueError("order must be at least 2")
    return _sign_check(sqrt_g_real(p), grid_spec, order,
                       lambda n: 1 if n == 0 else (-1) ** (n - 1), tol,
                       "the Bernstein property of sqrt(g)", use_mp=True)


def check_concavity_scan(p: MultiTermProblem, s_range: Sequence[float] = (1e-4, 1e4), *,
                         n: int = 401, tol: float = 1e-8) -> float | None:
    """First ``s`` in ``s_range`` where ``sqrt(g)`` has a positive second derivative.

    The second difference is measured relative to ``sqrt(g(s)) / l^2``;
    returns ``None`` when no point exceeds ``tol``.
    """
    lo, hi = float(s_range[0]), float(s_range[1])
    f = sqrt_g_real(p)
    for s in np.geomspace(lo, hi, n):
        res = _derivatives(f, float(s), 2, True)
        if res is not None and res[0][2] > tol:
            return float(s)
    return None
