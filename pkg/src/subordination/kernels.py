"""Propagation function, fundamental solutions and subordination densities.

All kernels are integrals over the positive imaginary axis ``s = i r`` of the
symbol ``sqrt(g(ir)) = K+(r) + i K-(r)``:

    w(x, t)     = 1/2 + 1/pi int e^{-x K+} sin(r t - x K-) dr / r
    G_s(x, t)   = w_t = 1/pi int e^{-x K+} cos(r t - x K-) dr
    phi(t, tau) = -w_x = 1/pi int e^{-tau K+} (K+ sin th + K- cos th) dr / r,
                  th = r t - tau K-
    G_c(x, t)   = phi(t, |x|) / 2

``G_s`` and ``phi`` come from differentiating the ``w`` integrand under the
integral sign in ``t`` and ``x`` respectively.  ``psi(t, tau)`` has the same
form as ``phi`` with ``(K+, K-)`` replaced by ``(L+, L-)``, the real and
imaginary parts of ``g(ir)^{1/alpha}``.

Wavefront atoms
---------------
For the classical wave and telegraph symbols ``K+(r) -> h_inf`` (finite) and
``K-(r) - sqrt(c) r -> 0`` as ``r -> inf``.  The ``G_s`` and ``phi``
integrands then tend to ``e^{-y h_inf} sqrt(c)^k cos((t - sqrt(c) y) r)``,
whose integral is a point mass on the front ``t = sqrt(c) y``.  The functions
here return the density of the absolutely continuous part, obtained by
subtracting that asymptote from the integrand; the atom is reported by
:func:`atoms` and is included by the normalization helpers.  For the
classical wave the regular part of ``phi`` and ``G_s`` is identically zero.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import mpmath
import numpy as np

from scipy.optimize import minimize_scalar

from ._errors import DegenerateIdentity, DomainError, NoConvergence
from .problem import (
    MultiTermProblem,
    cexpm1,
    clog1p,
    cospi,
    k_pair,
    linear_symbol,
    root_g,
    sinpi,
)
from .quadrature import (
    QuadratureConfig,
    QuadratureResult,
    integrate_interval,
    integrate_oscillatory,
    inverse_laplace_oracle,
)

__all__ = [
    "KINDS",
    "KernelValue",
    "KernelField",
    "Atom",
    "propagation_w",
    "signaling_Gs",
    "cauchy_Gc",
    "pdf_phi",
    "pdf_psi",
    "kernel_value",
    "kernel_field",
    "atoms",
    "support_end",
    "laplace_transform",
    "laplace_cross_check",
    "LaplaceCheck",
    "normalization",
    "NormalizationResult",
]

KINDS = ("propagation_w", "dw_dt", "minus_dw_dx", "G_c", "G_s", "phi", "psi")

# kinds whose first coordinate is the spatial variable at fixed time
_SPACE_KINDS = ("propagation_w", "dw_dt", "minus_dw_dx", "G_c", "G_s")


@dataclass(frozen=True)
class KernelValue:
    """A kernel value with its quadrature diagnostics."""

    value: float
    error_estimate: float
    truncation_point: float
    method: str
    low_confidence: bool = False
    log_value: float | None = None

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class Atom:
    """Point mass ``mass`` at ``location`` carried by a kernel."""

    location: float
    mass: float


def _default_config(config):
    return config if config is not None else QuadratureConfig()


def _front(p: MultiTermProblem, density: str):
    """Linear-part data ``(kappa, h_inf)`` or ``None`` when the symbol is sublinear.

    ``phi`` at ``alpha = 2`` and ``psi`` always have symbols ``kappa i r + o(r)``:
    the kernel vanishes beyond ``kappa y = t``.  ``h_inf`` is the limit of the
    real part (finite only with a single lower term of order ``alpha - 1``,
    or none at all), and then the front carries a point mass.
    """
    if density == "phi" and p.alpha != 2.0:
        return None
    kappa = p.c ** (1.0 / p.alpha)
    if p.m == 0:
        return kappa, 0.0
    if p.m == 1 and math.isclose(p.terms[0][0], p.alpha - 1.0, rel_tol=0.0, abs_tol=1e-12):
        return kappa, kappa * p.terms[0][1] / (p.alpha * p.c)
    return kappa, None


def _singular_exponent(p: MultiTermProblem, form: str, density: str) -> float:
    if form == "cos":
        return 1.0
    if density == "psi":
        return p.alpha_min / p.alpha
    return p.alpha_min / 2.0


def _real_axis(p, form, density, y, t, cfg, subtract_front):
    """Real-axis integral of the requested form (without the ``1/pi``).

    ``form`` is ``"sin"`` (w without the 1/2), ``"cos"`` (G_s) or ``"pdf"``
    (phi / psi).  ``y`` is the coordinate multiplying the symbol.  Symbols
    with a linear part are split as ``kappa i r + (L+ + i D-)`` so that the
    phase ``(t - kappa y) r - y D-`` is formed without cancellation near the
    front.
    """
    front = _front(p, density)
    if front is None:
        def parts(r):
            kp, km = k_pair(p, r)
            return kp, km, r * t - y * km, None, None
        subtract = False
    else:
        kappa, h_inf = front
        a_front = t - kappa * y
        subtract = subtract_front and h_inf is not None

        def parts(r):
            lp, dm, _, excess = linear_symbol(p, r)
            return lp, kappa * r + dm, a_front * r - y * dm, dm, excess

    def f(r):
        kp, km, th, dm, excess = parts(r)
        e = np.exp(-y * kp)
        if not subtract:
            if form == "sin":
                return e * np.sin(th) / r
            if form == "cos":
                return e * np.cos(th)
            return e * (kp * np.sin(th) + km * np.cos(th)) / r
        # remove the asymptote e^{-y h} kappa^k cos(a r) in a cancellation-free form
        eh = math.exp(-y * h_inf)
        # kp - h_inf equals the excess when the front carries an atom
        de = eh * np.expm1(-y * excess)
        dcos = -2.0 * np.sin(0.5 * (th + a_front * r)) * np.sin(-0.5 * y * dm)
        reg = de * np.cos(th) + eh * dcos
        if form == "cos":
            return reg
        return e * (kp * np.sin(th) + dm * np.cos(th)) / r + kappa * reg

    def phase(r):
        return parts(r)[2]

    def damping(r):
        return y * parts(r)[0]

    return integrate_oscillatory(
        f,
        phase,
        damping if y > 0 else None,
        cfg,
        scale=1.0 / max(t, 1e-300),
        singular_exponent=_singular_exponent(p, form, density),
    )


# Real-axis values below this are recomputed on the saddle-point line, which
# keeps relative accuracy deep in the tails (alpha < 2 only).
TAIL_SWITCH = 1e-8
SADDLE_BOUND = -10.0


def _saddle(p, form, density, y, t, cfg):
    """Log of the kernel from the Bromwich integral through the real saddle.

    The Laplace transform in ``t`` is ``F(s) = weight(s) exp(-y root(s))``
    with ``root = g^{1/2}`` (or ``g^{1/alpha}`` for psi) and ``weight`` one of
    ``1/s``, ``1``, ``root/s``.  ``F`` transforms a non-negative kernel, so on
    ``Re s = sigma`` the modulus of ``e^{st} F(s)`` peaks at the real point.
    Choosing ``sigma`` to minimise ``e^{sigma t} F(sigma)`` and factoring that
    value out leaves a bounded, rapidly damped line integral.  All
    differences ``root(sigma + iv) - root(sigma)`` are formed from
    ``log1p(iv / sigma)`` so that ``sigma`` may be astronomically large.
    """
    power = 1.0 / p.alpha if density == "psi" else 0.5
    base = p.alpha if density == "psi" else p.alpha_min
    exps = np.array([o - base for o in p.orders])
    coefs = p.coeffs
    lead = base * power

    def root_real(sig):
        return sig ** lead * float(np.sum(coefs * sig ** exps)) ** power

    def log_weight(sig, rt):
        if form == "sin":
            return -math.log(sig)
        if form == "cos":
            return 0.0
        return math.log(rt) - math.log(sig)

    def log_bound(u):
        sig = math.exp(u)
        rt = root_real(sig)
        return sig * t - y * rt + log_weight(sig, rt)

    u0 = -math.log(t)
    try:
        res = minimize_scalar(log_bound, bracket=(u0 - 1.0, u0 + 1.0), tol=1e-12)
        sigma = math.exp(res.x)
        h0 = log_bound(res.x)
    except OverflowError:
        return -math.inf, 0.0, None
    if not math.isfinite(h0) or not math.isfinite(sigma):
        return -math.inf, 0.0, None
    if h0 > SADDLE_BOUND:
        # the bound is not small: the value is algebraically, not exponentially,
        # small and the real-axis result stands
        return None, None, None
    r0 = root_real(sigma)
    rest0 = float(np.sum(coefs * sigma ** exps))

    def pieces(v):
        v = np.asarray(v, dtype=float)
        ell = clog1p(1j * v / sigma)
        drest = np.zeros(v.shape, dtype=complex)
        for ck, ek in zip(coefs, exps):
            drest = drest + ck * sigma ** ek * cexpm1(ek * ell)
        rho = lead * ell + power * clog1p(drest / rest0)
        diff = r0 * cexpm1(rho)
        if form == "sin":
            wexp = -ell
        elif form == "cos":
            wexp = 0.0 * ell
        else:
            wexp = rho - ell
        return diff, wexp

    def integrand(v):
        diff, wexp = pieces(v)
        ex = -y * diff + wexp
        return np.exp(ex.real) * np.cos(v * t + ex.imag)

    def phase(v):
        diff, wexp = pieces(v)
        return v * t + (-y * diff + wexp).imag

    def damping(v):
        diff, wexp = pieces(v)
        return (y * diff - wexp).real

    # analytic second derivative of the log-bound at sigma
    rs = float(np.sum(coefs * sigma ** exps))
    r1 = float(np.sum(coefs * exps * sigma ** (exps - 1.0)))
    r2 = float(np.sum(coefs * exps * (exps - 1.0) * sigma ** (exps - 2.0)))
    dlog = lead / sigma + power * r1 / rs
    d2log = -lead / sigma ** 2 + power * (r2 / rs - (r1 / rs) ** 2)
    curv = -y * r0 * (dlog ** 2 + d2log)
    if form == "sin":
        curv += 1.0 / sigma ** 2
    elif form == "pdf":
        curv += d2log + 1.0 / sigma ** 2
    width = 1.0 / math.sqrt(max(curv, 1e-300))
    # the phase v t + Im(...) cancels terms of size ~ v t, leaving pointwise
    # noise ~ eps t v over a peak of width ~ width
    noise = 1e3 * np.finfo(float).eps * max(1.0, t * width)
    if noise > 1e-6:
        if not curv > 0:
            # no interior saddle (for example at a support end)
            return None, None, None
        # Laplace's method; relative error O(1 / |h0|), far below the noise
        log_value = h0 - 0.5 * math.log(2.0 * math.pi * curv)
        return log_value, 1.0 / max(abs(h0), 1.0), None
    rel = max(1e-12, noise)
    sub = cfg.replace(abs_tol=rel * width, rel_tol=rel)
    integral = integrate_oscillatory(integrand, phase, damping, sub, scale=width,
                                     singular_exponent=1.0)
    if not integral.value > 0:
        raise NoConvergence(f"saddle-line integral is not positive ({integral.value:.3g})")
    log_value = h0 + math.log(integral.value / math.pi)
    return log_value, integral.error_estimate / integral.value, integral


def _cut_root(p, rho, density):
    """``g(rho e^{i pi})^{power}`` continued from the upper half-plane."""
    power = 1.0 / p.alpha if density == "psi" else 0.5
    rho = np.asarray(rho, dtype=float)
    z = np.zeros(rho.shape, dtype=complex)
    for aj, cj in zip(p.orders[1:], p.coeffs[1:]):
        d = aj - p.alpha
        # e^{i pi d} with d in [-1, 0): imaginary part is never positive
        z = z + (cj / p.c) * rho ** d * complex(cospi(d), min(sinpi(d), -0.0))
    one = 1.0 + z
    arg = p.alpha * math.pi + np.angle(one)
    mod = p.c ** power * rho ** (p.alpha * power) * np.abs(one) ** power
    return mod * np.exp(1j * power * arg)


def _cut_growth(p, density, y, t):
    rho = np.geomspace(1e-12, 1e12, 481) / t
    return float(np.max(-rho * t - y * _cut_root(p, rho, density).real))


def _branch_cut(p, form, density, y, t, cfg):
    """Kernel as a Laplace-type integral along the branch cut of ``g``.

    For ``alpha < 2`` the Bromwich contour of ``F(s) = weight(s) exp(-y root(s))``
    may be collapsed onto the negative axis, giving

        f(t) = -1/pi int_0^inf e^{-rho t} Im F(rho e^{i pi}) d rho,

    which is not oscillatory and is well conditioned once ``e^{-rho t}``
    dominates ``|exp(-y root)|`` everywhere on the cut.  Only the weights
    ``1`` (``form="cos"``) and ``root/s`` (``form="pdf"``) are supported;
    ``1/s`` would add the residue at the origin.
    """
    def integrand(rho):
        rho = np.asarray(rho, dtype=float)
        root = _cut_root(p, rho, density)
        val = np.exp(-rho * t - y * root)
        if form == "pdf":
            val = val * root / (-rho)
        return -np.imag(val)

    def damping(rho):
        return np.asarray(rho, dtype=float) * t

    power = 1.0 / p.alpha if density == "psi" else 0.5
    low = p.alpha_min * power
    sing = 1.0 + low if form == "cos" else low
    return integrate_oscillatory(integrand, None, damping, cfg, scale=1.0 / t,
                                 singular_exponent=sing)


CUT_GROWTH = 1.0


def _tail_refine(p, form, density, y, t, cfg, kv: KernelValue) -> KernelValue:
    if p.alpha == 2.0 or y <= 0 or abs(kv.value) >= TAIL_SWITCH:
        return kv
    log_value, rel_err, res = _saddle(p, form, density, y, t, cfg)
    if log_value is None:
        return kv
    if log_value == -math.inf:
        # the saddle lies beyond double range: the kernel is below exp(-1e300)
        return KernelValue(0.0, 0.0, math.inf, "underflow", False, -math.inf)
    value = math.exp(log_value) if log_value > -745.0 else 0.0
    if res is None:
        return KernelValue(value, value * rel_err, math.inf, "saddle-laplace", False, log_value)
    return KernelValue(value, value * rel_err, res.truncation_point, "saddle",
                       False, log_value)


def _pack(res: QuadratureResult, value: float, cfg, scale=1.0 / math.pi) -> KernelValue:
    err = res.error_estimate * scale
    low = res.method == "acceleration" and err > 10.0 * cfg.abs_tol
    return KernelValue(value, err, res.truncation_point, res.method, low)


def _check_positive(name, value, allow_zero=False):
    value = float(value)
    ok = value >= 0 if allow_zero else value > 0
    if not (ok and math.isfinite(value)):
        raise DomainError(f"{name}={value} must be {'non-negative' if allow_zero else 'positive'}")
    return value


def _beyond_front(p: MultiTermProblem, y: float, t: float, density: str = "phi") -> bool:
    front = _front(p, density)
    if front is None:
        return False
    # psi has no density at its support end; any atom there is listed by atoms()
    return front[0] * y >= t if density == "psi" else front[0] * y > t


# -- scalar kernels -------------------------------------------------------------

def propagation_w(p: MultiTermProblem, x: float, t: float, config=None, *,
                  wavefront_cutoff: bool = True, full: bool = False):
    """Propagation function ``w(x, t)``.

    Parameters
    ----------
    p : MultiTermProblem
    x, t : float
        Positive space and time coordinates.
    config : QuadratureConfig, optional
    wavefront_cutoff : bool
        For ``alpha = 2`` return exactly zero beyond the front
        ``x > t / sqrt(c)``.  Disable to evaluate the integral there.
    full : bool
        Return a :class:`KernelValue` instead of a float.
    """
    x = _check_positive("x", x)
    t = _check_positive("t", t)
    cfg = _default_config(config)
    if wavefront_cutoff and _beyond_front(p, x, t):
        out = KernelValue(0.0, 0.0, 0.0, "cutoff")
    else:
        res = _real_axis(p, "sin", "phi", x, t, cfg, False)
        out = _pack(res, 0.5 + res.value / math.pi, cfg)
        out = _tail_refine(p, "sin", "phi", x, t, cfg, out)
    return out if full else out.value


def signaling_Gs(p: MultiTermProblem, x: float, t: float, config=None, *,
                 wavefront_cutoff: bool = True, full: bool = False):
    """Signalling fundamental solution ``G_s(x, t) = w_t(x, t)``.

    Differentiating the ``w`` integrand in ``t`` cancels the ``1/r`` weight and
    turns ``sin`` into ``cos``.  For the wave and telegraph symbols the point
    mass on ``t = sqrt(c) x`` is excluded (see :func:`atoms`).
    """
    x = _check_positive("x", x)
    t = _check_positive("t", t)
    cfg = _default_config(config)
    if wavefront_cutoff and _beyond_front(p, x, t):
        out = KernelValue(0.0, 0.0, 0.0, "cutoff")
    elif p.is_wave:
        out = KernelValue(0.0, 0.0, 0.0, "exact")
    elif p.alpha < 2.0 and _cut_growth(p, "phi", x, t) <= CUT_GROWTH:
        res = _branch_cut(p, "cos", "phi", x, t, cfg)
        out = _pack(res, res.value / math.pi, cfg)
        out = KernelValue(out.value, out.error_estimate, out.truncation_point, "branch-cut")
    else:
        res = _real_axis(p, "cos", "phi", x, t, cfg, True)
        out = _pack(res, res.value / math.pi, cfg)
        out = _tail_refine(p, "cos", "phi", x, t, cfg, out)
    return out if full else out.value


def pdf_phi(p: MultiTermProblem, t: float, tau: float, config=None, *,
            wavefront_cutoff: bool = True, full: bool = False):
    """Subordination density ``phi(t, tau)`` of the cosine family.

    ``tau = 0`` is allowed and gives the limit value.  For the wave and
    telegraph symbols the returned value is the density of the absolutely
    continuous part; the atom at ``tau = t / sqrt(c)`` is reported by
    :func:`atoms`.
    """
    t = _check_positive("t", t)
    tau = _check_positive("tau", tau, allow_zero=True)
    cfg = _default_config(config)
    if wavefront_cutoff and _beyond_front(p, tau, t):
        out = KernelValue(0.0, 0.0, 0.0, "cutoff")
    elif p.is_wave:
        out = KernelValue(0.0, 0.0, 0.0, "exact")
    else:
        res = _real_axis(p, "pdf", "phi", tau, t, cfg, True)
        out = _pack(res, res.value / math.pi, cfg)
        out = _tail_refine(p, "pdf", "phi", tau, t, cfg, out)
    return out if full else out.value


def cauchy_Gc(p: MultiTermProblem, x: float, t: float, config=None, *, full: bool = False):
    """Cauchy fundamental solution ``G_c(x, t) = phi(t, |x|) / 2``; even in ``x``."""
    x = float(x)
    if x == 0.0:
        raise DomainError("G_c is evaluated for x != 0")
    v = pdf_phi(p, t, abs(x), config, full=True)
    log_half = None if v.log_value is None else v.log_value - math.log(2.0)
    out = KernelValue(0.5 * v.value, 0.5 * v.error_estimate, v.truncation_point,
                      v.method, v.low_confidence, log_half)
    return out if full else out.value


def pdf_psi(p: MultiTermProblem, t: float, tau: float, config=None, *, full: bool = False):
    """Subordination density ``psi(t, tau)`` relating the problem to ``S_alpha``.

    Raises
    ------
    DegenerateIdentity
        For ``m = 0``: ``g^{1/alpha} = c^{1/alpha} s`` and ``psi`` is the point
        mass at ``tau = t / c^{1/alpha}``, which has no density.
    """
    t = _check_positive("t", t)
    tau = _check_positive("tau", tau, allow_zero=True)
    if p.m == 0:
        raise DegenerateIdentity(
            "psi is a point mass for a single-term problem",
            location=t / p.c ** (1.0 / p.alpha),
        )
    cfg = _default_config(config)
    if _beyond_front(p, tau, t, "psi"):
        out = KernelValue(0.0, 0.0, 0.0, "cutoff")
    else:
        res = _real_axis(p, "pdf", "psi", tau, t, cfg, True)
        out = _pack(res, res.value / math.pi, cfg)
        out = _tail_refine(p, "pdf", "psi", tau, t, cfg, out)
    return out if full else out.value


def atoms(p: MultiTermProblem, kind: str, fixed: float) -> list[Atom]:
    """Point masses carried by ``kind`` at the fixed coordinate.

    ``fixed`` is ``t`` for ``phi``, ``psi``, ``G_c`` and ``minus_dw_dx`` and
    ``x`` for ``G_s`` / ``dw_dt``.  ``phi``, ``G_c`` and ``G_s`` have atoms
    only for the wave and telegraph symbols; ``G_c`` splits its atom evenly
    between ``x = +-t / sqrt(c)``.  ``psi`` has one at ``tau = t / c^{1/alpha}``
    when the single lower order equals ``alpha - 1``.
    """
    _check_kind(kind)
    if kind == "propagation_w":
        return []
    if kind == "psi":
        if p.m == 0:
            raise DegenerateIdentity("psi is a point mass for a single-term problem",
                                     location=fixed / p.c ** (1.0 / p.alpha))
        kappa, h_inf = _front(p, "psi")
        if h_inf is None:
            return []
        return [Atom(fixed / kappa, math.exp(-fixed / kappa * h_inf))]
    if not p.has_wavefront:
        return []
    sc = math.sqrt(p.c)
    if kind in ("G_s", "dw_dt"):
        return [Atom(sc * fixed, math.exp(-fixed * p.front_decay))]
    mass = p.front_mass(fixed)
    if kind == "G_c":
        return [Atom(-fixed / sc, 0.5 * mass), Atom(fixed / sc, 0.5 * mass)]
    return [Atom(fixed / sc, mass)]


def _check_kind(kind):
    if kind not in KINDS:
        raise ValueError(f"unknown kernel kind {kind!r}; expected one of {KINDS}")


def kernel_value(p: MultiTermProblem, kind: str, coord: float, fixed: float, config=None,
                 **kwargs) -> KernelValue:
    """Evaluate ``kind`` at ``coord`` with the other variable held at ``fixed``.

    Space kinds (``propagation_w``, ``dw_dt``, ``G_s``, ``minus_dw_dx``,
    ``G_c``) take ``coord = x`` at ``fixed = t``, except ``G_s`` / ``dw_dt``
    whose natural slice is ``coord = t`` at ``fixed = x``.  ``phi`` and
    ``psi`` take ``coord = tau`` at ``fixed = t``.
    """
    _check_kind(kind)
    if kind == "propagation_w":
        return propagation_w(p, coord, fixed, config, full=True, **kwargs)
    if kind in ("G_s", "dw_dt"):
        return signaling_Gs(p, fixed, coord, config, full=True, **kwargs)
    if kind in ("phi", "minus_dw_dx"):
        return pdf_phi(p, fixed, coord, config, full=True, **kwargs)
    if kind == "G_c":
        return cauchy_Gc(p, coord, fixed, config, full=True)
    return pdf_psi(p, fixed, coord, config, full=True)


# -- batched fields --------------------------------------------------------------

@dataclass
class KernelField:
    """Kernel samples along one coordinate at a fixed value of the other.

    Attributes
    ----------
    kind : str
    problem : MultiTermProblem
    fixed : float
        The held coordinate (see :func:`kernel_value`).
    grid, values, errors, truncation : ndarray
        Sample coordinates and per-point quadrature diagnostics.
    config : QuadratureConfig
    """

    kind: str
    problem: MultiTermProblem
    fixed: float
    grid: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    truncation: np.ndarray
    config: QuadratureConfig
    atoms: list = field(default_factory=list)

    @property
    def coordinate_name(self) -> str:
        if self.kind in ("G_s", "dw_dt"):
            return "t"
        if self.kind in ("phi", "psi"):
            return "tau"
        return "x"

    @property
    def fixed_name(self) -> str:
        return "x" if self.kind in ("G_s", "dw_dt") else "t"

    def provenance(self) -> dict:
        return {
            "kind": self.kind,
            "problem": self.problem.to_dict(),
            self.fixed_name: self.fixed,
            "quadrature": self.config.to_dict(),
            "atoms": [[a.location, a.mass] for a in self.atoms],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, val in self.provenance().items():
            buf.write(f"# {key}: {json.dumps(val, sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.coordinate_name, "value", "error_estimate"])
        for g, v, e in zip(self.grid, self.values, self.errors):
            w.writerow(["%.17g" % g, "%.17g" % v, "%.17g" % e])
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "provenance": self.provenance(),
            self.coordinate_name: self.grid.tolist(),
            "value": self.values.tolist(),
            "error_estimate": self.errors.tolist(),
            "truncation_point": self.truncation.tolist(),
        }
        return json.dumps(payload, indent=1, sort_keys=True)


def kernel_field(p: MultiTermProblem, kind: str, grid, fixed: float, config=None,
                 **kwargs) -> KernelField:
    """Evaluate ``kind`` on a strictly increasing ``grid`` at ``fixed``."""
    _check_kind(kind)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-d array")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    cfg = _default_config(config)
    vals = [kernel_value(p, kind, float(g), fixed, cfg, **kwargs) for g in grid]
    try:
        at = atoms(p, kind, fixed)
    except DegenerateIdentity:
        at = []
    return KernelField(
        kind=kind,
        problem=p,
        fixed=float(fixed),
        grid=grid,
        values=np.array([v.value for v in vals]),
        errors=np.array([v.error_estimate for v in vals]),
        truncation=np.array([v.truncation_point for v in vals]),
        config=cfg,
        atoms=at,
    )


# -- Laplace-domain counterparts -------------------------------------------------

def laplace_transform(p: MultiTermProblem, kind: str, coord: float) -> Callable:
    """Closed-form Laplace transform in ``t`` of ``kind`` at the given coordinate.

    The returned callable accepts mpmath complex ``s``.  Transforms include the
    wavefront atoms, so inversions agree with the real-axis values only away
    from the front.
    """
    _check_kind(kind)
    y = mpmath.mpf(coord)
    if kind == "propagation_w":
        return lambda s: mpmath.exp(-y * root_g(p, s, 0.5)) / s
    if kind in ("G_s", "dw_dt"):
        return lambda s: mpmath.exp(-y * root_g(p, s, 0.5))
    if kind in ("phi", "minus_dw_dx", "G_c"):
        half = mpmath.mpf(1) / 2 if kind == "G_c" else 1

        def phi_hat(s):
            root = root_g(p, s, 0.5)
            return half * root / s * mpmath.exp(-abs(y) * root)
        return phi_hat
    if p.m == 0:
        raise DegenerateIdentity("psi is a point mass for a single-term problem")
    power = mpmath.mpf(1) / mpmath.mpf(p.alpha)

    def psi_hat(s):
        root = root_g(p, s, power)
        return root / s * mpmath.exp(-y * root)
    return psi_hat


@dataclass(frozen=True)
class LaplaceCheck:
    kind: str
    coord: float
    t: float
    real_axis: float
    contour: float
    discrepancy: float
    error_estimate: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def laplace_cross_check(p: MultiTermProblem, kind: str, coord: float, t: float,
                        config=None) -> LaplaceCheck:
    """Compare the real-axis value of ``kind`` with a Talbot inversion.

    ``coord`` is ``x`` for the space kinds and ``tau`` for ``phi`` / ``psi``;
    the inversion variable is always ``t``.
    """
    cfg = _default_config(config)
    if kind in ("G_s", "dw_dt"):
        kv = signaling_Gs(p, coord, t, cfg, full=True)
    else:
        kv = kernel_value(p, kind, coord, t, cfg)
    contour = inverse_laplace_oracle(laplace_transform(p, kind, coord), t, cfg)
    return LaplaceCheck(kind, float(coord), float(t), kv.value, contour,
                        abs(kv.value - contour), kv.error_estimate)


# -- normalizations --------------------------------------------------------------

@dataclass(frozen=True)
class NormalizationResult:
    kind: str
    fixed: float
    total: float
    continuous_part: float
    atom_mass: float
    error_estimate: float
    evaluations: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _density_tail_end(f, start, scale, floor):
    """Doubling search for a point beyond which ``f`` is below ``floor``."""
    b = max(start, scale)
    for _ in range(60):
        vals = [abs(f(b * u)) for u in (1.0, 1.25, 1.5)]
        if max(vals) < floor:
            return b
        b *= 2.0
    raise NoConvergence("density does not decay on the searched range")


def support_end(p: MultiTermProblem, kind: str, t: float, config=None, *,
                floor: float = 1e-12, density: Callable | None = None) -> float:
    """Right end of the (numerical) support of ``phi(t, .)`` or ``psi(t, .)``.

    Exact for finite support (``psi``; ``phi`` with ``alpha = 2``); otherwise
    the first point of a doubling search, started at the tau scale
    ``1 / sqrt(g(1/t))``, beyond which the density stays below ``floor``.
    """
    t = _check_positive("t", t)
    if kind == "psi":
        return t / p.c ** (1.0 / p.alpha)
    if kind not in ("phi", "G_c", "minus_dw_dx"):
        raise ValueError(f"{kind} has no tau support")
    if p.alpha == 2.0:
        return t / math.sqrt(p.c)
    cfg = _default_config(config)
    if density is None:
        def density(u):
            return pdf_phi(p, t, u, cfg)
    scale = 1.0 / math.sqrt(abs(complex(root_g(p, complex(1.0 / t), 1.0))))
    return _density_tail_end(density, scale, scale, floor)


def normalization(p: MultiTermProblem, kind: str, fixed: float, config=None, *,
                  tol: float = 1e-9) -> NormalizationResult:
    """Total mass of ``phi``, ``psi``, ``G_c`` (over x) or ``G_s`` (over t).

    Integrates the continuous density by adaptive quadrature and adds the
    atoms.  ``phi``/``psi``/``G_c`` decay faster than any exponential in the
    integration variable, so the range is cut where the density falls below
    ``tol`` times its scale.  ``G_s`` decays only algebraically in ``t``
    (``~ t^{-1-alpha_m/2}``), so its tail beyond ``T`` is mapped to a finite
    interval by ``t = T u^{-1/sigma}``.
    """
    _check_kind(kind)
    cfg = _default_config(config)
    count = [0]
    fixed = float(fixed)

    if kind in ("G_s", "dw_dt"):
        return _normalization_gs(p, fixed, cfg, tol)

    if kind == "G_c":
        def dens(u):
            count[0] += 1
            return 2.0 * cauchy_Gc(p, u, fixed, cfg) if u > 0 else pdf_phi(p, fixed, 0.0, cfg)
    elif kind in ("phi", "minus_dw_dx"):
        def dens(u):
            count[0] += 1
            return pdf_phi(p, fixed, u, cfg)
    elif kind == "psi":
        def dens(u):
            count[0] += 1
            return pdf_psi(p, fixed, u, cfg)
    else:
        raise ValueError(f"{kind} is not a density")

    at = atoms(p, kind, fixed)
    mass = sum(a.mass for a in at)
    end = support_end(p, "psi" if kind == "psi" else "phi", fixed, cfg, floor=tol * 1e-3,
                      density=dens)
    vec = np.vectorize(dens, otypes=[float])
    brk = [end * f for f in (0.125, 0.25, 0.5) if end * f > 0]
    res = integrate_interval(vec, 0.0, end, breakpoints=brk, tol=tol)
    return NormalizationResult(kind, fixed, res.value + mass, res.value, mass,
                               res.error_estimate, count[0])


def _normalization_gs(p, x, cfg, tol):
    count = [0]

    def dens(t, c=cfg):
        count[0] += 1
        return signaling_Gs(p, x, t, c)

    vec = np.vectorize(dens, otypes=[float])
    sc = math.sqrt(p.c)
    start = sc * x if p.alpha == 2.0 else 0.0
    at = atoms(p, "G_s", x)
    mass = sum(a.mass for a in at)
    # body: up to a time where the front has passed by a wide margin
    big_t = max(8.0 * (sc * x + 1.0), 16.0 * x * x)
    brk = [start + (big_t - start) * f for f in (1 / 64, 1 / 16, 1 / 4)]
    body = integrate_interval(vec, start, big_t, breakpoints=brk, tol=tol)
    # the long-time tail decays like t^{-1-sigma}, governed by the lowest order
    sigma = p.alpha_min / 2.0
    g_big = abs(dens(big_t))

    def mapped(u):
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        for i in np.nonzero(u > 0)[0]:
            tt = big_t * u[i] ** (-1.0 / sigma)
            # absolute accuracy must follow the algebraic decay of G_s
            expect = g_big * u[i] ** (1.0 + 1.0 / sigma)
            # floor: partial sums oscillate with amplitude ~ 1/t, so roundoff
            # limits the attainable absolute accuracy to ~ eps / t
            floor = 1e2 * np.finfo(float).eps / tt
            c = cfg.replace(abs_tol=min(cfg.abs_tol, max(1e-3 * tol * expect, floor)))
            out[i] = dens(tt, c) * big_t / sigma * u[i] ** (-1.0 / sigma - 1.0)
        return out

    tail = integrate_interval(mapped, 0.0, 1.0, breakpoints=[0.25, 0.5], tol=tol)
    cont = body.value + tail.value
    return NormalizationResult("G_s", x, cont + mass, cont, mass,
                               body.error_estimate + tail.error_estimate, count[0])
