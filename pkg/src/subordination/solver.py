"""Subordinated solvers on the line and on the unit interval.

For ``A = d^2/dx^2`` the cosine family is d'Alembert's formula and the
solution operator of the multi-term problem is

    S(t) v = int_0^inf phi(t, tau) S_2(tau) v d tau.

On the line this is a convolution with ``G_c``.  On ``(0, 1)`` with Dirichlet
conditions the eigenfunctions ``sqrt(2) sin(n pi x)`` (``lambda_n = n^2 pi^2``)
diagonalise ``S_2``, and each mode evolves as

    u_n(t) = int_0^inf phi(t, tau) cos(sqrt(lambda_n) tau) d tau.

Both uses need ``phi(t, .)`` at many ``tau`` for one ``t``; :class:`PhiProfile`
builds it once as a piecewise Chebyshev interpolant and every integral
against it is then cheap.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial.legendre import leggauss
from scipy.fft import dct
from scipy.special import gamma

from ._errors import DomainError, GridTooCoarse, NoConvergence
from .kernels import atoms, pdf_phi, pdf_psi, support_end
from .problem import MultiTermProblem
from .quadrature import QuadratureConfig, integrate_interval
from .wright import single_term_kernel

__all__ = [
    "PhiProfile",
    "phi_profile",
    "density_profile",
    "dalembert",
    "LineProblem",
    "SolutionField",
    "solve_line",
    "line_solution",
    "EigenExpansion",
    "eigenmode",
    "eigenmodes",
    "telegraph_mode",
    "solve_interval",
    "sine_coefficients",
    "caputo_derivative",
    "CaputoResidual",
    "caputo_residual",
    "composed_phi",
]

_MAX_NODES = 128
_MAX_DEPTH = 10


def _default_config(config):
    return config if config is not None else QuadratureConfig()


# -- phi(t, .) as an interpolant ---------------------------------------------------

@dataclass
class PhiProfile:
    """Piecewise Chebyshev representation of ``tau -> phi(t, tau)``.

    ``panels`` holds ``(a, b, coefficients)``; ``atom`` is the point mass at
    the front (wave and telegraph only), ``(location, mass)`` or ``None``.
    """

    t: float
    end: float
    panels: list
    atom: tuple | None
    evaluations: int

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        out = np.zeros_like(tau)
        for a, b, coef in self.panels:
            sel = (tau >= a) & (tau <= b)
            if np.any(sel):
                out[sel] = C.chebval((2.0 * tau[sel] - a - b) / (b - a), coef)
        return out

    def integrate(self, weight: Callable[[np.ndarray], np.ndarray], frequency: float = 0.0):
        """``int phi(t, tau) weight(tau) d tau`` plus the atom contribution.

        ``frequency`` is the largest angular frequency in ``weight``; the
        Gauss rule on each panel is sized to resolve it.
        """
        total = 0.0
        for a, b, coef in self.panels:
            n = 40 + 2 * int(math.ceil(frequency * (b - a)))
            x, w = leggauss(n)
            tau = 0.5 * (b - a) * x + 0.5 * (a + b)
            total += 0.5 * (b - a) * float(np.sum(w * C.chebval(x, coef) * weight(tau)))
        if self.atom is not None:
            total += self.atom[1] * float(np.asarray(weight(np.array([self.atom[0]])))[0])
        return total


def _lobatto_coefficients(vals):
    """Chebyshev coefficients from samples at ``cos(pi j / n)``, ``j = 0..n``."""
    n = vals.size - 1
    c = dct(vals, type=1) / n
    c[0] *= 0.5
    c[-1] *= 0.5
    return c


def _fit_panel(f, a, b, tol, scale):
    """Nested Chebyshev-Lobatto fit of ``f`` on ``[a, b]``; ``None`` if unresolved."""
    def at(j, n):
        return 0.5 * (b - a) * np.cos(np.pi * j / n) + 0.5 * (a + b)

    n = 16
    vals = f(at(np.arange(n + 1), n))
    while True:
        coef = _lobatto_coefficients(vals)
        ref = max(scale, float(np.max(np.abs(vals))))
        if float(np.max(np.abs(coef[-3:]))) <= tol * ref:
            return coef
        if n >= _MAX_NODES:
            return None
        # doubling reuses every old node
        new = f(at(np.arange(1, 2 * n, 2), 2 * n))
        merged = np.empty(2 * n + 1)
        merged[0::2] = vals
        merged[1::2] = new
        vals, n = merged, 2 * n


def phi_profile(p: MultiTermProblem, t: float, config=None, *, tol: float = 1e-10) -> PhiProfile:
    """Tabulate ``phi(t, .)`` on its (numerical) support.

    Each panel is sampled on nested Chebyshev-Lobatto grids (17, 33, ...
    nodes) until the trailing coefficients fall below ``tol`` times the
    largest value of ``phi``; unresolved panels are bisected.
    """
    if p.is_wave:
        raise DomainError("the classical wave has no density; phi is the point mass at tau = t")
    return density_profile(p, t, config, kind="phi", tol=tol)


def density_profile(p: MultiTermProblem, t: float, config=None, *, kind: str = "phi",
                    tol: float = 1e-10) -> PhiProfile:
    """Chebyshev profile of ``phi(t, .)`` or ``psi(t, .)``; see :func:`phi_profile`."""
    if kind not in ("phi", "psi"):
        raise ValueError("kind must be 'phi' or 'psi'")
    cfg = _default_config(config)
    count = [0]
    kernel = pdf_phi if kind == "phi" else pdf_psi

    end = support_end(p, kind, t, cfg, floor=tol * 1e-2)
    # the regular part may jump at a finite end; sample its left limit there
    finite = kind == "psi" or p.alpha == 2.0
    last = end * (1.0 - 1e-13) if finite else end

    def f(tau):
        tau = np.minimum(np.atleast_1d(tau), last)
        count[0] += tau.size
        return np.array([kernel(p, t, float(u), cfg) for u in tau])

    at = atoms(p, kind, t)
    atom = (at[0].location, at[0].mass) if at else None

    scale = float(np.max(np.abs(f(np.linspace(0.0, end, 9)))))
    stack = [(0.0, end, 0)]
    panels = []
    while stack:
        a, b, depth = stack.pop()
        coef = _fit_panel(f, a, b, tol, scale)
        if coef is not None:
            panels.append((a, b, coef))
        elif depth >= _MAX_DEPTH:
            raise NoConvergence(f"{kind}({t:g}, .) is not resolved on [{a:.3g}, {b:.3g}]")
        else:
            mid = 0.5 * (a + b)
            stack.append((mid, b, depth + 1))
            stack.append((a, mid, depth + 1))
    panels.sort(key=lambda q: q[0])
    return PhiProfile(float(t), float(end), panels, atom, count[0])


def composed_phi(p: MultiTermProblem, t: float, tau, config=None, *,
                 profile: PhiProfile | None = None) -> np.ndarray:
    """``phi(t, tau)`` rebuilt from ``psi`` and the single-term kernel.

    ``int psi(t, sigma) sigma^{-alpha/2} Phi_{alpha/2}(tau sigma^{-alpha/2}) d sigma``
    over the finite support of ``psi``, plus the contribution of its atom.
    Independent of :func:`pdf_phi` except through the shared quadrature core.
    ``tau`` may be an array; one ``psi`` profile serves all entries.
    """
    alpha = p.alpha
    if not 1.0 < alpha < 2.0:
        raise DomainError("the composition needs 1 < alpha < 2")
    prof = profile if profile is not None else density_profile(p, t, config, kind="psi")
    taus = np.atleast_1d(np.asarray(tau, dtype=float))

    def weight(sig, tau_i):
        sig = np.asarray(sig, dtype=float)
        out = np.zeros_like(sig)
        pos = sig > 0
        out[pos] = [single_term_kernel(alpha, float(s), tau_i) for s in sig[pos]]
        return out

    # the inner kernel switches on steeply, so integrate adaptively against
    # the (cheap) interpolant instead of a fixed rule per panel
    brk = [a for a, _, _ in prof.panels[1:]]
    vals = []
    for q in taus:
        res = integrate_interval(lambda s, q=q: prof(s) * weight(s, q), 0.0, prof.end,
                                 breakpoints=brk, tol=1e-10)
        total = res.value
        if prof.atom is not None:
            total += prof.atom[1] * float(weight(np.array([prof.atom[0]]), q)[0])
        vals.append(total)
    vals = np.array(vals)
    return float(vals[0]) if np.ndim(tau) == 0 else vals


# -- whole line ----------------------------------------------------------------

def dalembert(v: Callable, x, t):
    """Cosine family of ``d^2/dx^2`` on the line: ``(v(x + t) + v(x - t)) / 2``."""
    if np.any(np.asarray(t) < 0):
        raise DomainError("t must be non-negative")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    out = 0.5 * (np.asarray(v(x + t), dtype=float) + np.asarray(v(x - t), dtype=float))
    return float(out) if out.ndim == 0 else out


@dataclass
class LineProblem:
    """Initial datum on the line with its evaluation grids.

    ``breakpoints`` lists points where ``initial`` is not smooth (for example
    the edges of its support); quadratures split there.
    """

    initial: Callable
    x_grid: Sequence[float]
    t_grid: Sequence[float]
    breakpoints: Sequence[float] = ()
    support: tuple | None = None

    def __post_init__(self):
        self.x_grid = np.asarray(self.x_grid, dtype=float)
        self.t_grid = np.asarray(self.t_grid, dtype=float)
        if np.any(self.t_grid < 0):
            raise DomainError("t_grid must be non-negative")
        lo, hi = self.support if self.support is not None else (-50.0, 50.0)
        brk = [b for b in self.breakpoints if lo < b < hi]
        res = integrate_interval(lambda x: np.abs(np.asarray(self.initial(x), dtype=float)),
                                 lo, hi, breakpoints=brk, tol=1e-8)
        if not math.isfinite(res.value):
            raise DomainError("initial datum is not integrable")
        self.mass_abs = res.value


@dataclass
class SolutionField:
    """Values ``u(x, t)`` with ``values[i, j] = u(x_grid[j], t_grid[i])``."""

    x_grid: np.ndarray
    t_grid: np.ndarray
    values: np.ndarray
    problem: MultiTermProblem
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# problem: {json.dumps(self.problem.to_dict(), sort_keys=True)}\n")
        for k in sorted(self.meta):
            buf.write(f"# {k}: {json.dumps(self.meta[k], sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "x", "u"])
        for i, t in enumerate(self.t_grid):
            for j, x in enumerate(self.x_grid):
                w.writerow([f"{t:.17g}", f"{x:.17g}", f"{self.values[i, j]:.17g}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "problem": self.problem.to_dict(),
            "meta": self.meta,
            "x": [float(v) for v in self.x_grid],
            "t": [float(v) for v in self.t_grid],
            "u": [[float(v) for v in row] for row in self.values],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def line_solution(p: MultiTermProblem, v: Callable, t: float, config=None, *,
                  breakpoints: Sequence[float] = (), profile: PhiProfile | None = None):
    """Return ``x -> u(x, t)`` for the problem on the whole line.

    ``u(x, t) = int_0^inf phi(t, tau) (v(x - tau) + v(x + tau)) / 2 d tau``,
    which is the convolution of ``v`` with ``G_c(., t)``.
    """
    cfg = _default_config(config)
    if t == 0.0 or p.is_wave:
        return lambda x: dalembert(v, x, t)
    prof = profile if profile is not None else phi_profile(p, t, cfg)

    def u(x):
        x = float(x)
        brk = sorted({abs(x - b) for b in breakpoints if 0 < abs(x - b) < prof.end}
                     | {a for a, _, _ in prof.panels[1:]})

        def integrand(tau):
            return prof(tau) * dalembert(v, x, tau)

        res = integrate_interval(integrand, 0.0, prof.end, breakpoints=brk,
                                 tol=0.01 * cfg.abs_tol)
        total = res.value
        if prof.atom is not None:
            total += prof.atom[1] * dalembert(v, x, prof.atom[0])
        return total

    return u


def solve_line(p: MultiTermProblem, lp: LineProblem, config=None) -> SolutionField:
    """Tabulate the whole-line solution on ``lp.x_grid x lp.t_grid``."""
    cfg = _default_config(config)
    vals = np.empty((lp.t_grid.size, lp.x_grid.size))
    evals = 0
    for i, t in enumerate(lp.t_grid):
        prof = None
        if t > 0 and not p.is_wave:
            prof = phi_profile(p, float(t), cfg)
            evals += prof.evaluations
        u = line_solution(p, lp.initial, float(t), cfg, breakpoints=lp.breakpoints, profile=prof)
        vals[i] = [u(x) for x in lp.x_grid]
    meta = {"method": "dalembert" if p.is_wave else "phi-convolution",
            "quadrature": cfg.to_dict(), "phi_evaluations": evals}
    return SolutionField(lp.x_grid, lp.t_grid, vals, p, meta)


# -- unit interval ---------------------------------------------------------------

def telegraph_mode(p: MultiTermProblem, lam: float, t):
    """Closed-form mode of ``c u'' + c_1 u' + lam u = 0``, ``u(0) = 1``, ``u'(0) = 0``.

    Also covers the classical wave (``c_1 = 0``).
    """
    if not (p.is_wave or p.is_telegraph):
        raise DomainError("closed-form modes exist only for the wave and telegraph symbols")
    t = np.asarray(t, dtype=float)
    c = p.c
    c1 = p.terms[0][1] if p.m else 0.0
    a = c1 / (2.0 * c)
    disc = lam / c - a * a
    if disc > 0:
        w = math.sqrt(disc)
        out = np.exp(-a * t) * (np.cos(w * t) + a / w * np.sin(w * t))
    elif disc < 0:
        k = math.sqrt(-disc)
        # sinh(kt)/k written to stay accurate for small k t
        out = np.exp(-a * t) * (np.cosh(k * t) + a * t * np.sinc(1j * k * t / math.pi).real)
    else:
        out = np.exp(-a * t) * (1.0 + a * t)
    return float(out) if out.ndim == 0 else out


def eigenmode(p: MultiTermProblem, lam: float, t_grid, config=None, *,
              method: str = "auto") -> np.ndarray:
    """``u(t) = int phi(t, tau) cos(sqrt(lam) tau) d tau`` on ``t_grid``.

    ``method="auto"`` uses the closed form for the wave and telegraph symbols
    and the kernel otherwise; ``"kernel"`` forces the ``phi`` route and
    ``"closed_form"`` the ODE solution.
    """
    return eigenmodes(p, [lam], t_grid, config, method=method)[0]


def eigenmodes(p: MultiTermProblem, lambdas, t_grid, config=None, *,
               method: str = "auto") -> np.ndarray:
    """Several modes at once; one ``phi`` profile per time serves all of them.

    Returns an array of shape ``(len(lambdas), len(t_grid))``.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(lambdas <= 0):
        raise DomainError("eigenvalues must be positive")
    if np.any(t_grid < 0):
        raise DomainError("t must be non-negative")
    if method not in ("auto", "kernel", "closed_form"):
        raise ValueError(f"unknown method {method!r}")
    closed = p.is_wave or p.is_telegraph
    if method == "closed_form" or (method == "auto" and closed) or (p.is_wave and method == "kernel"):
        if p.is_wave and method == "kernel":
            # phi is the unit mass at tau = t / sqrt(c): the kernel route is exact
            return np.array([np.cos(math.sqrt(lam / p.c) * t_grid) for lam in lambdas])
        return np.array([np.atleast_1d(telegraph_mode(p, lam, t_grid)) for lam in lambdas])
    cfg = _default_config(config)
    out = np.empty((lambdas.size, t_grid.size))
    roots = np.sqrt(lambdas)
    for j, t in enumerate(t_grid):
        if t == 0.0:
            out[:, j] = 1.0
            continue
        prof = phi_profile(p, float(t), cfg)
        for i, k in enumerate(roots):
            out[i, j] = prof.integrate(lambda tau, k=k: np.cos(k * tau), frequency=k)
    return out


@dataclass
class EigenExpansion:
    """Truncated Dirichlet expansion ``sum_n v_n u_n(t) sqrt(2) sin(n pi x)``."""

    n_modes: int
    lambdas: np.ndarray
    v_coeffs: np.ndarray
    t_grid: np.ndarray
    modes: np.ndarray
    tail_estimate: float

    def evaluate(self, x) -> np.ndarray:
        """Field of shape ``(len(t_grid), len(x))``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        n = np.arange(1, self.n_modes + 1)
        basis = math.sqrt(2.0) * np.sin(np.pi * np.outer(n, x))
        return (self.modes * self.v_coeffs[:, None]).T @ basis

    def to_dict(self) -> dict:
        return {
            "n_modes": self.n_modes,
            "lambdas": self.lambdas.tolist(),
            "v_coeffs": self.v_coeffs.tolist(),
            "t": self.t_grid.tolist(),
            "modes": self.modes.tolist(),
            "tail_estimate": self.tail_estimate,
        }


def sine_coefficients(v: Callable, n_modes: int, *, tol: float = 1e-12,
                      breakpoints: Sequence[float] = ()) -> tuple[np.ndarray, float]:
    """``v_n = int_0^1 v(x) sqrt(2) sin(n pi x) dx`` and the Parseval tail.

    The tail ``sum_{n > N} v_n^2`` is ``||v||^2 - sum_{n <= N} v_n^2``.
    """
    brk = sorted(set(b for b in breakpoints if 0 < b < 1)
                 | set(np.linspace(0, 1, max(2, n_modes // 4) + 1)[1:-1]))
    coeffs = np.empty(n_modes)
    for n in range(1, n_modes + 1):
        res = integrate_interval(
            lambda x, n=n: np.asarray(v(x), dtype=float) * math.sqrt(2.0) * np.sin(n * np.pi * x),
            0.0, 1.0, breakpoints=brk, tol=tol)
        coeffs[n - 1] = res.value
    norm2 = integrate_interval(lambda x: np.asarray(v(x), dtype=float) ** 2, 0.0, 1.0,
                               breakpoints=brk, tol=tol).value
    tail = max(norm2 - float(np.sum(coeffs ** 2)), 0.0)
    return coeffs, tail


def solve_interval(p: MultiTermProblem, v: Callable, n_modes: int = 64, x_grid=None,
                   t_grid=None, config=None, *, method: str = "auto",
                   breakpoints: Sequence[float] = ()) -> tuple[SolutionField, EigenExpansion]:
    """Dirichlet problem on ``(0, 1)`` by the truncated eigenfunction expansion."""
    if n_modes < 1:
        raise ValueError("n_modes must be at least 1")
    cfg = _default_config(config)
    x_grid = np.linspace(0.0, 1.0, 21) if x_grid is None else np.asarray(x_grid, dtype=float)
    t_grid = np.linspace(0.0, 1.0, 11) if t_grid is None else np.asarray(t_grid, dtype=float)
    coeffs, tail = sine_coefficients(v, n_modes, tol=min(1e-12, cfg.abs_tol),
                                     breakpoints=breakpoints)
    lambdas = (np.arange(1, n_modes + 1) * np.pi) ** 2
    modes = eigenmodes(p, lambdas, t_grid, cfg, method=method)
    exp = EigenExpansion(n_modes, lambdas, coeffs, t_grid, modes, tail)
    meta = {"n_modes": n_modes, "tail_estimate": tail, "quadrature": cfg.to_dict(),
            "method": method}
    return SolutionField(x_grid, t_grid, exp.evaluate(x_grid), p, meta), exp


# -- Caputo residual -------------------------------------------------------------

def _product_trapezoid(f: np.ndarray, h: float, nu: float) -> np.ndarray:
    """``int_0^{t_n} f(s) (t_n - s)^{nu - 1} ds / Gamma(nu)`` for the linear interpolant of ``f``.

    Returns the values for ``n = 1..len(f) - 1``.
    """
    n = f.size - 1
    m = np.arange(n + 1, dtype=float)
    p = nu + 1.0
    # interior weights depend on n - j only
    b = (m[1:] + 1.0) ** p - 2.0 * m[1:] ** p + (m[1:] - 1.0) ** p
    out = np.empty(n)
    for k in range(1, n + 1):
        first = (k - 1.0) ** p - (k - 1.0 - nu) * k ** nu
        inner = np.dot(b[: k - 1][::-1], f[1:k]) if k > 1 else 0.0
        out[k - 1] = first * f[0] + inner + f[k]
    return out * h ** nu / gamma(nu + 2.0)


def caputo_derivative(u: np.ndarray, h: float, order: float) -> np.ndarray:
    """Caputo derivative of uniformly sampled ``u`` at the interior nodes.

    Returns ``D^order u`` at ``t_n``, ``n = 1..len(u) - 2``.  The first
    (``order <= 1``) or second derivative is taken by centred differences at
    the nodes, with the even extension ``u_{-1} = u_1`` that encodes
    ``u'(0) = 0``; its piecewise-linear interpolant is then integrated exactly
    against ``(t_n - s)^{k - order - 1} / Gamma(k - order)``.  Integer orders
    reduce to the centred differences themselves.  The error is ``O(h^2)``
    for smooth ``u``.
    """
    u = np.asarray(u, dtype=float)
    if u.size < 3:
        raise GridTooCoarse("need at least three samples")
    if not 0 < order <= 2:
        raise ValueError("order must lie in (0, 2]")
    ext = np.r_[u[1], u]
    if order <= 1:
        k, f = 1, (ext[2:] - ext[:-2]) / (2.0 * h)
    else:
        k, f = 2, (ext[2:] - 2.0 * ext[1:-1] + ext[:-2]) / (h * h)
    nu = k - order
    if nu == 0.0:
        return f[1:]
    return _product_trapezoid(f, h, nu)


@dataclass(frozen=True)
class CaputoResidual:
    residual: float
    coarse_residual: float
    error_estimate: float
    observed_order: float
    h: float


def caputo_residual(p: MultiTermProblem, u, lam: float, t_grid, *,
                    max_error: float | None = None) -> CaputoResidual:
    """Max-norm residual of ``c D^alpha u + sum c_j D^{alpha_j} u + lam u = 0``.

    ``u`` is sampled on the uniform ``t_grid`` starting at ``0`` (``u(0) = 1``
    and ``u'(0) = 0`` are part of the Caputo formulation).  The residual is
    also formed on every other sample; the difference of the two is the
    self-estimated discretisation error, and the ratio gives the observed
    order.  The first tenth of the interval is excluded, since ``u''`` is
    singular at ``t = 0`` for ``alpha < 2``.

    Raises
    ------
    GridTooCoarse
        When the estimated discretisation error exceeds ``max_error``
        (default: ``1e-2 * lam * max|u|``).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    u = np.asarray(u, dtype=float)
    if t_grid[0] != 0.0 or u.size != t_grid.size:
        raise ValueError("u must be sampled on a grid starting at t = 0")
    steps = np.diff(t_grid)
    h = float(steps[0])
    if not np.allclose(steps, h, rtol=1e-9, atol=0.0):
        raise ValueError("t_grid must be uniform")

    def residual(uu, hh):
        tm = hh * np.arange(1, uu.size - 1)
        r = lam * uu[1:-1]
        for a, c in zip(p.orders, p.coeffs):
            r = r + c * caputo_derivative(uu, hh, float(a))
        keep = tm >= 0.1 * tm[-1]
        return float(np.max(np.abs(r[keep]))), tm[keep], r[keep]

    if u.size < 9:
        raise GridTooCoarse("need at least nine samples")
    fine, _, _ = residual(u, h)
    m = (u.size - 1) // 2 * 2 + 1
    coarse, _, _ = residual(u[:m:2], 2.0 * h)
    est = abs(coarse - fine)
    order = math.log2(coarse / fine) if fine > 0 and coarse > 0 else math.inf
    bound = 1e-2 * lam * float(np.max(np.abs(u))) if max_error is None else max_error
    if est > bound:
        raise GridTooCoarse(f"estimated discretisation error {est:.3g} exceeds {bound:.3g}")
    return CaputoResidual(fine, coarse, est, order, h)
