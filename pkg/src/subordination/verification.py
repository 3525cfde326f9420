"""Invariant suites behind ``subordination verify``.

Every check returns a :class:`CheckResult` carrying the measured quantity and
the threshold it is compared with, so a report can be re-read without
re-running anything.  Checks never raise: convergence or domain failures are
recorded as failed rows.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass
from typing import Callable, Iterable

import mpmath
import numpy as np

from ._errors import SubordinationError
from .bernstein import check_bernstein_sqrt_g, check_cmf, check_concavity_scan
from .kernels import (
    KINDS,
    kernel_value,
    laplace_cross_check,
    normalization,
    pdf_phi,
    propagation_w,
)
from .problem import ab_eval, g_eval, k_eval, root_symbol, validate
from .quadrature import QuadratureConfig, integrate_interval, integrate_oscillatory, inverse_laplace_oracle
from .solver import (
    LineProblem,
    caputo_residual,
    composed_phi,
    eigenmodes,
    sine_coefficients,
    solve_line,
    telegraph_mode,
)
from .wright import mainardi, single_term_kernel

__all__ = [
    "CheckResult",
    "SUITES",
    "default_problems",
    "run_suite",
    "standard_grids",
]


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (f"{flag} {self.suite}/{self.name}: measured {self.measured:.3g} "
                f"vs {self.threshold:.3g}{' (' + self.detail + ')' if self.detail else ''}")

    def to_dict(self) -> dict:
        return asdict(self)


def default_problems() -> dict:
    """Named problems every suite draws from (all with ``c = c_j = 1``)."""
    return {
        "wave": validate(2.0),
        "telegraph": validate(2.0, 1.0, [(1.0, 1.0)]),
        "finite_speed": validate(2.0, 1.0, [(1.5, 1.0)]),
        "a1.9_1.5": validate(1.9, 1.0, [(1.5, 1.0)]),
        "a1.8_1.5": validate(1.8, 1.0, [(1.5, 1.0)]),
        "a1.5_1": validate(1.5, 1.0, [(1.0, 1.0)]),
        "single1.5": validate(1.5),
        "three_term": validate(1.8, 2.0, [(1.2, 0.5), (0.9, 0.25)]),
    }


def standard_grids() -> dict:
    """Sampling grids of the positivity and monotonicity sweeps."""
    return {
        "x": np.array([0.1, 0.25, 0.5, 1.0, 2.0, 4.0]),
        "t": np.array([0.25, 0.5, 1.0, 2.0, 4.0]),
        "tau_over_t": np.array([0.05, 0.25, 0.5, 0.75, 0.95, 1.5]),
    }


def _check(suite: str, name: str, fn: Callable[[], tuple], threshold: float,
           mode: str = "le") -> CheckResult:
    """Run ``fn`` returning ``(measured, detail)`` and compare with ``threshold``."""
    start = time.perf_counter()
    try:
        measured, detail = fn()
        measured = float(measured)
        ok = measured <= threshold if mode == "le" else measured > threshold
        ok = ok and math.isfinite(measured)
    except (SubordinationError, ArithmeticError, ValueError) as exc:
        measured, detail, ok = math.nan, f"{type(exc).__name__}: {exc}", False
    return CheckResult(suite, name, bool(ok), measured, threshold, detail,
                       round(time.perf_counter() - start, 3))


# -- problem ---------------------------------------------------------------------

def _suite_problem(cfg):
    probs = default_problems()
    r = np.geomspace(1e-6, 1e6, 121)

    def identity():
        worst = 0.0
        for p in probs.values():
            for ri in r:
                e = k_eval(p, float(ri))
                z = complex(e.k_plus, e.k_minus) ** 2
                worst = max(worst, abs(z - complex(e.a, e.b)) / abs(complex(e.a, e.b)))
        return worst, "max relative |(K+ + iK-)^2 - (A + iB)|"

    def ab_vs_g():
        worst = 0.0
        for p in probs.values():
            a, b = ab_eval(p, r)
            g = g_eval(p, 1j * r)
            worst = max(worst, float(np.max(np.abs(a + 1j * b - g) / np.abs(g))))
        return worst, "relative"

    def b_nonnegative():
        return -min(float(np.min(ab_eval(p, r)[1])) for p in probs.values()), "-min B(r)"

    def root_half():
        worst = 0.0
        for p in probs.values():
            for ri in r[::10]:
                e = k_eval(p, float(ri))
                lp, lm = root_symbol(p, float(ri), 0.5)
                worst = max(worst, abs(lp - e.k_plus), abs(lm - e.k_minus))
        return worst, "root_symbol(., 1/2) vs K"

    def slopes():
        worst = 0.0
        for p in probs.values():
            if p.is_wave:
                continue
            for lo, hi, want in ((1e-9, 1e-8, p.alpha_min / 2), (1e8, 1e9, p.alpha / 2)):
                for idx in (3, 4):
                    if idx == 3 and hi > 1 and p.alpha == 2.0:
                        # A ~ -c r^2 dominates: K+ = B / (2 K-) grows only like r^{alpha_1 - 1}
                        continue
                    a, b = k_eval(p, lo), k_eval(p, hi)
                    ka, kb = (a.k_plus, b.k_plus) if idx == 3 else (a.k_minus, b.k_minus)
                    if ka > 0 and kb > 0:
                        worst = max(worst, abs(math.log(kb / ka) / math.log(hi / lo) - want))
        return worst, "log-log slope of K+- vs alpha_m/2, alpha/2"

    def wave_kplus():
        return abs(k_eval(probs["wave"], 3.0).k_plus), "K+ of the classical wave"

    return [
        ("symbol_identity", identity, 1e-12),
        ("ab_matches_g", ab_vs_g, 1e-12),
        ("b_nonnegative", b_nonnegative, 0.0),
        ("root_symbol_half", root_half, 1e-14),
        ("k_slopes", slopes, 0.02),
        ("wave_k_plus_zero", wave_kplus, 0.0),
    ]


# -- bernstein -------------------------------------------------------------------

def _suite_bernstein(cfg):
    probs = default_problems()

    def validated():
        worst, where = 0.0, ""
        for name, p in probs.items():
            rep = check_bernstein_sqrt_g(p, order=4)
            if rep.max_violation >= worst:
                worst, where = rep.max_violation, name
        return worst, f"largest violation in {where}"

    def counterexample():
        p = validate(1.9, 1.0, [(0.3, 1.0)], allow_spread=True)
        s = check_concavity_scan(p)
        return (0.0 if s is None else s), "first s with a positive second difference"

    def concave_cases():
        hits = [check_concavity_scan(probs[k]) for k in ("telegraph", "single1.5", "a1.9_1.5")]
        return sum(h is not None for h in hits), "witnesses found for valid problems"

    def cmf_exp():
        return check_cmf(lambda s: mpmath.exp(-s), (1e-2, 1e2, 41)).max_violation, "exp(-s)"

    def cmf_w_hat():
        p = probs["telegraph"]

        def w_hat(s):
            return mpmath.exp(-mpmath.sqrt(s * s + s)) / s
        return check_cmf(w_hat, (1e-2, 1e2, 41)).max_violation, "telegraph w-hat at x = 1"

    return [
        ("validated_problems_bernstein", validated, 1e-8),
        ("spread_counterexample_witness", counterexample, 0.0, "gt"),
        ("no_witness_for_valid", concave_cases, 0.0),
        ("cmf_exponential", cmf_exp, 1e-8),
        ("cmf_laplace_w", cmf_w_hat, 1e-8),
    ]


# -- quadrature ------------------------------------------------------------------

def _suite_quadrature(cfg):
    def exp_integral():
        res = integrate_oscillatory(lambda r: np.exp(-r), config=cfg)
        return abs(res.value - 1.0), "int exp(-r)"

    def dirichlet():
        res = integrate_oscillatory(lambda r: np.sinc(r / np.pi), phase=lambda r: r,
                                    config=cfg)
        return abs(res.value - math.pi / 2), "int sin(r)/r"

    def gamma_half():
        res = integrate_oscillatory(lambda r: r ** -0.5 * np.exp(-r), config=cfg,
                                    singular_exponent=0.5)
        return abs(res.value - math.sqrt(math.pi)), "int r^-1/2 exp(-r)"

    def talbot():
        a = abs(inverse_laplace_oracle(lambda s: 1 / s, 1.0, cfg) - 1.0)
        b = abs(inverse_laplace_oracle(lambda s: 1 / (s * s + 1), math.pi / 2, cfg) - 1.0)
        return max(a, b), "1/s and 1/(s^2+1)"

    return [
        ("exponential", exp_integral, cfg.abs_tol * 10),
        ("dirichlet_integral", dirichlet, 1e-8),
        ("gamma_half", gamma_half, 1e-8),
        ("talbot_pairs", talbot, 1e-9),
    ]


# -- wright ----------------------------------------------------------------------

def _suite_wright(cfg):
    betas = (0.55, 0.65, 0.75, 0.85, 0.95)

    def nonneg():
        z = np.linspace(0.0, 20.0, 81)
        return -min(min(mainardi(b, zi).value for zi in z) for b in betas), "-min Phi"

    def closed_form():
        z = np.linspace(0.0, 10.0, 101)
        ref = np.exp(-z * z / 4) / math.sqrt(math.pi)
        return max(abs(mainardi(0.5, zi).value - r) for zi, r in zip(z, ref)), "beta = 1/2"

    def _moment(b, k):
        f = np.vectorize(lambda z: z ** k * mainardi(b, z).value)
        return integrate_interval(f, 0.0, 60.0, breakpoints=[1.0, 3.0, 8.0], tol=1e-12).value

    def normalised():
        return max(abs(_moment(b, 0) - 1.0) for b in (0.6, 0.75, 0.9)), "int Phi"

    def moment():
        from scipy.special import gamma
        return max(abs(_moment(b, 1) - 1 / gamma(1 + b)) for b in (0.6, 0.75, 0.9)), \
            "int z Phi = 1/Gamma(1+beta)"

    return [
        ("nonnegative", nonneg, 0.0),
        ("closed_form_half", closed_form, 1e-12),
        ("normalisation", normalised, 1e-8),
        ("first_moment", moment, 1e-8),
    ]


# -- kernels ---------------------------------------------------------------------

def wave_step_error(cfg, n=20):
    """Largest ``|w - H(t - x)|`` on an ``n x n`` grid away from ``x = t``."""
    p = default_problems()["wave"]
    grid = np.linspace(0.1, 4.0, n)
    worst = 0.0
    for x in grid:
        for t in grid:
            if abs(x - t) >= 0.05:
                worst = max(worst, abs(propagation_w(p, x, t, cfg) - (1.0 if t > x else 0.0)))
    return worst


def wright_equivalence_error(cfg):
    worst = 0.0
    for alpha in (1.25, 1.5, 1.75):
        p = validate(alpha)
        for t in (0.5, 1.0, 2.0):
            for tau in (0.1, 0.5, 1.0, 2.0, 4.0):
                worst = max(worst, abs(pdf_phi(p, t, tau, cfg)
                                       - single_term_kernel(alpha, t, tau)))
    return worst


def finite_speed_error(cfg):
    """``max |w|`` beyond ``x = 1.05 t / sqrt(c)`` evaluated without the cutoff."""
    p = default_problems()["finite_speed"]
    pts = [(1.06, 1.0), (1.2, 1.0), (1.5, 1.0), (3.0, 1.0), (0.6, 0.5),
           (2.2, 2.0), (2.5, 2.0), (4.5, 4.0), (0.3, 0.25), (6.0, 4.0)]
    return max(abs(propagation_w(p, x, t, cfg, wavefront_cutoff=False)) for x, t in pts)


def infinite_speed_value(cfg):
    """``w(10, 0.1)`` for ``(1.5, 1)`` and its logarithm."""
    kv = propagation_w(default_problems()["a1.5_1"], 10.0, 0.1, cfg, full=True)
    return kv


def monotonicity_violation(cfg):
    """Largest violation of ``w_t >= 0`` and ``w_x <= 0`` on the standard grids."""
    g = standard_grids()
    worst = 0.0
    for name in ("telegraph", "finite_speed", "a1.9_1.5", "a1.5_1"):
        p = default_problems()[name]
        table = np.array([[propagation_w(p, x, t, cfg, full=True) for t in g["t"]]
                          for x in g["x"]], dtype=object)
        vals = np.vectorize(lambda kv: kv.value)(table)
        errs = np.vectorize(lambda kv: kv.error_estimate)(table)
        slack = 2.0 * (errs[:, 1:] + errs[:, :-1]) + 10 * cfg.abs_tol
        worst = max(worst, float(np.max(vals[:, :-1] - vals[:, 1:] - slack)))
        slack = 2.0 * (errs[1:] + errs[:-1]) + 10 * cfg.abs_tol
        worst = max(worst, float(np.max(vals[1:] - vals[:-1] - slack)))
        worst = max(worst, float(np.max(vals - 1.0)) - 10 * cfg.abs_tol)
    return max(worst, 0.0)


def positivity_violation(cfg):
    """``-min`` of every kernel on the standard grids (0 when all are >= 0)."""
    g = standard_grids()
    low = 0.0
    for name in ("telegraph", "finite_speed", "a1.9_1.5", "a1.5_1"):
        p = default_problems()[name]
        for kind in KINDS:
            if kind in ("dw_dt", "minus_dw_dx"):
                continue
            for t in g["t"]:
                if kind in ("phi", "psi"):
                    coords = t * g["tau_over_t"]
                else:
                    coords = g["x"]
                for co in coords:
                    if kind == "G_s":
                        v = kernel_value(p, kind, float(t), float(co), cfg).value
                    else:
                        v = kernel_value(p, kind, float(co), float(t), cfg).value
                    low = min(low, v)
    return -low


LAPLACE_SPOTS = (
    ("telegraph", "propagation_w", 1.0, 2.0, 1e-6),
    ("single1.5", "propagation_w", 1.0, 2.0, 1e-6),
    ("a1.9_1.5", "phi", 0.5, 1.0, 1e-6),
    ("a1.9_1.5", "G_s", 1.0, 2.0, 1e-6),
    ("a1.5_1", "psi", 0.5, 1.0, 1e-5),
)


def laplace_discrepancies(cfg):
    out = []
    for name, kind, coord, t, tol in LAPLACE_SPOTS:
        chk = laplace_cross_check(default_problems()[name], kind, coord, t, cfg)
        out.append((name, kind, chk.discrepancy, tol))
    return out


def composition_error(cfg):
    p = default_problems()["a1.9_1.5"]
    worst = 0.0
    for t in (0.5, 1.0, 2.0):
        taus = t * np.array([0.25, 0.5, 0.9])
        ref = np.array([pdf_phi(p, t, tau, cfg) for tau in taus])
        worst = max(worst, float(np.max(np.abs(composed_phi(p, t, taus, cfg) - ref))))
    return worst


def _suite_kernels(cfg):
    def laplace():
        rows = laplace_discrepancies(cfg)
        worst = max(d / tol for _, _, d, tol in rows)
        return worst, "largest discrepancy / tolerance"

    def limits():
        worst = 0.0
        for p in default_problems().values():
            worst = max(worst, propagation_w(p, 0.1, 1e-3, cfg),
                        1.0 - propagation_w(p, 0.1, 1e3, cfg))
        return worst, "distance of w(0.1, 1e-3), w(0.1, 1e3) from 0 and 1"

    def infinite():
        kv = infinite_speed_value(cfg)
        return kv.value, f"log w = {kv.log_value}" if kv.log_value is not None else kv.method

    def infinite_log():
        kv = infinite_speed_value(cfg)
        lv = kv.log_value if kv.log_value is not None else math.log(max(kv.value, 1e-320))
        return lv, "log w(10, 0.1)"

    return [
        ("wave_step", lambda: (wave_step_error(cfg), "20 x 20 grid"), 1e-4),
        ("wright_equivalence", lambda: (wright_equivalence_error(cfg), "3 x 5 grid"), 1e-6),
        ("finite_speed", lambda: (finite_speed_error(cfg), "no cutoff"), 1e-6),
        ("infinite_speed_log", infinite_log, -math.inf, "gt"),
        ("limits", limits, 0.05),
        ("laplace_cross_checks", laplace, 1.0),
        ("monotonicity", lambda: (monotonicity_violation(cfg), "w"), 0.0),
        ("positivity", lambda: (positivity_violation(cfg), "-min"), 10 * cfg.abs_tol),
        ("composition", lambda: (composition_error(cfg), "3 x 3 grid"), 1e-4),
    ]


# -- normalization ---------------------------------------------------------------

def normalization_errors(cfg, names=("telegraph", "a1.9_1.5"), points=(0.5, 1.0, 2.0)):
    rows = []
    for name in names:
        p = default_problems()[name]
        for kind in ("phi", "psi", "G_c", "G_s"):
            for v in points:
                res = normalization(p, kind, v, cfg)
                rows.append((name, kind, v, abs(res.total - 1.0)))
    return rows


def _suite_normalization(cfg):
    checks = []
    for name in ("telegraph", "a1.9_1.5"):
        for kind in ("phi", "psi", "G_c", "G_s"):
            def fn(name=name, kind=kind):
                p = default_problems()[name]
                errs = [abs(normalization(p, kind, v, cfg).total - 1.0) for v in (0.5, 1.0, 2.0)]
                return max(errs), "max over 0.5, 1, 2"
            checks.append((f"{kind}_{name}", fn, 1e-6))
    return checks


# -- solver ----------------------------------------------------------------------

def telegraph_mode_error(cfg, t_grid=None):
    p = default_problems()["telegraph"]
    t_grid = np.linspace(0.0, 5.0, 51) if t_grid is None else t_grid
    lam = (np.arange(1, 5) * np.pi) ** 2
    modes = eigenmodes(p, lam, t_grid, cfg, method="kernel")
    ref = np.array([telegraph_mode(p, lv, t_grid) for lv in lam])
    return float(np.max(np.abs(modes - ref)))


def _suite_solver(cfg):
    probs = default_problems()

    def telegraph():
        return telegraph_mode_error(cfg, np.linspace(0.0, 5.0, 26)), "n = 1..4, kernel route"

    def bounded_and_initial():
        p = probs["a1.8_1.5"]
        lam = (np.arange(1, 5) * np.pi) ** 2
        modes = eigenmodes(p, lam, np.array([1e-3, 0.5, 2.0]), cfg)
        over = float(np.max(np.abs(modes))) - 1.0
        init = float(np.max(np.abs(modes[:, 0] - 1.0)))
        return max(over / 1e-6, init / 0.05), "max(|u|-1)/1e-6, |u(1e-3)-1|/0.05"

    def laplace_mode():
        p = probs["a1.8_1.5"]
        worst = 0.0
        t_grid = np.array([0.5, 1.0, 2.0])
        modes = eigenmodes(p, [np.pi ** 2], t_grid, cfg)[0]
        for t, u in zip(t_grid, modes):
            F = (lambda s: (lambda g: g / (s * (g + mpmath.pi ** 2)))(
                g_eval(p, s)))
            worst = max(worst, abs(u - inverse_laplace_oracle(F, t, cfg)))
        return worst, "lambda = pi^2"

    def parseval():
        k = 3
        coeffs, _ = sine_coefficients(lambda x: math.sqrt(2) * np.sin(k * np.pi * x), 8)
        target = np.zeros(8)
        target[k - 1] = 1.0
        return float(np.max(np.abs(coeffs - target))), "v = phi_3"

    def mass():
        p = probs["a1.9_1.5"]
        lp = LineProblem(lambda x: (np.abs(x) <= 1).astype(float), np.linspace(-12, 12, 2),
                         [0.5, 1.0, 2.0], breakpoints=(-1.0, 1.0), support=(-1.0, 1.0))
        worst = 0.0
        from .solver import line_solution, phi_profile
        for t in lp.t_grid:
            prof = phi_profile(p, float(t), cfg)
            u = line_solution(p, lp.initial, float(t), cfg, breakpoints=lp.breakpoints,
                              profile=prof)
            half = prof.end + 1.0
            res = integrate_interval(np.vectorize(u), -half, half,
                                     breakpoints=[-1.0, 0.0, 1.0], tol=1e-7)
            worst = max(worst, abs(res.value - 2.0))
        return worst, "|int u dx - 2|"

    def wave_periodic():
        p = probs["wave"]
        t = np.linspace(0.0, 2.0, 9)
        a = eigenmodes(p, (np.arange(1, 9) * np.pi) ** 2, t)
        b = eigenmodes(p, (np.arange(1, 9) * np.pi) ** 2, t + 2.0)
        return float(np.max(np.abs(a - b))), "u(t) - u(t + 2)"

    def envelope():
        p = probs["a1.8_1.5"]
        t = np.linspace(0.0, 20.0, 41)
        modes = eigenmodes(p, (np.arange(1, 5) * np.pi) ** 2, t, cfg)
        early = np.max(np.abs(modes[:, t <= 10]), axis=1)
        late = np.max(np.abs(modes[:, t > 10]), axis=1)
        return float(np.max(late / early)), "max over n of late / early envelope"

    def caputo():
        p = probs["telegraph"]
        t = np.linspace(0.0, 5.0, 2001)
        u = telegraph_mode(p, np.pi ** 2, t)
        res = caputo_residual(p, u, np.pi ** 2, t)
        return res.residual / max(res.error_estimate, 1e-300), "residual / error estimate"

    return [
        ("telegraph_modes", telegraph, 1e-5),
        ("mode_bound_and_start", bounded_and_initial, 1.0),
        ("laplace_mode", laplace_mode, 1e-6),
        ("parseval", parseval, 1e-10),
        ("line_mass", mass, 1e-4),
        ("wave_periodicity", wave_periodic, 1e-8),
        ("envelope_decay", envelope, 1.0),
        ("caputo_residual", caputo, 10.0),
    ]


SUITES = {
    "problem": _suite_problem,
    "bernstein": _suite_bernstein,
    "quadrature": _suite_quadrature,
    "wright": _suite_wright,
    "kernels": _suite_kernels,
    "normalization": _suite_normalization,
    "solver": _suite_solver,
}


def run_suite(name: str = "all", config: QuadratureConfig | None = None,
              progress: Callable[[CheckResult], None] | None = None) -> list[CheckResult]:
    """Run one suite (or ``"all"``) and return its rows in order."""
    cfg = config or QuadratureConfig()
    names: Iterable[str] = SUITES if name == "all" else [name]
    rows = []
    for suite in names:
        if suite not in SUITES:
            raise ValueError(f"unknown suite {suite!r}; expected one of {sorted(SUITES)} or 'all'")
        for spec in SUITES[suite](cfg):
            label, fn, thr = spec[:3]
            mode = spec[3] if len(spec) > 3 else "le"
            row = _check(suite, label, fn, thr, mode)
            rows.append(row)
            if progress is not None:
                progress(row)
    return rows


def report_json(rows: list[CheckResult]) -> str:
    return json.dumps([r.to_dict() for r in rows], indent=1, sort_keys=True)
