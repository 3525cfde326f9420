"""Data behind the six reference plots (tables only, no rendering).

Parameters not fixed by the plot captions default to ``c = c_j = 1`` and
``t in {0.25, 0.5, 1, 2}``; every table records them in its ``meta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kernels import pdf_phi, propagation_w
from .problem import MultiTermProblem, validate
from .quadrature import QuadratureConfig
from .solver import eigenmodes

__all__ = ["FigureData", "FIGURES", "figure_data", "DEFAULT_TIMES"]

DEFAULT_TIMES = (0.25, 0.5, 1.0, 2.0)


@dataclass
class FigureData:
    """Columns of one figure; the first column is the abscissa."""

    number: int
    columns: dict
    problems: dict
    meta: dict = field(default_factory=dict)

    @property
    def names(self) -> list:
        return list(self.columns)

    def array(self) -> np.ndarray:
        return np.column_stack([np.asarray(v, dtype=float) for v in self.columns.values()])


def _w_column(p: MultiTermProblem, x: np.ndarray, t: float, cfg, log: bool = False):
    vals, logs = [], []
    for xi in x:
        if xi == 0.0:
            # boundary condition w(0, t) = H(t)
            vals.append(1.0)
            logs.append(0.0)
            continue
        kv = propagation_w(p, float(xi), t, cfg, full=True)
        vals.append(kv.value)
        if kv.log_value is not None:
            logs.append(kv.log_value / math.log(10.0))
        else:
            logs.append(math.log10(kv.value) if kv.value > 0 else -math.inf)
    return np.array(vals), np.array(logs)


def _propagation_figure(number, p, x, cfg, log=False):
    cols = {"x": x}
    for t in DEFAULT_TIMES:
        w, lw = _w_column(p, x, t, cfg)
        cols[f"w_t={t:g}"] = w
        if log:
            cols[f"log10_w_t={t:g}"] = lw
    return FigureData(number, cols, {"main": p.to_dict()},
                      {"t": list(DEFAULT_TIMES), "x_range": [float(x[0]), float(x[-1])]})


def figure_1(cfg):
    """Telegraph propagation function against ``x``; jump at ``x = t``."""
    p = validate(2.0, 1.0, [(1.0, 1.0)])
    return _propagation_figure(1, p, np.linspace(0.0, 3.0, 151), cfg)


def figure_2(cfg):
    """``alpha = 2``, ``alpha_1 = 1.5``: finite speed without a jump."""
    p = validate(2.0, 1.0, [(1.5, 1.0)])
    return _propagation_figure(2, p, np.linspace(0.0, 3.0, 151), cfg)


def figure_3(cfg):
    """``alpha = 1.5``, ``alpha_1 = 1``: positive for every ``x`` (log column)."""
    p = validate(1.5, 1.0, [(1.0, 1.0)])
    return _propagation_figure(3, p, np.linspace(0.0, 6.0, 121), cfg, log=True)


def figure_4(cfg):
    """``phi(t, tau)`` for ``alpha = 1.9``, ``alpha_1 = 1.5``."""
    p = validate(1.9, 1.0, [(1.5, 1.0)])
    tau = np.linspace(0.0, 3.0, 121)
    cols = {"tau": tau}
    for t in DEFAULT_TIMES:
        cols[f"phi_t={t:g}"] = np.array([pdf_phi(p, t, float(u), cfg) for u in tau])
    return FigureData(4, cols, {"main": p.to_dict()}, {"t": list(DEFAULT_TIMES)})


FIG5_LOWER_ORDERS = (1.0, 1.25, 1.5, 1.75)


def figure_5(cfg):
    """``phi(2, tau)`` for ``alpha = 1.9`` and several ``alpha_1``."""
    tau = np.linspace(0.0, 4.0, 161)
    cols = {"tau": tau}
    probs = {}
    for a1 in FIG5_LOWER_ORDERS:
        p = validate(1.9, 1.0, [(a1, 1.0)])
        probs[f"alpha_1={a1:g}"] = p.to_dict()
        cols[f"phi_alpha1={a1:g}"] = np.array([pdf_phi(p, 2.0, float(u), cfg) for u in tau])
    return FigureData(5, cols, probs, {"t": 2.0, "alpha_1": list(FIG5_LOWER_ORDERS)})


def figure_6(cfg, n_modes: int = 4):
    """Eigenmodes ``u_n(t)`` on ``(0, 1)`` for ``alpha = 1.8``, ``alpha_1 = 1.5``."""
    p = validate(1.8, 1.0, [(1.5, 1.0)])
    t = np.linspace(0.0, 20.0, 41)
    lam = (np.arange(1, n_modes + 1) * np.pi) ** 2
    modes = eigenmodes(p, lam, t, cfg)
    cols = {"t": t}
    for n in range(n_modes):
        cols[f"u_{n + 1}"] = modes[n]
    return FigureData(6, cols, {"main": p.to_dict()},
                      {"lambda_n": lam.tolist(), "t_step": 0.5})


FIGURES = {1: figure_1, 2: figure_2, 3: figure_3, 4: figure_4, 5: figure_5, 6: figure_6}


def figure_data(number: int, config: QuadratureConfig | None = None) -> FigureData:
    """Compute the table behind figure ``number`` (1..6)."""
    if number not in FIGURES:
        raise ValueError(f"figure must be one of {sorted(FIGURES)}")
    return FIGURES[number](config or QuadratureConfig())
