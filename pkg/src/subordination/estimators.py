"""scikit-learn style wrappers.

:class:`KernelTransformer` maps sample coordinates to kernel values for a
fixed problem; :class:`IntervalSolver` learns the sine coefficients of an
initial datum on ``(0, 1)`` from samples and predicts the solution at
``(x, t)`` pairs.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import trapezoid
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .kernels import KINDS, kernel_value
from .problem import validate
from .quadrature import QuadratureConfig
from .solver import eigenmodes

__all__ = ["KernelTransformer", "IntervalSolver"]


def _problem(est):
    return validate(est.alpha, est.c, est.terms, allow_spread=est.unsafe_allow_spread)


def _config(est):
    return QuadratureConfig(abs_tol=est.tol, rel_tol=est.tol)


class KernelTransformer(TransformerMixin, BaseEstimator):
    """Evaluate one kernel along a coordinate column.

    Parameters
    ----------
    alpha, c, terms
        Problem definition, see :func:`subordination.validate`.
    kind : str
        One of ``propagation_w``, ``G_c``, ``G_s``, ``phi``, ``psi``.
    fixed : float
        The held coordinate (``t``, or ``x`` for ``G_s``).
    tol : float
        Absolute and relative quadrature tolerance.
    unsafe_allow_spread : bool

    Notes
    -----
    ``fit`` only validates the parameters; nothing is learned from ``X``.
    ``transform`` expects one column of coordinates and returns one column of
    kernel values.
    """

    def __init__(self, alpha=2.0, c=1.0, terms=(), kind="propagation_w", fixed=1.0,
                 tol=1e-9, unsafe_allow_spread=False):
        self.alpha = alpha
        self.c = c
        self.terms = terms
        self.kind = kind
        self.fixed = fixed
        self.tol = tol
        self.unsafe_allow_spread = unsafe_allow_spread

    def fit(self, X=None, y=None):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if not self.fixed > 0:
            raise ValueError("fixed must be positive")
        self.problem_ = _problem(self)
        self.config_ = _config(self)
        if X is not None:
            self.n_features_in_ = check_array(X, ensure_min_samples=1).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "problem_")
        X = check_array(X)
        if X.shape[1] != 1:
            raise ValueError("KernelTransformer expects a single coordinate column")
        out = [kernel_value(self.problem_, self.kind, float(v), float(self.fixed),
                            self.config_).value for v in X[:, 0]]
        return np.asarray(out).reshape(-1, 1)


class IntervalSolver(RegressorMixin, BaseEstimator):
    """Dirichlet problem on ``(0, 1)`` fitted to samples of the initial datum.

    ``fit(x, v)`` projects the sampled datum onto ``sqrt(2) sin(n pi x)`` by
    trapezoidal quadrature on the sorted samples (endpoints ``0`` and ``1``
    contribute zero).  ``predict`` takes rows ``(x, t)`` and returns ``u``.

    Parameters
    ----------
    alpha, c, terms
        Problem definition.
    n_modes : int
        Truncation of the expansion.
    tol : float
        Quadrature tolerance used by the eigenmodes.
    """

    def __init__(self, alpha=2.0, c=1.0, terms=(), n_modes=16, tol=1e-9,
                 unsafe_allow_spread=False):
        self.alpha = alpha
        self.c = c
        self.terms = terms
        self.n_modes = n_modes
        self.tol = tol
        self.unsafe_allow_spread = unsafe_allow_spread

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        if X.shape[1] != 1:
            raise ValueError("fit expects one column of x samples in [0, 1]")
        if int(self.n_modes) < 1:
            raise ValueError("n_modes must be at least 1")
        x = X[:, 0]
        if np.any((x < 0) | (x > 1)):
            raise ValueError("x samples must lie in [0, 1]")
        self.problem_ = _problem(self)
        self.config_ = _config(self)
        order = np.argsort(x)
        xs = np.concatenate([[0.0], x[order], [1.0]])
        vs = np.concatenate([[0.0], y[order], [0.0]])
        n = np.arange(1, int(self.n_modes) + 1)
        basis = math.sqrt(2.0) * np.sin(np.pi * np.outer(n, xs))
        self.coef_ = trapezoid(basis * vs, xs, axis=1)
        self.lambdas_ = (n * np.pi) ** 2
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        if X.shape[1] != 2:
            raise ValueError("predict expects rows (x, t)")
        x, t = X[:, 0], X[:, 1]
        times, inv = np.unique(t, return_inverse=True)
        modes = eigenmodes(self.problem_, self.lambdas_, times, self.config_)
        n = np.arange(1, self.coef_.size + 1)
        basis = math.sqrt(2.0) * np.sin(np.pi * np.outer(n, x))
        return np.einsum("n,ni,ni->i", self.coef_, modes[:, inv], basis)
