"""Subordination kernels and solvers for multi-term time-fractional diffusion-wave equations.

The problem ``c D^alpha u + sum_j c_j D^{alpha_j} u = u_xx`` (Caputo
derivatives, ``1 < alpha <= 2``) is handled through its symbol
``g(s) = c s^alpha + sum_j c_j s^{alpha_j}``.  The package evaluates the
propagation function, the fundamental solutions and the subordination
densities from real-axis integral representations, and uses the densities to
solve problems on the line and on ``(0, 1)``.
"""

__version__ = "0.1.0"

from ._errors import (
    BadSingularity,
    ConvergenceError,
    DegenerateIdentity,
    DomainError,
    GridTooCoarse,
    NoConvergence,
    NonPositiveCoefficient,
    NotApplicable,
    NotWaveLimit,
    OrderOutOfRange,
    OrdersNotDecreasing,
    PrecisionLoss,
    SpreadTooLarge,
    SubordinationError,
    ValidationError,
)
from .bernstein import MonotonicityReport, check_bernstein_sqrt_g, check_cmf, check_concavity_scan
from .estimators import IntervalSolver, KernelTransformer
from .kernels import (
    KernelField,
    KernelValue,
    cauchy_Gc,
    kernel_field,
    kernel_value,
    laplace_cross_check,
    normalization,
    pdf_phi,
    pdf_psi,
    propagation_w,
    signaling_Gs,
)
from .problem import (
    MultiTermProblem,
    SymbolEval,
    ab_eval,
    analyticity_angle,
    g_eval,
    k_eval,
    root_symbol,
    validate,
    wavefront_symbol,
)
from .quadrature import QuadratureConfig, QuadratureResult, integrate_oscillatory, inverse_laplace_oracle
from .solver import (
    EigenExpansion,
    LineProblem,
    SolutionField,
    caputo_residual,
    composed_phi,
    dalembert,
    eigenmode,
    eigenmodes,
    solve_interval,
    solve_line,
)
from .wright import mainardi, single_term_kernel
