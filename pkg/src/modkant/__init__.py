"""Sampling-series operators with t^alpha-warped Kantorovich means.

Kernels, piecewise signals, quadrature for the inner means, the three
sampling series, Orlicz-space error metrics and a batch CLI.
"""

from .errors import ConfigurationError, DivergenceError, DomainError, QuadratureError
from .kernels import (
    KernelSpec,
    absolute_moment0,
    bspline,
    fejer,
    jackson,
    kernel_eval,
    kernel_fourier,
    kernel_l1_norm,
    moment_estimate,
    parse_kernel,
    partition_defect,
)
from .operators import (
    ExactSupport,
    GridSpec,
    HalfWidth,
    OperatorKind,
    OperatorParams,
    evaluate,
    eval_generalized,
    eval_kantorovich,
    eval_modified,
)
from .orlicz import (
    Exponential,
    LogPower,
    Power,
    delta2_probe,
    error_metrics,
    luxemburg_norm,
    modular,
)
from .quadrature import adaptive_simpson, classical_mean, gauss_legendre, kantorovich_mean
from .signals import PiecewiseSignal, builtin_signal, constant_signal, parse_signal, signal_integrate

__version__ = "0.1.0"
