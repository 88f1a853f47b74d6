"""The three sampling series and their truncation.

generalized   sum_i g(i/w) chi(wy - i)
kantorovich   sum_i [w int_{i/w}^{(i+1)/w} g] chi(wy - i)
modified      sum_i [int_0^1 g((i + t^alpha)/(w+1)) dt] chi(wy - i)

Each series is evaluated over a finite index window around wy: the exact
support for compactly supported kernels, or round(wy) +- K otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import ConfigurationError
from .kernels import KernelSpec, kernel_eval
from .quadrature import classical_mean, kantorovich_mean
from .signals import PiecewiseSignal

__all__ = [
    "OperatorKind",
    "ExactSupport",
    "HalfWidth",
    "OperatorParams",
    "GridSpec",
    "default_truncation",
    "truncation_range",
    "truncation_error_bound",
    "coefficients",
    "evaluate",
    "eval_generalized",
    "eval_kantorovich",
    "eval_modified",
    "eval_on_grid",
]

DEFAULT_K = 1000
# entries per block of the (points x indices) kernel matrix
_BLOCK_ENTRIES = 1 << 22


class OperatorKind(str, Enum):
    GENERALIZED = "generalized"
    KANTOROVICH = "kantorovich"
    MODIFIED = "modified"


@dataclass(frozen=True)
class ExactSupport:
    pass


@dataclass(frozen=True)
class HalfWidth:
    K: int = DEFAULT_K

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ConfigurationError("truncation half-width K must be a positive integer")


Truncation = Union[ExactSupport, HalfWidth]


@dataclass(frozen=True)
class OperatorParams:
    kind: OperatorKind
    w: float
    alpha: float = 0.5
    truncation: Truncation = field(default_factory=HalfWidth)

    def __post_init__(self):
        object.__setattr__(self, "kind", OperatorKind(self.kind))
        if not self.w > 0:
            raise ConfigurationError("sampling rate w must be positive")
        if not self.alpha > 0:
            raise ConfigurationError("alpha must be positive")


@dataclass(frozen=True)
class GridSpec:
    a: float
    b: float
    n: int

    def __post_init__(self):
        if not self.a < self.b:
            raise ConfigurationError(f"grid needs a < b, got {self.a}:{self.b}")
        if int(self.n) != self.n or self.n < 2:
            raise ConfigurationError("grid needs n >= 2 points")

    def points(self) -> np.ndarray:
        k = np.arange(self.n)
        return self.a + k * (self.b - self.a) / (self.n - 1)


def default_truncation(kernel: KernelSpec) -> Truncation:
    return ExactSupport() if kernel.is_compact else HalfWidth(DEFAULT_K)


def _window(kernel: KernelSpec, trunc: Truncation, wy: np.ndarray):
    """Lowest index and width of the summation window for each wy."""
    if isinstance(trunc, ExactSupport):
        if not kernel.is_compact:
            raise ConfigurationError(
                f"exact-support truncation needs a compactly supported kernel, not {kernel.name}")
        r = kernel.support.radius
        lo = np.ceil(wy - r)
        hi = np.floor(wy + r)
        return lo.astype(np.int64), hi.astype(np.int64)
    centre = np.floor(wy + 0.5).astype(np.int64)
    return centre - trunc.K, centre + trunc.K


def truncation_range(kernel: KernelSpec, params: OperatorParams, y: float) -> tuple[int, int]:
    """Inclusive index range [i_lo, i_hi] used at the point y."""
    lo, hi = _window(kernel, params.truncation, np.asarray([params.w * y]))
    return int(lo[0]), int(hi[0])


def _envelope(kernel: KernelSpec):
    """(A, q) with |chi(x)| <= A |x|^-q for all x != 0."""
    if kernel.family == "fejer":
        return 2.0 / math.pi ** 2, 2.0
    if kernel.family == "jackson":
        n, s = kernel.n, kernel.stretch
        return kernel.normalization * (2.0 * n * s) ** (2 * n), 2.0 * n
    return 0.0, math.inf


def truncation_error_bound(kernel: KernelSpec, params: OperatorParams, sup_g: float) -> float:
    """Upper bound on |full series - truncated series| for |g| <= sup_g.

    Dropped indices satisfy |wy - i| >= K + 1/2, so each side contributes at
    most A sum_{j>=0} (K + 1/2 + j)^-q <= A K^(1-q)/(q-1).
    """
    if isinstance(params.truncation, ExactSupport) or kernel.is_compact:
        return 0.0 if kernel.is_compact else math.inf
    amp, q = _envelope(kernel)
    K = params.truncation.K
    return 2.0 * amp * K ** (1.0 - q) / (q - 1.0) * abs(sup_g)


@lru_cache(maxsize=1 << 18)
def _coefficient(signal: PiecewiseSignal, kind: OperatorKind, i: int, w: float, alpha: float) -> float:
    if kind is OperatorKind.GENERALIZED:
        return signal.value(i / w)
    if kind is OperatorKind.KANTOROVICH:
        return classical_mean(signal, i, w)
    return kantorovich_mean(signal, i, w, alpha)


def coefficients(signal: PiecewiseSignal, params: OperatorParams, indices) -> np.ndarray:
    """Sample values or means attached to each index (memoized per index)."""
    alpha = params.alpha if params.kind is OperatorKind.MODIFIED else 1.0
    w = float(params.w)
    return np.array([_coefficient(signal, params.kind, int(i), w, alpha) for i in indices])


def evaluate(kernel: KernelSpec, signal: PiecewiseSignal, params: OperatorParams, y):
    """Evaluate the series selected by ``params.kind`` at ``y`` (scalar or array)."""
    yy = np.asarray(y, dtype=float)
    flat = np.atleast_1d(yy).ravel()
    wy = params.w * flat
    lo, hi = _window(kernel, params.truncation, wy)
    out = np.zeros_like(flat)
    if flat.size:
        i_min, i_max = int(lo.min()), int(hi.max())
        table = coefficients(signal, params, range(i_min, i_max + 1))
        width = int((hi - lo).max()) + 1
        offsets = np.arange(width)
        rows = max(1, _BLOCK_ENTRIES // width)
        for start in range(0, flat.size, rows):
            sl = slice(start, start + rows)
            idx = lo[sl, None] + offsets[None, :]
            valid = idx <= hi[sl, None]
            idx_c = np.where(valid, idx, lo[sl, None])
            weights = kernel_eval(kernel, wy[sl, None] - idx_c)
            terms = np.where(valid, weights * table[idx_c - i_min], 0.0)
            out[sl] = terms.sum(axis=1)
    out = out.reshape(yy.shape)
    return float(out) if out.ndim == 0 else out


def _expect(params: OperatorParams, kind: OperatorKind):
    if params.kind is not kind:
        raise ConfigurationError(f"expected {kind.value} parameters, got {params.kind.value}")


def eval_generalized(kernel, signal, params: OperatorParams, y):
    _expect(params, OperatorKind.GENERALIZED)
    return evaluate(kernel, signal, params, y)


def eval_kantorovich(kernel, signal, params: OperatorParams, y):
    _expect(params, OperatorKind.KANTOROVICH)
    return evaluate(kernel, signal, params, y)


def eval_modified(kernel, signal, params: OperatorParams, y):
    _expect(params, OperatorKind.MODIFIED)
    return evaluate(kernel, signal, params, y)


def eval_on_grid(kernel, signal, params: OperatorParams, grid: GridSpec):
    """Grid points and series values, in grid order."""
    ys = grid.points()
    return ys, evaluate(kernel, signal, params, ys)
