"""Admissible sampling kernels and numeric checks of their admissibility.

Three families are supported:

* ``fejer``    F(y) = 1/2 sinc^2(y/2), decays like y^-2
* ``jackson``  J_n(y) = c_n sinc^{2n}(y / (2 n pi s)), decays like y^-2n
* ``bspline``  centred cardinal B-spline M_n, supported on [-n/2, n/2]

Sums over integer shifts (partition of unity, absolute moments) are
1-periodic in the shift variable, so suprema are approximated by maxima on a
uniform grid over [0, 1).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np
from scipy import integrate

from .errors import ConfigurationError, QuadratureError

__all__ = [
    "Compact",
    "Decay",
    "KernelSpec",
    "KernelDiagnostics",
    "MomentEstimate",
    "fejer",
    "jackson",
    "bspline",
    "parse_kernel",
    "sinc",
    "kernel_eval",
    "kernel_fourier",
    "kernel_l1_norm",
    "jackson_normalization",
    "partition_defect",
    "absolute_moment0",
    "moment_estimate",
    "lemma_tail_sum",
    "diagnose_kernel",
]

FAMILIES = ("fejer", "jackson", "bspline")

# Shift-sum matrices are built in column blocks of this many indices.
_BLOCK = 2048


@dataclass(frozen=True)
class Compact:
    radius: float


@dataclass(frozen=True)
class Decay:
    exponent: float


Support = Union[Compact, Decay]


@dataclass(frozen=True)
class KernelSpec:
    """Immutable description of a kernel.

    Build instances with :func:`fejer`, :func:`jackson` or :func:`bspline`
    rather than directly; the factories fill in ``support`` and
    ``normalization``.
    """

    family: str
    n: int = 1
    stretch: float = 1.0
    support: Support = field(default=Decay(2.0))
    normalization: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown kernel family {self.family!r}")
        if self.n < 1:
            raise ConfigurationError("kernel order n must be >= 1")
        if self.stretch < 1:
            raise ConfigurationError("Jackson stretch must be >= 1")
        if not self.normalization > 0:
            raise ConfigurationError("kernel normalization must be positive")

    @property
    def name(self) -> str:
        if self.family == "fejer":
            return "fejer"
        if self.family == "jackson":
            return f"jackson:{self.n}:{self.stretch:g}"
        return f"bspline:{self.n}"

    @property
    def is_compact(self) -> bool:
        return isinstance(self.support, Compact)

    def __call__(self, z):
        return kernel_eval(self, z)


def fejer() -> KernelSpec:
    return KernelSpec("fejer", support=Decay(2.0))


def jackson(n: int = 1, stretch: float = 1.0) -> KernelSpec:
    n = int(n)
    stretch = float(stretch)
    if n < 1 or stretch < 1:
        raise ConfigurationError("jackson kernel needs n >= 1 and stretch >= 1")
    return KernelSpec(
        "jackson",
        n=n,
        stretch=stretch,
        support=Decay(2.0 * n),
        normalization=jackson_normalization(n, stretch),
    )


def bspline(n: int = 3) -> KernelSpec:
    n = int(n)
    if n < 1:
        raise ConfigurationError("bspline order must be >= 1")
    return KernelSpec("bspline", n=n, support=Compact(n / 2.0))


def parse_kernel(selector: str) -> KernelSpec:
    """Parse ``fejer``, ``jackson:<n>[:<stretch>]`` or ``bspline:<n>``."""
    parts = selector.strip().lower().split(":")
    try:
        if parts[0] == "fejer" and len(parts) == 1:
            return fejer()
        if parts[0] == "jackson" and len(parts) in (2, 3):
            stretch = float(parts[2]) if len(parts) == 3 else 1.0
            return jackson(int(parts[1]), stretch)
        if parts[0] == "bspline" and len(parts) == 2:
            return bspline(int(parts[1]))
        if parts[0] == "bspline3" and len(parts) == 1:
            return bspline(3)
    except ValueError as exc:
        raise ConfigurationError(f"bad kernel selector {selector!r}: {exc}") from None
    raise ConfigurationError(
        f"unknown kernel selector {selector!r}; valid: fejer, jackson:<n>[:<stretch>], bspline:<n>"
    )


def sinc(y):
    """Normalized sinc, sin(pi y)/(pi y) with value 1 at the origin."""
    out = np.sinc(np.asarray(y, dtype=float))
    return float(out) if out.ndim == 0 else out


def _bspline_eval(n: int, z: np.ndarray) -> np.ndarray:
    # truncated-power form; cancellation stays below 1e-10 for n <= 8
    acc = np.zeros_like(z)
    for m in range(n + 1):
        x = n / 2.0 + z - m
        if n == 1:
            term = (x >= 0).astype(float)
        else:
            term = np.where(x > 0, x, 0.0) ** (n - 1)
        acc += (-1) ** m * math.comb(n, m) * term
    acc /= math.factorial(n - 1)
    acc[np.abs(z) > n / 2.0] = 0.0
    return acc


def kernel_eval(kernel: KernelSpec, z):
    """Evaluate the kernel at ``z`` (scalar or array)."""
    zz = np.asarray(z, dtype=float)
    if kernel.family == "fejer":
        out = 0.5 * np.sinc(zz / 2.0) ** 2
    elif kernel.family == "jackson":
        arg = zz / (2.0 * kernel.n * math.pi * kernel.stretch)
        out = kernel.normalization * np.sinc(arg) ** (2 * kernel.n)
    else:
        out = _bspline_eval(kernel.n, np.atleast_1d(zz)).reshape(zz.shape)
    return float(out) if np.ndim(out) == 0 else out


def kernel_fourier(kernel: KernelSpec, u):
    """Fourier transform  int chi(x) exp(-i u x) dx, or ``None`` if not known.

    Jackson kernels only have a known band limit, so ``None`` is returned
    for them.
    """
    uu = np.asarray(u, dtype=float)
    if kernel.family == "fejer":
        out = np.where(np.abs(uu) <= math.pi, 1.0 - np.abs(uu) / math.pi, 0.0)
    elif kernel.family == "bspline":
        out = np.sinc(uu / (2.0 * math.pi)) ** kernel.n
    else:
        return None
    return float(out) if out.ndim == 0 else out


def kernel_l1_norm(kernel: KernelSpec) -> float:
    """||chi||_1. All supported kernels are nonnegative with unit integral."""
    return 1.0


@lru_cache(maxsize=64)
def jackson_normalization(n: int, stretch: float = 1.0) -> float:
    """c_n = 1 / int sinc^{2n}(u / (2 n pi s)) du, by quadrature.

    The integral is 4 n pi s int_0^inf sinc^{2n}(v) dv. The range [0, 1] is
    handled by plain adaptive quadrature; on [1, inf) sin^{2n} is expanded
    into cosines and each term goes through QUADPACK's Fourier routine.
    """
    if n < 1 or stretch < 1:
        raise ConfigurationError("jackson normalization needs n >= 1, stretch >= 1")
    p = 2 * n
    head, head_err = integrate.quad(lambda v: np.sinc(v) ** p, 0.0, 1.0,
                                    epsabs=0.0, epsrel=1e-13, limit=200)
    # sin^{2n} x = 4^-n [C(2n,n) + 2 sum_k (-1)^k C(2n,n-k) cos(2kx)]
    scale = math.pi ** -p / 4.0 ** n
    tail = scale * math.comb(p, n) / (p - 1)
    tail_err = 0.0
    for k in range(1, n + 1):
        with warnings.catch_warnings():
            # QAWF reports cycle-level roughness here; the returned error bound is checked below
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(lambda v: v ** -p, 1.0, np.inf, weight="cos",
                                      wvar=2.0 * k * math.pi, epsabs=1e-15, limlst=100)
        coef = scale * 2.0 * (-1) ** k * math.comb(p, n - k)
        tail += coef * val
        tail_err += abs(coef) * err
    total = head + tail
    if not np.isfinite(total) or head_err + tail_err > 1e-10 * abs(total):
        raise QuadratureError(
            f"Jackson normalization did not converge for n={n}, stretch={stretch}",
            partial=1.0 / (4.0 * n * math.pi * stretch * total),
        )
    return 1.0 / (4.0 * n * math.pi * stretch * total)


# ---------------------------------------------------------------------------
# admissibility diagnostics
# ---------------------------------------------------------------------------


def _shift_grid(grid_density: int) -> np.ndarray:
    if grid_density < 1:
        raise ConfigurationError("grid_density must be positive")
    return np.arange(grid_density, dtype=float) / grid_density


def _shift_indices(kernel: KernelSpec, K: int) -> np.ndarray:
    if kernel.is_compact:
        r = kernel.support.radius
        return np.arange(math.floor(-r) - 1, math.ceil(1 + r) + 2)
    if K < 1:
        raise ConfigurationError("truncation K must be >= 1")
    return np.arange(-K, K + 1)


def _shift_sum(kernel: KernelSpec, z: np.ndarray, indices: np.ndarray, weight=None):
    """sum_i f(z - i) over ``indices`` for every z, in column blocks."""
    total = np.zeros_like(z)
    for start in range(0, len(indices), _BLOCK):
        d = z[:, None] - indices[None, start:start + _BLOCK]
        vals = kernel_eval(kernel, d)
        if weight is not None:
            vals = weight(vals, d)
        total += vals.sum(axis=1)
    return total


def partition_defect(kernel: KernelSpec, grid_density: int = 1000, K: int = 1000) -> float:
    """max_z |sum_{|i|<=K} chi(z - i) - 1| on a uniform grid over [0, 1)."""
    z = _shift_grid(grid_density)
    s = _shift_sum(kernel, z, _shift_indices(kernel, K))
    return float(np.max(np.abs(s - 1.0)))


def absolute_moment0(kernel: KernelSpec, grid_density: int = 1000, K: int = 1000) -> float:
    """max_z sum_{|i|<=K} |chi(z - i)|."""
    z = _shift_grid(grid_density)
    s = _shift_sum(kernel, z, _shift_indices(kernel, K), weight=lambda v, d: np.abs(v))
    return float(np.max(s))


def _tail_amplitude(kernel: KernelSpec) -> float:
    """Mean amplitude A with |chi(x)| ~ A |x|^-q averaged over integer shifts."""
    if kernel.family == "fejer":
        # 2 sin^2(pi x / 2) / (pi x)^2; sin^2 alternates between sin^2 and cos^2
        return 1.0 / math.pi ** 2
    n, s = kernel.n, kernel.stretch
    mean_power = math.comb(2 * n, n) / 4.0 ** n
    return kernel.normalization * (2.0 * n * s) ** (2 * n) * mean_power


def _moment_tail(kernel: KernelSpec, z: np.ndarray, beta: float, K: int) -> np.ndarray:
    """Asymptotic estimate of sum_{|i|>K} |chi(z - i)| |z - i|^beta."""
    if kernel.is_compact:
        return np.zeros_like(z)
    q = kernel.support.exponent
    expo = beta - q + 1.0
    if expo >= 0.0:
        return np.full_like(z, np.inf)
    amp = _tail_amplitude(kernel)
    right = (K + 0.5 - z) ** expo
    left = (K + 0.5 + z) ** expo
    return amp * (right + left) / (-expo)


@dataclass(frozen=True)
class MomentEstimate:
    """Estimate of m_beta(chi) = sup_z sum_i |chi(z - i)| |z - i|^beta.

    ``value`` is the tail-corrected estimate at K, ``partial_sum`` the plain
    truncated sum, ``doubled`` the tail-corrected estimate at 2K.
    """

    beta: float
    K: int
    value: float
    partial_sum: float
    doubled: float
    diverged: bool

    @property
    def relative_change(self) -> float:
        if not (np.isfinite(self.value) and np.isfinite(self.doubled)):
            return math.inf
        return abs(self.doubled - self.value) / max(abs(self.value), 1e-300)


def _moment_at(kernel, z, beta, K):
    weight = lambda v, d: np.abs(v) * np.abs(d) ** beta  # noqa: E731
    partial = _shift_sum(kernel, z, _shift_indices(kernel, K), weight=weight)
    corrected = partial + _moment_tail(kernel, z, beta, K)
    return float(np.max(corrected)), float(np.max(partial))


def moment_estimate(kernel: KernelSpec, beta: float, grid_density: int = 1000,
                    K: int = 1000, rel_tol: float = 1e-3) -> MomentEstimate:
    """Estimate the beta-th absolute moment and flag divergence.

    For decay kernels the truncated sum is completed with the asymptotic tail
    sum_{|i|>K} A |z - i|^{beta - q}; that tail is infinite when
    beta >= q - 1. The estimate is flagged divergent if it is infinite or
    moves by more than ``rel_tol`` (relative) when K is doubled.
    """
    if not beta > 0:
        raise ConfigurationError("beta must be positive")
    z = _shift_grid(grid_density)
    value, partial = _moment_at(kernel, z, beta, K)
    doubled, _ = _moment_at(kernel, z, beta, 2 * K)
    est = MomentEstimate(beta, K, value, partial, doubled, False)
    diverged = not np.isfinite(value) or est.relative_change > rel_tol
    return MomentEstimate(beta, K, value, partial, doubled, diverged)


def lemma_tail_sum(kernel: KernelSpec, y: float, w: float, gamma: float, K: int = 10000) -> float:
    """sum over |wy - i| > gamma w of |chi(wy - i)|, truncated to |i - round(wy)| <= K."""
    wy = w * y
    centre = math.floor(wy + 0.5)
    i = np.arange(centre - K, centre + K + 1)
    d = wy - i
    vals = np.abs(kernel_eval(kernel, d))
    return float(vals[np.abs(d) > gamma * w].sum())


@dataclass(frozen=True)
class KernelDiagnostics:
    kernel: str
    partition_defect: float
    mu0: float
    moment_beta: float
    moment_value: float
    moment_diverged: bool
    truncation_K: int
    grid_density: int


def diagnose_kernel(kernel: KernelSpec, beta: float = 0.5, grid_density: int = 1000,
                    K: int = 1000) -> KernelDiagnostics:
    moment = moment_estimate(kernel, beta, grid_density, K)
    return KernelDiagnostics(
        kernel=kernel.name,
        partition_defect=partition_defect(kernel, grid_density, K),
        mu0=absolute_moment0(kernel, grid_density, K),
        moment_beta=beta,
        moment_value=moment.value,
        moment_diverged=moment.diverged,
        truncation_K=K,
        grid_density=grid_density,
    )
