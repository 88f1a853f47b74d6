"""Inner means of the sampling series and the quadrature rules behind them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ConfigurationError, QuadratureError
from .signals import PiecewiseSignal, signal_integrate

__all__ = [
    "MeanRequest",
    "gauss_legendre",
    "adaptive_simpson",
    "kantorovich_mean",
    "classical_mean",
    "modified_mean_alpha_one",
    "mean_integrand_simpson",
]

DEFAULT_ORDER = 16
# geometric ratio of graded panels towards t = 0; GL16 error per panel ~ 1e-17
_GRADING = 0.3
_GRADING_FLOOR = 1e-15


@lru_cache(maxsize=None)
def _legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(f: Callable, a: float, b: float, order: int = DEFAULT_ORDER) -> float:
    """Gauss-Legendre estimate of the integral of ``f`` over [a, b].

    ``f`` is called once with the array of nodes.
    """
    if not 2 <= order <= 64:
        raise ConfigurationError("Gauss-Legendre order must lie in [2, 64]")
    if b < a:
        raise ConfigurationError("gauss_legendre needs a <= b")
    x, w = _legendre(order)
    half = 0.5 * (b - a)
    nodes = half * x + 0.5 * (a + b)
    return float(half * (w @ np.asarray(f(nodes), dtype=float)))


def adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10,
                     max_depth: int = 40) -> float:
    """Adaptive Simpson quadrature with absolute tolerance ``tol``.

    ``f`` is called on scalars. The local tolerance halves with every split
    but never drops below ``tol / 64``; without that floor a jump
    discontinuity can never be resolved. Raises :class:`QuadratureError`
    carrying the partial estimate when a panel needs more than ``max_depth``
    splits.
    """
    if b < a:
        raise ConfigurationError("adaptive_simpson needs a <= b")
    if not tol > 0:
        raise ConfigurationError("tol must be positive")
    if a == b:
        return 0.0
    floor = tol / 64.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    total = 0.0
    failed = False
    while stack:
        lo, hi, flo, fmid, fhi, est, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - est
        if abs(delta) <= 15.0 * eps or mid <= lo or hi <= mid:
            total += left + right + delta / 15.0
        elif depth >= max_depth:
            failed = True
            total += left + right + delta / 15.0
        else:
            sub = max(0.5 * eps, floor)
            stack.append((mid, hi, fmid, frm, fhi, right, sub, depth + 1))
            stack.append((lo, mid, flo, flm, fmid, left, sub, depth + 1))
    if failed:
        raise QuadratureError(f"adaptive Simpson hit depth cap {max_depth}", partial=total)
    return total


@dataclass(frozen=True)
class MeanRequest:
    """One inner mean  int_0^1 g((i + t^alpha)/(w + 1)) dt."""

    signal: PiecewiseSignal
    i: int
    w: float
    alpha: float

    def __post_init__(self):
        _check_rate(self.w)
        _check_alpha(self.alpha)

    def evaluate(self, order: int = DEFAULT_ORDER) -> float:
        return kantorovich_mean(self.signal, self.i, self.w, self.alpha, order)

    def integrand(self, t: float) -> float:
        return self.signal.value((self.i + t ** self.alpha) / (self.w + 1.0))


def _check_rate(w):
    if not w > 0:
        raise ConfigurationError("sampling rate w must be positive")


def _check_alpha(alpha):
    if not alpha > 0:
        raise ConfigurationError("alpha must be positive")


def _smooth_power(alpha: float) -> bool:
    return alpha >= 1.0 and float(alpha).is_integer()


def _graded_edges(a: float, b: float) -> list[float]:
    """Split [a, b] geometrically towards 0 so each panel stays away from t = 0."""
    if a >= _GRADING * b:
        return [a, b]
    pts = [b]
    x = b * _GRADING
    stop = max(a, b * _GRADING_FLOOR)
    while x > stop:
        pts.append(x)
        x *= _GRADING
    pts.append(a)
    return pts[::-1]


def _panel_rule(edges, order: int, graded: bool):
    x, w = _legendre(order)
    lo_list, hi_list = [], []
    for a, b in zip(edges, edges[1:]):
        sub = _graded_edges(a, b) if graded else [a, b]
        lo_list.extend(sub[:-1])
        hi_list.extend(sub[1:])
    lo = np.array(lo_list)
    hi = np.array(hi_list)
    half = 0.5 * (hi - lo)
    nodes = (half[:, None] * x[None, :] + (0.5 * (lo + hi))[:, None]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def kantorovich_mean(signal: PiecewiseSignal, i: int, w: float, alpha: float,
                     order: int = DEFAULT_ORDER) -> float:
    """int_0^1 g((i + t^alpha)/(w + 1)) dt.

    The t-interval is cut where the argument crosses a breakpoint of g,
    t = ((w+1) b - i)^(1/alpha), and each piece gets Gauss-Legendre of the
    given order. Unless alpha is a positive integer, t^alpha is not smooth at
    t = 0, so panels touching or close to 0 are graded geometrically.
    """
    _check_rate(w)
    _check_alpha(alpha)
    scale = w + 1.0
    s = scale * signal.breakpoints - i
    s = s[(s > 0.0) & (s < 1.0)]
    cuts = np.sort(s ** (1.0 / alpha))
    edges = [0.0, *cuts.tolist(), 1.0]
    nodes, weights = _panel_rule(edges, order, graded=not _smooth_power(alpha))
    values = signal((i + nodes ** alpha) / scale)
    return float(weights @ values)


def classical_mean(signal: PiecewiseSignal, i: int, w: float) -> float:
    """w * int_{i/w}^{(i+1)/w} g(u) du, computed exactly."""
    _check_rate(w)
    return w * signal_integrate(signal, i / w, (i + 1) / w)


def modified_mean_alpha_one(signal: PiecewiseSignal, i: int, w: float) -> float:
    """(w+1) * int over [i/(w+1), (i+1)/(w+1)]: the alpha = 1 case in closed form."""
    _check_rate(w)
    return (w + 1.0) * signal_integrate(signal, i / (w + 1.0), (i + 1) / (w + 1.0))


def mean_integrand_simpson(signal: PiecewiseSignal, i: int, w: float, alpha: float,
                           tol: float = 1e-10) -> float:
    """Oracle for :func:`kantorovich_mean`: adaptive Simpson with no breakpoint knowledge."""
    req = MeanRequest(signal, i, w, alpha)
    return adaptive_simpson(req.integrand, 0.0, 1.0, tol)

