"""eta-functions, modulars, Luxemburg norms and approximation error metrics.

Integrals over the line are truncated to a finite window (default [-20, 20])
and computed by composite Gauss-Legendre quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .errors import ConfigurationError, DivergenceError, DomainError
from .signals import PiecewiseSignal

__all__ = [
    "Power",
    "LogPower",
    "Exponential",
    "EtaFunction",
    "parse_eta",
    "eta_eval",
    "composite_rule",
    "modular",
    "luxemburg_norm",
    "Delta2Result",
    "delta2_probe",
    "ErrorReport",
    "error_metrics",
]

DEFAULT_WINDOW = (-20.0, 20.0)
DEFAULT_PANELS = 800
_ORDER = 16


@dataclass(frozen=True)
class Power:
    """u**p, the L^p case."""

    p: float = 1.0

    def __post_init__(self):
        if not self.p >= 1:
            raise ConfigurationError("Power eta needs p >= 1")

    @property
    def name(self) -> str:
        return f"power:{self.p:g}"

    def __call__(self, u):
        return np.asarray(u, dtype=float) ** self.p

    def log(self, u):
        return self.p * np.log(u)


@dataclass(frozen=True)
class LogPower:
    """u**a * log(e + u)**b, the L^a log^b L case."""

    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        if not (self.a >= 1 and self.b > 0):
            raise ConfigurationError("LogPower eta needs a >= 1 and b > 0")

    @property
    def name(self) -> str:
        return f"logpower:{self.a:g}:{self.b:g}"

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return u ** self.a * np.log(math.e + u) ** self.b

    def log(self, u):
        return self.a * np.log(u) + self.b * np.log(np.log(math.e + u))


@dataclass(frozen=True)
class Exponential:
    """exp(u**a) - 1, the exponential Orlicz case."""

    a: float = 1.0

    def __post_init__(self):
        if not self.a > 0:
            raise ConfigurationError("Exponential eta needs a > 0")

    @property
    def name(self) -> str:
        return f"exp:{self.a:g}"

    def __call__(self, u):
        with np.errstate(over="ignore"):
            return np.expm1(np.asarray(u, dtype=float) ** self.a)

    def log(self, u):
        v = np.asarray(u, dtype=float) ** self.a
        # log(e^v - 1) = v + log(1 - e^-v)
        return v + np.log(-np.expm1(-v))


EtaFunction = Union[Power, LogPower, Exponential]


def parse_eta(text: str) -> EtaFunction:
    """``power:<p>``, ``logpower:<a>:<b>``, ``exp:<a>`` (``l1``, ``l2``, ``llogl`` also accepted)."""
    aliases = {"l1": "power:1", "l2": "power:2", "llogl": "logpower:1:1", "exp": "exp:1"}
    parts = aliases.get(text, text).split(":")
    try:
        if parts[0] == "power" and len(parts) == 2:
            return Power(float(parts[1]))
        if parts[0] == "logpower" and len(parts) == 3:
            return LogPower(float(parts[1]), float(parts[2]))
        if parts[0] == "exp" and len(parts) == 2:
            return Exponential(float(parts[1]))
    except ValueError:
        pass
    raise ConfigurationError(f"unknown eta function {text!r}")


def eta_eval(eta: EtaFunction, u):
    uu = np.asarray(u, dtype=float)
    if np.any(uu < 0):
        raise DomainError("eta functions are defined for u >= 0 only")
    out = eta(uu)
    return float(out) if np.ndim(out) == 0 else out


@lru_cache(maxsize=32)
def composite_rule(a: float, b: float, panels: int, order: int = _ORDER):
    """Nodes and weights of composite Gauss-Legendre on [a, b] with equal panels."""
    if not a < b:
        raise ConfigurationError("window needs a < b")
    if panels < 1:
        raise ConfigurationError("panel count must be positive")
    x, w = np.polynomial.legendre.leggauss(order)
    edges = a + (b - a) * np.arange(panels + 1) / panels
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    nodes = (half[:, None] * x + (0.5 * (lo + hi))[:, None]).ravel()
    weights = (half[:, None] * w).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _abs_values(h, window, panels):
    nodes, weights = composite_rule(float(window[0]), float(window[1]), int(panels))
    return np.abs(np.asarray(h(nodes), dtype=float)), weights


def _modular_from_values(eta, absvals, weights, lam):
    return float(weights @ eta(lam * absvals))


def modular(eta: EtaFunction, h: Callable, lam: float = 1.0,
            window: Sequence[float] = DEFAULT_WINDOW, grid_n: int = DEFAULT_PANELS) -> float:
    """int_window eta(lam |h(y)|) dy by composite Gauss-Legendre over ``grid_n`` panels.

    ``h`` receives an array of nodes.
    """
    if not lam > 0:
        raise ConfigurationError("lambda must be positive")
    absvals, weights = _abs_values(h, window, grid_n)
    return _modular_from_values(eta, absvals, weights, lam)


def luxemburg_norm(eta: EtaFunction, h: Callable, window: Sequence[float] = DEFAULT_WINDOW,
                   grid_n: int = DEFAULT_PANELS, rel_width: float = 1e-8) -> float:
    """inf{lam > 0 : I(h / lam) <= 1} on the window.

    The bracket starts at lam = 1 and is doubled or halved until the
    predicate flips, then bisected.
    """
    absvals, weights = _abs_values(h, window, grid_n)
    if not np.any(absvals > 0):
        return 0.0

    def fits(lam):
        return _modular_from_values(eta, absvals, weights, 1.0 / lam) <= 1.0

    lo = hi = 1.0
    if fits(hi):
        for _ in range(64):
            lo = hi / 2.0
            if not fits(lo):
                break
            hi = lo
        else:
            raise DivergenceError("Luxemburg bracket collapsed towards 0")
    else:
        for _ in range(64):
            lo, hi = hi, hi * 2.0
            if fits(hi):
                break
        else:
            raise DivergenceError("modular stays above 1 after 64 doublings")
    while hi - lo > rel_width * hi:
        mid = 0.5 * (lo + hi)
        if fits(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class Delta2Result:
    sup_ratio: float
    bounded: bool


def delta2_probe(eta: EtaFunction, u_grid: Iterable[float], threshold: float = 1e6) -> Delta2Result:
    """max eta(2u)/eta(u) over the grid.

    Flagged unbounded when the ratio at the largest grid point exceeds
    ``threshold`` and is still increasing there.
    """
    u = np.sort(np.asarray(list(u_grid), dtype=float))
    if u.size == 0 or np.any(u <= 0):
        raise ConfigurationError("delta2 probe needs a nonempty grid of positive numbers")
    with np.errstate(over="ignore"):
        ratio = np.exp(eta.log(2.0 * u) - eta.log(u))
    last = ratio[-1]
    increasing = u.size < 2 or last > ratio[-2]
    bounded = not (last > threshold and increasing)
    return Delta2Result(float(np.max(ratio)), bounded)


@dataclass
class ErrorReport:
    """Errors of an approximation sampled on a grid against the exact signal."""

    sup_error: float
    lp_errors: dict = field(default_factory=dict)
    modular_errors: dict = field(default_factory=dict)
    window: tuple = ()
    grid_n: int = 0
    sup_continuity_error: float = math.nan


def error_metrics(reference: PiecewiseSignal, ys, values, ps: Iterable[float] = (1, 2),
                  modulars: Iterable[tuple[EtaFunction, float]] = (),
                  jump_margin: float | None = None) -> ErrorReport:
    """sup, L^p and modular errors by the trapezoid rule on the sample grid.

    With ``jump_margin`` set, ``sup_continuity_error`` is the sup over grid
    points at least that far from every discontinuity of the reference.
    """
    ys = np.asarray(ys, dtype=float)
    values = np.asarray(values, dtype=float)
    if ys.size == 0:
        raise ConfigurationError("error metrics need a nonempty grid")
    if ys.shape != values.shape:
        raise ConfigurationError("grid and values differ in shape")
    if np.any(np.diff(ys) <= 0):
        raise ConfigurationError("grid must be strictly increasing")
    diff = np.abs(values - reference(ys))

    def integral(f):
        return float(np.trapezoid(f, ys)) if ys.size > 1 else 0.0

    report = ErrorReport(
        sup_error=float(diff.max()),
        lp_errors={p: integral(diff ** p) ** (1.0 / p) for p in ps},
        modular_errors={(eta.name, lam): integral(eta(lam * diff)) for eta, lam in modulars},
        window=(float(ys[0]), float(ys[-1])),
        grid_n=int(ys.size),
    )
    if jump_margin is not None:
        jumps = np.asarray(reference.discontinuities())
        if jumps.size:
            dist = np.min(np.abs(ys[:, None] - jumps[None, :]), axis=1)
            keep = dist >= jump_margin
        else:
            keep = np.ones_like(ys, dtype=bool)
        report.sup_continuity_error = float(diff[keep].max()) if keep.any() else math.nan
    return report
