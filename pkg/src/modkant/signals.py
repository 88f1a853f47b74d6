"""Piecewise test signals with exact integrals.

A signal is a partition of the real line into left-closed, right-open pieces,
each carrying either a polynomial or a power law ``scale * y**exponent``.
Isolated point values can override the piece value (used for the closed
right endpoint of f1).
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import ConfigurationError, DomainError

__all__ = [
    "Polynomial",
    "PowerTail",
    "Piece",
    "PiecewiseSignal",
    "builtin_signal",
    "constant_signal",
    "load_signal",
    "parse_signal",
    "signal_eval",
    "signal_integrate",
    "signal_lp_norm",
]

_GL_ORDER = 16


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with coefficients in ascending powers."""

    coefficients: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients) or (0.0,))

    def __call__(self, y):
        return npoly.polyval(y, self.coefficients)

    def primitive(self, y):
        return npoly.polyval(y, npoly.polyint(self.coefficients))

    @property
    def is_constant(self) -> bool:
        return all(c == 0.0 for c in self.coefficients[1:])

    def scaled(self, c: float) -> "Polynomial":
        return Polynomial(tuple(c * a for a in self.coefficients))


@dataclass(frozen=True)
class PowerTail:
    """``scale * y**exponent`` with an integer exponent."""

    scale: float
    exponent: int

    def __post_init__(self):
        if int(self.exponent) != self.exponent:
            raise ConfigurationError("power tail exponent must be an integer")
        object.__setattr__(self, "exponent", int(self.exponent))
        object.__setattr__(self, "scale", float(self.scale))

    def __call__(self, y):
        return self.scale * np.asarray(y, dtype=float) ** self.exponent

    def primitive(self, y):
        m = self.exponent
        if m == -1:
            return self.scale * np.log(np.abs(y))
        return self.scale * np.asarray(y, dtype=float) ** (m + 1) / (m + 1)

    @property
    def is_constant(self) -> bool:
        return self.scale == 0.0 or self.exponent == 0

    def scaled(self, c: float) -> "PowerTail":
        return PowerTail(c * self.scale, self.exponent)


Form = Union[Polynomial, PowerTail]


@dataclass(frozen=True)
class Piece:
    lower: float
    upper: float
    form: Form


def _form_value(form: Form, y: float) -> float:
    if isinstance(form, Polynomial):
        acc = 0.0
        for c in reversed(form.coefficients):
            acc = acc * y + c
        return acc
    return form.scale * y ** form.exponent


@dataclass(frozen=True)
class PiecewiseSignal:
    """A real function on the line given piece by piece.

    ``pieces`` must tile the line: the first piece starts at -inf, the last
    ends at +inf and neighbouring bounds coincide. ``point_values`` holds
    ``(y, value)`` overrides for isolated points.
    """

    pieces: tuple[Piece, ...]
    point_values: tuple[tuple[float, float], ...] = ()
    name: str = ""

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise ConfigurationError("a signal needs at least one piece")
        if pieces[0].lower != -math.inf or pieces[-1].upper != math.inf:
            raise ConfigurationError("pieces must start at -inf and end at +inf")
        for left, right in zip(pieces, pieces[1:]):
            if left.upper != right.lower:
                raise ConfigurationError(
                    f"pieces must be contiguous: {left.upper} != {right.lower}")
        for p in pieces:
            if not p.lower < p.upper:
                raise ConfigurationError(f"empty piece [{p.lower}, {p.upper})")
            if isinstance(p.form, PowerTail):
                unbounded = math.isinf(p.lower) or math.isinf(p.upper)
                if unbounded and p.form.exponent > -2 and p.form.scale != 0.0:
                    raise ConfigurationError("unbounded power-law pieces need exponent <= -2")
                if p.form.exponent < 0 and p.lower <= 0.0 <= p.upper:
                    raise ConfigurationError("power-law piece contains the pole at 0")
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "point_values",
                           tuple((float(y), float(v)) for y, v in self.point_values))

    # -- structure ---------------------------------------------------------

    @property
    def breakpoints(self) -> np.ndarray:
        return np.array([p.upper for p in self.pieces[:-1]], dtype=float)

    def piece_index(self, y):
        return np.searchsorted(self.breakpoints, y, side="right")

    def discontinuities(self) -> list[float]:
        """Breakpoints where the one-sided limits differ."""
        out = []
        for left, right in zip(self.pieces, self.pieces[1:]):
            b = left.upper
            if abs(_form_value(left.form, b) - _form_value(right.form, b)) > 1e-12:
                out.append(b)
        out.extend(y for y, _ in self.point_values)
        return sorted(set(out))

    def sup_abs(self, window: tuple[float, float] = (-1e3, 1e3), n: int = 20001) -> float:
        """Approximate sup |g| on ``window`` (exact for piecewise constants)."""
        pts = [np.linspace(*window, n), self.breakpoints]
        for p in self.pieces:
            if isinstance(p.form, PowerTail) and p.form.exponent < 0:
                pts.append([p.lower, p.upper])
        ys = np.concatenate([np.asarray(a, float).ravel() for a in pts])
        ys = ys[np.isfinite(ys)]
        return float(np.max(np.abs(self(ys)))) if ys.size else 0.0

    # -- evaluation --------------------------------------------------------

    def __call__(self, y):
        return signal_eval(self, y)

    def value(self, y: float) -> float:
        """Scalar evaluation without numpy overhead."""
        for py, pv in self.point_values:
            if y == py:
                return pv
        k = bisect.bisect_right(self._bp_list, y)
        return _form_value(self.pieces[k].form, y)

    @property
    def _bp_list(self) -> list[float]:
        cached = self.__dict__.get("_bp_cache")
        if cached is None:
            cached = [p.upper for p in self.pieces[:-1]]
            object.__setattr__(self, "_bp_cache", cached)
        return cached

    def integrate(self, a: float, b: float) -> float:
        return signal_integrate(self, a, b)

    # -- linear structure -------------------------------------------------

    def __mul__(self, c: float) -> "PiecewiseSignal":
        c = float(c)
        return PiecewiseSignal(
            tuple(Piece(p.lower, p.upper, p.form.scaled(c)) for p in self.pieces),
            tuple((y, c * v) for y, v in self.point_values),
        )

    __rmul__ = __mul__

    def __add__(self, other: "PiecewiseSignal") -> "PiecewiseSignal":
        if not isinstance(other, PiecewiseSignal):
            return NotImplemented
        cuts = sorted(set(self.breakpoints.tolist()) | set(other.breakpoints.tolist()))
        edges = [-math.inf, *cuts, math.inf]
        pieces = []
        for lo, hi in zip(edges, edges[1:]):
            probe = _probe_point(lo, hi)
            fa = self.pieces[int(self.piece_index(probe))].form
            fb = other.pieces[int(other.piece_index(probe))].form
            pieces.append(Piece(lo, hi, _add_forms(fa, fb)))
        points = {}
        for y in {y for y, _ in self.point_values} | {y for y, _ in other.point_values}:
            points[y] = self.value(y) + other.value(y)
        return PiecewiseSignal(tuple(pieces), tuple(sorted(points.items())))

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        def bound(x):
            return None if math.isinf(x) else x

        def form(f):
            if isinstance(f, Polynomial):
                return {"type": "polynomial", "coefficients": list(f.coefficients)}
            return {"type": "power", "scale": f.scale, "exponent": f.exponent}

        return {
            "name": self.name,
            "pieces": [{"lower": bound(p.lower), "upper": bound(p.upper), "form": form(p.form)}
                       for p in self.pieces],
            "point_values": [list(pv) for pv in self.point_values],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PiecewiseSignal":
        try:
            pieces = []
            for raw in data["pieces"]:
                lo = -math.inf if raw.get("lower") is None else float(raw["lower"])
                hi = math.inf if raw.get("upper") is None else float(raw["upper"])
                f = raw["form"]
                if f["type"] == "polynomial":
                    form = Polynomial(tuple(f["coefficients"]))
                elif f["type"] in ("power", "power_tail"):
                    form = PowerTail(f["scale"], f["exponent"])
                elif f["type"] == "constant":
                    form = Polynomial((f["value"],))
                else:
                    raise ConfigurationError(f"unknown piece form {f['type']!r}")
                pieces.append(Piece(lo, hi, form))
            points = tuple((float(y), float(v)) for y, v in data.get("point_values", []))
        except (KeyError, TypeError) as exc:
            raise ConfigurationError(f"malformed signal definition: {exc}") from None
        return cls(tuple(pieces), points, name=data.get("name", ""))


def _probe_point(lo: float, hi: float) -> float:
    if math.isinf(lo) and math.isinf(hi):
        return 0.0
    if math.isinf(lo):
        return hi - 1.0
    if math.isinf(hi):
        return lo + 1.0
    return 0.5 * (lo + hi)


def _add_forms(a: Form, b: Form) -> Form:
    if isinstance(a, Polynomial) and isinstance(b, Polynomial):
        return Polynomial(tuple(npoly.polyadd(a.coefficients, b.coefficients)))
    if isinstance(a, Polynomial) and not any(a.coefficients):
        return b
    if isinstance(b, Polynomial) and not any(b.coefficients):
        return a
    if isinstance(a, PowerTail) and isinstance(b, PowerTail) and a.exponent == b.exponent:
        return PowerTail(a.scale + b.scale, a.exponent)
    raise ConfigurationError("cannot add these piece forms into a single piece")


def _zero() -> Polynomial:
    return Polynomial((0.0,))


def _const(c: float) -> Polynomial:
    return Polynomial((float(c),))


def builtin_signal(name: str) -> PiecewiseSignal:
    """The two discontinuous test functions ``f1`` and ``f2``."""
    inf = math.inf
    if name == "f1":
        # closed interval [-1, 1]: right endpoint restored by a point value
        return PiecewiseSignal(
            (Piece(-inf, -1.0, _zero()), Piece(-1.0, 1.0, _const(1.0)), Piece(1.0, inf, _zero())),
            point_values=((1.0, 1.0),),
            name="f1",
        )
    if name == "f2":
        return PiecewiseSignal(
            (
                Piece(-inf, -3.0, PowerTail(9.0, -2)),
                Piece(-3.0, -2.0, _const(2.0)),
                Piece(-2.0, -1.0, _const(-0.5)),
                Piece(-1.0, 0.0, _const(1.5)),
                Piece(0.0, 1.0, _const(1.0)),
                Piece(1.0, 2.0, _const(-1.0)),
                Piece(2.0, 3.0, _const(0.0)),
                Piece(3.0, inf, PowerTail(-50.0, -4)),
            ),
            name="f2",
        )
    raise ConfigurationError(f"unknown builtin signal {name!r}; valid: f1, f2")


def constant_signal(c: float) -> PiecewiseSignal:
    """g = c on the whole line (not integrable unless c = 0)."""
    return PiecewiseSignal((Piece(-math.inf, math.inf, _const(c)),), name=f"const{c:g}")


def load_signal(path) -> PiecewiseSignal:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigurationError(f"cannot read signal file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"signal file {path} is not valid JSON: {exc}") from None
    sig = PiecewiseSignal.from_dict(data)
    if not sig.name:
        sig = PiecewiseSignal(sig.pieces, sig.point_values, name=path.stem)
    return sig


def parse_signal(selector: str) -> PiecewiseSignal:
    """``f1``, ``f2`` or ``@path/to/signal.json``."""
    if selector.startswith("@"):
        return load_signal(selector[1:])
    return builtin_signal(selector)


def signal_eval(signal: PiecewiseSignal, y):
    yy = np.asarray(y, dtype=float)
    flat = np.atleast_1d(yy).ravel()
    idx = signal.piece_index(flat)
    out = np.empty_like(flat)
    for k in np.unique(idx):
        mask = idx == k
        out[mask] = signal.pieces[k].form(flat[mask])
    for py, pv in signal.point_values:
        out[flat == py] = pv
    out = out.reshape(yy.shape)
    return float(out) if out.ndim == 0 else out


def _clipped(signal: PiecewiseSignal, a: float, b: float):
    for p in signal.pieces:
        lo, hi = max(a, p.lower), min(b, p.upper)
        if lo < hi:
            yield lo, hi, p.form


def signal_integrate(signal: PiecewiseSignal, a: float, b: float) -> float:
    """Exact integral over [a, b] from per-piece antiderivatives."""
    if b < a:
        raise ConfigurationError("signal_integrate needs a <= b")
    total = 0.0
    for lo, hi, form in _clipped(signal, a, b):
        if isinstance(form, PowerTail):
            if form.exponent < 0 and lo <= 0.0 <= hi:
                raise DomainError("integration interval crosses the power-law pole at 0")
            if math.isinf(lo) or math.isinf(hi):
                if form.exponent >= -1 and form.scale != 0.0:
                    raise DomainError("power tail is not integrable at infinity")
                # primitive vanishes at +-inf for exponent <= -2
                plo = 0.0 if math.isinf(lo) else form.primitive(lo)
                phi = 0.0 if math.isinf(hi) else form.primitive(hi)
                total += float(phi - plo)
                continue
        elif math.isinf(lo) or math.isinf(hi):
            if any(form.coefficients):
                raise DomainError("polynomial piece is not integrable at infinity")
            continue
        total += float(form.primitive(hi) - form.primitive(lo))
    return total


def _gauss(order: int = _GL_ORDER):
    return np.polynomial.legendre.leggauss(order)


def _real_roots_inside(form: Polynomial, lo: float, hi: float) -> list[float]:
    coeffs = np.trim_zeros(np.asarray(form.coefficients), "b")
    if coeffs.size <= 1:
        return []
    roots = npoly.polyroots(coeffs)
    real = roots[np.abs(roots.imag) < 1e-12].real
    return sorted(r for r in real if lo < r < hi)


def _power_abs_integral(form: PowerTail, p: float, lo: float, hi: float) -> float:
    """int_lo^hi |c y^m|^p dy in closed form; [lo, hi] lies on one side of 0."""
    e = form.exponent * p
    a, b = sorted((abs(lo), abs(hi)))
    if e == -1.0:
        return abs(form.scale) ** p * math.log(b / a)
    return abs(form.scale) ** p * (b ** (e + 1) - a ** (e + 1)) / (e + 1)


def signal_lp_norm(signal: PiecewiseSignal, p: float, window: Sequence[float]) -> float:
    """(int_a^b |g|^p)^(1/p), exact on constant pieces, Gauss-Legendre otherwise."""
    a, b = float(window[0]), float(window[1])
    if not p >= 1:
        raise ConfigurationError("p must be >= 1")
    if not a < b:
        raise ConfigurationError("window needs a < b")
    x, wts = _gauss()
    total = 0.0
    for lo, hi, form in _clipped(signal, a, b):
        if form.is_constant:
            total += abs(float(form(lo))) ** p * (hi - lo)
            continue
        if isinstance(form, PowerTail):
            if form.exponent < 0 and lo <= 0.0 <= hi:
                raise DomainError("norm window crosses the power-law pole at 0")
            total += _power_abs_integral(form, p, lo, hi)
            continue
        cuts = [lo]
        if isinstance(form, Polynomial):
            cuts += _real_roots_inside(form, lo, hi)
        cuts.append(hi)
        for s, t in zip(cuts, cuts[1:]):
            nodes = 0.5 * (t - s) * x + 0.5 * (t + s)
            total += 0.5 * (t - s) * float(wts @ np.abs(form(nodes)) ** p)
    return total ** (1.0 / p)
