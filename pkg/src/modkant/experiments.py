"""Batch experiments: operator comparison, convergence sweeps, kernel diagnostics."""

from __future__ import annotations

import csv
import dataclasses
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .kernels import (
    absolute_moment0,
    lemma_tail_sum,
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
    default_truncation,
    evaluate,
)
from .orlicz import Exponential, LogPower, error_metrics
from .signals import parse_signal

__all__ = [
    "ExperimentConfig",
    "ResultRow",
    "FIGURE_SETTINGS",
    "run_compare",
    "run_convergence",
    "run_diagnose",
    "run_figure_settings",
    "emit_csv",
    "parse_truncation",
]

METRICS = ("sup", "sup_cont", "l1", "l2", "llogl", "exp")
OPERATOR_COLUMNS = {
    OperatorKind.GENERALIZED: ("tchi_w", "abs_err_tchi"),
    OperatorKind.KANTOROVICH: ("s_w", "abs_err_s"),
    OperatorKind.MODIFIED: ("t_w", "abs_err_t"),
}

# kernels x signals x rates of the comparison figures, all at alpha = 1/2
FIGURE_SETTINGS = {
    "kernels": ("fejer", "bspline:3"),
    "signals": ("f1", "f2"),
    "w_list": (5.0, 10.0),
    "alpha": 0.5,
    "windows": {"f1": (-3.0, 3.0), "f2": (-5.0, 5.0)},
}


@dataclass
class ExperimentConfig:
    kernel: str = "bspline:3"
    signals: list = field(default_factory=lambda: ["f1"])
    operators: list = field(default_factory=lambda: ["kantorovich", "modified"])
    w_list: list = field(default_factory=lambda: [5.0])
    alpha: float = 0.5
    grid: tuple = (-3.0, 3.0, 601)
    truncation: str = "auto"
    metrics: list = field(default_factory=lambda: ["sup", "l1", "l2"])
    window: Optional[tuple] = None
    output_path: Optional[str] = None
    lambdas: list = field(default_factory=lambda: [0.1, 0.5, 1.0])
    beta: float = 0.5
    K: int = 1000
    grid_density: int = 1000
    jump_margin: float = 0.25

    def validate(self) -> "ExperimentConfig":
        parse_kernel(self.kernel)
        if not self.signals:
            raise ConfigurationError("at least one signal is required")
        for selector in self.signals:
            parse_signal(selector)
        if not self.operators:
            raise ConfigurationError("at least one operator is required")
        for op in self.operators:
            _operator_kind(op)
        if not self.w_list or any(not w > 0 for w in self.w_list):
            raise ConfigurationError("w list must be nonempty and positive")
        if not self.alpha > 0:
            raise ConfigurationError("alpha must be positive")
        self.grid_spec()
        parse_truncation(self.truncation)
        for m in self.metrics:
            if m not in METRICS:
                raise ConfigurationError(f"unknown metric {m!r}; valid: {', '.join(METRICS)}")
        if self.window is not None and not self.window[0] < self.window[1]:
            raise ConfigurationError("window needs a < b")
        return self

    def grid_spec(self) -> GridSpec:
        a, b, n = self.grid
        return GridSpec(float(a), float(b), int(n))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigurationError(f"unknown config fields: {', '.join(sorted(unknown))}")
        cfg = cls(**data)
        if cfg.grid is not None:
            cfg.grid = tuple(cfg.grid)
        if cfg.window is not None:
            cfg.window = tuple(cfg.window)
        return cfg


@dataclass(frozen=True)
class ResultRow:
    signal: str
    kernel: str
    operator: str
    w: float
    alpha: float
    metric: str
    value: float


def _operator_kind(name: str) -> OperatorKind:
    aliases = {"s": "kantorovich", "t": "modified", "g": "generalized"}
    try:
        return OperatorKind(aliases.get(name, name))
    except ValueError:
        raise ConfigurationError(
            f"unknown operator {name!r}; valid: generalized, kantorovich, modified") from None


def parse_truncation(text: str, kernel=None):
    """``exact``, ``K=<int>`` or ``auto`` (exact for compact kernels, K=1000 otherwise)."""
    text = text.strip()
    if text == "exact":
        return ExactSupport()
    if text.startswith("K="):
        try:
            return HalfWidth(int(text[2:]))
        except ValueError:
            pass
    elif text == "auto":
        return default_truncation(kernel) if kernel is not None else None
    raise ConfigurationError(f"bad truncation {text!r}; use exact, K=<int> or auto")


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def emit_csv(rows, path, header=None) -> None:
    """Write rows (dataclasses or sequences) as CSV, 17 significant digits."""
    rows = list(rows)
    if header is None:
        header = [f.name for f in dataclasses.fields(ResultRow)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        values = dataclasses.astuple(row) if dataclasses.is_dataclass(row) else row
        writer.writerow([_fmt(v) for v in values])
    path = Path(path)
    try:
        path.write_text(buf.getvalue(), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _metric_rows(cfg, report, base):
    rows = []
    for m in cfg.metrics:
        if m == "sup":
            rows.append(dataclasses.replace(base, metric="sup", value=report.sup_error))
        elif m == "sup_cont":
            rows.append(dataclasses.replace(base, metric="sup_cont", value=report.sup_continuity_error))
        elif m in ("l1", "l2"):
            rows.append(dataclasses.replace(base, metric=m, value=report.lp_errors[int(m[1])]))
        else:
            eta = LogPower(1.0, 1.0) if m == "llogl" else Exponential(1.0)
            for lam in cfg.lambdas:
                rows.append(dataclasses.replace(
                    base, metric=f"{m}@{lam:g}", value=report.modular_errors[(eta.name, lam)]))
    return rows


def _report(cfg, signal, ys, values):
    mods = []
    for m in cfg.metrics:
        if m in ("llogl", "exp"):
            eta = LogPower(1.0, 1.0) if m == "llogl" else Exponential(1.0)
            mods.extend((eta, float(lam)) for lam in cfg.lambdas)
    if cfg.window is not None:
        keep = (ys >= cfg.window[0]) & (ys <= cfg.window[1])
        ys, values = ys[keep], values[keep]
    return error_metrics(signal, ys, values, ps=(1, 2), modulars=mods, jump_margin=cfg.jump_margin)


def _pointwise_path(out: Path, signal_name: str, w: float) -> Path:
    return out.with_name(f"{out.stem}_{signal_name}_w{w:g}.csv")


def _signal_name(selector: str, signal) -> str:
    return signal.name or Path(selector.lstrip("@")).stem


def run_compare(config: ExperimentConfig) -> list:
    """Evaluate the requested operators on the grid for every (signal, w).

    Writes one pointwise CSV per (signal, w) next to ``output_path`` and the
    metric rows to ``output_path`` itself.
    """
    cfg = config.validate()
    kernel = parse_kernel(cfg.kernel)
    trunc = parse_truncation(cfg.truncation, kernel)
    kinds = sorted({_operator_kind(o) for o in cfg.operators}, key=list(OperatorKind).index)
    ys = cfg.grid_spec().points()
    out = Path(cfg.output_path) if cfg.output_path else None
    rows = []
    for selector in cfg.signals:
        signal = parse_signal(selector)
        sname = _signal_name(selector, signal)
        for w in cfg.w_list:
            g = signal(ys)
            columns = {"y": ys, "g": g}
            errors = {}
            for kind in kinds:
                params = OperatorParams(kind, float(w), cfg.alpha, trunc)
                vals = evaluate(kernel, signal, params, ys)
                col, err_col = OPERATOR_COLUMNS[kind]
                columns[col] = vals
                errors[err_col] = np.abs(vals - g)
                base = ResultRow(sname, kernel.name, kind.value, float(w), float(cfg.alpha), "", 0.0)
                rows.extend(_metric_rows(cfg, _report(cfg, signal, ys, vals), base))
            columns.update(errors)
            if out is not None:
                table = np.column_stack(list(columns.values()))
                emit_csv(table.tolist(), _pointwise_path(out, sname, w), header=list(columns))
    if out is not None:
        emit_csv(rows, out)
    return rows


def _strictly_decreasing(values) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def _decays(values, floor: float = 1e-12) -> bool:
    """Strict decrease, except that consecutive values at round-off level may tie."""
    return all(b < a or (a <= floor and b <= floor) for a, b in zip(values, values[1:]))


def run_convergence(config: ExperimentConfig) -> list:
    """Metric-vs-w table per (signal, operator) plus a ``decay:<metric>`` flag row."""
    cfg = config.validate()
    if len(cfg.w_list) < 3 or not _strictly_decreasing([-w for w in cfg.w_list]):
        raise ConfigurationError("convergence needs at least three increasing w values")
    kernel = parse_kernel(cfg.kernel)
    trunc = parse_truncation(cfg.truncation, kernel)
    kinds = sorted({_operator_kind(o) for o in cfg.operators}, key=list(OperatorKind).index)
    ys = cfg.grid_spec().points()
    rows = []
    for selector in cfg.signals:
        signal = parse_signal(selector)
        sname = _signal_name(selector, signal)
        for kind in kinds:
            series = {}
            for w in cfg.w_list:
                params = OperatorParams(kind, float(w), cfg.alpha, trunc)
                vals = evaluate(kernel, signal, params, ys)
                base = ResultRow(sname, kernel.name, kind.value, float(w), float(cfg.alpha), "", 0.0)
                for row in _metric_rows(cfg, _report(cfg, signal, ys, vals), base):
                    rows.append(row)
                    series.setdefault(row.metric, []).append(row.value)
            for metric, values in series.items():
                flag = _decays(values)
                rows.append(ResultRow(sname, kernel.name, kind.value, float(cfg.w_list[-1]),
                                      float(cfg.alpha), f"decay:{metric}", 1.0 if flag else 0.0))
    if cfg.output_path:
        emit_csv(rows, cfg.output_path)
    return rows


def run_diagnose(config: ExperimentConfig):
    """Admissibility diagnostics for the configured kernel.

    Returns ``(text, rows)``; rows are also written to ``output_path`` if set.
    """
    cfg = config
    kernel = parse_kernel(cfg.kernel)
    K, dens = int(cfg.K), int(cfg.grid_density)
    rows = []

    def add(metric, value, w=0.0):
        # rows carry finite values only; divergence shows up in its flag row
        if math.isfinite(value):
            rows.append(ResultRow("-", kernel.name, "-", w, 0.0, metric, float(value)))

    defect = partition_defect(kernel, dens, K)
    mu0 = absolute_moment0(kernel, dens, K)
    mom = moment_estimate(kernel, cfg.beta, dens, K)
    add("partition_defect", defect)
    add("mu0", mu0)
    add(f"moment_beta={cfg.beta:g}", mom.value)
    add(f"moment_partial_sum_beta={cfg.beta:g}", mom.partial_sum)
    add(f"moment_relative_change_beta={cfg.beta:g}", mom.relative_change)
    add(f"moment_diverged_beta={cfg.beta:g}", 1.0 if mom.diverged else 0.0)
    lines = [
        f"kernel            {kernel.name}",
        f"support           {kernel.support}",
        f"grid density      {dens}",
        f"truncation K      {K}" + ("  (ignored: compact support)" if kernel.is_compact else ""),
        f"partition defect  {defect:.3e}",
        f"mu0               {mu0:.12f}",
        f"m_beta (beta={cfg.beta:g})  {mom.value:.12g}   partial sum {mom.partial_sum:.12g}",
        f"  K -> 2K change  {mom.relative_change:.3e}   {'DIVERGENT' if mom.diverged else 'stable'}",
    ]
    gamma, y0 = 0.5, 0.3
    lines.append(f"lemma tail sum_(|wy-i|>gamma w) |chi(wy-i)|, gamma={gamma}, y={y0}:")
    for w in (5.0, 10.0, 20.0, 40.0):
        tail = lemma_tail_sum(kernel, y0, w, gamma, K=max(K, 10000))
        bound = mom.value / (gamma * w) ** cfg.beta if np.isfinite(mom.value) else math.inf
        add(f"lemma_tail(gamma={gamma},y={y0})", tail, w)
        add(f"lemma_tail_bound(gamma={gamma},y={y0})", bound, w)
        lines.append(f"  w={w:<5g} tail {tail:.6e}   bound m_beta/(gamma w)^beta {bound:.6e}")
    if kernel.is_compact:
        r = kernel.support.radius
        outside = kernel(np.array([-r - 1e-9, r + 1e-9, -r - 1.0, r + 1.0]))
        exact = bool(np.all(outside == 0.0))
        add("exact_support", 1.0 if exact else 0.0)
        lines.append(f"exact support     {'confirmed' if exact else 'VIOLATED'} on [-{r:g}, {r:g}]")
    text = "\n".join(lines) + "\n"
    if cfg.output_path:
        emit_csv(rows, cfg.output_path)
    return text, rows


def run_figure_settings(out_dir, grid_n: int = 601, metrics=("sup", "l1", "l2")) -> list:
    """All eight comparison settings (f1/f2 x Fejer/M3 x w = 5, 10, alpha = 1/2).

    Besides the per-setting metric rows, adds ``l1_ratio_t_over_s`` rows and a
    cross-kernel row comparing M3 at w = 5 with Fejer at w = 10.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for kernel in FIGURE_SETTINGS["kernels"]:
        for sname in FIGURE_SETTINGS["signals"]:
            a, b = FIGURE_SETTINGS["windows"][sname]
            cfg = ExperimentConfig(
                kernel=kernel,
                signals=[sname],
                operators=["kantorovich", "modified"],
                w_list=list(FIGURE_SETTINGS["w_list"]),
                alpha=FIGURE_SETTINGS["alpha"],
                grid=(a, b, grid_n),
                metrics=list(metrics),
                output_path=str(out_dir / f"compare_{sname}_{kernel.replace(':', '')}.csv"),
            )
            rows.extend(run_compare(cfg))
    l1 = {(r.signal, r.kernel, r.operator, r.w): r.value for r in rows if r.metric == "l1"}
    extra = []
    for (sig, ker, op, w), val in sorted(l1.items()):
        if op == "modified":
            s_val = l1[(sig, ker, "kantorovich", w)]
            extra.append(ResultRow(sig, ker, "modified/kantorovich", w, 0.5, "l1_ratio_t_over_s",
                                   val / s_val if s_val else math.inf))
    for sig in FIGURE_SETTINGS["signals"]:
        for op in ("kantorovich", "modified"):
            spline5 = l1[(sig, "bspline:3", op, 5.0)]
            fejer10 = l1[(sig, "fejer", op, 10.0)]
            extra.append(ResultRow(sig, "bspline:3@w5/fejer@w10", op, 5.0, 0.5,
                                   "l1_ratio_cross_kernel", spline5 / fejer10))
    rows.extend(extra)
    emit_csv(rows, out_dir / "figure_summary.csv")
    return rows
