"""Command-line front end: ``modkant compare | converge | diagnose``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigurationError
from .experiments import (
    METRICS,
    ExperimentConfig,
    parse_truncation,
    run_compare,
    run_convergence,
    run_diagnose,
    run_figure_settings,
)
from .kernels import parse_kernel

__all__ = ["build_parser", "parse_cli", "main"]


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _name_list(text):
    values = [v.strip() for v in text.split(",") if v.strip()]
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _grid(text):
    parts = text.split(":")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(f"grid must be a:b:n, got {text!r}") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must be a:b:n, got {text!r}")
    if not a < b:
        raise argparse.ArgumentTypeError(f"grid needs a < b, got {text!r}")
    if n < 2:
        raise argparse.ArgumentTypeError("grid needs at least 2 points")
    return (a, b, n)


def _window(text):
    parts = text.split(":")
    try:
        a, b = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be a:b, got {text!r}") from None
    if not a < b:
        raise argparse.ArgumentTypeError(f"window needs a < b, got {text!r}")
    return (a, b)


def _kernel(text):
    try:
        parse_kernel(text)
    except ConfigurationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _trunc(text):
    try:
        parse_truncation(text)
    except ConfigurationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _positive(cast):
    def convert(text):
        try:
            value = cast(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
        return value
    return convert


def _metrics(text):
    values = _name_list(text)
    bad = [m for m in values if m not in METRICS]
    if bad:
        raise argparse.ArgumentTypeError(
            f"unknown metric {bad[0]!r}; valid: {', '.join(METRICS)}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modkant",
        description="Sampling-series experiments: operator comparison, convergence, kernel diagnostics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    # defaults are SUPPRESS so that a --config file only fills in what was not given
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON file with ExperimentConfig fields")
    common.add_argument("--kernel", type=_kernel,
                        help="fejer | jackson:<n>[:<stretch>] | bspline:<n> (default bspline:3)")
    common.add_argument("--out", dest="output_path", help="CSV output path")
    common.add_argument("--K", type=_positive(int), help="truncation half-width for diagnostics")

    series = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    series.add_argument("--signal", dest="signals", type=_name_list,
                        help="comma list of f1 | f2 | @file.json")
    series.add_argument("--operators", type=_name_list,
                        help="comma list of generalized, kantorovich, modified")
    series.add_argument("--w", dest="w_list", type=_float_list, help="comma list of sampling rates")
    series.add_argument("--alpha", type=_positive(float), help="exponent of the modified mean (0.5)")
    series.add_argument("--grid", type=_grid, help="evaluation grid a:b:n")
    series.add_argument("--trunc", dest="truncation", type=_trunc, help="exact | K=<int>")
    series.add_argument("--metrics", type=_metrics, help=f"comma list of {', '.join(METRICS)}")
    series.add_argument("--window", type=_window, help="restrict error metrics to a:b")
    series.add_argument("--lambdas", type=_float_list, help="lambda values for modular metrics")
    series.add_argument("--jump-margin", dest="jump_margin", type=float,
                        help="distance from jumps excluded by sup_cont")

    compare = sub.add_parser("compare", parents=[common, series],
                             help="evaluate operators on a grid, write pointwise and metric CSVs")
    compare.add_argument("--figures", action="store_true", default=False,
                         help="run all eight comparison settings into the directory given by --out")
    sub.add_parser("converge", parents=[common, series], help="error-vs-w sweep with decay flags")
    diagnose = sub.add_parser("diagnose", parents=[common], help="kernel admissibility diagnostics")
    diagnose.add_argument("--beta", type=_positive(float), default=argparse.SUPPRESS,
                          help="moment exponent (0.5)")
    diagnose.add_argument("--grid-density", dest="grid_density", type=_positive(int),
                          default=argparse.SUPPRESS, help="z grid points per unit (1000)")
    return parser


def _load_config_file(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigurationError(f"config {path} must hold a JSON object")
    return data


# options whose values may legitimately start with "-"
_SIGNED_OPTIONS = {"--grid", "--window", "--w", "--lambdas", "--jump-margin"}


def _attach_signed_values(argv):
    """Rewrite ``--grid -3:3:601`` as ``--grid=-3:3:601`` so argparse keeps it a value."""
    out, it = [], iter(argv)
    for token in it:
        if token in _SIGNED_OPTIONS:
            value = next(it, None)
            out.append(token if value is None else f"{token}={value}")
        else:
            out.append(token)
    return out


def _parse(argv):
    parser = build_parser()
    ns = vars(parser.parse_args(_attach_signed_values(list(argv))))
    command = ns.pop("command")
    figures = ns.pop("figures", False)
    try:
        merged = _load_config_file(ns.pop("config")) if "config" in ns else {}
        merged.update(ns)
        cfg = ExperimentConfig.from_dict(merged)
        if command != "diagnose" and not figures:
            cfg.validate()
        else:
            parse_kernel(cfg.kernel)
    except (ConfigurationError, TypeError) as exc:
        parser.error(str(exc))
    return command, figures, cfg


def parse_cli(argv) -> ExperimentConfig:
    """Parse arguments into a validated config; usage errors exit with status 2."""
    return _parse(argv)[2]


def main(argv=None) -> int:
    command, figures, cfg = _parse(sys.argv[1:] if argv is None else argv)
    try:
        if command == "compare" and figures:
            out = cfg.output_path or "figure_settings"
            rows = run_figure_settings(out, grid_n=cfg.grid[2])
            print(f"wrote {len(rows)} rows under {out}")
        elif command == "compare":
            rows = run_compare(cfg)
            _print_rows(rows, cfg.output_path)
        elif command == "converge":
            rows = run_convergence(cfg)
            _print_rows(rows, cfg.output_path)
        else:
            text, _ = run_diagnose(cfg)
            sys.stdout.write(text)
    except ConfigurationError as exc:
        print(f"modkant: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, RuntimeError, ValueError) as exc:
        print(f"modkant: error: {exc}", file=sys.stderr)
        return 1
    return 0


def _print_rows(rows, out):
    if out:
        print(f"wrote {len(rows)} rows to {out}")
        return
    for r in rows:
        print(f"{r.signal}\t{r.kernel}\t{r.operator}\tw={r.w:g}\t{r.metric}\t{r.value:.6e}")
