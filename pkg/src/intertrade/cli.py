"""Command-line front end: ``analyze``, ``pattern``, ``synth`` and ``summary``.

Every analysis flag can also be set through an environment variable named
``INTERTRADE_<FLAG>`` (upper case, dashes as underscores), e.g.
``INTERTRADE_SMIN=30``. Command-line values win over the environment.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import synth
from .dfa import box_sizes
from .errors import ConfigError, IntertradeError, ParseError, PatternError
from .ingest import durations_to_csv, load_series, serialize_ticks
from .pipeline import AnalysisConfig, dumps, pattern_only, run_analysis, summary_rows, write_atomic

ENV_PREFIX = "INTERTRADE_"

_DEFAULTS = AnalysisConfig()


def _env(name: str, default, kind=str):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return default
    if kind is bool:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    return kind(raw)


def _add_analysis_flags(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--ticks", metavar="PATH", help="tick CSV (header date,time) or a directory of them")
    src.add_argument("--durations", metavar="PATH", help="duration CSV (header day,bin,tau) or a directory")
    src.add_argument("--input", metavar="PATH", help="either format, detected from the header")
    p.add_argument("--adjust", choices=("on", "off", "both"), default=_env("adjust", _DEFAULTS.adjust),
                   help="analyze the intraday-adjusted series (on), the original (off) or both "
                        "(default: %(default)s)")
    p.add_argument("--smin", type=int, default=_env("smin", _DEFAULTS.s_min, int),
                   help="smallest box size (default: %(default)s)")
    p.add_argument("--smax-fraction", type=float,
                   default=_env("smax_fraction", _DEFAULTS.s_max_fraction, float),
                   help="largest box size as a fraction of N, at most 0.25 (default: %(default)s, i.e. N/4)")
    p.add_argument("--grid-density", type=int, default=_env("grid_density", _DEFAULTS.grid_per_decade, int),
                   help="log-spaced box sizes per decade (default: %(default)s)")
    p.add_argument("--q-min", type=float, default=_env("q_min", _DEFAULTS.q_min, float),
                   help="smallest moment order (default: %(default)s)")
    p.add_argument("--q-max", type=float, default=_env("q_max", _DEFAULTS.q_max, float),
                   help="largest moment order (default: %(default)s)")
    p.add_argument("--q-step", type=float, default=_env("q_step", _DEFAULTS.q_step, float),
                   help="moment order spacing; the grid must hit 0 and 2 (default: %(default)s)")
    p.add_argument("--detrend-order", type=int, default=_env("detrend_order", _DEFAULTS.detrend_order, int),
                   help="polynomial order removed in every box; 3 is cubic (default: %(default)s)")
    p.add_argument("--significance", type=float,
                   default=_env("significance", _DEFAULTS.significance, float),
                   help="F-test level for accepting a crossover (default: %(default)s)")
    p.add_argument("--min-slope-change", type=float,
                   default=_env("min_slope_change", _DEFAULTS.min_slope_change, float),
                   help="smallest |H2 - H1| reported as a crossover (default: %(default)s)")
    p.add_argument("--per-q-crossover", action="store_true",
                   default=_env("per_q_crossover", False, bool),
                   help="re-estimate the crossover for every q instead of reusing the q=2 break")
    p.add_argument("--degree", type=int, default=_env("degree", _DEFAULTS.poly_degree, int),
                   help="degree of the display polynomial through the intraday pattern (default: %(default)s)")
    p.add_argument("--seed", type=int, default=_env("seed", _DEFAULTS.seed, int),
                   help="seed echoed into the result document (default: %(default)s)")
    p.add_argument("--jobs", type=int, default=_env("jobs", _DEFAULTS.jobs, int),
                   help="instruments analyzed in parallel (default: %(default)s)")
    p.add_argument("--out", metavar="DIR", default=_env("out", None),
                   help="output directory; without it the JSON document goes to stdout")


def config_from_args(args) -> AnalysisConfig:
    source = args.ticks or args.durations or args.input
    if not source:
        raise ConfigError("one of --ticks, --durations or --input is required")
    return AnalysisConfig(
        input=source, adjust=args.adjust, s_min=args.smin, s_max_fraction=args.smax_fraction,
        grid_per_decade=args.grid_density, q_min=args.q_min, q_max=args.q_max, q_step=args.q_step,
        detrend_order=args.detrend_order, significance=args.significance,
        min_slope_change=args.min_slope_change, per_q_crossover=args.per_q_crossover,
        poly_degree=args.degree, seed=args.seed, out=args.out, jobs=args.jobs,
    ).validate()


def cmd_analyze(args) -> int:
    config = config_from_args(args)
    doc, _ = run_analysis(config)
    if config.out:
        print(Path(config.out) / "result.json")
    else:
        sys.stdout.write(dumps(doc))
    return 0


def cmd_pattern(args) -> int:
    source = args.ticks or args.durations or args.input
    if not source:
        raise ConfigError("one of --ticks, --durations or --input is required")
    series, _ = load_series(source)
    _, files = pattern_only(series, args.degree)
    out = Path(args.out or ".")
    for name, text in files.items():
        write_atomic(out / name, text)
        print(out / name)
    return 0


def cmd_synth(args) -> int:
    kind = args.kind
    if kind == "ticks":
        pat = synth.inverse_u_pattern(args.low, args.high, args.afternoon_drop)
        text = serialize_ticks(synth.gen_synthetic_ticks(pat, args.days, args.seed, args.symbol))
    elif kind == "piecewise":
        grid = np.union1d(box_sizes(args.n), [int(args.s_cross)])
        text = synth.gen_piecewise_curve(args.h1, args.h2, args.s_cross, grid, args.sigma, args.seed).to_csv()
    else:
        if kind == "fgn":
            values = synth.gen_fgn_durations(args.hurst, args.n, args.sigma, args.seed)
        elif kind == "cascade":
            values = synth.gen_binomial_cascade(args.p, args.levels, args.seed)
        elif kind == "two-regime":
            values = synth.gen_two_regime_durations(args.n, args.hurst, args.sigma, args.seed)
        else:
            values = synth.gen_iid_exp(args.n, args.mean, args.seed)
        text = durations_to_csv(synth.as_duration_series(values, args.trades_per_day, args.symbol))
    if args.out:
        write_atomic(args.out, text)
        print(args.out)
    else:
        sys.stdout.write(text)
    return 0


def cmd_summary(args) -> int:
    config = config_from_args(args)
    config.adjust = "both"
    out_dir, config.out = config.out, None
    doc, _ = run_analysis(config)
    text = summary_rows(doc)
    if out_dir:
        write_atomic(Path(out_dir) / "summary.csv", text)
        print(Path(out_dir) / "summary.csv")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="intertrade",
        description="DFA / MFDFA of intertrade durations with intraday-pattern removal.",
        epilog=f"Environment overrides use the prefix {ENV_PREFIX}, e.g. {ENV_PREFIX}SMIN=30.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full pipeline; JSON document plus CSV tables")
    _add_analysis_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("pattern", help="intraday pattern and its display polynomial as CSV")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--ticks", metavar="PATH")
    src.add_argument("--durations", metavar="PATH")
    src.add_argument("--input", metavar="PATH")
    p.add_argument("--degree", type=int, default=_env("degree", 4, int),
                   help="polynomial degree (default: %(default)s)")
    p.add_argument("--out", metavar="DIR", default=_env("out", None))
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("synth", help="write a synthetic series with known scaling")
    p.add_argument("kind", choices=("fgn", "cascade", "iid-exp", "two-regime", "ticks", "piecewise"))
    p.add_argument("--n", type=int, default=2 ** 16, help="series length (power of two for fgn)")
    p.add_argument("--hurst", type=float, default=None,
                   help="fgn exponent (default 0.7) or two-regime large-scale exponent (default 0.95)")
    p.add_argument("--sigma", type=float, default=None,
                   help="log-amplitude: fgn/two-regime modulation or piecewise-curve noise")
    p.add_argument("--p", type=float, default=0.3, help="cascade weight")
    p.add_argument("--levels", type=int, default=16, help="cascade depth")
    p.add_argument("--mean", type=float, default=1.0, help="iid-exp mean")
    p.add_argument("--h1", type=float, default=0.65)
    p.add_argument("--h2", type=float, default=0.97)
    p.add_argument("--s-cross", type=float, default=300)
    p.add_argument("--days", type=int, default=250)
    p.add_argument("--low", type=float, default=5.0, help="ticks: mean duration at open/close")
    p.add_argument("--high", type=float, default=8.0, help="ticks: mean duration mid-session")
    p.add_argument("--afternoon-drop", type=float, default=None)
    p.add_argument("--trades-per-day", type=int, default=2000)
    p.add_argument("--symbol", default="SYNTH")
    p.add_argument("--seed", type=int, default=_env("seed", 0, int))
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("summary", help="one summary row per instrument file in a directory")
    _add_analysis_flags(p)
    p.set_defaults(func=cmd_summary)
    return parser


_SIGMA_DEFAULTS = {"fgn": 0.25, "two-regime": 0.4, "piecewise": 0.0}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "kind", None):
        if args.sigma is None:
            args.sigma = _SIGMA_DEFAULTS.get(args.kind, 0.0)
        if args.hurst is None:
            args.hurst = 0.95 if args.kind == "two-regime" else 0.7
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, IsADirectoryError) as exc:
        return _fail(2, "config", exc)
    except (ParseError, PatternError) as exc:
        return _fail(3, "data", exc)
    except IntertradeError as exc:
        return _fail(4, "analysis", exc)


def _fail(code: int, kind: str, exc: Exception) -> int:
    sys.stderr.write(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
