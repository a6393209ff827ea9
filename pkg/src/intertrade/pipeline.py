"""End-to-end analysis of one or many instruments and the JSON result document."""

from __future__ import annotations

import json
import math
import os
import tempfile
import warnings
from dataclasses import asdict, dataclass, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import crossover as xo
from .dfa import FluctuationCurve, ScalingFit, box_sizes, fit_hurst, profile
from .errors import ConfigError, PatternError
from .ingest import DurationSeries, load_series
from .intraday import (IntradayPattern, adjust, bin_mean_durations, intraday_pattern,
                       pattern_polyfit, polyfit_csv)
from .mfdfa import fluctuation_q, q_grid

SCHEMA_VERSION = "1.0"
ADJUST_MODES = ("off", "on", "both")


@dataclass
class AnalysisConfig:
    """Every knob of the pipeline; defaults follow the conventions in the README."""

    input: str | None = None
    adjust: str = "both"
    s_min: int = 20
    s_max_fraction: float = 0.25
    grid_per_decade: int = 30
    q_min: float = -4.0
    q_max: float = 6.0
    q_step: float = 0.25
    detrend_order: int = 3
    significance: float = 0.01
    min_slope_change: float = xo.MIN_SLOPE_CHANGE
    per_q_crossover: bool = False
    poly_degree: int = 4
    seed: int = 0
    out: str | None = None
    jobs: int = 1

    def validate(self) -> "AnalysisConfig":
        if self.adjust not in ADJUST_MODES:
            raise ConfigError(f"adjust must be one of {ADJUST_MODES}")
        if self.detrend_order < 1:
            raise ConfigError("detrend order must be >= 1")
        if self.s_min < self.detrend_order + 2:
            raise ConfigError(f"s_min must be >= detrend_order + 2 = {self.detrend_order + 2}")
        if not 0 < self.s_max_fraction <= 0.25:
            raise ConfigError("s_max_fraction must lie in (0, 0.25]")
        if self.grid_per_decade < 1:
            raise ConfigError("grid density must be positive")
        if not 0 < self.significance < 1:
            raise ConfigError("significance must lie in (0, 1)")
        if self.q_step <= 0 or self.q_min >= self.q_max:
            raise ConfigError("bad q range")
        try:
            q_grid(self.q_min, self.q_max, self.q_step)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not 1 <= self.poly_degree <= 10:
            raise ConfigError("polynomial degree must be between 1 and 10")
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisConfig":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})

    def grid(self, n: int) -> np.ndarray:
        s_max = int(math.floor(n * self.s_max_fraction))
        if s_max < self.s_min:
            raise ConfigError(f"series too short: N={n} gives s_max={s_max} < s_min={self.s_min}")
        grid = box_sizes(n, self.s_min, s_max, self.grid_per_decade)
        if len(grid) < xo.MIN_CURVE_POINTS:
            raise ConfigError(f"series too short: only {len(grid)} box sizes "
                              f"(crossover search needs {xo.MIN_CURVE_POINTS})")
        return grid


@dataclass
class DatasetResult:
    """Fluctuation table plus fitted exponents for one series (original or adjusted)."""

    name: str
    curve: FluctuationCurve
    full_fit: ScalingFit
    crossover: xo.CrossoverFit
    regimes: xo.RegimeResult

    @property
    def H1(self) -> float:
        return self.crossover.H1

    @property
    def H2(self) -> float:
        return self.crossover.H2

    def as_dict(self) -> dict:
        reg = self.regimes
        return {
            "full_fit": self.full_fit.as_dict(),
            "crossover": self.crossover.as_dict(),
            "regimes": reg.as_dict(),
            "delta_alpha_small": reg.small.width,
            "delta_alpha_large": reg.large.width,
        }

    def exports(self, prefix: str) -> dict[str, str]:
        out = {f"{prefix}_curve.csv": self.curve.to_csv()}
        for label, res in (("small", self.regimes.small), ("large", self.regimes.large)):
            out[f"{prefix}_{label}_hq.csv"] = res.hurst.to_csv()
            out[f"{prefix}_{label}_tau.csv"] = res.tau.to_csv()
            out[f"{prefix}_{label}_spectrum.csv"] = res.spectrum.to_csv()
        return out


def analyze_series(series, config: AnalysisConfig, name: str = "original") -> DatasetResult:
    """DFA, crossover and per-regime MFDFA of one series."""
    y = profile(series)
    grid = config.grid(len(y))
    q = q_grid(config.q_min, config.q_max, config.q_step)
    curve = fluctuation_q(y, grid, q, config.detrend_order, config.s_min)
    full = fit_hurst(curve)
    cross = xo.detect_crossover(curve, 2.0, config.significance, config.min_slope_change)
    regimes = xo.regime_mfdfa(curve, None if cross.no_crossover else cross.s_cross,
                              config.per_q_crossover, config.significance, config.min_slope_change)
    return DatasetResult(name, curve, full, cross, regimes)


def _dataset_doc(res: DatasetResult, n: int) -> dict:
    d = res.as_dict()
    d["n"] = n
    d["H1"], d["H2"] = res.H1, res.H2
    return d


def analyze_instrument(series: DurationSeries, config: AnalysisConfig, ingest_stats: dict | None = None):
    """Run the full pipeline on one instrument.

    Returns ``(doc, exports, results)`` where ``doc`` is the JSON-ready
    per-instrument section, ``exports`` maps file names to CSV text and
    ``results`` maps dataset names to :class:`DatasetResult`.
    """
    config.validate()
    sym = series.symbol or "instrument"
    doc = {"symbol": sym, "n_durations": len(series),
           "mean_duration": float(np.mean(series.tau)) if len(series) else None,
           "mean_trades_per_day": (ingest_stats or {}).get("mean_trades_per_day",
                                                          series.trades_per_day()),
           "ingest": ingest_stats or {}}
    exports: dict[str, str] = {}
    results: dict[str, DatasetResult] = {}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        pattern = intraday_pattern(bin_mean_durations(series))
        doc["pattern"] = pattern.summary()
        exports[f"{sym}_pattern.csv"] = pattern.to_csv()
        try:
            fit = pattern_polyfit(pattern, config.poly_degree)
            exports[f"{sym}_pattern_polyfit.csv"] = polyfit_csv(pattern, fit)
            doc["pattern"]["polyfit"] = {"degree": fit.degree, "coefficients": fit.coefficients.tolist(),
                                         "rms": fit.rms}
        except PatternError as exc:  # display-only output; never fatal
            warnings.warn(f"pattern polynomial fit skipped: {exc}")

        datasets = {}
        if config.adjust in ("off", "both"):
            datasets["original"] = series
        if config.adjust in ("on", "both"):
            datasets["adjusted"] = adjust(series, pattern)
        doc["datasets"] = {}
        for name, ser in datasets.items():
            res = analyze_series(ser, config, name)
            results[name] = res
            doc["datasets"][name] = _dataset_doc(res, len(ser))
            doc["datasets"][name]["units"] = ser.metadata.get("units", "s")
            exports.update(res.exports(f"{sym}_{name}"))
    doc["warnings"] = [str(w.message) for w in caught]
    return doc, exports, results


def pattern_only(series: DurationSeries, degree: int = 4) -> tuple[IntradayPattern, dict[str, str]]:
    pattern = intraday_pattern(bin_mean_durations(series))
    sym = series.symbol or "instrument"
    return pattern, {f"{sym}_pattern.csv": pattern.to_csv(),
                     f"{sym}_pattern_polyfit.csv": polyfit_csv(pattern, pattern_polyfit(pattern, degree))}


def _clean(x):
    # JSON-safe: numpy scalars to Python, non-finite floats to null
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_clean(v) for v in x.tolist()]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def result_document(config: AnalysisConfig, instruments: list[dict], timestamp: bool = True) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "config": config.to_dict(), "instruments": instruments}
    if timestamp:
        doc["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return _clean(doc)


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the same directory and rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _run_one(path: str, config_dict: dict):
    config = AnalysisConfig.from_dict(config_dict)
    series, stats = load_series(path)
    return analyze_instrument(series, config, stats)


def instrument_paths(target) -> list[Path]:
    target = Path(target)
    if target.is_dir():
        return sorted(p for p in target.iterdir() if p.suffix.lower() == ".csv" and p.is_file())
    return [target]


def run_analysis(config: AnalysisConfig, timestamp: bool = True):
    """Analyze ``config.input`` (file or directory); write outputs when ``config.out`` is set.

    Returns ``(document, per-instrument results)``.
    """
    config.validate()
    if not config.input:
        raise ConfigError("no input given")
    paths = instrument_paths(config.input)
    if not paths:
        raise ConfigError(f"no instrument files under {config.input}")
    cfg = config.to_dict()
    if config.jobs > 1 and len(paths) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            outcomes = list(pool.map(_run_one, [str(p) for p in paths], [cfg] * len(paths)))
    else:
        outcomes = [_run_one(str(p), cfg) for p in paths]

    doc = result_document(config, [o[0] for o in outcomes], timestamp)
    if config.out:
        out = Path(config.out)
        for _, exports, _ in outcomes:
            for name, text in exports.items():
                write_atomic(out / name, text)
        write_atomic(out / "result.json", dumps(doc))
    return doc, {o[0]["symbol"]: o[2] for o in outcomes}


SUMMARY_HEADER = ("code,N_T,H1_original,H2_original,dAlpha_original,"
                  "H1_adjusted,H2_adjusted,dAlpha_adjusted")


def summary_rows(doc: dict) -> str:
    """Table-style summary: one row per instrument, large-regime spectrum width."""
    rows = [SUMMARY_HEADER]
    for inst in doc["instruments"]:
        cells = [inst["symbol"], _num(inst["mean_trades_per_day"], 1)]
        for name in ("original", "adjusted"):
            ds = inst["datasets"].get(name)
            if ds is None:
                cells += ["", "", ""]
            else:
                cells += [_num(ds["H1"], 4), _num(ds["H2"], 4), _num(ds["delta_alpha_large"], 4)]
        rows.append(",".join(cells))
    return "\n".join(rows) + "\n"


def _num(x, digits):
    return "" if x is None else f"{x:.{digits}f}"
