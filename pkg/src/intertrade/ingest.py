"""Tick files and intertrade durations.

Only trades inside the two continuous-auction windows (09:30-11:30 and
13:00-15:00) are kept; boundary stamps are inside. Times are held as integer
hundredths of a second since the session open so that equal stamps compare
exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path

import numpy as np

from .errors import OrderingError, ParseError

MORNING = 0
AFTERNOON = 1
SESSION_NAMES = ("MORNING", "AFTERNOON")
SESSION_SECONDS = 7200
BINS_PER_SESSION = 120
N_BINS = 2 * BINS_PER_SESSION

_TIME_RE = re.compile(r"^(\d{2}):(\d{2}):(\d{2})\.(\d{2})$")


def _clock_cs(text: str) -> int:
    m = _TIME_RE.match(text)
    if m is None:
        raise ValueError(f"bad time {text!r}, expected HH:MM:SS.cc")
    hh, mm, ss, cc = (int(g) for g in m.groups())
    if hh > 23 or mm > 59 or ss > 59:
        raise ValueError(f"bad time {text!r}")
    return ((hh * 60 + mm) * 60 + ss) * 100 + cc


def _format_clock(cs: int) -> str:
    ss, cc = divmod(int(cs), 100)
    mm, ss = divmod(ss, 60)
    hh, mm = divmod(mm, 60)
    return f"{hh:02d}:{mm:02d}:{ss:02d}.{cc:02d}"


@dataclass(frozen=True)
class TickFormat:
    """Session windows (local exchange clock, closed intervals) and file encoding."""

    morning: tuple[str, str] = ("09:30:00.00", "11:30:00.00")
    afternoon: tuple[str, str] = ("13:00:00.00", "15:00:00.00")
    encoding: str = "utf-8"

    def windows(self) -> list[tuple[int, int]]:
        return [(_clock_cs(a), _clock_cs(b)) for a, b in (self.morning, self.afternoon)]


@dataclass
class TickSeries:
    """Trade stamps of one instrument, grouped by (day, session).

    ``time_cs`` counts hundredths of a second since the session open.
    ``dates[d]`` is the calendar date of day index ``d``.
    """

    symbol: str
    day: np.ndarray
    session: np.ndarray
    time_cs: np.ndarray
    dates: list[str] = field(default_factory=list)
    discarded: int = 0
    metadata: dict = field(default_factory=dict)
    fmt: TickFormat = field(default_factory=TickFormat)

    def __post_init__(self):
        self.day = np.asarray(self.day, dtype=np.int64)
        self.session = np.asarray(self.session, dtype=np.int8)
        self.time_cs = np.asarray(self.time_cs, dtype=np.int64)

    def __len__(self):
        return len(self.time_cs)

    @property
    def times(self) -> np.ndarray:
        """Seconds since session open."""
        return self.time_cs / 100.0

    @property
    def n_days(self) -> int:
        return len(self.dates) if self.dates else (int(self.day.max()) + 1 if len(self) else 0)


@dataclass
class DurationSeries:
    """Intertrade durations tagged with day, minute bin (0-239) and session."""

    symbol: str
    tau: np.ndarray
    day: np.ndarray
    bin: np.ndarray
    session: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.tau = np.asarray(self.tau, dtype=float)
        self.day = np.asarray(self.day, dtype=np.int64)
        self.bin = np.asarray(self.bin, dtype=np.int64)
        self.session = np.asarray(self.session, dtype=np.int8)
        n = len(self.tau)
        if not (len(self.day) == len(self.bin) == len(self.session) == n):
            raise ValueError("duration fields must have equal length")

    def __len__(self):
        return len(self.tau)

    def with_tau(self, tau, **metadata) -> "DurationSeries":
        return replace(self, tau=np.asarray(tau, dtype=float), metadata={**self.metadata, **metadata})

    def trades_per_day(self) -> float:
        """Mean number of trades per day implied by the durations.

        A session with ``k`` durations holds ``k + 1`` trades.
        """
        if len(self) == 0:
            return 0.0
        key = self.day * 2 + self.session
        n_sessions = len(np.unique(key))
        return (len(self) + n_sessions) / len(np.unique(self.day))


def parse_ticks(raw, fmt: TickFormat | None = None, symbol: str = "") -> TickSeries:
    """Parse a ``date,time`` CSV into a :class:`TickSeries`.

    Rows outside both auction windows are dropped and counted in
    ``discarded``. Raises :class:`ParseError` for malformed rows and
    :class:`OrderingError` when stamps go backwards within a session.
    """
    fmt = fmt or TickFormat()
    text = raw.decode(fmt.encoding) if isinstance(raw, (bytes, bytearray)) else raw
    text = text.lstrip("﻿")
    lines = text.splitlines()
    if not lines or lines[0].strip().replace(" ", "") != "date,time":
        raise ParseError("missing header 'date,time'", line=1)
    windows = fmt.windows()

    dates: list[str] = []
    day, sess, tcs = [], [], []
    discarded = 0
    last_key = None  # (day, session, time) of the previous retained tick
    last_date = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"expected 2 fields, got {len(parts)}", line=lineno)
        d_txt, t_txt = parts[0].strip(), parts[1].strip()
        try:
            date.fromisoformat(d_txt)
            clock = _clock_cs(t_txt)
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        if last_date is not None and d_txt < last_date:
            raise OrderingError(f"date {d_txt} precedes {last_date}", line=lineno)
        if d_txt != last_date:
            dates.append(d_txt)
            last_date = d_txt
        s = next((k for k, (a, b) in enumerate(windows) if a <= clock <= b), None)
        if s is None:
            discarded += 1
            continue
        key = (len(dates) - 1, s, clock - windows[s][0])
        if last_key is not None and key < last_key:
            raise OrderingError(f"time {t_txt} goes backwards within {d_txt}", line=lineno)
        last_key = key
        day.append(key[0])
        sess.append(s)
        tcs.append(key[2])

    ticks = TickSeries(symbol, day, sess, tcs, dates, discarded, fmt=fmt)
    close = [b - a for a, b in windows]
    ticks.metadata["close_prints"] = int(
        sum(np.count_nonzero((ticks.session == k) & (ticks.time_cs == c)) for k, c in enumerate(close)))
    return ticks


def read_ticks(path, fmt: TickFormat | None = None, symbol: str | None = None) -> TickSeries:
    path = Path(path)
    return parse_ticks(path.read_bytes(), fmt, symbol if symbol is not None else path.stem)


def serialize_ticks(ticks: TickSeries) -> str:
    """Inverse of :func:`parse_ticks` for the retained rows."""
    opens = [a for a, _ in ticks.fmt.windows()]
    rows = ["date,time"]
    for d, s, t in zip(ticks.day, ticks.session, ticks.time_cs):
        rows.append(f"{ticks.dates[d]},{_format_clock(opens[s] + t)}")
    return "\n".join(rows) + "\n"


def collapse_simultaneous(ticks: TickSeries) -> TickSeries:
    """Merge trades sharing the same (day, session, stamp) into one."""
    if len(ticks) == 0:
        return replace(ticks)
    keep = np.ones(len(ticks), dtype=bool)
    keep[1:] = ((ticks.day[1:] != ticks.day[:-1]) | (ticks.session[1:] != ticks.session[:-1])
                | (ticks.time_cs[1:] != ticks.time_cs[:-1]))
    meta = {**ticks.metadata, "collapsed": int(len(ticks) - keep.sum())}
    return replace(ticks, day=ticks.day[keep], session=ticks.session[keep],
                   time_cs=ticks.time_cs[keep], metadata=meta)


def minute_bin(session, time_cs) -> np.ndarray:
    """Minute-of-trading-day index (0-239); the closing stamp joins the last minute."""
    m = np.minimum(np.asarray(time_cs) // 6000, BINS_PER_SESSION - 1)
    return m + BINS_PER_SESSION * np.asarray(session, dtype=np.int64)


def compute_durations(ticks: TickSeries) -> DurationSeries:
    """Differences of consecutive stamps within each (day, session).

    Each duration is tagged with the minute bin of the later trade. No
    duration spans the noon break or the overnight gap.
    """
    same = (ticks.day[1:] == ticks.day[:-1]) & (ticks.session[1:] == ticks.session[:-1])
    diff = np.diff(ticks.time_cs)
    if np.any(diff[same] <= 0):
        raise OrderingError("ticks are not strictly increasing; collapse simultaneous trades first")
    end = np.flatnonzero(same) + 1
    return DurationSeries(
        ticks.symbol,
        diff[same] / 100.0,
        ticks.day[end],
        minute_bin(ticks.session[end], ticks.time_cs[end]),
        ticks.session[end],
        metadata={"units": "s", "n_days": ticks.n_days},
    )


def durations_from_ticks(ticks: TickSeries) -> DurationSeries:
    return compute_durations(collapse_simultaneous(ticks))


def parse_durations(raw, symbol: str = "") -> DurationSeries:
    """Parse a pre-computed ``day,bin,tau`` CSV."""
    text = raw.decode("utf-8") if isinstance(raw, (bytes, bytearray)) else raw
    lines = text.lstrip("﻿").splitlines()
    if not lines or lines[0].strip().replace(" ", "") != "day,bin,tau":
        raise ParseError("missing header 'day,bin,tau'", line=1)
    day, b, tau = [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError(f"expected 3 fields, got {len(parts)}", line=lineno)
        try:
            d, j, t = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        if d < 0 or not 0 <= j < N_BINS:
            raise ParseError(f"day/bin out of range ({d}, {j})", line=lineno)
        if not (np.isfinite(t) and t > 0):
            raise ParseError(f"duration must be positive, got {parts[2].strip()}", line=lineno)
        day.append(d)
        b.append(j)
        tau.append(t)
    b = np.asarray(b, dtype=np.int64)
    n_days = len(set(day))
    return DurationSeries(symbol, tau, day, b, (b >= BINS_PER_SESSION).astype(np.int8),
                          metadata={"units": "s", "n_days": n_days})


def read_durations(path, symbol: str | None = None) -> DurationSeries:
    path = Path(path)
    return parse_durations(path.read_bytes(), symbol if symbol is not None else path.stem)


def durations_to_csv(series: DurationSeries) -> str:
    rows = ["day,bin,tau"]
    rows.extend(f"{d},{j},{t!r}" for d, j, t in zip(series.day.tolist(), series.bin.tolist(),
                                                    series.tau.tolist()))
    return "\n".join(rows) + "\n"


def load_series(path, fmt: TickFormat | None = None) -> tuple[DurationSeries, dict]:
    """Read either a tick file or a duration file (sniffed from the header).

    Returns the duration series and a dict of ingest statistics.
    """
    path = Path(path)
    raw = path.read_bytes()
    head = raw[:64].decode("utf-8", errors="replace").lstrip("﻿").split("\n", 1)[0].strip()
    if head.replace(" ", "") == "day,bin,tau":
        series = parse_durations(raw, path.stem)
        return series, {"input_format": "durations", "mean_trades_per_day": series.trades_per_day()}
    ticks = parse_ticks(raw, fmt, path.stem)
    collapsed = collapse_simultaneous(ticks)
    series = compute_durations(collapsed)
    days = max(len(np.unique(collapsed.day)), 1)
    return series, {
        "input_format": "ticks",
        "rows_retained": len(ticks),
        "rows_discarded": ticks.discarded,
        "simultaneous_collapsed": collapsed.metadata["collapsed"],
        "close_prints_retained": ticks.metadata["close_prints"],
        "mean_trades_per_day": len(collapsed) / days,
    }
