"""Per-second midpoint/spread sampling and midpoint returns."""

from __future__ import annotations

import datetime as dt
import os
from dataclasses import dataclass

import numpy as np

from .market_data import MarketWindow, QuoteTable, atomic_write_text

RELATIVE = "relative"
LOGARITHMIC = "logarithmic"
RETURN_KINDS = (RELATIVE, LOGARITHMIC)


class EmptyDayError(ValueError):
    pass


@dataclass(frozen=True)
class MidpointSeries:
    """Midpoint and spread for every second of one day's market window.

    ``m[k]`` is the last midpoint quoted in second ``base_s + k``, carried
    forward through seconds without quotes.  Entries before ``defined_from``
    are NaN.
    """

    day: dt.date
    base_s: int
    m: np.ndarray
    s: np.ndarray
    defined_from: int

    def __len__(self):
        return len(self.m)

    def defined(self) -> np.ndarray:
        return np.isfinite(self.m)


def _last_per_second(offsets: np.ndarray, values: np.ndarray, length: int) -> np.ndarray:
    out = np.full(length, np.nan)
    if len(offsets):
        # index of the last row within each run of equal offsets
        last = np.flatnonzero(np.r_[offsets[1:] != offsets[:-1], True])
        out[offsets[last]] = values[last]
    return out


def forward_fill(values: np.ndarray) -> np.ndarray:
    """Carry the latest finite value over NaN gaps; leading NaNs stay NaN."""
    ok = np.isfinite(values)
    idx = np.where(ok, np.arange(len(values)), 0)
    np.maximum.accumulate(idx, out=idx)
    out = values[idx]
    if len(values):
        first = np.argmax(ok) if ok.any() else len(values)
        out[:first] = np.nan
    return out


def build_midpoint_series(quotes: QuoteTable, window: MarketWindow | None = None,
                          day: dt.date | None = None) -> MidpointSeries:
    """Sample one day of quotes on the one-second grid of ``window``.

    ``quotes`` must hold a single day, already restricted to the window and
    ordered by ``(t, seq)``.
    """
    window = window or MarketWindow()
    if len(quotes) == 0:
        raise EmptyDayError(f"empty day {day or ''}".strip())
    days = np.unique(quotes.day)
    if len(days) != 1:
        raise ValueError(f"expected quotes of one day, got {len(days)}")
    offsets = quotes.t - window.open_s
    if offsets.min() < 0 or offsets.max() >= window.length:
        raise ValueError("quotes fall outside the market window; filter them first")
    if np.any(np.diff(offsets) < 0):
        raise ValueError("quotes are not time-ordered")
    n = window.length
    m = forward_fill(_last_per_second(offsets, quotes.midpoint, n))
    s = forward_fill(_last_per_second(offsets, quotes.spread, n))
    return MidpointSeries(
        day=days[0].astype(dt.date),
        base_s=window.open_s,
        m=m,
        s=s,
        defined_from=int(offsets.min()),
    )


def compute_return(series: MidpointSeries | np.ndarray, t: int, tau: int, kind: str = RELATIVE) -> float:
    """Return from second offset ``t`` to ``t + tau``; NaN when either end is undefined."""
    m = series.m if isinstance(series, MidpointSeries) else np.asarray(series)
    if tau < 1:
        raise ValueError("tau must be >= 1")
    if t < 0 or t + tau >= len(m):
        return float("nan")
    a, b = m[t], m[t + tau]
    if not (np.isfinite(a) and np.isfinite(b)):
        return float("nan")
    if kind == RELATIVE:
        return float((b - a) / a)
    if kind == LOGARITHMIC:
        return float(np.log(b / a))
    raise ValueError(f"unknown return kind {kind!r}")


def returns(series: MidpointSeries | np.ndarray, tau: int, kind: str = RELATIVE) -> np.ndarray:
    """Vector of ``r(t, tau)`` for every ``t``; NaN past the day end or before the first quote."""
    m = series.m if isinstance(series, MidpointSeries) else np.asarray(series, dtype=float)
    out = np.full(len(m), np.nan)
    if tau < len(m):
        a, b = m[:-tau], m[tau:]
        if kind == RELATIVE:
            out[:-tau] = (b - a) / a
        elif kind == LOGARITHMIC:
            out[:-tau] = np.log(b / a)
        else:
            raise ValueError(f"unknown return kind {kind!r}")
    return out


def midpoint_sampling_diagnostic(quotes: QuoteTable) -> float:
    """Mean over quoted seconds of ``|last mid - mean mid| / mean mid``.

    Measures how far the last-of-second sample strays from the intra-second
    average midpoint.  ``quotes`` holds one day ordered by ``(t, seq)``.
    """
    if len(quotes) == 0:
        raise EmptyDayError("empty day")
    t = quotes.t
    mid = quotes.midpoint
    starts = np.flatnonzero(np.r_[True, t[1:] != t[:-1]])
    ends = np.r_[starts[1:], len(t)]
    mean = np.add.reduceat(mid, starts) / (ends - starts)
    last = mid[ends - 1]
    return float(np.mean(np.abs(last - mean) / mean))


def write_midpoint_series(series: MidpointSeries, path: str | os.PathLike):
    lines = [f"# day={series.day.isoformat()} base_s={series.base_s} length={len(series)}",
             "second,midpoint,spread"]
    for k in range(series.defined_from, len(series)):
        lines.append(f"{k},{float(series.m[k])!r},{float(series.s[k])!r}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_midpoint_series(path: str | os.PathLike) -> MidpointSeries:
    with open(path, encoding="utf-8") as fh:
        meta = dict(item.split("=") for item in fh.readline().lstrip("# ").split())
        fh.readline()
        rows = [line.split(",") for line in fh if line.strip()]
    n = int(meta["length"])
    m = np.full(n, np.nan)
    s = np.full(n, np.nan)
    k = np.array([int(r[0]) for r in rows], dtype=np.int64)
    m[k] = [float(r[1]) for r in rows]
    s[k] = [float(r[2]) for r in rows]
    return MidpointSeries(
        day=dt.date.fromisoformat(meta["day"]),
        base_s=int(meta["base_s"]),
        m=m,
        s=s,
        defined_from=int(k[0]) if len(k) else n,
    )
