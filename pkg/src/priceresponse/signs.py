"""Trade-sign classification (tick rule with carry-over) and per-second aggregation."""

from __future__ import annotations

import datetime as dt
import os
from dataclasses import dataclass

import numpy as np

from .market_data import MarketWindow, TradeTable, atomic_write_text


@dataclass(frozen=True)
class TradeSigns:
    """Per-trade signs of one day.  ``0`` marks a leading trade that could not be resolved."""

    signs: np.ndarray
    unresolved: int


def classify_trade_scale(prices, carry_in_sign: int | None = None,
                         carry_in_price: float | None = None) -> TradeSigns:
    """Sign each trade by the direction of its price change.

    A trade priced differently from its predecessor takes the sign of the
    change; an unchanged price repeats the predecessor's sign.  Prices are
    compared for exact equality.

    Parameters
    ----------
    prices : array_like or TradeTable
        Trade prices of one day in ``(t, seq)`` order.
    carry_in_sign : {+1, -1, None}
        Sign of the last trade of the previous day.  Without it, leading
        trades whose sign cannot be derived are left at 0 and counted in
        ``unresolved``.
    carry_in_price : float, optional
        Price of the previous day's last trade, compared against the first
        trade of this day.
    """
    if isinstance(prices, TradeTable):
        prices = prices.price
    p = np.asarray(prices, dtype=np.float64)
    if carry_in_sign not in (None, 1, -1):
        raise ValueError("carry_in_sign must be +1, -1 or None")
    n = len(p)
    if n == 0:
        return TradeSigns(np.zeros(0, dtype=np.int8), 0)
    step = np.zeros(n, dtype=np.int8)
    step[1:] = np.sign(p[1:] - p[:-1])
    if carry_in_price is not None:
        step[0] = np.sign(p[0] - carry_in_price)
    nz = step != 0
    last = np.where(nz, np.arange(n), -1)
    np.maximum.accumulate(last, out=last)
    signs = np.where(last >= 0, step[np.maximum(last, 0)], carry_in_sign or 0).astype(np.int8)
    return TradeSigns(signs, int(np.count_nonzero(signs == 0)))


@dataclass(frozen=True)
class SignSeries:
    """Trade signs of one day on both clocks.

    ``trade_second``/``trade_sign`` list the resolved trades in order (second
    offset within the window, sign).  ``N``, ``E`` and ``eps_p`` are indexed
    by second offset: trade count, signed sum and physical-scale sign.
    """

    day: dt.date | None
    trade_second: np.ndarray
    trade_sign: np.ndarray
    N: np.ndarray
    E: np.ndarray
    eps_p: np.ndarray
    unresolved: int = 0

    def __len__(self):
        return len(self.N)


def aggregate_physical(trade_second, trade_sign, length: int, day=None, unresolved: int = 0) -> SignSeries:
    """Sum per-trade signs within each second.

    Unresolved trades (sign 0) are dropped before counting.  ``eps_p`` is the
    sign of the per-second sum and is 0 both for seconds without trades and
    for balanced seconds.
    """
    sec = np.asarray(trade_second, dtype=np.int64)
    sgn = np.asarray(trade_sign, dtype=np.int8)
    keep = sgn != 0
    sec, sgn = sec[keep], sgn[keep]
    if len(sec) and (sec.min() < 0 or sec.max() >= length):
        raise ValueError("trade seconds outside the window")
    N = np.bincount(sec, minlength=length).astype(np.int64)
    E = np.bincount(sec, weights=sgn, minlength=length).astype(np.int64)
    return SignSeries(
        day=day,
        trade_second=sec,
        trade_sign=sgn,
        N=N,
        E=E,
        eps_p=np.sign(E).astype(np.int8),
        unresolved=unresolved,
    )


def sign_series_for_day(trades: TradeTable, window: MarketWindow | None = None,
                        carry_in_sign: int | None = None, carry_in_price: float | None = None) -> SignSeries:
    """Classify and aggregate one day of window-filtered trades."""
    window = window or MarketWindow()
    days = np.unique(trades.day)
    if len(days) > 1:
        raise ValueError("expected trades of one day")
    ts = classify_trade_scale(trades.price, carry_in_sign, carry_in_price)
    day = days[0].astype(dt.date) if len(days) else None
    return aggregate_physical(trades.t - window.open_s, ts.signs, window.length, day=day,
                              unresolved=ts.unresolved)


def write_sign_series(series: SignSeries, path: str | os.PathLike, trades_path: str | os.PathLike | None = None):
    day = series.day.isoformat() if series.day else ""
    lines = [f"# day={day} length={len(series)} unresolved={series.unresolved}", "second,N,E,eps_p"]
    for k in np.flatnonzero(series.N):
        lines.append(f"{k},{series.N[k]},{series.E[k]},{series.eps_p[k]}")
    atomic_write_text(path, "\n".join(lines) + "\n")
    if trades_path is not None:
        rows = ["second,sign"] + [f"{a},{b}" for a, b in zip(series.trade_second, series.trade_sign)]
        atomic_write_text(trades_path, "\n".join(rows) + "\n")


def read_sign_series(path: str | os.PathLike, trades_path: str | os.PathLike) -> SignSeries:
    """Rebuild a :class:`SignSeries` from its per-trade sign file (the aggregate file supplies metadata)."""
    with open(path, encoding="utf-8") as fh:
        meta = dict(item.split("=", 1) for item in fh.readline().lstrip("# ").split())
    with open(trades_path, encoding="utf-8") as fh:
        fh.readline()
        rows = [line.split(",") for line in fh if line.strip()]
    sec = np.array([int(r[0]) for r in rows], dtype=np.int64)
    sgn = np.array([int(r[1]) for r in rows], dtype=np.int64)
    day = dt.date.fromisoformat(meta["day"]) if meta.get("day") else None
    return aggregate_physical(sec, sgn, int(meta["length"]), day=day, unresolved=int(meta["unresolved"]))
