"""On-disk layout of ingested data.

    <root>/<SYMBOL>/<YYYY-MM-DD>/quotes.csv        validated, window-filtered quotes
    <root>/<SYMBOL>/<YYYY-MM-DD>/trades.csv        validated, window-filtered trades
    <root>/<SYMBOL>/<YYYY-MM-DD>/midpoints.csv     second, midpoint, spread
    <root>/<SYMBOL>/<YYYY-MM-DD>/signs.csv         second, N, E, eps_p
    <root>/<SYMBOL>/<YYYY-MM-DD>/trade_signs.csv   second, sign (one row per trade)
    <root>/<SYMBOL>/window.txt                     market window used at ingest
"""

from __future__ import annotations

import datetime as dt
from pathlib import Path

from .market_data import (MarketWindow, QuoteTable, TradeTable, atomic_write_text, filter_market_time,
                          parse_quotes, parse_trades, write_quotes, write_trades)
from .midpoint import build_midpoint_series, read_midpoint_series, write_midpoint_series
from .signs import read_sign_series, sign_series_for_day, write_sign_series


def symbol_dir(root, symbol: str) -> Path:
    return Path(root) / symbol


def list_days(root, symbol: str) -> list:
    base = symbol_dir(root, symbol)
    if not base.is_dir():
        raise FileNotFoundError(f"no ingested data for {symbol!r} under {root}")
    return sorted(dt.date.fromisoformat(p.name) for p in base.iterdir() if p.is_dir())


def read_window(root, symbol: str) -> MarketWindow:
    path = symbol_dir(root, symbol) / "window.txt"
    return MarketWindow.parse(path.read_text().strip()) if path.exists() else MarketWindow()


def ingest_tables(quotes: QuoteTable, trades: TradeTable, root, symbol: str,
                  window: MarketWindow | None = None) -> dict:
    """Filter to the window, split by day and write quotes, trades and midpoint series."""
    window = window or MarketWindow()
    quotes = filter_market_time(quotes, window)
    trades = filter_market_time(trades, window)
    base = symbol_dir(root, symbol)
    base.mkdir(parents=True, exist_ok=True)
    atomic_write_text(base / "window.txt", f"{window}\n")
    stats = {"days": [], "quotes": len(quotes), "trades": len(trades), "empty_days": []}
    for day in sorted(set(quotes.days()) | set(trades.days())):
        q = quotes.for_day(day)
        t = trades.for_day(day)
        ddir = base / day.isoformat()
        write_quotes(q, ddir / "quotes.csv")
        write_trades(t, ddir / "trades.csv")
        if len(q) == 0:
            stats["empty_days"].append(day.isoformat())
            continue
        write_midpoint_series(build_midpoint_series(q, window), ddir / "midpoints.csv")
        stats["days"].append(day.isoformat())
    return stats


def ingest_files(quotes_path, trades_path, root, symbol: str, window: MarketWindow | None = None,
                 delimiter: str = ",") -> dict:
    from .market_data import FormatConfig

    cfg = FormatConfig(delimiter=delimiter)
    quotes = parse_quotes(quotes_path, cfg)
    trades = parse_trades(trades_path, cfg)
    stats = ingest_tables(quotes, trades, root, symbol, window)
    stats["quote_rejects"] = quotes.rejects.count
    stats["trade_rejects"] = trades.rejects.count
    stats["reject_rows"] = {"quotes": quotes.rejects.rows[:100], "trades": trades.rejects.rows[:100]}
    return stats


def classify_symbol(root, symbol: str, carry_over: bool = False) -> dict:
    """Write sign series for every ingested day; optionally carry the last sign into the next day."""
    window = read_window(root, symbol)
    base = symbol_dir(root, symbol)
    stats = {"days": 0, "trades": 0, "unresolved": 0}
    carry_sign = carry_price = None
    for day in list_days(root, symbol):
        ddir = base / day.isoformat()
        trades = parse_trades(ddir / "trades.csv")
        series = sign_series_for_day(trades, window, carry_sign, carry_price)
        write_sign_series(series, ddir / "signs.csv", ddir / "trade_signs.csv")
        stats["days"] += 1
        stats["trades"] += len(trades)
        stats["unresolved"] += series.unresolved
        if carry_over and len(series.trade_sign):
            carry_sign, carry_price = int(series.trade_sign[-1]), float(trades.price[-1])
    return stats


def load_midpoints(root, symbol: str) -> list:
    base = symbol_dir(root, symbol)
    return [read_midpoint_series(base / d.isoformat() / "midpoints.csv") for d in list_days(root, symbol)
            if (base / d.isoformat() / "midpoints.csv").exists()]


def load_signs(root, symbol: str) -> list:
    base = symbol_dir(root, symbol)
    out = []
    for d in list_days(root, symbol):
        ddir = base / d.isoformat()
        if not (ddir / "signs.csv").exists():
            raise FileNotFoundError(f"{symbol} {d}: no sign series; run the signs step first")
        out.append(read_sign_series(ddir / "signs.csv", ddir / "trade_signs.csv"))
    return out
