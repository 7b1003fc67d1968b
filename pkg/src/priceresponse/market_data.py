"""Quote/trade text files: parsing, validation and the market-time window.

Files are delimiter-separated text with a header row.  Quote files carry the
columns ``day, time, bid, ask, bid_vol, ask_vol`` and trade files the columns
``day, time, price, volume``.  ``day`` is an ISO date and ``time`` is either
integer seconds since midnight or ``HH:MM:SS``.

Parsed events are held column-wise in :class:`QuoteTable` / :class:`TradeTable`,
which behave as read-only sequences of :class:`QuoteEvent` / :class:`TradeEvent`.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import os
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Union

import numpy as np

QUOTE_COLUMNS = ("day", "time", "bid", "ask", "bid_vol", "ask_vol")
TRADE_COLUMNS = ("day", "time", "price", "volume")

Source = Union[str, os.PathLike, bytes, IO]


class HeaderError(ValueError):
    """The header row is missing or lacks a required column."""


@dataclass(frozen=True)
class QuoteEvent:
    day: dt.date
    t: int
    bid: float
    ask: float
    bid_vol: float
    ask_vol: float
    seq: int = 0


@dataclass(frozen=True)
class TradeEvent:
    day: dt.date
    t: int
    price: float
    volume: float
    seq: int = 0


def parse_clock(text: str) -> int:
    """Seconds since midnight from ``HH:MM:SS`` or a plain integer."""
    text = text.strip()
    if ":" in text:
        h, m, s = text.split(":")
        return int(h) * 3600 + int(m) * 60 + int(s)
    return int(text)


def format_clock(seconds: int) -> str:
    h, rem = divmod(int(seconds), 3600)
    m, s = divmod(rem, 60)
    return f"{h:02d}:{m:02d}:{s:02d}"


@dataclass(frozen=True)
class MarketWindow:
    """Half-open intraday window ``[open_s, close_s)`` in seconds since midnight."""

    open_s: int = 9 * 3600 + 40 * 60
    close_s: int = 15 * 3600 + 50 * 60

    def __post_init__(self):
        if not self.open_s < self.close_s:
            raise ValueError(f"window must satisfy open < close, got {self.open_s}..{self.close_s}")

    @property
    def length(self) -> int:
        return self.close_s - self.open_s

    @classmethod
    def parse(cls, text: str) -> MarketWindow:
        """Parse ``09:40:00-15:50:00``."""
        lo, hi = text.split("-")
        return cls(parse_clock(lo), parse_clock(hi))

    def __str__(self):
        return f"{format_clock(self.open_s)}-{format_clock(self.close_s)}"


@dataclass(frozen=True)
class FormatConfig:
    delimiter: str = ","
    # maps canonical column name -> header name used in the file
    columns: dict = field(default_factory=dict)

    def header_name(self, canonical: str) -> str:
        return self.columns.get(canonical, canonical)


@dataclass
class RejectReport:
    count: int = 0
    rows: list = field(default_factory=list)  # (line number, reason)

    def add(self, line: int, reason: str):
        self.count += 1
        self.rows.append((line, reason))


def _seq_within_second(days: np.ndarray, times: np.ndarray) -> np.ndarray:
    # arrival index among consecutive rows sharing (day, t); rows are in file order
    n = len(times)
    seq = np.zeros(n, dtype=np.int64)
    if n == 0:
        return seq
    new_group = np.ones(n, dtype=bool)
    new_group[1:] = (days[1:] != days[:-1]) | (times[1:] != times[:-1])
    idx = np.arange(n)
    starts = np.maximum.accumulate(np.where(new_group, idx, 0))
    return idx - starts


class _EventTable(Sequence):
    _fields: tuple = ()
    _event = None

    def __init__(self, **columns):
        n = None
        for name in self._fields:
            col = np.asarray(columns[name])
            col.setflags(write=False)
            if n is None:
                n = len(col)
            elif len(col) != n:
                raise ValueError("column lengths differ")
            setattr(self, name, col)
        self.rejects = columns.get("rejects") or RejectReport()

    def __len__(self):
        return len(self.t)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return self.take(np.arange(len(self))[i])
        vals = {}
        for name in self._fields:
            v = getattr(self, name)[i]
            if name == "day":
                vals[name] = v.astype(dt.date)
            elif name in ("t", "seq"):
                vals[name] = int(v)
            else:
                vals[name] = float(v)
        return self._event(**vals)

    def __eq__(self, other):
        if type(other) is not type(self) or len(other) != len(self):
            return NotImplemented if type(other) is not type(self) else False
        return all(np.array_equal(getattr(self, f), getattr(other, f)) for f in self._fields)

    def __repr__(self):
        return f"{type(self).__name__}(n={len(self)}, rejects={self.rejects.count})"

    def take(self, index) -> _EventTable:
        return type(self)(**{f: getattr(self, f)[index] for f in self._fields}, rejects=self.rejects)

    def days(self) -> list:
        return [d.astype(dt.date) for d in np.unique(self.day)]

    def for_day(self, day) -> _EventTable:
        return self.take(np.flatnonzero(self.day == np.datetime64(day, "D")))

    @classmethod
    def from_events(cls, events: Iterable) -> _EventTable:
        events = list(events)
        cols = {}
        for name in cls._fields:
            vals = [getattr(e, name) for e in events]
            if name == "day":
                cols[name] = np.array(vals, dtype="datetime64[D]")
            elif name in ("t", "seq"):
                cols[name] = np.array(vals, dtype=np.int64)
            else:
                cols[name] = np.array(vals, dtype=np.float64)
        return cls(**cols)


class QuoteTable(_EventTable):
    _fields = ("day", "t", "bid", "ask", "bid_vol", "ask_vol", "seq")
    _event = QuoteEvent

    @property
    def midpoint(self) -> np.ndarray:
        return (self.ask + self.bid) / 2.0

    @property
    def spread(self) -> np.ndarray:
        return self.ask - self.bid


class TradeTable(_EventTable):
    _fields = ("day", "t", "price", "volume", "seq")
    _event = TradeEvent


def _open_text(source: Source) -> IO:
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, (str, os.PathLike)):
        return open(source, newline="", encoding="utf-8")
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8", newline="")


def _read_rows(source: Source, required: Sequence[str], config: FormatConfig):
    handle = _open_text(source)
    try:
        reader = csv.reader(handle, delimiter=config.delimiter)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            # an empty file has nothing to reject
            return
        except (csv.Error, UnicodeDecodeError) as exc:
            raise HeaderError(f"unreadable header: {exc}") from exc
        positions = []
        for name in required:
            wanted = config.header_name(name)
            if wanted not in header:
                raise HeaderError(f"header lacks column {wanted!r}: {header}")
            positions.append(header.index(wanted))
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                yield lineno, [row[p].strip() for p in positions]
            except IndexError:
                yield lineno, None
    finally:
        if isinstance(source, (str, os.PathLike)):
            handle.close()


def parse_quotes(source: Source, config: FormatConfig | None = None) -> QuoteTable:
    """Parse a quote file into a :class:`QuoteTable`.

    Rows with a non-numeric field, a non-positive bid or ``ask < bid`` are
    rejected and recorded in ``table.rejects`` with their line number; parsing
    continues.  A missing or unreadable header raises :class:`HeaderError`.
    """
    config = config or FormatConfig()
    cols = {k: [] for k in QUOTE_COLUMNS}
    rejects = RejectReport()
    for lineno, row in _read_rows(source, QUOTE_COLUMNS, config):
        if row is None:
            rejects.add(lineno, "missing field")
            continue
        try:
            day = dt.date.fromisoformat(row[0])
            t = parse_clock(row[1])
            bid, ask, bv, av = (float(x) for x in row[2:])
        except ValueError as exc:
            rejects.add(lineno, f"malformed: {exc}")
            continue
        if not (np.isfinite([bid, ask, bv, av]).all() and bid > 0 and ask >= bid):
            rejects.add(lineno, f"invalid quote bid={bid} ask={ask}")
            continue
        if bv < 0 or av < 0:
            rejects.add(lineno, "negative volume")
            continue
        for key, v in zip(QUOTE_COLUMNS, (day, t, bid, ask, bv, av)):
            cols[key].append(v)
    day = np.array(cols["day"], dtype="datetime64[D]")
    t = np.array(cols["time"], dtype=np.int64)
    return QuoteTable(
        day=day,
        t=t,
        bid=np.array(cols["bid"], dtype=np.float64),
        ask=np.array(cols["ask"], dtype=np.float64),
        bid_vol=np.array(cols["bid_vol"], dtype=np.float64),
        ask_vol=np.array(cols["ask_vol"], dtype=np.float64),
        seq=_seq_within_second(day, t),
        rejects=rejects,
    )


def parse_trades(source: Source, config: FormatConfig | None = None) -> TradeTable:
    """Parse a trade file into a :class:`TradeTable`; non-positive price or volume is rejected."""
    config = config or FormatConfig()
    cols = {k: [] for k in TRADE_COLUMNS}
    rejects = RejectReport()
    for lineno, row in _read_rows(source, TRADE_COLUMNS, config):
        if row is None:
            rejects.add(lineno, "missing field")
            continue
        try:
            day = dt.date.fromisoformat(row[0])
            t = parse_clock(row[1])
            price, volume = float(row[2]), float(row[3])
        except ValueError as exc:
            rejects.add(lineno, f"malformed: {exc}")
            continue
        if not (np.isfinite(price) and np.isfinite(volume) and price > 0 and volume > 0):
            rejects.add(lineno, f"invalid trade price={price} volume={volume}")
            continue
        for key, v in zip(TRADE_COLUMNS, (day, t, price, volume)):
            cols[key].append(v)
    day = np.array(cols["day"], dtype="datetime64[D]")
    t = np.array(cols["time"], dtype=np.int64)
    return TradeTable(
        day=day,
        t=t,
        price=np.array(cols["price"], dtype=np.float64),
        volume=np.array(cols["volume"], dtype=np.float64),
        seq=_seq_within_second(day, t),
        rejects=rejects,
    )


def filter_market_time(events, window: MarketWindow | None = None):
    """Keep events with ``open_s <= t < close_s``, preserving order.

    Accepts a :class:`QuoteTable`/:class:`TradeTable` or any iterable of events.
    """
    window = window or MarketWindow()
    if isinstance(events, _EventTable):
        keep = (events.t >= window.open_s) & (events.t < window.close_s)
        return events.take(np.flatnonzero(keep))
    return [e for e in events if window.open_s <= e.t < window.close_s]


def _fmt(x: float) -> str:
    # shortest repr round-trips exactly through float()
    return repr(float(x))


def write_quotes(table: QuoteTable, path: str | os.PathLike, delimiter: str = ","):
    lines = [delimiter.join(QUOTE_COLUMNS)]
    days = table.day.astype(str)
    for k in range(len(table)):
        lines.append(delimiter.join((
            days[k], str(int(table.t[k])), _fmt(table.bid[k]), _fmt(table.ask[k]),
            _fmt(table.bid_vol[k]), _fmt(table.ask_vol[k]),
        )))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_trades(table: TradeTable, path: str | os.PathLike, delimiter: str = ","):
    lines = [delimiter.join(TRADE_COLUMNS)]
    days = table.day.astype(str)
    for k in range(len(table)):
        lines.append(delimiter.join((
            days[k], str(int(table.t[k])), _fmt(table.price[k]), _fmt(table.volume[k]),
        )))
    atomic_write_text(path, "\n".join(lines) + "\n")


def atomic_write_text(path: str | os.PathLike, text: str):
    """Write to a sibling temp file, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
