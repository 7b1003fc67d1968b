"""Synthetic quote/trade streams with known trade signs and a known response.

Trade signs follow a two-state Markov chain that repeats the previous sign
with probability ``p_persist``.  Every trade moves the latent log-midpoint by
``impact * sign`` (decaying as ``exp(-age / decay)`` seconds later for the
transient kernel), Gaussian noise is added once per second, and quotes are
rounded to the tick grid.  Trade prices are chosen so that the tick rule
recovers every sign after the first trade of the day.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.signal import lfilter

from .market_data import MarketWindow, QuoteTable, TradeTable


@dataclass(frozen=True)
class SynthParams:
    days: int = 1
    seconds_per_day: int = 22200
    p_persist: float = 0.7
    impact: float = 1e-4
    noise: float = 0.0
    trades_per_second: tuple = ("fixed", 1)  # or ("geometric", mean)
    kernel: tuple = ("permanent",)  # or ("transient", decay_seconds)
    tick: float = 0.01
    base_spread: float = 0.02
    base_price: float = 100.0
    seed: int = 0
    start_day: dt.date = dt.date(2008, 1, 2)
    open_s: int = MarketWindow().open_s

    def __post_init__(self):
        if not 0.5 <= self.p_persist < 1:
            raise ValueError("p_persist must lie in [0.5, 1)")
        if self.impact < 0 or self.noise < 0:
            raise ValueError("impact and noise must be non-negative")
        if self.tick <= 0:
            raise ValueError("tick must be positive")
        if self.days < 1 or self.seconds_per_day < 2:
            raise ValueError("need at least one day of two seconds")
        law = self.trades_per_second
        if law[0] not in ("fixed", "geometric") or law[1] < 0 or (law[0] == "fixed" and law[1] != int(law[1])):
            raise ValueError(f"bad trades_per_second {law!r}")
        if self.kernel[0] == "transient":
            if len(self.kernel) != 2 or self.kernel[1] <= 0:
                raise ValueError("transient kernel needs a positive decay length")
        elif self.kernel[0] != "permanent":
            raise ValueError(f"unknown kernel {self.kernel!r}")

    @property
    def window(self) -> MarketWindow:
        return MarketWindow(self.open_s, self.open_s + self.seconds_per_day)

    @property
    def rho(self) -> float:
        """Lag-one autocorrelation of the sign chain."""
        return 2.0 * self.p_persist - 1.0

    def trading_days(self) -> list:
        out = []
        d = self.start_day
        while len(out) < self.days:
            if d.weekday() < 5:
                out.append(d)
            d += dt.timedelta(days=1)
        return out


@dataclass
class SynthDay:
    day: dt.date
    quotes: QuoteTable
    trades: TradeTable
    true_signs: np.ndarray


@dataclass
class SynthMarket:
    params: SynthParams
    days: list = field(default_factory=list)

    @property
    def quotes(self) -> QuoteTable:
        return _concat(QuoteTable, [d.quotes for d in self.days])

    @property
    def trades(self) -> TradeTable:
        return _concat(TradeTable, [d.trades for d in self.days])

    @property
    def true_signs(self) -> np.ndarray:
        return np.concatenate([d.true_signs for d in self.days])


def _concat(cls, tables):
    return cls(**{f: np.concatenate([getattr(t, f) for t in tables]) for f in cls._fields})


def sign_chain(rng: np.random.Generator, n: int, p_persist: float) -> np.ndarray:
    if n == 0:
        return np.zeros(0, dtype=np.int8)
    first = 1 if rng.random() < 0.5 else -1
    flips = rng.random(n) >= p_persist
    flips[0] = False
    parity = np.cumsum(flips) & 1
    return (first * (1 - 2 * parity)).astype(np.int8)


@numba.njit(cache=True)
def _trade_ticks(side_ticks, signs):
    # Tick rule exactness: a sign change steps strictly in the new direction,
    # a repeated sign never steps against it.
    n = side_ticks.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        q = side_ticks[i]
        s = signs[i]
        if i == 0:
            out[i] = q
            continue
        prev = out[i - 1]
        if s == signs[i - 1]:
            out[i] = q if (q - prev) * s >= 0 else prev
        else:
            out[i] = q if (q - prev) * s > 0 else prev + s
    return out


def _decimals(tick: float) -> int:
    text = repr(float(tick))
    return len(text.split(".")[1]) if "." in text and "e" not in text else 10


def generate_day(params: SynthParams, day: dt.date, rng: np.random.Generator) -> SynthDay:
    L = params.seconds_per_day
    law, arg = params.trades_per_second
    if law == "fixed":
        per_sec = np.full(L, int(arg), dtype=np.int64)
    elif arg == 0:
        per_sec = np.zeros(L, dtype=np.int64)
    else:
        per_sec = rng.geometric(1.0 / (arg + 1.0), size=L).astype(np.int64) - 1
    n_trades = int(per_sec.sum())
    signs = sign_chain(rng, n_trades, params.p_persist)
    trade_sec = np.repeat(np.arange(L), per_sec)
    noise = rng.standard_normal(L) * params.noise

    # latent log-midpoint at the end of each second
    S = np.bincount(trade_sec, weights=signs, minlength=L) * params.impact
    if params.kernel[0] == "permanent":
        impact_state = np.cumsum(S)
        decay = 1.0
    else:
        decay = np.exp(-1.0 / params.kernel[1])
        impact_state = lfilter([1.0], [1.0, -decay], S)
    x_end = impact_state + np.cumsum(noise)
    # state entering each second, before its trades and noise
    carried = np.r_[0.0, decay * impact_state[:-1]]
    x_start = carried + np.r_[0.0, np.cumsum(noise)[:-1]]

    # latent level just before each trade, within its second
    if n_trades:
        first_in_sec = np.r_[0, np.cumsum(per_sec)[:-1]]
        csum = np.cumsum(signs) - signs
        before = (csum - csum[first_in_sec[trade_sec]]) * params.impact
        x_pre = x_start[trade_sec] + before
    else:
        x_pre = np.zeros(0)

    spread_ticks = max(1, int(round(params.base_spread / params.tick)))
    half = spread_ticks * params.tick / 2.0

    def bid_ticks(x):
        return np.round((params.base_price * np.exp(x) - half) / params.tick).astype(np.int64)

    # quote stream: one quote before each trade, one at the end of each second
    q_sec = np.concatenate([trade_sec, np.arange(L)])
    q_order = np.concatenate([np.zeros(n_trades), np.ones(L)])
    q_x = np.concatenate([x_pre, x_end])
    order = np.lexsort((np.concatenate([np.arange(n_trades), np.full(L, n_trades)]), q_order, q_sec))
    q_sec, q_bid = q_sec[order], bid_ticks(q_x[order])
    q_bid = np.maximum(q_bid, 1)
    keep = np.r_[True, q_bid[1:] != q_bid[:-1]]
    q_sec, q_bid = q_sec[keep], q_bid[keep]
    q_ask = q_bid + spread_ticks

    side = np.where(signs > 0, bid_ticks(x_pre) + spread_ticks, bid_ticks(x_pre)) if n_trades else np.zeros(0, np.int64)
    side = np.maximum(side, 1)
    price_ticks = _trade_ticks(side.astype(np.int64), signs.astype(np.int64))
    price_ticks = np.maximum(price_ticks, 1)

    nd = _decimals(params.tick)
    tick = params.tick
    dday = np.datetime64(day, "D")
    nq = len(q_sec)
    quotes = QuoteTable(
        day=np.full(nq, dday),
        t=q_sec + params.open_s,
        bid=np.round(q_bid * tick, nd),
        ask=np.round(q_ask * tick, nd),
        bid_vol=np.full(nq, 100.0),
        ask_vol=np.full(nq, 100.0),
        seq=_seq(q_sec),
    )
    trades = TradeTable(
        day=np.full(n_trades, dday),
        t=trade_sec + params.open_s,
        price=np.round(price_ticks * tick, nd),
        volume=np.full(n_trades, 100.0),
        seq=_seq(trade_sec),
    )
    return SynthDay(day, quotes, trades, signs)


def _seq(sec):
    n = len(sec)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    start = np.r_[True, sec[1:] != sec[:-1]]
    idx = np.arange(n)
    return idx - np.maximum.accumulate(np.where(start, idx, 0))


def generate(params: SynthParams) -> SynthMarket:
    """Generate ``params.days`` independent days; day ``d`` uses the ``d``-th spawned seed."""
    seeds = np.random.SeedSequence(params.seed).spawn(params.days)
    market = SynthMarket(params)
    for day, ss in zip(params.trading_days(), seeds):
        market.days.append(generate_day(params, day, np.random.default_rng(ss)))
    return market


def theoretical_response(params: SynthParams, tau) -> np.ndarray | float:
    """Expected physical-scale response at lag(s) ``tau`` for one trade per second.

    Permanent kernel: ``impact * (1 - rho**tau) / (1 - rho)``.  Transient
    kernel: the expectation summed term by term over the kernel and the sign
    autocorrelation ``rho**k``.
    """
    if tuple(params.trades_per_second) != ("fixed", 1):
        raise ValueError("closed form requires exactly one trade per second")
    taus = np.atleast_1d(np.asarray(tau, dtype=np.int64))
    if np.any(taus < 1):
        raise ValueError("tau must be >= 1")
    rho = params.rho
    lam = params.impact
    if params.kernel[0] == "permanent":
        if rho == 0:
            out = np.full(len(taus), lam)
        else:
            out = lam * (1.0 - rho ** taus.astype(float)) / (1.0 - rho)
    else:
        ell = float(params.kernel[1])
        # truncate the past-trade sum where rho**k is negligible
        kmax = 1 if rho == 0 else int(np.ceil(np.log(1e-18) / np.log(rho))) + 1
        k_past = np.arange(1, kmax + 1, dtype=float)
        w_past = rho ** k_past if rho > 0 else np.zeros(kmax)
        out = np.empty(len(taus))
        for i, t in enumerate(taus):
            k = np.arange(t, dtype=float)
            future = np.sum(rho ** k * np.exp(-(t - 1 - k) / ell)) if rho > 0 else np.exp(-(t - 1) / ell)
            past = np.sum(w_past * (np.exp(-(t - 1 + k_past) / ell) - np.exp(-(k_past - 1) / ell)))
            out[i] = lam * (future + past)
    return out if np.ndim(tau) else float(out[0])


def monte_carlo_response(p_persist: float, impact: float, taus, n_paths: int, seed: int = 0):
    """Monte-Carlo estimate of ``impact * E[sum_{u<tau} eps(t+u) eps(t)]`` for a stationary chain.

    Simulates the sign chain directly (independent of :func:`generate`) and
    returns ``(mean, stderr)`` arrays over ``taus``.
    """
    rng = np.random.default_rng(seed)
    taus = np.asarray(taus, dtype=np.int64)
    horizon = int(taus.max())
    first = np.where(rng.random(n_paths) < 0.5, 1, -1)
    keep = rng.random((n_paths, horizon)) < p_persist
    keep[:, 0] = True
    path = np.empty((n_paths, horizon), dtype=np.int64)
    path[:, 0] = first
    for u in range(1, horizon):
        path[:, u] = np.where(keep[:, u], path[:, u - 1], -path[:, u - 1])
    cum = np.cumsum(path * first[:, None], axis=1)[:, taus - 1] * impact
    return cum.mean(axis=0), cum.std(axis=0, ddof=1) / np.sqrt(n_paths)
