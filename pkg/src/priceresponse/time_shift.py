"""Responses with a variable offset between return anchor and trade sign.

On the physical clock the return is anchored ``t_s`` seconds before the
sign's second; ``t_s = 1`` is the base estimator.  On the trade clock each
trade carries a pseudo-midpoint, the last midpoint of the second before the
trade, and both the shift and the lag count trades.

Shifts in ``(0, 2]`` keep returns and signs in their causal order; larger or
negative shifts break it and the response collapses to noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import ResponseCurve, accumulate_day, merge_partials
from .response import EstimatorConfig, estimate, map_days, pair_days

MODES = ("fixed_tau_vary_shift", "fixed_shift_vary_tau")


def pseudo_midpoints(midpoint, signs) -> np.ndarray:
    """Midpoint assigned to each resolved trade: the value at the end of the preceding second."""
    before = signs.trade_second - 1
    out = np.full(len(before), np.nan)
    ok = before >= 0
    out[ok] = midpoint.m[before[ok]]
    return out


def _trade_clock_partial(m, s, lags, config, t_s):
    price = pseudo_midpoints(m, s)
    n = len(price)
    anchor = np.arange(n, dtype=np.int64) - t_s
    x = s.trade_sign.astype(np.float64)
    ones = np.ones(n, dtype=np.int64)
    return accumulate_day(price, anchor, x, np.ones(n), ones, lags, kind=config.return_kind)


def response_with_shift(returns_i, signs_j, t_s: int, scale: str = "physical",
                        config: EstimatorConfig | None = None) -> ResponseCurve:
    """Response with the return of ``i`` anchored ``t_s`` steps before the sign of ``j``.

    ``scale`` is ``"trade"`` (trade clock, shift and lag in trades),
    ``"physical"`` or ``"activity"`` (seconds).  Anchors outside the day are
    dropped, so shifts longer than a day give an empty curve.
    """
    config = config or EstimatorConfig()
    t_s = int(t_s)
    if scale in ("physical", "activity"):
        return estimate(returns_i, signs_j, scale, config, shift=t_s, kind="shifted")
    if scale != "trade":
        raise ValueError(f"unknown scale {scale!r}")
    pairs = pair_days(returns_i, signs_j)
    lags = config.lag_grid()
    partials = map_days(lambda p: _trade_clock_partial(p[0], p[1], lags, config, t_s), pairs, config.workers)
    meta = {"scale": "trade", "clock": "trade", "shift": t_s, "days": [str(p[0].day) for p in pairs],
            "return_kind": config.return_kind}
    return merge_partials("shifted", lags, partials, meta)


@dataclass
class ShiftScan:
    mode: str
    fixed: int
    grid: np.ndarray
    curves: list

    def values(self) -> np.ndarray:
        """Fixed-tau mode: the response at the fixed lag for every shift in the grid."""
        return np.array([c.values[0] for c in self.curves])

    def stderrs(self) -> np.ndarray:
        return np.array([c.stderr[0] for c in self.curves])

    def counts(self) -> np.ndarray:
        return np.array([c.counts[0] for c in self.curves])


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:step`` with ``stop`` included, or a comma list."""
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        if step == 0:
            raise ValueError("grid step must be nonzero")
        return np.arange(start, stop + (1 if step > 0 else -1), step, dtype=np.int64)
    return np.array([int(p) for p in text.split(",") if p.strip()], dtype=np.int64)


def run_shift_scan(returns_i, signs_j, mode: str, value: int, grid, scale: str = "physical",
                   config: EstimatorConfig | None = None) -> ShiftScan:
    """Scan shifts at a fixed lag, or lags at a fixed shift.

    ``fixed_tau_vary_shift``: ``value`` is the lag, ``grid`` the shifts; each
    curve holds the single lag ``value``.  ``fixed_shift_vary_tau``: ``value``
    is the shift and ``grid`` the lags.
    """
    config = config or EstimatorConfig()
    grid = np.asarray(grid, dtype=np.int64)
    if grid.size == 0:
        raise ValueError("empty scan grid")
    if mode == "fixed_tau_vary_shift":
        cfg = config.with_(tau_max=max(config.tau_max, int(value)), lags=(int(value),))
        curves = [response_with_shift(returns_i, signs_j, int(t_s), scale, cfg) for t_s in grid]
    elif mode == "fixed_shift_vary_tau":
        lags = np.unique(grid)
        cfg = config.with_(tau_max=max(config.tau_max, int(lags.max())), lags=tuple(int(t) for t in lags))
        curves = [response_with_shift(returns_i, signs_j, int(value), scale, cfg)]
    else:
        raise ValueError(f"unknown scan mode {mode!r}")
    return ShiftScan(mode, int(value), grid, curves)
