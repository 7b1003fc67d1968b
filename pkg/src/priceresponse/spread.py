"""Average spreads, spread bands and band-averaged response curves."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .curve import ResponseCurve

DEFAULT_THRESHOLDS = (0.05, 0.10, 0.40)
EPS = 1e-9


def average_spread(series) -> float:
    """Mean spread over every defined second of every day (each second weighs the same)."""
    total = []
    n = 0
    for s in series:
        ok = np.isfinite(s.s)
        total.append(float(np.sum(s.s[ok])))
        n += int(ok.sum())
    if n == 0:
        raise ValueError("no defined seconds")
    return math.fsum(total) / n


@dataclass
class SpreadGrouping:
    """Band assignment of each stock.

    Bands are numbered from 1: ``[0, e1)``, ``[e1, e2)``, ``[e2, e3]``.  A stock
    above the top edge maps to ``None`` and is listed in ``out_of_range``.
    """

    thresholds: tuple
    assignments: dict
    spreads: dict = field(default_factory=dict)

    @property
    def out_of_range(self) -> list:
        return [k for k, v in self.assignments.items() if v is None]

    def members(self, band: int) -> list:
        return [k for k, v in self.assignments.items() if v == band]

    def to_rows(self) -> list:
        return [(sym, self.spreads.get(sym), band) for sym, band in sorted(self.assignments.items())]


def band_of(spread: float, thresholds=DEFAULT_THRESHOLDS, eps: float = EPS):
    if spread < -eps:
        raise ValueError(f"negative spread {spread}")
    for band, edge in enumerate(thresholds[:-1], start=1):
        if spread < edge - eps:
            return band
    if spread <= thresholds[-1] + eps:
        return len(thresholds)
    return None


def assign_groups(spread_table: dict, thresholds=DEFAULT_THRESHOLDS, eps: float = EPS) -> SpreadGrouping:
    thresholds = tuple(float(t) for t in thresholds)
    if not thresholds or thresholds[0] <= 0 or any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError(f"thresholds must be positive and strictly increasing: {thresholds}")
    assignments = {sym: band_of(float(s), thresholds, eps) for sym, s in spread_table.items()}
    return SpreadGrouping(thresholds, assignments, {k: float(v) for k, v in spread_table.items()})


def group_average_response(curves_by_stock: dict, grouping: SpreadGrouping) -> dict:
    """Unweighted per-lag mean of the member curves of every band.

    ``counts`` of a group curve is the number of stocks with a value at that
    lag.  Bands without member curves are left out with a warning.
    """
    out = {}
    for band in range(1, len(grouping.thresholds) + 1):
        members = [curves_by_stock[s] for s in grouping.members(band) if s in curves_by_stock]
        if not members:
            warnings.warn(f"spread band {band} has no member curves", stacklevel=2)
            continue
        lags = members[0].lags
        if any(not np.array_equal(c.lags, lags) for c in members):
            raise ValueError("member curves must share the lag grid")
        vals = np.vstack([c.values for c in members])
        ok = np.isfinite(vals)
        count = ok.sum(axis=0)
        with np.errstate(invalid="ignore"):
            mean = np.where(count > 0, np.where(ok, vals, 0.0).sum(axis=0) / count, np.nan)
        dev = np.where(ok, vals - mean, 0.0)
        out[band] = ResponseCurve("group", lags.copy(), mean, count, (dev * dev).sum(axis=0),
                                  meta={"band": band, "members": grouping.members(band)})
    return out
