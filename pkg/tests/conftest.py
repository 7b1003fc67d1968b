import datetime as dt

import numpy as np
import pytest

from priceresponse import MidpointSeries, SynthParams, build_midpoint_series, generate, sign_series_for_day
from priceresponse.signs import aggregate_physical


def market_series(params: SynthParams):
    """Midpoint and sign series of every generated day, built through the public pipeline."""
    market = generate(params)
    window = params.window
    mids = [build_midpoint_series(d.quotes, window) for d in market.days]
    signs = [sign_series_for_day(d.trades, window) for d in market.days]
    return market, mids, signs


def hand_series(m, trades_by_second, day=dt.date(2008, 1, 2)):
    """Build a midpoint series from an explicit array and signs from ``{second: [signs]}``."""
    m = np.asarray(m, dtype=float)
    sec = [k for k, v in sorted(trades_by_second.items()) for _ in v]
    sgn = [s for _, v in sorted(trades_by_second.items()) for s in v]
    defined = np.flatnonzero(np.isfinite(m))
    mid = MidpointSeries(day, 34800, m, np.full(len(m), 0.02), int(defined[0]) if len(defined) else len(m))
    return mid, aggregate_physical(sec, sgn, len(m), day=day)


@pytest.fixture(scope="session")
def small_market():
    return market_series(SynthParams(days=4, seconds_per_day=3000, p_persist=0.7, noise=1e-4,
                                     trades_per_second=("geometric", 2.0), seed=11))
