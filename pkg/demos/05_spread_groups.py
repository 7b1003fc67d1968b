"""
Grouping stocks by average spread
=================================

Bands are [0, 0.05), [0.05, 0.10) and [0.10, 0.40]. Stocks above 0.40 are
flagged rather than forced into the top band.
"""

import warnings

import numpy as np

from priceresponse import (EstimatorConfig, SynthParams, assign_groups, average_spread, build_midpoint_series,
                           generate, group_average_response, response_physical, sign_series_for_day)

published = {"CSCO": 0.01, "GS": 0.11, "RIG": 0.12, "APA": 0.13, "MA": 0.38, "GOOG": 0.40, "CME": 1.08}
g = assign_groups(published)
for sym, spread, band in g.to_rows():
    print(f"{sym:5s} {spread:.2f}  band {band if band is not None else 'out of range'}")

# %%
# A small synthetic universe where wider spreads come with larger impact.
spreads, curves = {}, {}
for k, (sym, spread, impact) in enumerate([("T1", 0.01, 4e-5), ("T2", 0.02, 6e-5), ("W1", 0.15, 2e-4),
                                          ("W2", 0.25, 3e-4)]):
    p = SynthParams(days=3, seconds_per_day=6000, base_spread=spread, impact=impact, noise=1e-4, seed=10 + k)
    market = generate(p)
    mids = [build_midpoint_series(d.quotes, p.window) for d in market.days]
    signs = [sign_series_for_day(d.trades, p.window) for d in market.days]
    spreads[sym] = average_spread(mids)
    curves[sym] = response_physical(mids, signs, EstimatorConfig(tau_max=100))

grouping = assign_groups(spreads)
with warnings.catch_warnings():
    warnings.simplefilter("ignore")  # band 2 is empty here
    groups = group_average_response(curves, grouping)
for band, c in groups.items():
    print(f"band {band}: members {c.meta['members']}, peak {np.nanmax(c.values):.3e}")
