import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import market_series
from priceresponse import (EstimatorConfig, ResponseCurve, SynthParams, assign_groups, average_spread,
                           group_average_response, response_physical)
from priceresponse.midpoint import MidpointSeries


def series(spread, n=100):
    return MidpointSeries(None, 0, np.full(n, 100.0), np.full(n, spread), 0)


def curve(values):
    v = np.asarray(values, dtype=float)
    return ResponseCurve("physical", np.arange(1, len(v) + 1), v, np.full(len(v), 10), np.ones(len(v)))


def test_average_spread_examples():
    assert average_spread([series(0.02)]) == pytest.approx(0.02, abs=1e-15)
    assert average_spread([series(0.01), series(0.03)]) == pytest.approx(0.02, abs=1e-15)


def test_average_spread_skips_seconds_before_first_quote():
    s = MidpointSeries(None, 0, np.r_[np.nan, np.nan, 100.0, 100.0], np.r_[np.nan, np.nan, 0.04, 0.02], 2)
    assert average_spread([s]) == pytest.approx(0.03, abs=1e-15)


@pytest.mark.parametrize("sym,spread,band", [
    ("CSCO", 0.01, 1), ("EDGE", 0.05, 2), ("GS", 0.11, 3), ("RIG", 0.12, 3), ("APA", 0.13, 3),
    ("MA", 0.38, 3), ("GOOG", 0.40, 3), ("CME", 1.08, None), ("MID", 0.0999, 2), ("TEN", 0.10, 3),
])
def test_band_assignment(sym, spread, band):
    g = assign_groups({sym: spread})
    assert g.assignments[sym] == band
    assert (sym in g.out_of_range) == (band is None)


def test_bad_thresholds_raise():
    for bad in ((0.1, 0.05), (0.05, 0.05), (0.0, 0.1), ()):
        with pytest.raises(ValueError):
            assign_groups({"X": 0.01}, bad)


universe = st.dictionaries(st.text("ABCDEFGH", min_size=1, max_size=4), st.floats(0, 2), max_size=20)


@settings(max_examples=100, deadline=None)
@given(universe)
def test_assignment_partitions_universe_and_ignores_order(table):
    g = assign_groups(table)
    parts = [g.members(b) for b in (1, 2, 3)] + [g.out_of_range]
    flat = [s for p in parts for s in p]
    assert sorted(flat) == sorted(table)
    rev = assign_groups(dict(reversed(list(table.items()))))
    assert rev.assignments == g.assignments


def test_group_average_basics():
    g = assign_groups({"A": 0.01, "B": 0.02, "C": 0.2})
    a, b, c = curve([1.0, 2.0]), curve([3.0, np.nan]), curve([5.0, 6.0])
    with pytest.warns(UserWarning, match="band 2"):
        out = group_average_response({"A": a, "B": b, "C": c}, g)
    assert set(out) == {1, 3}
    np.testing.assert_array_equal(out[1].values, [2.0, 2.0])
    np.testing.assert_array_equal(out[1].counts, [2, 1])
    np.testing.assert_array_equal(out[3].values, c.values)


def test_identical_members_average_to_themselves_and_scale():
    g = assign_groups({"A": 0.01, "B": 0.02})
    v = np.array([0.5, -1.25, 3.0])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = group_average_response({"A": curve(v), "B": curve(v)}, g)
        np.testing.assert_array_equal(out[1].values, v)
        scaled = group_average_response({"A": curve(v).scaled(3.0), "B": curve(2 * v).scaled(3.0)}, g)
        plain = group_average_response({"A": curve(v), "B": curve(2 * v)}, g)
    np.testing.assert_allclose(scaled[1].values, 3.0 * plain[1].values, rtol=1e-15)


def test_wide_spread_band_responds_more():
    curves, spreads = {}, {}
    specs = {"TIGHT": (0.01, 5e-5), "WIDE": (0.20, 3e-4)}
    for k, (sym, (spread, lam)) in enumerate(specs.items()):
        p = SynthParams(days=3, seconds_per_day=5000, impact=lam, noise=1e-4, base_spread=spread, seed=40 + k)
        _, mids, signs = market_series(p)
        spreads[sym] = average_spread(mids)
        curves[sym] = response_physical(mids, signs, EstimatorConfig(tau_max=100))
    g = assign_groups(spreads)
    assert g.assignments == {"TIGHT": 1, "WIDE": 3}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = group_average_response(curves, g)
    assert np.nanmax(np.abs(out[3].values)) > np.nanmax(np.abs(out[1].values))
