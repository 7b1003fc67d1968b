import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from priceresponse import (MarketWindow, SynthParams, build_midpoint_series, compute_return, generate,
                           midpoint_sampling_diagnostic, parse_quotes, returns)
from priceresponse.midpoint import (LOGARITHMIC, RELATIVE, EmptyDayError, forward_fill, read_midpoint_series,
                                    write_midpoint_series)

QH = "day,time,bid,ask,bid_vol,ask_vol\n"
W = MarketWindow(34800, 34810)


def quotes(rows):
    return parse_quotes(io.StringIO(QH + "".join(f"2008-01-02,{t},{b},{a},1,1\n" for t, b, a in rows)))


def test_last_quote_of_second_sets_midpoint_and_spread():
    s = build_midpoint_series(quotes([(34802, 100.00, 100.02)]), W)
    assert s.m[2] == pytest.approx(100.01, abs=1e-12)
    assert s.s[2] == pytest.approx(0.02, abs=1e-12)
    assert np.isnan(s.m[:2]).all() and s.defined_from == 2


def test_quiet_second_repeats_previous_midpoint():
    s = build_midpoint_series(quotes([(34802, 100.00, 100.02)]), W)
    assert np.all(s.m[3:] == s.m[2])


def test_last_of_two_quotes_wins():
    s = build_midpoint_series(quotes([(34800, 100.00, 100.02), (34800, 100.02, 100.04)]), W)
    assert s.m[0] == pytest.approx(100.03, abs=1e-12)


def test_empty_day_raises():
    with pytest.raises(EmptyDayError):
        build_midpoint_series(quotes([]), W)


def test_relative_return_example():
    m = [100.00, 100.02]
    assert compute_return(m, 0, 1, RELATIVE) == pytest.approx(2.0e-4, rel=1e-12)
    assert compute_return([5.0, 5.0], 0, 1, RELATIVE) == 0.0
    assert compute_return([5.0, 5.0], 0, 1, LOGARITHMIC) == 0.0


def test_log_return_example_close_to_relative():
    m = [100.00, 100.02]
    lg = compute_return(m, 0, 1, LOGARITHMIC)
    assert lg == pytest.approx(math.log1p(2e-4), rel=1e-10)
    assert lg == pytest.approx(1.99980e-4, rel=1e-5)
    assert abs(lg - compute_return(m, 0, 1, RELATIVE)) < 2.1e-8


def test_undefined_endpoints_give_nan():
    m = [np.nan, 100.0, 100.0]
    assert math.isnan(compute_return(m, 0, 1))
    assert math.isnan(compute_return(m, 1, 5))
    with pytest.raises(ValueError):
        compute_return(m, 1, 0)


def test_diagnostic_examples():
    assert midpoint_sampling_diagnostic(quotes([(34800, 100, 100.02), (34801, 100.5, 100.52)])) == 0.0
    d = midpoint_sampling_diagnostic(quotes([(34800, 99.99, 100.01), (34800, 100.01, 100.03)]))
    assert d == pytest.approx(0.01 / 100.01, rel=1e-9)
    assert d == pytest.approx(9.999e-5, rel=1e-4)


def test_diagnostic_on_synthetic_day():
    p = SynthParams(seconds_per_day=5000, trades_per_second=("geometric", 3.0), noise=1e-4, seed=3)
    day = generate(p).days[0]
    assert midpoint_sampling_diagnostic(day.quotes) < 1e-3


def test_series_file_round_trip(tmp_path):
    s = build_midpoint_series(quotes([(34802, 100.00, 100.02), (34805, 100.01, 100.05)]), W)
    write_midpoint_series(s, tmp_path / "m.csv")
    back = read_midpoint_series(tmp_path / "m.csv")
    np.testing.assert_array_equal(back.m, s.m)
    np.testing.assert_array_equal(back.s, s.s)
    assert (back.day, back.base_s, back.defined_from) == (s.day, s.base_s, s.defined_from)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.one_of(st.none(), st.floats(1, 1000)), min_size=1, max_size=40))
def test_forward_fill_has_no_gaps_after_first_value(vals):
    a = np.array([np.nan if v is None else v for v in vals])
    out = forward_fill(a)
    ok = np.flatnonzero(np.isfinite(a))
    if len(ok) == 0:
        assert np.isnan(out).all()
        return
    assert np.isnan(out[:ok[0]]).all()
    assert np.isfinite(out[ok[0]:]).all()
    for k in range(ok[0], len(a)):
        assert out[k] == a[ok[ok <= k][-1]]


prices = st.lists(st.floats(1.0, 1000.0), min_size=4, max_size=30)


@settings(max_examples=100, deadline=None)
@given(prices, st.data())
def test_log_returns_compose_and_antisymmetric(m, data):
    n = len(m)
    t = data.draw(st.integers(0, n - 3))
    t1 = data.draw(st.integers(1, n - 2 - t))
    t2 = data.draw(st.integers(1, n - 1 - t - t1))
    whole = compute_return(m, t, t1 + t2, LOGARITHMIC)
    parts = compute_return(m, t, t1, LOGARITHMIC) + compute_return(m, t + t1, t2, LOGARITHMIC)
    assert whole == pytest.approx(parts, abs=1e-12)
    back = math.log(m[t] / m[t + t1])
    assert compute_return(m, t, t1, LOGARITHMIC) == pytest.approx(-back, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(1.0, 1000.0), st.floats(-0.09, 0.09))
def test_relative_and_log_agree_to_second_order(a, rel):
    b = a * (1 + rel)
    r = compute_return([a, b], 0, 1, RELATIVE)
    lg = compute_return([a, b], 0, 1, LOGARITHMIC)
    assert abs(r - lg) <= r * r + 1e-15


def test_vector_returns_match_scalar():
    m = np.array([np.nan, 100.0, 100.5, 99.0, 101.0])
    for tau in (1, 2, 4):
        v = returns(m, tau, LOGARITHMIC)
        for t in range(len(m)):
            c = compute_return(m, t, tau, LOGARITHMIC)
            assert (math.isnan(c) and math.isnan(v[t])) or v[t] == pytest.approx(c, abs=1e-15)
