"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the status lines are
written straight to the terminal.
"""

import time

import numpy as np
import pytest

from conftest import hand_series, market_series
from priceresponse import (EstimatorConfig, SynthParams, assign_groups, brute_force_response, decompose_response,
                           monte_carlo_response, response_activity, response_physical, response_trade_scale,
                           response_with_shift, run_shift_scan, shuffled_sign_baseline, theoretical_response,
                           weights)
from priceresponse.cli import run

ESTIMATORS = {"trade": response_trade_scale, "physical": response_physical, "activity": response_activity}


@pytest.fixture
def report(capsys):
    def emit(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
        assert ok, detail
    return emit


def rel_gap(a, b):
    a, b = np.asarray(a), np.asarray(b)
    both_nan = np.isnan(a) & np.isnan(b)
    scale = np.maximum(np.abs(a), np.abs(b))
    with np.errstate(invalid="ignore", divide="ignore"):
        gap = np.where(both_nan, 0.0, np.where(scale > 0, np.abs(a - b) / scale, 0.0))
    return np.nan_to_num(gap, nan=np.inf)


def test_oracle_equivalence(report):
    start = time.perf_counter()
    p = SynthParams(days=20, seconds_per_day=10_000, p_persist=0.7, noise=1e-4,
                    trades_per_second=("geometric", 3.0), seed=101)
    _, mids, signs = market_series(p)
    cfg = EstimatorConfig(tau_max=1000)
    worst = 0.0
    counts_ok = True
    for scale, fn in ESTIMATORS.items():
        fast = fn(mids, signs, cfg)
        slow = brute_force_response(mids, signs, scale, cfg)
        counts_ok &= bool(np.array_equal(fast.counts, slow.counts))
        worst = max(worst, float(rel_gap(fast.values, slow.values).max()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and counts_ok and elapsed < 60
    report(1, ok, f"max relative gap {worst:.2e} over 3 scales x 1000 lags, counts equal={counts_ok}, "
                  f"{elapsed:.1f}s")


def test_weight_normalization(report):
    _, _, signs = market_series(SynthParams(days=3, seconds_per_day=5000, trades_per_second=("geometric", 3.0),
                                            seed=102))
    sp = float(sum(w.sum() for w in weights(signs, "physical")))
    sa = float(sum(w.sum() for w in weights(signs, "activity")))
    st = sum(w.sum() for w in weights(signs, "trade"))
    # all-buys fixture: every second's trades share one sign
    _, buys = hand_series([100.0] * 6, {0: [1, 1, 1], 2: [1], 5: [1, 1]})
    sb = float(sum(w.sum() for w in weights([buys], "trade")))
    ok = abs(sp - 1) <= 1e-12 and abs(sa - 1) <= 1e-12 and st <= 1 + 1e-12 and abs(sb - 1) <= 1e-12
    report(2, ok, f"sum w_p={sp!r}, sum w_a={sa!r}, sum w_t={st:.6f} <= 1, all-buys sum w_t={sb!r}")


def test_synthetic_recovery(report):
    taus = np.array([1, 10, 100])
    # expectation oracle first: Monte-Carlo over the sign chain must reproduce the closed form
    p = SynthParams(days=46, seconds_per_day=22200, p_persist=0.7, impact=1e-4, noise=1e-4, seed=103)
    closed = theoretical_response(p, taus)
    mc, mc_se = monte_carlo_response(0.7, 1e-4, taus, 100_000, seed=7)
    # at tau=1 every path gives exactly lambda, so the Monte-Carlo spread is zero there
    mc_ok = bool(np.all(np.abs(mc - closed) <= 4 * mc_se + 1e-18))

    start = time.perf_counter()
    _, mids, signs = market_series(p)
    curve = response_physical(mids, signs, EstimatorConfig(tau_max=100, lags=tuple(taus)))
    elapsed = time.perf_counter() - start
    seconds = sum(len(m) for m in mids)
    z = (curve.values - closed) / curve.stderr_day
    ok = mc_ok and seconds >= 1_000_000 and bool(np.all(np.abs(z) < 3)) and elapsed < 120
    report(3, ok, f"T={seconds} s, measured {[f'{v:.5e}' for v in curve.values]} vs "
                  f"{[f'{v:.5e}' for v in closed]}, z={np.round(z, 2).tolist()} (day-clustered SE), "
                  f"Monte-Carlo agrees={mc_ok}, {elapsed:.1f}s")


def test_decomposition_identity(report):
    _, mids, signs = market_series(SynthParams(days=6, seconds_per_day=10_000, p_persist=0.7, noise=1e-4,
                                               seed=104))
    d = decompose_response(mids, signs, 40, EstimatorConfig(tau_max=1000, return_kind="logarithmic"))
    after = d.original.lags > 40
    gap = float(np.max(np.abs(d.residual[after])))
    constant = bool(np.all(d.short.values[after] == d.short.values[after][0]))
    ok = gap <= 1e-12 and constant
    report(4, ok, f"max |short+long-original| for tau>40 = {gap:.2e}, short constant={constant}")


def test_shift_consistency_and_nulls(report):
    _, mids, signs = market_series(SynthParams(days=10, seconds_per_day=10_000, p_persist=0.7,
                                               trades_per_second=("geometric", 2.0), noise=1e-4, seed=105))
    cfg = EstimatorConfig(tau_max=1000)
    base = response_physical(mids, signs, cfg)
    shifted = response_with_shift(mids, signs, 1, "physical", cfg)
    consistency = float(rel_gap(shifted.values, base.values).max())

    # independent signs, so that all of a sign's impact sits in its own second
    _, mids0, signs0 = market_series(SynthParams(days=20, p_persist=0.5, noise=1e-4, seed=106))
    tau = 10
    grid = np.r_[np.arange(-20, 0), np.arange(tau + 1, 31)]
    scan = run_shift_scan(mids0, signs0, "fixed_tau_vary_shift", tau, grid, "physical",
                          EstimatorConfig(tau_max=tau))
    z_scan = np.abs(scan.values() / scan.stderrs())

    _, mids1, signs1 = market_series(SynthParams(days=20, p_persist=0.7, impact=1e-4, noise=1e-4, seed=3))
    z_base = []
    for seed in range(10):
        b = shuffled_sign_baseline(mids1, signs1, cfg, seed=seed)
        z_base.append(float(np.max(np.abs(b.values) / b.stderr)))
    ok = consistency <= 1e-12 and z_scan.max() < 3 and max(z_base) < 3
    report(5, ok, f"t_s=1 gap {consistency:.1e}; shift nulls max |R|/SE={z_scan.max():.2f} over "
                  f"{len(grid)} shifts; baseline max |R|/SE per seed={np.round(z_base, 2).tolist()}")


def test_shape_claim(report):
    p = SynthParams(days=20, p_persist=0.9, impact=1e-4, noise=1e-4, kernel=("transient", 50.0), seed=5)
    _, mids, signs = market_series(p)
    curve = response_physical(mids, signs, EstimatorConfig(tau_max=1000))
    peak = int(np.nanargmax(curve.values))
    v = curve.values
    interior = 0 < peak < len(v) - 1
    # the peak must stand clear of both ends by more than the sampling noise
    se = curve.stderr_day[peak]
    ok = interior and v[peak] - v[0] > 3 * se and v[peak] - v[-1] > 3 * se
    theory_peak = int(curve.lags[np.argmax(theoretical_response(p, curve.lags))])
    report(6, ok, f"peak at tau={curve.lags[peak]} (expected {theory_peak}), R(1)={v[0]:.3e}, "
                  f"R(peak)={v[peak]:.3e}, R(1000)={v[-1]:.3e}")


def test_estimator_ordering(report):
    p = SynthParams(days=10, p_persist=0.7, impact=1e-4, noise=1e-4, trades_per_second=("geometric", 5.0), seed=6)
    _, mids, signs = market_series(p)
    cfg = EstimatorConfig(tau_max=1000)
    peaks = {s: float(np.nanmax(np.abs(fn(mids, signs, cfg).values))) for s, fn in ESTIMATORS.items()}
    ordered = peaks["activity"] >= peaks["physical"] >= peaks["trade"]

    _, m1, s1 = market_series(SynthParams(days=3, seconds_per_day=5000, noise=1e-4, seed=107))
    curves = [fn(m1, s1, cfg).values for fn in ESTIMATORS.values()]
    coincide = max(float(rel_gap(curves[0], curves[1]).max()), float(rel_gap(curves[2], curves[1]).max()))
    ok = ordered and coincide <= 1e-12
    report(7, ok, f"peaks activity={peaks['activity']:.3e} >= physical={peaks['physical']:.3e} >= "
                  f"trade={peaks['trade']:.3e}; one trade per second gap {coincide:.1e}")


def test_spread_grouping(report):
    fixtures = {"GOOG": (0.40, 3), "MA": (0.38, 3), "CME": (1.08, None), "GS": (0.11, 3), "RIG": (0.12, 3),
                "APA": (0.13, 3), "CSCO": (0.01, 1), "EDGE": (0.05, 2)}
    g = assign_groups({k: v[0] for k, v in fixtures.items()})
    wrong = {k: g.assignments[k] for k, v in fixtures.items() if g.assignments[k] != v[1]}
    ok = not wrong and g.out_of_range == ["CME"]
    report(8, ok, f"{len(fixtures) - len(wrong)}/{len(fixtures)} fixtures assigned as expected"
                  + (f", mismatches {wrong}" if wrong else "") + f", out of range {g.out_of_range}")


def test_determinism(report, tmp_path):
    p = SynthParams(days=4, seconds_per_day=5000, p_persist=0.7, noise=1e-4, trades_per_second=("geometric", 3.0),
                    seed=108)
    results = []
    for workers in (1, 2, 4, 1):
        _, mids, signs = market_series(p)
        cfg = EstimatorConfig(tau_max=500, workers=workers)
        d = decompose_response(mids, signs, 40, cfg.with_(return_kind="logarithmic"))
        curves = [fn(mids, signs, cfg).values for fn in ESTIMATORS.values()]
        curves += [d.short.values, d.long.values, shuffled_sign_baseline(mids, signs, cfg, seed=3).values,
                   response_with_shift(mids, signs, 1, "trade", cfg).values]
        results.append(curves)
    lib_gap = max(float(rel_gap(a, b).max()) for other in results[1:] for a, b in zip(results[0], other))

    texts = []
    for k, workers in enumerate(("1", "3", "1")):
        out = tmp_path / f"run{k}"
        assert run(["synth", "--out", str(out), "--days", "3", "--seconds", "4000", "--trades", "geometric:2",
                    "--seed", "9", "--workers", workers]) == 0
        assert run(["response", "--out", str(out), "--i", "SYN", "--scale", "activity", "--tau-max", "300",
                    "--workers", workers]) == 0
        assert run(["decompose", "--out", str(out), "--i", "SYN", "--tau-max", "300", "--workers", workers]) == 0
        texts.append(tuple((out / name).read_text() for name in
                           ("raw/SYN_quotes.csv", "raw/SYN_trades.csv", "response_activity_SYN_SYN.csv",
                            "decompose_SYN_SYN.csv")))
    cli_same = texts[0] == texts[1] == texts[2]
    ok = lib_gap <= 1e-12 and cli_same
    report(9, ok, f"library curves max gap across workers 1/2/4 and repeat = {lib_gap:.1e}; "
                  f"CLI outputs byte-identical across workers 1/3 and repeat = {cli_same}")
