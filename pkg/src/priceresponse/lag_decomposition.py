"""Immediate/late split of the physical-scale response and a shuffled-sign baseline.

For a pivot lag ``tau_prime`` and ``tau > tau_prime`` the log-return splits
exactly as

    ln m(a+tau)/m(a) = ln m(a+tau_prime)/m(a) + ln m(a+tau)/m(a+tau_prime)

giving a short (immediate) response that no longer depends on ``tau`` and a
long (late) response.  Both are averaged over one common sample set, the
anchors ``a`` with ``m(a + tau_max)`` inside the day, so that the split is
exact lag by lag and the short part is constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import ResponseCurve, accumulate_day, merge_partials
from .midpoint import LOGARITHMIC
from .response import EstimatorConfig, map_days, pair_days, physical_samples, response_physical
from .signs import SignSeries


@dataclass
class Decomposition:
    tau_prime: int
    original: ResponseCurve
    short: ResponseCurve
    long: ResponseCurve

    @property
    def total(self) -> ResponseCurve:
        """Pointwise short + long past the pivot; the original response up to it.

        At ``tau <= tau_prime`` there is no split and both parts are copies of
        the original, so their sum would double count.
        """
        after = self.original.lags > self.tau_prime
        values = np.where(after, self.short.values + self.long.values, self.original.values)
        return ResponseCurve("sum", self.original.lags.copy(), values, self.original.counts.copy(),
                             np.zeros(len(self.original)), meta=dict(self.original.meta))

    @property
    def residual(self) -> np.ndarray:
        """total - original: zero up to the pivot, zero up to rounding after it for log returns."""
        return self.total.values - self.original.values


def decompose_response(returns_i, signs_j, tau_prime: int = 40, config: EstimatorConfig | None = None) -> Decomposition:
    """Split the physical-scale response at ``tau_prime``.

    ``config.return_kind`` defaults to logarithmic here; with relative returns
    the split is a linearisation and :attr:`Decomposition.residual` is
    nonzero.
    """
    config = config or EstimatorConfig(return_kind=LOGARITHMIC)
    tau_prime = int(tau_prime)
    if not 1 <= tau_prime <= config.tau_max:
        raise ValueError(f"tau_prime must lie in 1..tau_max={config.tau_max}")
    pairs = pair_days(returns_i, signs_j)
    lags = config.lag_grid()
    late = lags[lags > tau_prime]
    reach = int(config.tau_max)

    def day(pair):
        m, s = pair
        k, x, x2, w = physical_samples(s, "physical", config.exclude_zero_sign)
        anchor = k - 1
        full = accumulate_day(m.m, anchor, x, x2, w, lags, reach=reach, kind=config.return_kind)
        pivot = accumulate_day(m.m, anchor, x, x2, w, [tau_prime], reach=reach, kind=config.return_kind)
        tail = accumulate_day(m.m, anchor, x, x2, w, late, start_off=tau_prime, reach=reach,
                              kind=config.return_kind)
        return full, pivot, tail

    parts = map_days(day, pairs, config.workers)
    meta = {"scale": "physical", "tau_prime": tau_prime, "days": [str(p[0].day) for p in pairs],
            "return_kind": config.return_kind, "common_sample_reach": reach}
    original = merge_partials("original", lags, [p[0] for p in parts], meta)
    pivot = merge_partials("short", np.array([tau_prime]), [p[1] for p in parts], meta)
    tail = merge_partials("long", late, [p[2] for p in parts], meta)

    after = lags > tau_prime
    short_vals = original.values.copy()
    short_vals[after] = pivot.values[0]
    short_m2 = original.m2.copy()
    short_m2[after] = pivot.m2[0]
    long_vals = original.values.copy()
    long_vals[after] = tail.values
    long_m2 = original.m2.copy()
    long_m2[after] = tail.m2
    short = ResponseCurve("short", lags, short_vals, original.counts.copy(), short_m2, meta=dict(meta))
    long_ = ResponseCurve("long", lags, long_vals, original.counts.copy(), long_m2, meta=dict(meta))
    return Decomposition(tau_prime, original, short, long_)


def shuffle_signs(signs: SignSeries, rng: np.random.Generator | None = None, permutation=None) -> SignSeries:
    """Permute the per-second signs among the seconds whose sign is nonzero.

    The set of signed seconds and the multiset of their ``(N, E, eps)`` values
    are preserved; only their order changes.  The result carries aggregates
    only (its per-trade lists are empty).
    """
    idx = np.flatnonzero(signs.eps_p)
    if permutation is None:
        permutation = rng.permutation(len(idx))
    permutation = np.asarray(permutation)
    if sorted(permutation.tolist()) != list(range(len(idx))):
        raise ValueError("not a permutation of the signed seconds")
    N, E, eps = signs.N.copy(), signs.E.copy(), signs.eps_p.copy()
    N[idx], E[idx], eps[idx] = signs.N[idx[permutation]], signs.E[idx[permutation]], signs.eps_p[idx[permutation]]
    empty = np.zeros(0, dtype=np.int64)
    return SignSeries(signs.day, empty, empty.astype(np.int8), N, E, eps, signs.unresolved)


def shuffled_sign_baseline(returns_i, signs_j, config: EstimatorConfig | None = None, seed: int = 0,
                           permutations=None) -> ResponseCurve:
    """Physical-scale response with each day's signs shuffled within the day.

    Day ``d`` is shuffled with the ``d``-th seed spawned from ``seed``.
    ``permutations`` (one per sign series) overrides the random draw.
    """
    config = config or EstimatorConfig()
    signs_j = list(signs_j)
    if permutations is None:
        rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(len(signs_j))]
        shuffled = [shuffle_signs(s, rng) for s, rng in zip(signs_j, rngs)]
    else:
        shuffled = [shuffle_signs(s, permutation=p) for s, p in zip(signs_j, permutations)]
    curve = response_physical(returns_i, shuffled, config)
    curve.kind = "baseline"
    curve.meta["seed"] = seed
    return curve
