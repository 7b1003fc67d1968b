"""Self- and cross-response functions on the trade and physical time scales.

All estimators pair the sign observed in second ``t`` of stock ``j`` with the
midpoint return of stock ``i`` anchored at second ``t - 1``:

    trade scale   R_t(tau) = sum r(t-1, tau) E(t)          / sum N(t)
    physical      R_p(tau) = sum r(t-1, tau) eps(t)        / #{t : eps(t) != 0}
    activity      R_a(tau) = sum r(t-1, tau) eps(t) N(t)   / sum N(t)

Samples whose return is undefined (before the first quote, or past the end of
the day) are dropped together with their weight.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numba
import numpy as np

from .curve import ResponseCurve, accumulate_day, merge_partials
from .midpoint import LOGARITHMIC, RELATIVE, RETURN_KINDS, MidpointSeries
from .signs import SignSeries

SCALES = ("trade", "physical", "activity")
KIND_OF_SCALE = {"trade": "trade_scale", "physical": "physical", "activity": "activity"}


class NoOverlapError(ValueError):
    """The return and sign inputs share no day."""


@dataclass(frozen=True)
class EstimatorConfig:
    tau_max: int = 1000
    exclude_zero_sign: bool = True
    return_kind: str = RELATIVE
    # evaluate only these lags (sorted, within 1..tau_max); None means every lag
    lags: tuple | None = None
    workers: int = 1

    def __post_init__(self):
        if self.tau_max < 1:
            raise ValueError("tau_max must be >= 1")
        if self.return_kind not in RETURN_KINDS:
            raise ValueError(f"unknown return kind {self.return_kind!r}")
        if self.lags is not None:
            lags = tuple(int(t) for t in self.lags)
            if not lags or any(b <= a for a, b in zip(lags, lags[1:])) or lags[0] < 1 or lags[-1] > self.tau_max:
                raise ValueError("lags must be strictly increasing within 1..tau_max")
            object.__setattr__(self, "lags", lags)

    def lag_grid(self) -> np.ndarray:
        if self.lags is not None:
            return np.array(self.lags, dtype=np.int64)
        return np.arange(1, self.tau_max + 1, dtype=np.int64)

    def with_(self, **changes) -> EstimatorConfig:
        return replace(self, **changes)


def pair_days(midpoints: Sequence[MidpointSeries], signs: Sequence[SignSeries]):
    """Match return and sign series by day, in ascending day order.

    Days present in only one input are skipped.  Series without a day label
    are paired by position.
    """
    midpoints, signs = list(midpoints), list(signs)
    if all(m.day is None for m in midpoints) or all(s.day is None for s in signs):
        if len(midpoints) != len(signs):
            raise ValueError("unlabelled inputs must have equal length")
        pairs = list(zip(midpoints, signs))
    else:
        by_day = {s.day: s for s in signs}
        pairs = sorted(((m, by_day[m.day]) for m in midpoints if m.day in by_day), key=lambda p: p[0].day)
    if not pairs:
        raise NoOverlapError("returns and signs share no day")
    for m, s in pairs:
        if len(m) != len(s):
            raise ValueError(f"series length mismatch on {m.day}: {len(m)} vs {len(s)}")
    return pairs


def physical_samples(signs: SignSeries, scale: str, exclude_zero: bool = True):
    """Sample seconds with their signal, squared signal and weight for one scale."""
    N, E, eps = signs.N, signs.E, signs.eps_p.astype(np.int64)
    if scale == "trade":
        k = np.flatnonzero(N)
        return k, E[k], N[k], N[k]
    if scale == "physical":
        k = np.flatnonzero(eps) if exclude_zero else np.arange(len(eps))
        return k, eps[k], eps[k] * eps[k], np.ones(len(k), dtype=np.int64)
    if scale == "activity":
        k = np.flatnonzero(N)
        return k, eps[k] * N[k], eps[k] * eps[k] * N[k], N[k]
    raise ValueError(f"unknown scale {scale!r}")


def _day_partial(m: MidpointSeries, s: SignSeries, scale: str, lags, config: EstimatorConfig,
                 shift: int) -> Partial:
    k, x, x2, w = physical_samples(s, scale, config.exclude_zero_sign)
    return accumulate_day(m.m, k - shift, x, x2, w, lags, kind=config.return_kind)


def map_days(fn, items, workers: int = 1) -> list:
    """Apply ``fn`` to each item; results come back in input order for any worker count."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def estimate(midpoints, signs, scale: str, config: EstimatorConfig | None = None, shift: int = 1,
             kind: str | None = None) -> ResponseCurve:
    """Physical-clock estimator with the return anchored ``shift`` seconds before the sign."""
    config = config or EstimatorConfig()
    if scale not in SCALES:
        raise ValueError(f"unknown scale {scale!r}")
    pairs = pair_days(midpoints, signs)
    lags = config.lag_grid()
    partials = map_days(lambda p: _day_partial(p[0], p[1], scale, lags, config, shift), pairs, config.workers)
    meta = {
        "scale": scale,
        "shift": shift,
        "days": [str(p[0].day) for p in pairs],
        "exclude_zero_sign": config.exclude_zero_sign,
        "return_kind": config.return_kind,
    }
    return merge_partials(kind or KIND_OF_SCALE[scale], lags, partials, meta)


def response_trade_scale(returns_i, signs_j, config: EstimatorConfig | None = None) -> ResponseCurve:
    """Every trade sign of second ``t`` paired with ``r_i(t-1, tau)``, averaged over trades."""
    return estimate(returns_i, signs_j, "trade", config)


def response_physical(returns_i, signs_j, config: EstimatorConfig | None = None) -> ResponseCurve:
    """Per-second sign paired with ``r_i(t-1, tau)``, averaged over seconds with a nonzero sign.

    With ``exclude_zero_sign=False`` every second enters the denominator.
    """
    return estimate(returns_i, signs_j, "physical", config)


def response_activity(returns_i, signs_j, config: EstimatorConfig | None = None) -> ResponseCurve:
    """Physical-scale response with each second weighted by its trade count."""
    return estimate(returns_i, signs_j, "activity", config)


def weights(signs: Sequence[SignSeries], scale: str, exclude_zero: bool = True) -> list[np.ndarray]:
    """Per-second weight functions ``w(t)`` of each day, normalised over all days.

    The trade-scale weight is ``|E(t)| / sum N``; the physical weight is
    ``eta(eps(t)) / sum eta``; the activity weight is ``N(t) / sum N``.
    """
    if scale == "trade":
        raw = [np.abs(s.E).astype(np.float64) for s in signs]
        total = math.fsum(float(s.N.sum()) for s in signs)
    elif scale == "physical":
        if exclude_zero:
            raw = [(s.eps_p != 0).astype(np.float64) for s in signs]
        else:
            raw = [np.ones(len(s), dtype=np.float64) for s in signs]
        total = math.fsum(float(r.sum()) for r in raw)
    elif scale == "activity":
        raw = [s.N.astype(np.float64) for s in signs]
        total = math.fsum(float(r.sum()) for r in raw)
    else:
        raise ValueError(f"unknown scale {scale!r}")
    if total == 0:
        return [np.zeros_like(r) for r in raw]
    return [r / total for r in raw]


# -- oracle ------------------------------------------------------------------


@numba.njit(cache=True)
def _brute_force_kernel(ms, Ns, Es, offsets, lags, scale_code, exclude_zero, log_kind):
    nl = lags.shape[0]
    values = np.full(nl, np.nan)
    counts = np.zeros(nl, dtype=np.int64)
    n_days = offsets.shape[0] - 1
    for j in range(nl):
        tau = lags[j]
        # Neumaier compensated sums for this lag only
        num = 0.0
        num_c = 0.0
        den = 0
        for d in range(n_days):
            lo = offsets[d]
            length = offsets[d + 1] - lo
            for t in range(length):
                N = Ns[lo + t]
                E = Es[lo + t]
                eps = 0
                if E > 0:
                    eps = 1
                elif E < 0:
                    eps = -1
                if scale_code == 0:
                    if N == 0:
                        continue
                    sig = E
                    wt = N
                elif scale_code == 1:
                    if exclude_zero and eps == 0:
                        continue
                    sig = eps
                    wt = 1
                else:
                    if N == 0:
                        continue
                    sig = eps * N
                    wt = N
                if t - 1 < 0 or t - 1 + tau >= length:
                    continue
                m0 = ms[lo + t - 1]
                m1 = ms[lo + t - 1 + tau]
                if not (np.isfinite(m0) and np.isfinite(m1)):
                    continue
                if log_kind:
                    r = math.log(m1) - math.log(m0)
                else:
                    r = (m1 - m0) / m0
                term = r * sig
                tot = num + term
                if abs(num) >= abs(term):
                    num_c += (num - tot) + term
                else:
                    num_c += (term - tot) + num
                num = tot
                den += wt
        counts[j] = den
        if den > 0:
            values[j] = (num + num_c) / den
    return values, counts


def brute_force_response(returns_i, signs_j, scale: str, config: EstimatorConfig | None = None) -> ResponseCurve:
    """Literal per-lag, per-second double loop over the estimator definitions.

    Test oracle for the accumulation kernel: it shares no code with it and
    reports values and counts only (``m2`` is zero).
    """
    config = config or EstimatorConfig()
    lags = config.lag_grid()
    pairs = pair_days(returns_i, signs_j)
    ms = np.concatenate([p[0].m for p in pairs]).astype(np.float64)
    Ns = np.concatenate([p[1].N for p in pairs]).astype(np.int64)
    Es = np.concatenate([p[1].E for p in pairs]).astype(np.int64)
    offsets = np.cumsum([0] + [len(p[0]) for p in pairs]).astype(np.int64)
    code = {"trade": 0, "physical": 1, "activity": 2}[scale]
    values, counts = _brute_force_kernel(ms, Ns, Es, offsets, lags, code, config.exclude_zero_sign,
                                         config.return_kind == LOGARITHMIC)
    return ResponseCurve(KIND_OF_SCALE[scale], lags, values, counts, np.zeros(len(lags)),
                         meta={"scale": scale, "oracle": True})
