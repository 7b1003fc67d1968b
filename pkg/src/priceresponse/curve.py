"""Response curves and the per-lag accumulation kernel behind every estimator.

Every estimator in this package has the form

    R(tau) = sum_k r(a_k, tau) * x_k / sum_k w_k

over samples ``k`` with an anchor index ``a_k`` into a price array, a signal
``x_k`` (sum of the unit signs carried by the sample), a weight ``w_k`` (the
number of units) and ``x2_k`` (sum of squared unit signs, used for the
variance).  Per-day partial sums are computed by :func:`accumulate_day` and
merged in day order by :func:`merge_partials` with compensated summation, so
the result does not depend on how days were distributed over workers.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numba
import numpy as np

from .market_data import atomic_write_text

CURVE_KINDS = ("trade_scale", "physical", "activity", "shifted", "short", "long", "baseline",
               "original", "sum", "group")


@numba.njit(nogil=True, cache=True)
def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


@numba.njit(nogil=True, cache=True)
def _accumulate_kernel(price, anchor, x, x2, w, lags, start_off, reach, log_kind,
                       num_hi, num_lo, sq_hi, sq_lo, den):
    n = price.shape[0]
    nl = lags.shape[0]
    for i in range(anchor.shape[0]):
        a = anchor[i]
        if a < 0 or a + reach >= n:
            continue
        p0 = price[a + start_off] if a + start_off < n else np.nan
        if not (np.isfinite(price[a]) and np.isfinite(p0)):
            continue
        xi = x[i]
        x2i = x2[i]
        wi = w[i]
        if log_kind:
            l0 = math.log(p0)
        for j in range(nl):
            b = a + lags[j]
            if b >= n:
                break
            p1 = price[b]
            if not np.isfinite(p1):
                continue
            if log_kind:
                r = math.log(p1) - l0
            else:
                r = (p1 - p0) / p0
            s, e = _two_sum(num_hi[j], r * xi)
            num_hi[j] = s
            num_lo[j] += e
            s, e = _two_sum(sq_hi[j], r * r * x2i)
            sq_hi[j] = s
            sq_lo[j] += e
            den[j] += wi


@dataclass
class Partial:
    """Per-lag sums over one day: signal-weighted returns, squared terms, unit counts."""

    num: np.ndarray
    sq: np.ndarray
    den: np.ndarray


def accumulate_day(price, anchor, x, x2, w, lags, *, start_off=0, reach=0, kind="relative") -> Partial:
    """Accumulate one day's samples for every lag in ``lags`` (ascending).

    A sample is skipped at lag ``tau`` when ``price[a]``, ``price[a + start_off]``
    or ``price[a + tau]`` is undefined, or when ``a + reach`` runs past the day.
    The return at lag ``tau`` runs from ``a + start_off`` to ``a + tau``.
    """
    lags = np.ascontiguousarray(lags, dtype=np.int64)
    nl = len(lags)
    num_hi, num_lo = np.zeros(nl), np.zeros(nl)
    sq_hi, sq_lo = np.zeros(nl), np.zeros(nl)
    den = np.zeros(nl, dtype=np.int64)
    if kind not in ("relative", "logarithmic"):
        raise ValueError(f"unknown return kind {kind!r}")
    _accumulate_kernel(
        np.ascontiguousarray(price, dtype=np.float64),
        np.ascontiguousarray(anchor, dtype=np.int64),
        np.ascontiguousarray(x, dtype=np.float64),
        np.ascontiguousarray(x2, dtype=np.float64),
        np.ascontiguousarray(w, dtype=np.int64),
        lags, int(start_off), int(reach), kind == "logarithmic",
        num_hi, num_lo, sq_hi, sq_lo, den,
    )
    return Partial(num=np.stack([num_hi, num_lo]), sq=np.stack([sq_hi, sq_lo]), den=den)


def _neumaier(parts) -> np.ndarray:
    # columnwise compensated sum of (hi, lo) pairs, in the given order
    total = None
    comp = None
    for p in parts:
        for row in p:
            if total is None:
                total = row.astype(np.float64).copy()
                comp = np.zeros_like(total)
                continue
            t = total + row
            big = np.abs(total) >= np.abs(row)
            comp += np.where(big, (total - t) + row, (row - t) + total)
            total = t
    return total + comp


@dataclass
class ResponseCurve:
    """Estimator values on a lag grid.

    ``values`` is NaN where a lag received no samples.  ``counts`` is the number
    of sign units (trades or seconds) averaged at each lag, ``m2`` the sum of
    squared deviations of the per-unit products from the mean, and ``m2_day``
    the sum over days of squared day-level residuals (used by
    :attr:`stderr_day`).
    """

    kind: str
    lags: np.ndarray
    values: np.ndarray
    counts: np.ndarray
    m2: np.ndarray
    m2_day: np.ndarray | None = None
    n_days: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lags = np.asarray(self.lags, dtype=np.int64)
        self.values = np.asarray(self.values, dtype=np.float64)
        self.counts = np.asarray(self.counts, dtype=np.int64)
        self.m2 = np.asarray(self.m2, dtype=np.float64)

    def __len__(self):
        return len(self.lags)

    @property
    def stderr(self) -> np.ndarray:
        """Standard error treating the averaged units as independent draws."""
        n = self.counts.astype(np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            se = np.sqrt(np.maximum(self.m2, 0.0) / (n * (n - 1)))
        return np.where(n > 1, se, np.nan)

    @property
    def stderr_day(self) -> np.ndarray:
        """Standard error clustered by day (valid when samples correlate within a day).

        Days must be independent and there must be at least two of them.
        """
        if self.m2_day is None or self.n_days < 2:
            return np.full(len(self), np.nan)
        g = self.n_days
        n = self.counts.astype(np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.sqrt(g / (g - 1) * np.maximum(self.m2_day, 0.0)) / n

    def at(self, tau: int) -> float:
        idx = np.searchsorted(self.lags, tau)
        if idx >= len(self.lags) or self.lags[idx] != tau:
            raise KeyError(tau)
        return float(self.values[idx])

    def index(self, tau: int) -> int:
        idx = int(np.searchsorted(self.lags, tau))
        if idx >= len(self.lags) or self.lags[idx] != tau:
            raise KeyError(tau)
        return idx

    def scaled(self, c: float) -> ResponseCurve:
        return ResponseCurve(self.kind, self.lags.copy(), self.values * c, self.counts.copy(),
                             self.m2 * c * c, None if self.m2_day is None else self.m2_day * c * c,
                             self.n_days, dict(self.meta))

    def to_rows(self) -> list[dict]:
        se = self.stderr
        return [
            {"tau": int(t), "value": _num(v), "count": int(c), "stderr": _num(s)}
            for t, v, c, s in zip(self.lags, self.values, self.counts, se)
        ]

    def to_csv(self, path: str | os.PathLike | None = None, delimiter: str = ",") -> str:
        lines = [delimiter.join(("tau", "value", "count", "stderr"))]
        for row in self.to_rows():
            lines.append(delimiter.join(_cell(row[k]) for k in ("tau", "value", "count", "stderr")))
        text = "\n".join(lines) + "\n"
        if path is not None:
            atomic_write_text(path, text)
        return text

    def to_json(self, path: str | os.PathLike | None = None) -> str:
        payload = {"kind": self.kind, "meta": _jsonable(self.meta), "rows": self.to_rows()}
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
        if path is not None:
            atomic_write_text(path, text)
        return text

    @classmethod
    def from_csv(cls, path: str | os.PathLike, kind: str = "physical") -> ResponseCurve:
        """Load a curve written by :meth:`to_csv` (``m2`` is rebuilt from the standard error)."""
        data = np.genfromtxt(path, delimiter=",", names=True, ndmin=1)
        n = data["count"].astype(float)
        m2 = data["stderr"] ** 2 * n * (n - 1)
        return cls(kind, data["tau"], data["value"], data["count"], np.nan_to_num(m2))


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else None


def _cell(v):
    if v is None:
        return ""
    return repr(v) if isinstance(v, float) else str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "isoformat"):
        return obj.isoformat()
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return str(obj)


def merge_partials(kind: str, lags, partials: list[Partial], meta: dict | None = None) -> ResponseCurve:
    """Combine day partials (already in canonical day order) into a curve."""
    lags = np.asarray(lags, dtype=np.int64)
    if not partials:
        nl = len(lags)
        return ResponseCurve(kind, lags, np.full(nl, np.nan), np.zeros(nl, dtype=np.int64),
                             np.zeros(nl), np.zeros(nl), 0, dict(meta or {}))
    num = _neumaier(p.num for p in partials)
    sq = _neumaier(p.sq for p in partials)
    den = np.sum([p.den for p in partials], axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.where(den > 0, num / den, np.nan)
    m2 = np.where(den > 0, sq - den * np.nan_to_num(value) ** 2, 0.0)
    mu = np.nan_to_num(value)
    resid = np.zeros(len(lags))
    for p in partials:
        d = (p.num[0] + p.num[1]) - mu * p.den
        resid += d * d
    return ResponseCurve(kind, lags, value, den, m2, resid, len(partials), dict(meta or {}))
