"""
Tail-index estimation for heavy (Frechet-domain) tails.

The Hill estimator gives ``gamma = 1/alpha`` from the ``m`` largest
exceedances; the Huisman-style correction regresses the Hill spectrum
``gamma(m)`` on ``m`` by weighted least squares and takes the intercept as
the small-sample bias-corrected estimate. Moment-existence and
cross-series stability tests work on the ``alpha`` scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .ingest import ReturnSeries

SIDES = ("common", "lower", "upper")
MOMENT_CRITICAL = 1.64  # one-sided, 5%
STABILITY_CRITICAL = 1.96  # two-sided, 5%


class DegenerateTailError(ValueError):
    pass


@dataclass(frozen=True)
class TailSample:
    """Positive exceedances of one tail, sorted descending."""

    side: str
    exceedances: np.ndarray
    n_source: int
    zeros_excluded: int = 0

    def __post_init__(self):
        x = self.exceedances
        if x.size and (np.any(x <= 0) or np.any(np.diff(x) > 0)):
            raise ValueError("exceedances must be positive and sorted descending")

    def __len__(self) -> int:
        return self.exceedances.size

    @classmethod
    def from_values(cls, values, side: str = "upper", n_source: int | None = None) -> "TailSample":
        """Tail sample from raw positive magnitudes (any order)."""
        x = np.asarray(values, dtype=np.float64).ravel()
        if np.any(x <= 0):
            raise ValueError("tail magnitudes must be strictly positive")
        x = np.sort(x, kind="stable")[::-1].copy()
        return cls(side, x, int(n_source if n_source is not None else x.size))


def _values(r) -> np.ndarray:
    if isinstance(r, ReturnSeries):
        return np.asarray(r.values, dtype=np.float64)
    return np.asarray(r, dtype=np.float64).ravel()


def tail_sample(r, side: str) -> TailSample:
    """Build the ``upper``, ``lower`` or ``common`` tail of a return series.

    upper: positive returns; lower: magnitudes of negative returns;
    common: magnitudes of all nonzero returns. Zeros are dropped.
    """
    x = _values(r)
    zeros = int(np.sum(x == 0))
    if side == "upper":
        mags = x[x > 0]
    elif side == "lower":
        mags = -x[x < 0]
    elif side == "common":
        mags = np.abs(x[x != 0])
    else:
        raise ValueError(f"unknown tail side {side!r}")
    if mags.size == 0:
        raise ValueError(f"{side} tail is empty")
    mags = np.sort(mags, kind="stable")[::-1].copy()
    return TailSample(side, mags, int(x.size), zeros)


def split_tails(r) -> tuple[TailSample, TailSample, TailSample]:
    """Return (upper, lower, common) tail samples."""
    return tail_sample(r, "upper"), tail_sample(r, "lower"), tail_sample(r, "common")


@dataclass(frozen=True)
class TailEstimate:
    """A fitted tail.

    ``m`` may be fractional for the regression-corrected estimate (the
    interpolated threshold count); ``r_m`` is the threshold value at ``m``
    and ``scale_a = (m/n) * r_m**alpha`` the implied power-law constant.
    """

    side: str
    m: float
    gamma: float
    alpha: float
    se_gamma: float
    se_alpha: float
    r_m: float
    n: int
    scale_a: float
    method: str = "hill"


def _make_estimate(side, m, gamma, r_m, n, method) -> TailEstimate:
    alpha = 1.0 / gamma
    root = math.sqrt(m)
    return TailEstimate(
        side=side,
        m=m,
        gamma=gamma,
        alpha=alpha,
        se_gamma=gamma / root,
        se_alpha=alpha / root,
        r_m=r_m,
        n=n,
        scale_a=(m / n) * r_m**alpha,
        method=method,
    )


def hill_estimate(t: TailSample, m: int) -> TailEstimate:
    x = t.exceedances
    if int(m) != m or not 2 <= m < x.size:
        raise ValueError(f"m must be an integer with 2 <= m < {x.size}, got {m}")
    m = int(m)
    if x[0] == x[m]:
        raise DegenerateTailError("degenerate tail: top m+1 exceedances are identical")
    logs = np.log(x[: m + 1])
    gamma = float(np.mean(logs[:m]) - logs[m])
    return _make_estimate(t.side, m, gamma, float(x[m]), t.n_source, "hill")


@dataclass(frozen=True)
class HillSpectrum:
    m: np.ndarray
    gamma: np.ndarray
    sample: TailSample = field(repr=False)

    @property
    def pairs(self) -> list[tuple[int, float]]:
        return list(zip(self.m.tolist(), self.gamma.tolist()))

    def __len__(self) -> int:
        return self.m.size


def hill_spectrum(t: TailSample, m_min: int = 2, m_max: int | None = None) -> HillSpectrum:
    """Hill gamma(m) for every m in [m_min, m_max], by running log sums."""
    n = len(t)
    if m_max is None:
        m_max = n // 2
    if m_min < 2:
        raise ValueError("m_min must be at least 2")
    if m_max >= n:
        raise ValueError(f"m_max must be below the tail size {n}")
    if m_max < m_min:
        raise ValueError(f"empty spectrum range [{m_min}, {m_max}]")
    logs = np.log(t.exceedances[: m_max + 1])
    gam = kernels.hill_spectrum(logs, int(m_min), int(m_max))
    return HillSpectrum(np.arange(m_min, m_max + 1), np.asarray(gam), t)


def wls_line(m: np.ndarray, y: np.ndarray, w: np.ndarray) -> tuple[float, float]:
    """Intercept and slope minimising sum(w * (y - b0 - b1*m)**2)."""
    sw = w.sum()
    swm = (w * m).sum()
    swmm = (w * m * m).sum()
    swy = (w * y).sum()
    swmy = (w * m * y).sum()
    det = sw * swmm - swm * swm
    if not det > 1e-12 * sw * swmm:
        raise ValueError("singular design: thresholds do not vary")
    b1 = (sw * swmy - swm * swy) / det
    b0 = (swy - b1 * swm) / sw
    return float(b0), float(b1)


def crossing_m(m: np.ndarray, gamma: np.ndarray, level: float) -> float:
    """Median of the (linearly interpolated) m values where the spectrum meets ``level``.

    A noisy spectrum crosses its regression intercept many times; the middle
    crossing is used (upper median for an even count). Falls back to the m
    whose gamma is closest to ``level`` when the spectrum never reaches it.
    """
    d = gamma - level
    hits = np.flatnonzero(d[:-1] * d[1:] <= 0)
    if hits.size == 0:
        return float(m[int(np.argmin(np.abs(d)))])
    j = hits[hits.size // 2]
    if d[j] == 0:
        return float(m[j])
    frac = d[j] / (d[j] - d[j + 1])
    return float(m[j] + frac * (m[j + 1] - m[j]))


def threshold_at(t: TailSample, m: float) -> float:
    """Threshold value at a (possibly fractional) count m, interpolating order statistics."""
    x = t.exceedances
    lo = int(math.floor(m))
    frac = m - lo
    if frac == 0.0:
        return float(x[lo])
    return float(x[lo] + frac * (x[lo + 1] - x[lo]))


@dataclass(frozen=True)
class WLSFit:
    intercept: float
    slope: float
    m_effective: float


def huisman_fit(s: HillSpectrum, weight_exponent: float = 1.0) -> WLSFit:
    if len(s) < 3:
        raise ValueError("need at least 3 spectrum points")
    m = s.m.astype(np.float64)
    b0, b1 = wls_line(m, s.gamma, m**weight_exponent)
    return WLSFit(b0, b1, crossing_m(m, s.gamma, b0))


def huisman_wls(s: HillSpectrum, weight_exponent: float = 1.0) -> TailEstimate:
    """Bias-corrected tail estimate from a Hill spectrum.

    Fits ``gamma(m) = b0 + b1*m`` with observation weights ``m**weight_exponent``
    in the squared-residual sum (the default 1.0 is the same as scaling each
    row by sqrt(m)). The intercept ``b0`` is the corrected gamma. The
    reported ``m`` is where the raw spectrum crosses ``b0`` (see
    :func:`crossing_m`); ``r_m`` is interpolated there.
    """
    fit = huisman_fit(s, weight_exponent)
    if not fit.intercept > 0:
        raise ValueError(f"non-heavy-tailed fit: intercept {fit.intercept:.6g} <= 0")
    r_m = threshold_at(s.sample, fit.m_effective)
    return _make_estimate(s.sample.side, fit.m_effective, fit.intercept, r_m, s.sample.n_source, "huisman")


def estimate_tail(t: TailSample, method: str = "huisman", m: int | None = None) -> TailEstimate:
    if method == "huisman":
        return huisman_wls(hill_spectrum(t))
    if method == "hill":
        if m is None:
            m = max(2, int(0.1 * len(t)))
        return hill_estimate(t, m)
    raise ValueError(f"unknown method {method!r}")


def moment_test(e: TailEstimate, c: float, se: float | None = None) -> float:
    """t-statistic for H0: alpha = c (c=0 heavy tail, 2 variance, 4 fourth moment).

    Uses the asymptotic ``e.se_alpha`` unless an external ``se`` is supplied.
    """
    s = e.se_alpha if se is None else se
    if not s > 0:
        raise ValueError("standard error must be positive")
    return (e.alpha - c) / s


def stability_test(e1: TailEstimate, e2: TailEstimate, se1: float | None = None, se2: float | None = None) -> float:
    """z-statistic for equal tail indices of two independent series."""
    s1 = e1.se_alpha if se1 is None else se1
    s2 = e2.se_alpha if se2 is None else se2
    denom = math.sqrt(s1 * s1 + s2 * s2)
    if not denom > 0:
        raise ValueError("standard errors must be positive")
    return (e1.alpha - e2.alpha) / denom


@dataclass
class Table2Row:
    side: str
    label: str
    estimate: TailEstimate
    t0: float
    t2: float
    t4: float
    stability: float | None = None


@dataclass
class Table2Report:
    rows: list[Table2Row]
    labels: tuple[str, str]

    def get(self, side: str, label: str) -> Table2Row:
        for row in self.rows:
            if row.side == side and row.label == label:
                return row
        raise KeyError((side, label))

    def stability(self, side: str) -> float:
        return self.get(side, self.labels[0]).stability

    COLUMNS = ("tail", "order", "alpha", "se", "t0", "t2", "t4", "stability", "gamma", "m", "r_m", "n")

    def table(self) -> tuple[list[str], list[list]]:
        rows = []
        for r in self.rows:
            e = r.estimate
            rows.append([r.side, r.label, e.alpha, e.se_alpha, r.t0, r.t2, r.t4, r.stability,
                         e.gamma, e.m, e.r_m, e.n])
        return list(self.COLUMNS), rows


def fit_tails(
    r_limit,
    r_market,
    sides=SIDES,
    method: str = "huisman",
    m: int | None = None,
    labels: tuple[str, str] = ("limit", "market"),
) -> Table2Report:
    """Fit each tail of both series, test moments, and compare the series per tail."""
    rows = []
    for side in sides:
        pair = []
        for r, label in ((r_limit, labels[0]), (r_market, labels[1])):
            e = estimate_tail(tail_sample(r, side), method, m)
            pair.append(Table2Row(side, label, e, moment_test(e, 0), moment_test(e, 2), moment_test(e, 4)))
        pair[0].stability = stability_test(pair[0].estimate, pair[1].estimate)
        rows.extend(pair)
    return Table2Report(rows, tuple(labels))
