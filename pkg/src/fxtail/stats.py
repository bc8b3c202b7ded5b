"""Summary statistics for return and absolute-return series."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .ingest import ReturnSeries

ACF_Z = 1.96


@dataclass(frozen=True)
class SummaryStats:
    """Moments, dependence count and normality distance of one series.

    ``kurtosis`` is the Pearson (non-excess) coefficient, so a normal sample
    gives about 3. ``ks_statistic`` is the raw Kolmogorov-Smirnov distance to
    a normal with the sample mean and standard deviation (no p-value).
    """

    mean: float
    std_dev: float
    skewness: float
    kurtosis: float
    acf_significant_count: int
    ks_statistic: float
    n: int
    max_lag: int

    def as_dict(self) -> dict:
        return asdict(self)


def _as_array(r) -> np.ndarray:
    if isinstance(r, ReturnSeries):
        return np.asarray(r.values, dtype=np.float64)
    return np.asarray(r, dtype=np.float64).ravel()


def moments(x) -> tuple[float, float, float, float]:
    """Return (mean, sample std with n-1, moment skewness, moment kurtosis)."""
    x = _as_array(x)
    mu = x.mean()
    d = x - mu
    m2 = np.mean(d**2)
    if m2 == 0.0:
        raise ValueError("constant series: skewness and kurtosis undefined")
    m3 = np.mean(d**3)
    m4 = np.mean(d**4)
    sd = float(np.sqrt(np.sum(d**2) / (x.size - 1)))
    return float(mu), sd, float(m3 / m2**1.5), float(m4 / m2**2)


def acf(x, max_lag: int) -> np.ndarray:
    """Sample autocorrelations at lags 1..max_lag (biased, mean-centred)."""
    x = _as_array(x)
    if max_lag >= x.size:
        raise ValueError("max_lag must be smaller than the series length")
    return kernels.acf(np.ascontiguousarray(x), int(max_lag))


def ks_normal(x) -> float:
    """KS distance between the sample and N(sample mean, sample std)."""
    x = _as_array(x)
    mu, sd, _, _ = moments(x)
    return float(kernels.ks_normal(np.sort(x), float(mu), float(sd)))


def summarize(r, max_lag: int = 100) -> SummaryStats:
    x = _as_array(r)
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    if x.size < max_lag + 2:
        raise ValueError(f"need at least max_lag + 2 = {max_lag + 2} observations, got {x.size}")
    mu, sd, skew, kurt = moments(x)
    rho = acf(x, max_lag)
    bound = ACF_Z / np.sqrt(x.size)
    return SummaryStats(
        mean=mu,
        std_dev=sd,
        skewness=skew,
        kurtosis=kurt,
        acf_significant_count=int(np.sum(np.abs(rho) > bound)),
        ks_statistic=float(kernels.ks_normal(np.sort(x), mu, sd)),
        n=int(x.size),
        max_lag=int(max_lag),
    )


TABLE1_ROWS = (
    ("Mean", "mean"),
    ("Standard Deviation", "std_dev"),
    ("Skewness", "skewness"),
    ("Kurtosis", "kurtosis"),
    ("No. ACF", "acf_significant_count"),
    ("Normality", "ks_statistic"),
)
# mean and std dev are reported in percent; the rest raw
_PERCENT = {"mean", "std_dev"}


def table1(series: dict[str, ReturnSeries], max_lag: int = 100) -> tuple[list[str], list[list]]:
    """Rows = statistics; columns = returns/volatility x each named series."""
    blocks = []
    for name, r in series.items():
        blocks.append((f"returns_{name}", summarize(r, max_lag)))
    for name, r in series.items():
        blocks.append((f"volatility_{name}", summarize(np.abs(_as_array(r)), max_lag)))
    header = ["statistic"] + [label for label, _ in blocks]
    rows = []
    for label, attr in TABLE1_ROWS:
        scale = 100.0 if attr in _PERCENT else 1.0
        row = [label]
        for _, st in blocks:
            v = getattr(st, attr)
            row.append(v if isinstance(v, int) else v * scale)
        rows.append(row)
    rows.append(["n"] + [st.n for _, st in blocks])
    return header, rows
