"""
Numeric inner loops, each with a numba and a pure-numpy implementation.

The numba path is used when numba imports cleanly and the environment
variable ``FXTAIL_DISABLE_NUMBA`` is unset (or set to ``0``/``false``).
Set ``FXTAIL_DISABLE_NUMBA=1`` to force the numpy path, e.g. on platforms
without an LLVM toolchain or to cross-check results.

Both implementations of a kernel accept and return the same dtypes. The
public names at the bottom of the module dispatch to the selected backend.
"""

import math
import os

import numpy as np
from scipy.special import ndtr

_FLAG = os.environ.get("FXTAIL_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by FXTAIL_DISABLE_NUMBA")
    import numba as nb
except ImportError:
    nb = None

HAVE_NUMBA = nb is not None
BACKEND = "numba" if HAVE_NUMBA else "numpy"


def _njit(fn):
    if nb is None:
        return fn
    return nb.njit(cache=True, nogil=True)(fn)


# --------------------------------------------------------------------------
# Hill spectrum
# --------------------------------------------------------------------------

def _np_hill_spectrum(log_desc, m_min, m_max):
    # gamma(m) = mean(log x_(1..m)) - log x_(m+1), descending order
    csum = np.cumsum(log_desc[:m_max])
    m = np.arange(m_min, m_max + 1)
    return csum[m - 1] / m - log_desc[m]


@_njit
def _nb_hill_spectrum(log_desc, m_min, m_max):
    out = np.empty(m_max - m_min + 1, dtype=np.float64)
    s = 0.0
    for i in range(m_max):
        s += log_desc[i]
        m = i + 1
        if m >= m_min:
            out[m - m_min] = s / m - log_desc[m]
    return out


# --------------------------------------------------------------------------
# Sample autocorrelation
# --------------------------------------------------------------------------

def _np_acf(x, max_lag):
    d = x - x.mean()
    denom = np.dot(d, d)
    n = d.size
    out = np.empty(max_lag, dtype=np.float64)
    for k in range(1, max_lag + 1):
        out[k - 1] = np.dot(d[: n - k], d[k:]) / denom
    return out


@_njit
def _nb_acf(x, max_lag):
    n = x.size
    mu = 0.0
    for i in range(n):
        mu += x[i]
    mu /= n
    denom = 0.0
    for i in range(n):
        denom += (x[i] - mu) * (x[i] - mu)
    out = np.empty(max_lag, dtype=np.float64)
    for k in range(1, max_lag + 1):
        s = 0.0
        for i in range(n - k):
            s += (x[i] - mu) * (x[i + k] - mu)
        out[k - 1] = s / denom
    return out


# --------------------------------------------------------------------------
# Kolmogorov-Smirnov distance to a normal
# --------------------------------------------------------------------------

def _np_ks_normal(x_sorted, mu, sd):
    n = x_sorted.size
    cdf = ndtr((x_sorted - mu) / sd)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - cdf)
    d_minus = np.max(cdf - (i - 1) / n)
    return float(max(d_plus, d_minus))


@_njit
def _nb_ks_normal(x_sorted, mu, sd):
    n = x_sorted.size
    d = 0.0
    for i in range(n):
        z = (x_sorted[i] - mu) / sd
        cdf = 0.5 * math.erfc(-z / math.sqrt(2.0))
        hi = (i + 1) / n - cdf
        lo = cdf - i / n
        if hi > d:
            d = hi
        if lo > d:
            d = lo
    return d


# --------------------------------------------------------------------------
# Last-value sampling of a two-sided quote stream on a time grid
# --------------------------------------------------------------------------

def _np_sample_quotes(ts, is_bid, price, endpoints):
    """Return (bid, ask, n_bid_updates, n_ask_updates) at each endpoint.

    Missing sides before the first quote are NaN. Update counts are per
    interval (previous endpoint, endpoint].
    """
    bid_idx = np.flatnonzero(is_bid)
    ask_idx = np.flatnonzero(~is_bid)
    bid_ts, ask_ts = ts[bid_idx], ts[ask_idx]
    kb = np.searchsorted(bid_ts, endpoints, side="right")
    ka = np.searchsorted(ask_ts, endpoints, side="right")
    bid = np.full(endpoints.size, np.nan)
    ask = np.full(endpoints.size, np.nan)
    ok_b, ok_a = kb > 0, ka > 0
    bid[ok_b] = price[bid_idx[kb[ok_b] - 1]]
    ask[ok_a] = price[ask_idx[ka[ok_a] - 1]]
    nb_up = np.diff(np.concatenate(([0], kb)))
    na_up = np.diff(np.concatenate(([0], ka)))
    return bid, ask, nb_up.astype(np.int64), na_up.astype(np.int64)


@_njit
def _nb_sample_quotes(ts, is_bid, price, endpoints):
    ne = endpoints.size
    bid = np.full(ne, np.nan)
    ask = np.full(ne, np.nan)
    nb_up = np.zeros(ne, dtype=np.int64)
    na_up = np.zeros(ne, dtype=np.int64)
    cur_b = np.nan
    cur_a = np.nan
    j = 0
    n = ts.size
    for e in range(ne):
        t_end = endpoints[e]
        while j < n and ts[j] <= t_end:
            if is_bid[j]:
                cur_b = price[j]
                nb_up[e] += 1
            else:
                cur_a = price[j]
                na_up[e] += 1
            j += 1
        bid[e] = cur_b
        ask[e] = cur_a
    return bid, ask, nb_up, na_up


if HAVE_NUMBA:
    hill_spectrum = _nb_hill_spectrum
    acf = _nb_acf
    ks_normal = _nb_ks_normal
    sample_quotes = _nb_sample_quotes
else:
    hill_spectrum = _np_hill_spectrum
    acf = _np_acf
    ks_normal = _np_ks_normal
    sample_quotes = _np_sample_quotes

IMPLEMENTATIONS = {
    "hill_spectrum": (_np_hill_spectrum, _nb_hill_spectrum),
    "acf": (_np_acf, _nb_acf),
    "ks_normal": (_np_ks_normal, _nb_ks_normal),
    "sample_quotes": (_np_sample_quotes, _nb_sample_quotes),
}
