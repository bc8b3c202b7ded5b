"""
Seeded generators with known tail indices, and brute-force oracles.

Every stream is built from uniform doubles of numpy's ``PCG64`` bit
generator (``Generator.random``), and all non-uniform variates are produced
here from those uniforms by explicit formulas:

* Pareto: inverse transform ``(1 - u) ** (-1/alpha)``.
* Student-t: Bailey's polar method. Draw ``U, V`` uniform on (-1, 1),
  keep pairs with ``0 < W = U^2 + V^2 <= 1``, return
  ``U * sqrt(df * (W**(-2/df) - 1) / W)``.
* Normal: Box-Muller cosine branch, ``sqrt(-2 ln(1-u1)) * cos(2 pi u2)``.

Monte Carlo replication ``i`` of base seed ``s`` uses
``numpy.random.SeedSequence([s, i])`` (see :func:`replication_rng`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FAMILIES = ("pareto", "student_t", "normal", "deterministic_pareto_grid")


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    shape: float = 3.0
    n: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.family != "normal" and not self.shape > 0:
            raise ValueError("shape must be positive")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def replication_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def _uniforms(rng, n: int) -> np.ndarray:
    return rng.random(n)


def pareto_from_uniform(u, alpha: float) -> np.ndarray:
    return (1.0 - np.asarray(u, dtype=np.float64)) ** (-1.0 / alpha)


def gen_pareto(spec: GeneratorSpec, rng: np.random.Generator | None = None) -> np.ndarray:
    """Standard Pareto sample with tail index ``spec.shape``; support [1, inf)."""
    rng = make_rng(spec.seed) if rng is None else rng
    return pareto_from_uniform(_uniforms(rng, spec.n), spec.shape)


def _student_t(rng, df: float, n: int) -> np.ndarray:
    out = np.empty(n)
    filled = 0
    while filled < n:
        need = n - filled
        # acceptance rate is pi/4; oversample so one pass usually suffices
        batch = int(need * 1.3) + 16
        uv = 2.0 * rng.random(2 * batch) - 1.0
        u, v = uv[0::2], uv[1::2]
        w = u * u + v * v
        ok = (w > 0) & (w <= 1)
        u, w = u[ok][:need], w[ok][:need]
        t = u * np.sqrt(df * (w ** (-2.0 / df) - 1.0) / w)
        out[filled:filled + t.size] = t
        filled += t.size
    return out


def gen_student_t(spec: GeneratorSpec, rng: np.random.Generator | None = None) -> np.ndarray:
    rng = make_rng(spec.seed) if rng is None else rng
    return _student_t(rng, float(spec.shape), spec.n)


def gen_normal(spec: GeneratorSpec, rng: np.random.Generator | None = None) -> np.ndarray:
    rng = make_rng(spec.seed) if rng is None else rng
    u = rng.random(2 * spec.n)
    return np.sqrt(-2.0 * np.log1p(-u[0::2])) * np.cos(2.0 * math.pi * u[1::2])


def deterministic_pareto_grid(alpha: float, n: int) -> np.ndarray:
    """Exact Pareto quantiles ``(i/(n+1)) ** (-1/alpha)`` for i = 1..n (descending)."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if n < 4:
        raise ValueError("n must be at least 4")
    i = np.arange(1, n + 1, dtype=np.float64)
    return (i / (n + 1)) ** (-1.0 / alpha)


def generate(spec: GeneratorSpec, rng: np.random.Generator | None = None) -> np.ndarray:
    if spec.family == "pareto":
        return gen_pareto(spec, rng)
    if spec.family == "student_t":
        return gen_student_t(spec, rng)
    if spec.family == "normal":
        return gen_normal(spec, rng)
    return deterministic_pareto_grid(spec.shape, spec.n)


def symmetric_returns(spec: GeneratorSpec, scale: float = 1e-4) -> np.ndarray:
    """Return-like sample with both tails: random signs on Pareto magnitudes,
    Student-t and normal as drawn; multiplied by ``scale``."""
    rng = make_rng(spec.seed)
    if spec.family in ("pareto", "deterministic_pareto_grid"):
        mags = generate(spec, rng)
        signs = np.where(rng.random(spec.n) < 0.5, -1.0, 1.0)
        return scale * signs * mags
    return scale * generate(spec, rng)


def oracle_empirical_quantile(sample, p: float) -> float:
    """The ceil(n p)-th largest value, found by a full sort."""
    x = sorted(float(v) for v in np.asarray(sample).ravel())
    n = len(x)
    if not (1.0 / n) * (1 - 1e-12) <= p < 1:
        raise ValueError(f"p={p} has no empirical counterpart for n={n}")
    k = math.ceil(n * p - 1e-9)
    return x[n - k]


def simulate_ticks(
    seed: int = 0,
    hours: float = 12.0,
    start: str = "1997-10-06T00:00:00.00",
    mean_gap_s: float = 4.0,
    limit_share: float = 0.75,
):
    """Synthetic two-kind tick stream around a heavy-tailed random-walk mid.

    The mid moves by t(2.5) steps. Limit-order quotes carry heavier-tailed price noise (t with 2.5 df) than
    market orders (t with 4 df). Roughly a third of limit orders fill; market
    orders always fill. Prices are rounded to 5 decimals.
    """
    from ._io import parse_timestamp
    from .ingest import TickEvent

    rng = make_rng(seed)
    t0 = parse_timestamp(start)
    horizon = int(round(hours * 3600 * 100))
    est = int(horizon / (mean_gap_s * 100) * 1.2) + 64
    gaps = np.maximum(1, np.ceil(-np.log1p(-rng.random(est)) * mean_gap_s * 100)).astype(np.int64)
    stamps = t0 + np.cumsum(gaps)
    stamps = stamps[stamps < t0 + horizon]
    n = stamps.size
    u = rng.random((n, 4))
    steps = 2e-5 * _student_t(rng, 2.5, n)
    mid = 1.75 * np.exp(np.cumsum(steps))
    noise_l = 1e-4 * _student_t(rng, 2.5, n)
    noise_m = 5e-5 * _student_t(rng, 4.0, n)
    qty = np.floor(1 + 10 * u[:, 2])
    events = []
    for i in range(n):
        is_limit = u[i, 0] < limit_share
        buy = u[i, 1] < 0.5
        half = 2e-4 * mid[i]
        noise = (noise_l[i] if is_limit else noise_m[i]) * mid[i]
        price = round(mid[i] + (-half if buy else half) + noise, 5)
        if is_limit:
            filled = u[i, 3] < 1 / 3
            traded = float(np.floor(1 + u[i, 3] * 3 * (qty[i] - 1))) if filled else 0.0
            traded = min(traded, float(qty[i]))
        else:
            filled, traded = True, float(qty[i])
        events.append(TickEvent(
            timestamp=int(stamps[i]),
            kind="limit" if is_limit else "market",
            side="buy" if buy else "sell",
            price=price,
            qty_available=float(qty[i]),
            qty_traded=traded,
            filled=bool(filled),
        ))
    return events
