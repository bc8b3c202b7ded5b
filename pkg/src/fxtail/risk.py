"""Extreme quantiles, multi-period scaling and money-at-risk reporting."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace

from .evt import Table2Report, TailEstimate

DEFAULT_PROBS = ("2/n", "1/n", "1/2n")
DEFAULT_HORIZONS = (12, 48, 96)
POSITION = {"upper": "short", "lower": "long", "common": "long/short"}


@dataclass(frozen=True)
class QuantileEstimate:
    p: float
    r_p: float  # fraction, not percent
    side: str
    horizon_k: int = 1
    in_sample: bool = True
    within_tail: bool = True  # p < m/n: extrapolating from inside the fitted tail


def tail_quantile(e: TailEstimate, p: float) -> QuantileEstimate:
    """Return level exceeded with probability p: ``r_m * (m/(n p))**(1/alpha)``."""
    if not 0 < p < 1:
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    r_p = e.r_m * (e.m / (e.n * p)) ** (1.0 / e.alpha)
    return QuantileEstimate(
        p=p,
        r_p=r_p,
        side=e.side,
        horizon_k=1,
        in_sample=p * e.n >= 1 - 1e-12,
        within_tail=p < e.m / e.n,
    )


def scale_quantile(q: QuantileEstimate, k: int, alpha: float) -> QuantileEstimate:
    """Multi-period level over k base intervals: ``r_p * k**(1/alpha)``."""
    if int(k) != k or k < 1:
        raise ValueError("k must be a positive integer")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return replace(q, r_p=q.r_p * k ** (1.0 / alpha), horizon_k=q.horizon_k * int(k))


def dollars_at_risk(q: QuantileEstimate, notional: float) -> float:
    if not notional > 0:
        raise ValueError("notional must be positive")
    return notional * q.r_p


@dataclass(frozen=True)
class ProbSpec:
    """A probability given either absolutely or as a multiple of 1/n."""

    multiple: float | None = None  # p = multiple / n
    absolute: float | None = None

    def value(self, n: int) -> float:
        return self.absolute if self.absolute is not None else self.multiple / n

    @property
    def column(self) -> str:
        if self.absolute is not None:
            return f"p_{self.absolute:g}"
        if self.multiple == 0.5:
            return "p_half_n"
        return f"p_{self.multiple:g}n"

    @property
    def text(self) -> str:
        if self.absolute is not None:
            return f"{self.absolute:g}"
        if self.multiple >= 1:
            return f"{self.multiple:g}/n"
        return f"1/{1 / self.multiple:g}n"


_PROB_RE = re.compile(r"^\s*([0-9.]+)?\s*/\s*([0-9.]*)\s*n\s*$")


def parse_prob(text: str) -> ProbSpec:
    """Parse ``"2/n"``, ``"1/n"``, ``"1/2n"`` or an absolute ``"0.001"``."""
    m = _PROB_RE.match(text)
    if m:
        num = float(m.group(1) or 1)
        den = float(m.group(2) or 1)
        if num <= 0 or den <= 0:
            raise ValueError(f"bad probability {text!r}")
        return ProbSpec(multiple=num / den)
    p = float(text)
    if not 0 < p < 1:
        raise ValueError(f"probability must lie in (0, 1), got {text!r}")
    return ProbSpec(absolute=p)


@dataclass
class RiskRow:
    side: str
    label: str
    alpha: float
    n: int
    single: list[QuantileEstimate]
    multi: list[QuantileEstimate]


@dataclass
class RiskReport:
    rows: list[RiskRow]
    probs: tuple[ProbSpec, ...]
    horizons: tuple[int, ...]
    notionals: dict[str, float]

    def columns(self) -> list[str]:
        return [p.column for p in self.probs] + [f"k{k}" for k in self.horizons]

    def table(self) -> tuple[list[str], list[list]]:
        """Quantile grid in percent."""
        header = ["tail", "order", "position"] + self.columns()
        rows = []
        for r in self.rows:
            cells = [q.r_p * 100 for q in r.single] + [q.r_p * 100 for q in r.multi]
            rows.append([r.side, r.label, POSITION[r.side]] + cells)
        return header, rows

    def money_table(self) -> tuple[list[str], list[list]]:
        header = ["tail", "order", "position", "notional"] + [p.column for p in self.probs]
        rows = []
        for r in self.rows:
            notional = self.notionals.get(r.label)
            if notional is None:
                continue
            rows.append([r.side, r.label, POSITION[r.side], notional]
                        + [round(dollars_at_risk(q, notional), 2) for q in r.single])
        return header, rows


def risk_report(
    fits: Table2Report,
    probs=DEFAULT_PROBS,
    horizons=DEFAULT_HORIZONS,
    notionals: dict[str, float] | None = None,
) -> RiskReport:
    """Single-period quantiles at each p, and the p = 1/n quantile scaled to each horizon."""
    specs = tuple(parse_prob(p) if isinstance(p, str) else p for p in probs)
    rows = []
    for fr in fits.rows:
        e = fr.estimate
        single = [tail_quantile(e, s.value(e.n)) for s in specs]
        base = tail_quantile(e, 1.0 / e.n)
        multi = [scale_quantile(base, k, e.alpha) for k in horizons]
        rows.append(RiskRow(fr.side, fr.label, e.alpha, e.n, single, multi))
    return RiskReport(rows, specs, tuple(int(k) for k in horizons), dict(notionals or {}))


def anchored_estimate(alpha: float, level: float, p: float, n: int, side: str = "upper") -> TailEstimate:
    """Tail estimate pinned to a known level at probability p, e.g. a reference quantile.

    The threshold count is set to ``p * n`` so that ``tail_quantile(e, p)``
    returns ``level`` exactly.
    """
    m = p * n
    gamma = 1.0 / alpha
    return TailEstimate(
        side=side, m=m, gamma=gamma, alpha=alpha,
        se_gamma=gamma / math.sqrt(m), se_alpha=alpha / math.sqrt(m),
        r_m=level, n=n, scale_a=p * level**alpha, method="anchored",
    )
