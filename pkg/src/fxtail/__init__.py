"""Tail-index and extreme-quantile estimation for high-frequency FX returns."""

__version__ = "0.1.0"

from .evt import (  # noqa: E402
    HillSpectrum,
    TailEstimate,
    TailSample,
    fit_tails,
    hill_estimate,
    hill_spectrum,
    huisman_wls,
    moment_test,
    split_tails,
    stability_test,
)
from .ingest import (  # noqa: E402
    QuoteSeries,
    ReturnSeries,
    TickEvent,
    build_midquotes,
    log_returns,
    parse_ticks,
    resample,
)
from .risk import dollars_at_risk, risk_report, scale_quantile, tail_quantile  # noqa: E402
from .stats import SummaryStats, summarize  # noqa: E402

__all__ = [
    "HillSpectrum", "TailEstimate", "TailSample", "fit_tails", "hill_estimate", "hill_spectrum",
    "huisman_wls", "moment_test", "split_tails", "stability_test",
    "QuoteSeries", "ReturnSeries", "TickEvent", "build_midquotes", "log_returns", "parse_ticks", "resample",
    "dollars_at_risk", "risk_report", "scale_quantile", "tail_quantile",
    "SummaryStats", "summarize",
]
