"""
Tick-file parsing, calendar-time mid-quote construction and log returns.

Tick files are UTF-8 CSV with the header
``timestamp,kind,side,price,qty_available,qty_traded,filled``. Timestamps
carry centisecond precision and are held internally as integer
centiseconds since the Unix epoch.
"""

from __future__ import annotations

import io
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import BinaryIO, Iterable, Union

import numpy as np

from . import kernels
from ._io import (
    dumps_json,
    fmt_float,
    format_timestamp,
    parse_timestamp,
    rows_to_csv,
    sidecar_path,
    write_text,
)

log = logging.getLogger(__name__)

TICK_COLUMNS = ("timestamp", "kind", "side", "price", "qty_available", "qty_traded", "filled")
ORDER_KINDS = ("limit", "market", "all")
_KIND_CODES = {"L": "limit", "M": "market"}
_SIDE_CODES = {"B": "buy", "S": "sell"}


class TickFormatError(ValueError):
    """The tick source cannot be used: bad header, unreadable, or too many bad rows."""


@dataclass(frozen=True)
class TickEvent:
    timestamp: int  # centiseconds since epoch
    kind: str  # "limit" | "market"
    side: str  # "buy" | "sell"
    price: float
    qty_available: float
    qty_traded: float
    filled: bool

    def to_row(self) -> list[str]:
        return [
            format_timestamp(self.timestamp),
            "L" if self.kind == "limit" else "M",
            "B" if self.side == "buy" else "S",
            fmt_float(self.price),
            fmt_float(self.qty_available),
            fmt_float(self.qty_traded),
            "1" if self.filled else "0",
        ]


@dataclass(frozen=True)
class FormatConfig:
    delimiter: str = ","
    max_malformed_fraction: float = 0.05


@dataclass
class ParseResult:
    events: list[TickEvent]
    n_rows: int
    malformed: list[tuple[int, str]] = field(default_factory=list)
    reordered: int = 0

    @property
    def n_malformed(self) -> int:
        return len(self.malformed)


def _parse_row(cells: list[str]) -> TickEvent:
    if len(cells) != len(TICK_COLUMNS):
        raise ValueError(f"expected {len(TICK_COLUMNS)} fields, got {len(cells)}")
    ts_s, kind_s, side_s, price_s, qa_s, qt_s, filled_s = (c.strip() for c in cells)
    ts = parse_timestamp(ts_s)
    if kind_s not in _KIND_CODES:
        raise ValueError(f"bad kind {kind_s!r}")
    if side_s not in _SIDE_CODES:
        raise ValueError(f"bad side {side_s!r}")
    if filled_s not in ("0", "1"):
        raise ValueError(f"bad filled flag {filled_s!r}")
    price, qa, qt = float(price_s), float(qa_s), float(qt_s)
    if not (math.isfinite(price) and price > 0):
        raise ValueError(f"non-positive price {price_s}")
    if not (math.isfinite(qa) and qa >= 0 and math.isfinite(qt) and qt >= 0):
        raise ValueError("negative or non-finite quantity")
    kind = _KIND_CODES[kind_s]
    if kind == "limit" and qt > qa:
        raise ValueError("qty_traded exceeds qty_available")
    return TickEvent(ts, kind, _SIDE_CODES[side_s], price, qa, qt, filled_s == "1")


def _open_text(source) -> io.TextIOBase:
    if isinstance(source, (str, Path)):
        try:
            return open(source, "r", encoding="utf-8", newline="")
        except OSError as exc:
            raise TickFormatError(f"cannot read tick file {source}: {exc}") from exc
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8"))
    return io.TextIOWrapper(source, encoding="utf-8", newline="")


def parse_ticks(source: Union[str, Path, bytes, BinaryIO], fmt: FormatConfig = FormatConfig()) -> ParseResult:
    """Parse a delimited tick file.

    Rows that violate the field rules are skipped and recorded in
    ``ParseResult.malformed`` as ``(line_number, reason)``. If the malformed
    share exceeds ``fmt.max_malformed_fraction`` a :class:`TickFormatError` is
    raised. Out-of-order rows are kept and the output is stably sorted by
    timestamp; their count is reported as ``reordered``.
    """
    fh = _open_text(source)
    try:
        try:
            lines = fh.read().splitlines()
        except UnicodeDecodeError as exc:
            raise TickFormatError(f"tick source is not UTF-8: {exc}") from exc
    finally:
        if isinstance(source, (str, Path)):
            fh.close()
    if not lines:
        raise TickFormatError("tick source is empty")
    header = tuple(c.strip() for c in lines[0].lstrip("\ufeff").split(fmt.delimiter))
    if header != TICK_COLUMNS:
        raise TickFormatError(f"unexpected header {header}; want {TICK_COLUMNS}")

    events: list[TickEvent] = []
    malformed: list[tuple[int, str]] = []
    n_rows = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        n_rows += 1
        try:
            events.append(_parse_row(line.split(fmt.delimiter)))
        except ValueError as exc:
            malformed.append((lineno, str(exc)))

    if n_rows and len(malformed) / n_rows > fmt.max_malformed_fraction:
        raise TickFormatError(
            f"{len(malformed)} of {n_rows} rows malformed "
            f"(limit {fmt.max_malformed_fraction:.1%}); first: line {malformed[0][0]}: {malformed[0][1]}"
        )
    reordered = sum(1 for a, b in zip(events, events[1:]) if b.timestamp < a.timestamp)
    if reordered:
        events.sort(key=lambda e: e.timestamp)
    if malformed:
        log.warning("skipped %d malformed tick rows", len(malformed))
    return ParseResult(events, n_rows, malformed, reordered)


def write_ticks(path: Path, events: Iterable[TickEvent]) -> None:
    write_text(path, rows_to_csv(list(TICK_COLUMNS), [e.to_row() for e in events]))


@dataclass(frozen=True)
class QuoteSeries:
    """Best bid/ask and mid sampled at the end of each calendar interval.

    ``start_cs`` is the timestamp of the first sample; sample ``i`` sits at
    ``start_cs + i * interval * 100``. ``crossed`` counts samples with
    bid > ask (kept as-is), ``one_sided`` counts intervals in which only one
    side of the book updated, ``dropped_head`` counts leading intervals
    removed because no two-sided quote existed yet.
    """

    start_cs: int
    interval: float
    bids: np.ndarray
    asks: np.ndarray
    mids: np.ndarray
    order_kind: str = "all"
    crossed: int = 0
    one_sided: int = 0
    dropped_head: int = 0

    def __post_init__(self):
        if not (len(self.bids) == len(self.asks) == len(self.mids) >= 1):
            raise ValueError("bids, asks and mids must have the same non-zero length")

    def __len__(self) -> int:
        return len(self.mids)

    @property
    def interval_cs(self) -> int:
        return _interval_cs(self.interval)

    def timestamps(self) -> np.ndarray:
        return self.start_cs + self.interval_cs * np.arange(len(self), dtype=np.int64)

    def metadata(self) -> dict:
        return {
            "type": "quotes",
            "interval_s": self.interval,
            "source": self.order_kind,
            "n": len(self),
            "start": format_timestamp(self.start_cs),
            "crossed": self.crossed,
            "one_sided": self.one_sided,
            "dropped_head": self.dropped_head,
        }


@dataclass(frozen=True)
class ReturnSeries:
    """Log returns at a fixed interval; ``start_cs`` stamps the first return."""

    interval: float
    values: np.ndarray
    source: str = "all"
    start_cs: int = 0

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("return series contains non-finite values")

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return self.n

    def absolute(self) -> np.ndarray:
        """Volatility proxy: elementwise absolute returns."""
        return np.abs(self.values)

    def timestamps(self) -> np.ndarray:
        return self.start_cs + _interval_cs(self.interval) * np.arange(self.n, dtype=np.int64)

    def metadata(self) -> dict:
        return {
            "type": "returns",
            "interval_s": self.interval,
            "source": self.source,
            "n": self.n,
            "start": format_timestamp(self.start_cs),
        }


def _interval_cs(interval: float) -> int:
    cs = interval * 100
    if interval <= 0 or abs(cs - round(cs)) > 1e-9:
        raise ValueError(f"interval must be a positive multiple of 0.01 s, got {interval}")
    return int(round(cs))


def build_midquotes(
    events: Iterable[TickEvent],
    interval: float,
    order_kind: str = "all",
    *,
    filled_only: bool = False,
    origin_cs: int | None = None,
) -> QuoteSeries:
    """Sample the last best bid and best ask at the end of each interval.

    Buy-side events set the best bid and sell-side events the best ask, taken
    verbatim from the file. Intervals are right-closed, ``(end - interval, end]``.
    The grid is anchored at ``origin_cs`` (default: the last multiple of
    ``interval`` strictly before the first event) and runs to
    the first endpoint at or after the last event. Intervals without new
    events carry the previous quotes forward.
    """
    if order_kind not in ORDER_KINDS:
        raise ValueError(f"order_kind must be one of {ORDER_KINDS}")
    step = _interval_cs(interval)
    sel = [
        e for e in events
        if (order_kind == "all" or e.kind == order_kind) and (e.filled or not filled_only)
    ]
    if not sel:
        raise ValueError("empty series: no quotable events")
    ts = np.fromiter((e.timestamp for e in sel), dtype=np.int64, count=len(sel))
    if np.any(np.diff(ts) < 0):
        raise ValueError("events must be in timestamp order")
    is_bid = np.fromiter((e.side == "buy" for e in sel), dtype=np.bool_, count=len(sel))
    price = np.fromiter((e.price for e in sel), dtype=np.float64, count=len(sel))

    # intervals are right-closed, so an event exactly on a boundary closes that interval
    origin = ((int(ts[0]) - 1) // step) * step if origin_cs is None else int(origin_cs)
    if origin > ts[0]:
        raise ValueError("origin_cs must not be after the first event")
    n_end = max(1, -(-(int(ts[-1]) - origin) // step))
    endpoints = origin + step * np.arange(1, n_end + 1, dtype=np.int64)

    bid, ask, nb_up, na_up = kernels.sample_quotes(ts, is_bid, price, endpoints)
    valid = ~(np.isnan(bid) | np.isnan(ask))
    if not valid.any():
        raise ValueError("empty series: never observed both a bid and an ask")
    head = int(np.argmax(valid))
    bid, ask = bid[head:], ask[head:]
    nb_up, na_up = nb_up[head:], na_up[head:]
    one_sided = int(np.sum((nb_up > 0) != (na_up > 0)))
    crossed = int(np.sum(bid > ask))
    if crossed:
        log.warning("%d crossed quotes (bid > ask) kept as-is", crossed)
    return QuoteSeries(
        start_cs=int(endpoints[head]),
        interval=float(interval),
        bids=bid,
        asks=ask,
        mids=(bid + ask) / 2.0,
        order_kind=order_kind,
        crossed=crossed,
        one_sided=one_sided,
        dropped_head=head,
    )


def resample(q: QuoteSeries, factor: int) -> QuoteSeries:
    """Keep the end-of-block quote of every ``factor`` consecutive samples."""
    if int(factor) != factor or factor < 1:
        raise ValueError("factor must be a positive integer")
    factor = int(factor)
    if factor > len(q):
        raise ValueError(f"factor {factor} exceeds series length {len(q)}")
    idx = slice(factor - 1, None, factor)
    bids, asks = q.bids[idx], q.asks[idx]
    return replace(
        q,
        start_cs=q.start_cs + (factor - 1) * q.interval_cs,
        interval=q.interval * factor,
        bids=bids,
        asks=asks,
        mids=q.mids[idx],
        crossed=int(np.sum(bids > asks)),
    )


def log_returns(q: QuoteSeries) -> ReturnSeries:
    mids = np.asarray(q.mids, dtype=np.float64)
    if mids.size < 2:
        raise ValueError("need at least two mid-quotes")
    if np.any(~(mids > 0)):
        raise ValueError("mid-quotes must be strictly positive")
    return ReturnSeries(
        interval=q.interval,
        values=np.diff(np.log(mids)),
        source=q.order_kind,
        start_cs=q.start_cs + q.interval_cs,
    )


# --------------------------------------------------------------------------
# persistence: CSV body + JSON sidecar
# --------------------------------------------------------------------------

def write_quotes(path: Path, q: QuoteSeries) -> None:
    rows = [
        [format_timestamp(t), fmt_float(b), fmt_float(a), fmt_float(m)]
        for t, b, a, m in zip(q.timestamps(), q.bids, q.asks, q.mids)
    ]
    write_text(path, rows_to_csv(["timestamp", "bid", "ask", "mid"], rows))
    write_text(sidecar_path(path), dumps_json(q.metadata()))


def write_returns(path: Path, r: ReturnSeries, extra: dict | None = None) -> None:
    rows = [[format_timestamp(t), fmt_float(v)] for t, v in zip(r.timestamps(), r.values)]
    write_text(path, rows_to_csv(["timestamp", "log_return"], rows))
    meta = r.metadata()
    if extra:
        meta.update(extra)
    write_text(sidecar_path(path), dumps_json(meta))


def read_returns(path: Path) -> ReturnSeries:
    """Load a return CSV; interval/source come from the sidecar when present."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"return series not found: {path}")
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != "timestamp,log_return":
        raise ValueError(f"{path}: not a return-series CSV")
    stamps, values = [], []
    for line in lines[1:]:
        if line.strip():
            t, v = line.split(",")
            stamps.append(parse_timestamp(t))
            values.append(float(v))
    if not values:
        raise ValueError(f"{path}: empty return series")
    meta = {}
    side = sidecar_path(path)
    if side.exists():
        meta = json.loads(side.read_text(encoding="utf-8"))
    interval = meta.get("interval_s")
    if interval is None:
        interval = (stamps[1] - stamps[0]) / 100 if len(stamps) > 1 else 1.0
    return ReturnSeries(
        interval=float(interval),
        values=np.asarray(values, dtype=np.float64),
        source=meta.get("source", path.stem),
        start_cs=stamps[0],
    )
