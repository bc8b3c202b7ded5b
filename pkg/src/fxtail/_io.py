"""Timestamp helpers and CSV/JSON persistence for series and report tables."""

from __future__ import annotations

import csv
import io
import json
import re
from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

_EPOCH = datetime(1970, 1, 1)
_TS_RE = re.compile(r"^(\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})\.(\d{2})$")


def parse_timestamp(text: str) -> int:
    """Parse ``YYYY-MM-DDThh:mm:ss.cc`` into centiseconds since the Unix epoch."""
    m = _TS_RE.match(text.strip())
    if m is None:
        raise ValueError(f"bad timestamp {text!r}")
    y, mo, d, h, mi, s, cs = (int(g) for g in m.groups())
    dt = datetime(y, mo, d, h, mi, s)  # raises on out-of-range fields
    delta = dt - _EPOCH
    return (delta.days * 86400 + delta.seconds) * 100 + cs


def format_timestamp(cs: int) -> str:
    cs = int(cs)
    dt = _EPOCH + timedelta(seconds=cs // 100)
    return f"{dt:%Y-%m-%dT%H:%M:%S}.{cs % 100:02d}"


def fmt_float(x: float) -> str:
    """Shortest round-trip representation; stable across platforms."""
    return repr(float(x))


def fmt_report(x, digits: int = 10) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.{digits}g}"


def write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def sidecar_path(path: Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def rows_to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def write_table(path: Path, header: list[str], rows: list[list], fmt: str, meta: dict) -> Path:
    """Write a report table as CSV (+ JSON sidecar with ``meta``) or as one JSON document.

    Numeric cells are rendered with 10 significant digits in both formats, so
    the JSON values round-trip exactly to the CSV text.
    """
    path = Path(path)
    cells = [[fmt_report(v) for v in row] for row in rows]
    if fmt == "csv":
        out = path.with_suffix(".csv")
        write_text(out, rows_to_csv(header, cells))
        write_text(sidecar_path(out), dumps_json(meta))
        return out
    if fmt == "json":
        out = path.with_suffix(".json")
        records = []
        for row in cells:
            rec = {}
            for key, cell in zip(header, row):
                rec[key] = _json_cell(cell)
            records.append(rec)
        write_text(out, dumps_json({"meta": meta, "columns": header, "rows": records}))
        return out
    raise ValueError(f"unknown format {fmt!r}")


def _json_cell(cell: str):
    if cell == "":
        return None
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell


def read_table(path: Path) -> tuple[list[str], list[list]]:
    """Read a table written by :func:`write_table`, either format, as typed cells."""
    path = Path(path)
    if path.suffix == ".json":
        doc = json.loads(path.read_text(encoding="utf-8"))
        cols = doc["columns"]
        return cols, [[rec[c] for c in cols] for rec in doc["rows"]]
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[_json_cell(c) for c in r] for r in rows[1:]]
