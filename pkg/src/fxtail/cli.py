"""Command-line entry point: ``fxtail <subcommand> [options]``.

Option values are resolved in this order, later winning: built-in
defaults, ``--config`` file (``key = value`` lines, ``#`` comments),
environment variables ``FXTAIL_<KEY>`` (e.g. ``FXTAIL_AGG_S=600``), and
command-line flags. The resolved configuration is written to
``run_config.txt`` in the output directory and can be replayed with
``--config``.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__, kernels
from ._io import dumps_json, write_table, write_text
from .evt import SIDES, fit_tails
from .ingest import (
    build_midquotes,
    log_returns,
    parse_ticks,
    read_returns,
    resample,
    write_quotes,
    write_returns,
    write_ticks,
)
from .risk import DEFAULT_HORIZONS, DEFAULT_PROBS, risk_report
from .stats import table1
from .synthetic import GeneratorSpec, simulate_ticks, symmetric_returns

ENV_PREFIX = "FXTAIL_"

# key -> (default, parser)
_LIST = lambda s: [x.strip() for x in s.split(",") if x.strip()]  # noqa: E731
_BOOL = lambda s: str(s).strip().lower() in ("1", "true", "yes", "on")  # noqa: E731
OPTIONS = {
    "input": ([], _LIST),
    "out_dir": ("out", str),
    "interval_s": (20.0, float),
    "agg_s": (300.0, float),
    "kinds": (["limit", "market"], _LIST),
    "filled_only": (False, _BOOL),
    "tails": (list(SIDES), _LIST),
    "probs": (list(DEFAULT_PROBS), _LIST),
    "horizons": ([str(k) for k in DEFAULT_HORIZONS], _LIST),
    "format": ("csv", str),
    "seed": (0, int),
    "notional_limit": (2_000_000.0, float),
    "notional_market": (3_000_000.0, float),
    "max_lag": (100, int),
    "method": ("huisman", str),
    "m": (0, int),
    "what": ("returns", str),
    "family": ("pareto", str),
    "shape": (3.0, float),
    "shape_market": (0.0, float),
    "n": (5000, int),
    "scale": (1e-4, float),
    "hours": (12.0, float),
}


def _render(value) -> str:
    if isinstance(value, list):
        return ",".join(str(v) for v in value)
    return str(value)


def read_config_file(path: Path) -> dict[str, str]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    out = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in OPTIONS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def resolve_config(args: argparse.Namespace, environ=os.environ) -> dict:
    raw: dict[str, object] = {}
    if getattr(args, "config", None):
        raw.update(read_config_file(args.config))
    for key in OPTIONS:
        env = environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            raw[key] = env
    for key in OPTIONS:
        v = getattr(args, key, None)
        if v is not None:
            raw[key] = ",".join(v) if isinstance(v, list) else v
    cfg = {}
    for key, (default, parse) in OPTIONS.items():
        cfg[key] = parse(str(raw[key])) if key in raw else default
    if cfg["format"] not in ("csv", "json"):
        raise ValueError("--format must be csv or json")
    ratio = cfg["agg_s"] / cfg["interval_s"]
    if cfg["interval_s"] <= 0 or ratio < 1 or abs(ratio - round(ratio)) > 1e-9:
        raise ValueError("--agg-s must be a positive multiple of --interval-s")
    for t in cfg["tails"]:
        if t not in SIDES:
            raise ValueError(f"unknown tail {t!r}")
    return cfg


def config_text(cfg: dict, command: str) -> str:
    lines = [f"# fxtail {__version__} {command}"]
    lines += [f"{key} = {_render(cfg[key])}" for key in OPTIONS]
    return "\n".join(lines) + "\n"


def _meta(cfg: dict, command: str, extra: dict | None = None) -> dict:
    meta = {
        "tool": "fxtail",
        "version": __version__,
        "command": command,
        "config": {k: _render(v) for k, v in cfg.items()},
    }
    if extra:
        meta.update(extra)
    return meta


def _out_dir(cfg) -> Path:
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _fmt_seconds(s: float) -> str:
    return f"{s:g}s"


def cmd_ingest(cfg: dict) -> list[Path]:
    if len(cfg["input"]) != 1:
        raise ValueError("ingest takes exactly one --input tick file")
    src = Path(cfg["input"][0])
    if not src.exists():
        raise FileNotFoundError(f"input not found: {src}")
    parsed = parse_ticks(src)
    out = _out_dir(cfg)
    factor = int(round(cfg["agg_s"] / cfg["interval_s"]))
    written = []
    summary = {"rows": parsed.n_rows, "malformed": parsed.n_malformed, "reordered": parsed.reordered, "series": {}}
    for kind in cfg["kinds"]:
        q = build_midquotes(parsed.events, cfg["interval_s"], kind, filled_only=cfg["filled_only"])
        qa = resample(q, factor)
        r = log_returns(qa)
        qpath = out / f"quotes_{kind}_{_fmt_seconds(q.interval)}.csv"
        rpath = out / f"returns_{kind}_{_fmt_seconds(r.interval)}.csv"
        write_quotes(qpath, q)
        write_returns(rpath, r, {"tool": "fxtail", "version": __version__})
        written += [qpath, rpath]
        summary["series"][kind] = {**q.metadata(), "returns": r.n}
    write_text(out / "ingest_summary.json", dumps_json(summary))
    return written


def _load_inputs(cfg: dict) -> dict:
    if not cfg["input"]:
        raise ValueError("no --input return series given")
    series = {}
    for p in cfg["input"]:
        path = Path(p)
        if not path.exists():
            raise FileNotFoundError(f"input not found: {path}")
        r = read_returns(path)
        label = r.source if r.source not in series else path.stem
        series[label] = r
    return series


def _pair(series: dict) -> tuple[tuple[str, str], list]:
    if len(series) != 2:
        raise ValueError("tail and quantile reports need exactly two --input series")
    labels = list(series)
    if set(labels) == {"limit", "market"}:
        labels = ["limit", "market"]
    return tuple(labels), [series[k] for k in labels]


def _fits(cfg, series):
    labels, (a, b) = _pair(series)
    m = cfg["m"] or None
    return fit_tails(a, b, sides=cfg["tails"], method=cfg["method"], m=m, labels=labels)


def cmd_summary(cfg: dict, series=None) -> list[Path]:
    series = series or _load_inputs(cfg)
    header, rows = table1(series, cfg["max_lag"])
    path = write_table(_out_dir(cfg) / "table1", header, rows, cfg["format"], _meta(cfg, "summary"))
    return [path]


def cmd_tail(cfg: dict, series=None, fits=None) -> list[Path]:
    series = series or _load_inputs(cfg)
    fits = fits or _fits(cfg, series)
    header, rows = fits.table()
    meta = _meta(cfg, "tail", {"moment_critical": 1.64, "stability_critical": 1.96, "scale": "alpha"})
    return [write_table(_out_dir(cfg) / "table2", header, rows, cfg["format"], meta)]


def cmd_quantile(cfg: dict, series=None, fits=None) -> list[Path]:
    series = series or _load_inputs(cfg)
    fits = fits or _fits(cfg, series)
    notionals = {"limit": cfg["notional_limit"], "market": cfg["notional_market"]}
    rep = risk_report(fits, cfg["probs"], [int(k) for k in cfg["horizons"]], notionals)
    out = _out_dir(cfg)
    header, rows = rep.table()
    meta = _meta(cfg, "quantile", {"units": "percent", "multi_period_base": "1/n"})
    paths = [write_table(out / "table3", header, rows, cfg["format"], meta)]
    mh, mr = rep.money_table()
    paths.append(write_table(out / "money_at_risk", mh, mr, cfg["format"], _meta(cfg, "quantile", {"units": "currency"})))
    return paths


def cmd_report(cfg: dict) -> list[Path]:
    series = _load_inputs(cfg)
    fits = _fits(cfg, series)
    paths = cmd_summary(cfg, series)
    paths += cmd_tail(cfg, series, fits)
    paths += cmd_quantile(cfg, series, fits)
    return paths


_SIM_START_CS = 86_400 * 100 * 10_000  # 1997-05-19 00:00, fixed origin for synthetic stamps


def cmd_simulate(cfg: dict) -> list[Path]:
    out = _out_dir(cfg)
    if cfg["what"] == "ticks":
        path = out / "ticks.csv"
        write_ticks(path, simulate_ticks(seed=cfg["seed"], hours=cfg["hours"]))
        return [path]
    if cfg["what"] != "returns":
        raise ValueError("--what must be 'returns' or 'ticks'")
    from .ingest import ReturnSeries

    paths = []
    shapes = {"limit": cfg["shape"], "market": cfg["shape_market"] or cfg["shape"]}
    for i, kind in enumerate(("limit", "market")):
        spec = GeneratorSpec(cfg["family"], shapes[kind], cfg["n"], cfg["seed"] * 2 + i)
        values = symmetric_returns(spec, cfg["scale"])
        r = ReturnSeries(cfg["agg_s"], values, kind, start_cs=_SIM_START_CS + int(round(cfg["agg_s"] * 100)))
        path = out / f"returns_{kind}_{_fmt_seconds(cfg['agg_s'])}.csv"
        write_returns(path, r, {"tool": "fxtail", "version": __version__, "generator": {
            "family": spec.family, "shape": spec.shape, "n": spec.n, "seed": spec.seed}})
        paths.append(path)
    return paths


COMMANDS = {
    "ingest": cmd_ingest,
    "summary": cmd_summary,
    "tail": cmd_tail,
    "quantile": cmd_quantile,
    "report": cmd_report,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fxtail", description="Tail risk of high-frequency return series.")
    parser.add_argument("--version", action="version", version=f"fxtail {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "ingest": "tick file -> 20 s mid-quotes -> presentation-interval log returns",
        "summary": "summary statistics table (moments, ACF count, KS)",
        "tail": "tail-index table with moment and stability tests",
        "quantile": "extreme quantiles, multi-period levels, money at risk",
        "report": "all three tables",
        "simulate": "synthetic return series or tick file",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--input", action="append", help="input file (repeatable)")
        p.add_argument("--out-dir", dest="out_dir")
        p.add_argument("--interval-s", dest="interval_s", help="sampling interval, seconds (20)")
        p.add_argument("--agg-s", dest="agg_s", help="presentation interval, seconds (300)")
        p.add_argument("--kinds", help="order kinds to ingest (limit,market)")
        p.add_argument("--filled-only", dest="filled_only", action="store_const", const="1")
        p.add_argument("--tails", help="tails to fit (common,lower,upper)")
        p.add_argument("--probs", help="probabilities, e.g. 2/n,1/n,1/2n")
        p.add_argument("--horizons", help="multi-period horizons k (12,48,96)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--seed")
        p.add_argument("--notional-limit", dest="notional_limit")
        p.add_argument("--notional-market", dest="notional_market")
        p.add_argument("--max-lag", dest="max_lag")
        p.add_argument("--method", choices=("huisman", "hill"))
        p.add_argument("--m", help="threshold count for --method hill")
        p.add_argument("--what", choices=("returns", "ticks"))
        p.add_argument("--family", choices=("pareto", "student_t", "normal"))
        p.add_argument("--shape")
        p.add_argument("--shape-market", dest="shape_market")
        p.add_argument("--n")
        p.add_argument("--scale")
        p.add_argument("--hours")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        paths = COMMANDS[args.command](cfg)
        write_text(Path(cfg["out_dir"]) / "run_config.txt", config_text(cfg, args.command))
    except (ValueError, OSError) as exc:
        print(f"fxtail {args.command}: error: {exc}", file=sys.stderr)
        return 2
    for p in paths:
        print(p)
    print(f"backend: {kernels.BACKEND}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
