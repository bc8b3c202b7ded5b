import json

import pytest

from _pipeline import run_pipeline, tree
from fxtail._io import read_table
from fxtail.cli import main
from fxtail.ingest import read_returns


@pytest.fixture
def sim(tmp_path):
    out = tmp_path / "sim"
    assert main(["simulate", "--family", "pareto", "--shape", "2.5", "--shape-market", "3.5",
                 "--n", "3000", "--seed", "3", "--out-dir", str(out)]) == 0
    return out


def _inputs(d):
    return ["--input", str(d / "returns_limit_300s.csv"), "--input", str(d / "returns_market_300s.csv")]


def test_missing_input_names_path(tmp_path, capsys):
    missing = tmp_path / "no_such_ticks.csv"
    assert main(["ingest", "--input", str(missing), "--out-dir", str(tmp_path / "o")]) != 0
    assert "no_such_ticks.csv" in capsys.readouterr().err
    assert main(["report", "--input", str(missing), "--out-dir", str(tmp_path / "o")]) != 0
    assert "no_such_ticks.csv" in capsys.readouterr().err


def test_ingest_fixture_and_rerun_identical(tmp_path, ticks_12):
    out = tmp_path / "ing"
    args = ["ingest", "--input", str(ticks_12), "--out-dir", str(out), "--agg-s", "20"]
    assert main(args) == 0
    first = tree(out)
    assert main(args) == 0
    assert tree(out) == first
    r = read_returns(out / "returns_limit_20s.csv")
    assert r.source == "limit" and r.n == 2


def test_simulate_deterministic_and_seeded(tmp_path, sim):
    again = tmp_path / "again"
    other = tmp_path / "other"
    assert main(["simulate", "--family", "pareto", "--shape", "2.5", "--shape-market", "3.5",
                 "--n", "3000", "--seed", "3", "--out-dir", str(again)]) == 0
    assert main(["simulate", "--family", "pareto", "--shape", "2.5", "--n", "3000", "--seed", "4",
                 "--out-dir", str(other)]) == 0
    a = (sim / "returns_limit_300s.csv").read_bytes()
    assert a == (again / "returns_limit_300s.csv").read_bytes()
    assert a != (other / "returns_limit_300s.csv").read_bytes()
    r = read_returns(sim / "returns_market_300s.csv")
    assert r.n == 3000 and r.source == "market" and r.interval == 300


def test_simulate_ticks_parse(tmp_path):
    out = tmp_path / "t"
    assert main(["simulate", "--what", "ticks", "--hours", "1", "--out-dir", str(out)]) == 0
    assert main(["ingest", "--input", str(out / "ticks.csv"), "--out-dir", str(out / "ing")]) == 0
    assert read_returns(out / "ing" / "returns_market_300s.csv").n >= 10


def test_report_writes_three_tables(tmp_path, sim):
    out = tmp_path / "rep"
    assert main(["report", *_inputs(sim), "--out-dir", str(out)]) == 0
    h1, rows1 = read_table(out / "table1.csv")
    assert h1[0] == "statistic" and len(rows1) == 7
    h2, rows2 = read_table(out / "table2.csv")
    assert h2[:8] == ["tail", "order", "alpha", "se", "t0", "t2", "t4", "stability"] and len(rows2) == 6
    h3, rows3 = read_table(out / "table3.csv")
    assert h3 == ["tail", "order", "position", "p_2n", "p_1n", "p_half_n", "k12", "k48", "k96"]
    hm, rowsm = read_table(out / "money_at_risk.csv")
    assert "notional" in hm and rowsm[0][3] == 2000000
    meta = json.loads((out / "table3.csv.json").read_text())
    assert meta["version"] and meta["config"]["probs"] == "2/n,1/n,1/2n"


@pytest.mark.parametrize("cmd, files", [
    ("summary", ["table1"]), ("tail", ["table2"]), ("quantile", ["table3", "money_at_risk"]),
])
def test_single_table_commands(tmp_path, sim, cmd, files):
    out = tmp_path / cmd
    assert main([cmd, *_inputs(sim), "--out-dir", str(out)]) == 0
    for f in files:
        assert (out / f"{f}.csv").exists()


def test_json_roundtrips_to_csv(tmp_path, sim):
    assert main(["report", *_inputs(sim), "--out-dir", str(tmp_path / "c")]) == 0
    assert main(["report", *_inputs(sim), "--out-dir", str(tmp_path / "j"), "--format", "json"]) == 0
    for name in ("table1", "table2", "table3", "money_at_risk"):
        doc = json.loads((tmp_path / "j" / f"{name}.json").read_text())
        assert "meta" in doc
        assert read_table(tmp_path / "j" / f"{name}.json") == read_table(tmp_path / "c" / f"{name}.csv")


def test_env_and_flag_precedence(tmp_path, sim, monkeypatch):
    monkeypatch.setenv("FXTAIL_HORIZONS", "4,8")
    out = tmp_path / "env"
    assert main(["quantile", *_inputs(sim), "--out-dir", str(out)]) == 0
    assert read_table(out / "table3.csv")[0][-2:] == ["k4", "k8"]
    assert main(["quantile", *_inputs(sim), "--out-dir", str(out), "--horizons", "2"]) == 0
    assert read_table(out / "table3.csv")[0][-1] == "k2"


def test_config_replay(tmp_path, sim):
    first = tmp_path / "first"
    assert main(["report", *_inputs(sim), "--out-dir", str(first), "--probs", "1/n,1/4n", "--method", "hill", "--m", "60"]) == 0
    cfg = (first / "run_config.txt").read_text().replace(f"out_dir = {first}", f"out_dir = {tmp_path / 'second'}")
    (tmp_path / "replay.txt").write_text(cfg)
    assert main(["report", "--config", str(tmp_path / "replay.txt")]) == 0
    a, b = tree(first), tree(tmp_path / "second")
    assert a["table3.csv"] == b["table3.csv"] and a["table2.csv"] == b["table2.csv"]


def test_bad_config_values(tmp_path, sim, capsys):
    assert main(["report", *_inputs(sim), "--out-dir", str(tmp_path), "--agg-s", "30"]) != 0
    assert "multiple" in capsys.readouterr().err
    assert main(["tail", "--input", str(sim / "returns_limit_300s.csv"), "--out-dir", str(tmp_path)]) != 0


def test_pipeline_json_variant(tmp_path):
    run_pipeline(tmp_path / "w", fmt="json")
    doc = json.loads((tmp_path / "w" / "report" / "table2.json").read_text())
    assert len(doc["rows"]) == 6
