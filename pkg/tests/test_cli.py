import json

import pytest

from postlab.cli import main, sweep_cells
from postlab.records import RunRecord, SchemaError, read_records


@pytest.fixture
def out(tmp_path):
    return str(tmp_path / "results.jsonl")


def test_check_certified(out, capsys):
    assert main(["check", "--m", "1", "--d", "3", "--t", "2", "--out", out]) == 0
    assert "MaximalRankCertified" in capsys.readouterr().out
    (rec,) = list(read_records(out))
    assert rec.command == "check" and rec.certificates[0].rank == 10


def test_check_exceptional(out, capsys):
    assert main(["check", "--m", "2", "--d", "2", "--t", "2", "--out", out]) == 0
    text = capsys.readouterr().out
    assert "DeficitObserved h0=1 h1=1" in text and "exceptional" in text


def test_check_twice_is_reproducible(out):
    for _ in range(2):
        main(["check", "--m", "2", "--d", "2", "--t", "2", "--seed", "7", "--out", out])
    a, b = list(read_records(out))
    assert a.stable_json() == b.stable_json()
    assert a.parameters["seed"] == 7


def test_usage_errors(out, capsys):
    assert main(["check", "--m", "2", "--d", "2", "--t", "2", "--prime", "3", "--out", out]) == 1
    with pytest.raises(SystemExit) as e:
        main(["check", "--m", "two"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 1
    assert main(["sweep", "--m-max", "3", "--t-max", "2", "--out", out]) == 1


def test_env_and_flag_precedence(out, monkeypatch):
    monkeypatch.setenv("POSTLAB_SEED", "11")
    monkeypatch.setenv("POSTLAB_PRIME", "1000003")
    main(["check", "--m", "1", "--d", "2", "--t", "2", "--out", out])
    main(["check", "--m", "1", "--d", "2", "--t", "2", "--seed", "3", "--out", out])
    a, b = list(read_records(out))
    assert (a.parameters["seed"], a.parameters["prime"]) == (11, 1000003)
    assert (b.parameters["seed"], b.parameters["prime"]) == (3, 1000003)
    monkeypatch.setenv("POSTLAB_SEED", "x")
    assert main(["check", "--m", "1", "--d", "2", "--t", "2", "--out", out]) == 1


def test_sweep_small(out, tmp_path, capsys):
    table = tmp_path / "t.csv"
    assert main(["sweep", "--m-max", "2", "--t-max", "6", "--out", out, "--format", "csv", "--table", str(table)]) == 0
    text = table.read_text()
    assert text.splitlines()[0] == "m,d,k,h0@k-1,h1@k,status"
    assert "2,2,2,,0,MaximalRankCertified" in text
    recs = list(read_records(out))
    assert {r.command for r in recs} == {"sweep-cell", "sweep-probe"}
    probe = [r for r in recs if r.command == "sweep-probe"][0]
    assert (probe.result["h0"], probe.result["h1"]) == (1, 1)


def test_sweep_cells_for_one_point():
    cells = sweep_cells(1, 8)
    assert cells[0] == (1, 1)
    # a_{1,8} = (165 - 1) // 9
    assert max(d for m, d in cells if m == 1) == 18


def test_sweep_jobs_do_not_change_records(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    main(["sweep", "--m-max", "2", "--t-max", "5", "--out", str(a), "--jobs", "1"])
    main(["sweep", "--m-max", "2", "--t-max", "5", "--out", str(b), "--jobs", "3"])
    sa = sorted(r.stable_json() for r in read_records(a))
    sb = sorted(r.stable_json() for r in read_records(b))
    assert sa == sb


def test_witness_commands(out, capsys):
    assert main(["witness", "b", "--m", "2", "--out", out]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] and report["kind"] == "B-even"
    assert main(["witness", "r", "--m", "3", "--out", out]) == 0
    capsys.readouterr()
    assert main(["witness", "h", "--m", "1", "--k", "4", "--out", out]) == 0
    capsys.readouterr()
    assert main(["witness", "h", "--m", "1", "--out", out]) == 1
    assert main(["witness", "r", "--m", "4", "--out", out]) == 1
    assert main(["witness", "r", "--m", "3", "--prime", "7", "--out", out]) == 2


def test_comb(capsys):
    assert main(["comb", "--m", "3", "--k", "5"]) == 0
    assert json.loads(capsys.readouterr().out) == {"m": 3, "k": 5, "a": 7, "b": 4}
    assert main(["comb", "--m", "5", "--k", "1"]) == 1


def test_reconcile(capsys):
    assert main(["reconcile", "--format", "json"]) == 0
    rows = {r["label"]: r for r in json.loads(capsys.readouterr().out)}
    assert rows["(a,b)_{0,3}"]["verdict"] == "printed form inconsistent at m=0: (6,2) vs (5,0)"
    assert rows["(a,b)_{m,m+1}"]["consistent"]
    assert main(["reconcile"]) == 0
    assert "| identity |" in capsys.readouterr().out


def test_report(out, capsys):
    main(["sweep", "--m-max", "1", "--t-max", "3", "--out", out])
    capsys.readouterr()
    assert main(["report", "--in", out, "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("m,d,k") and len(lines) == 1 + len(sweep_cells(1, 3))
    assert main(["report", "--in", out + ".missing"]) == 1


def test_record_round_trip_and_schema(out):
    main(["check", "--m", "1", "--d", "3", "--t", "2", "--out", out])
    line = open(out, encoding="utf-8").read().strip()
    rec = RunRecord.from_json(line)
    assert rec.to_json() == line
    bad = json.loads(line)
    bad["schema_version"] = "2"
    with pytest.raises(SchemaError):
        RunRecord.from_dict(bad)
