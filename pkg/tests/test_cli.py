import csv
import io
import json

import pytest

from lazyleader.cli import main


def write_config(tmp_path, **kw):
    doc = {"forecaster": {"id": "rwfpl"}, "adversary": {"kind": "zeros"}, "n": 50, "N": 2,
           "replications": 5, "master_seed": 1, "outputs": {"dir": str(tmp_path / "out")},
           "assertions": ["lemma1", "zero_regret"]}
    doc.update(kw)
    p = tmp_path / "c.json"
    p.write_text(json.dumps(doc))
    return p


def test_bounds_command(capsys):
    assert main(["bounds", "--which", "thm1", "--n", "10000", "--N", "10"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["name"] == "thm1"
    assert out["value"] == pytest.approx(1880.14, abs=0.01)


def test_bounds_errors_exit_2(capsys):
    assert main(["bounds", "--which", "thm1", "--n", "10"]) == 2
    assert "needs N" in capsys.readouterr().err
    assert main(["bounds", "--which", "nope", "--n", "10"]) == 2
    assert main(["bounds", "--which", "thm1", "--n", "10", "--N", "2", "--bogus"]) == 2


def test_help_on_every_subcommand(capsys):
    for cmd in ("run", "bounds", "oracle-check", "replay", "sweep"):
        assert main([cmd, "--help"]) == 0
        assert "usage" in capsys.readouterr().out


def test_run_zero_losses(tmp_path, capsys):
    p = write_config(tmp_path)
    assert main(["run", "--config", str(p)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert all(a["passed"] for a in summary["assertions"])
    with open(tmp_path / "out" / "replications.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows and all(r["regret"] == "0" for r in rows)


def test_run_overrides_seed_and_out(tmp_path, capsys):
    p = write_config(tmp_path, adversary={"kind": "bernoulli", "seed": 2}, assertions=["lemma1"])
    assert main(["run", "--config", str(p), "--seed", "9", "--out", str(tmp_path / "o2"), "--threads", "1"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["config"]["master_seed"] == 9
    assert (tmp_path / "o2" / "summary.json").exists()


def test_run_assertion_failure_exit_1_prints_replay_hint(tmp_path, capsys):
    p = write_config(tmp_path, adversary={"kind": "bernoulli", "seed": 2}, assertions=["zero_regret"])
    assert main(["run", "--config", str(p)]) == 1
    err = capsys.readouterr().err
    assert "zero_regret FAILED" in err
    assert "--replication" in err and "master_seed 1" in err


def test_run_config_errors_exit_2(tmp_path, capsys):
    p = write_config(tmp_path, replications=0)
    assert main(["run", "--config", str(p)]) == 2
    assert "replications" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 2


def test_replay_reproduces_trajectory(tmp_path, capsys):
    p = write_config(tmp_path, adversary={"kind": "bernoulli", "seed": 2})
    assert main(["replay", "--config", str(p), "--replication", "3"]) == 0
    first = capsys.readouterr().out
    assert main(["replay", "--config", str(p), "--replication", "3"]) == 0
    assert capsys.readouterr().out == first
    rows = list(csv.reader(io.StringIO(first)))
    assert rows[0][:2] == ["t", "action"] and len(rows) == 51
    assert {r[1] for r in rows[1:]} <= {"1", "2"}
    assert main(["replay", "--config", str(p), "--replication", "5"]) == 2


def test_oracle_check(tmp_path, capsys):
    g = tmp_path / "g.txt"
    g.write_text("# diamond\n4 4 0 3\n0 1\n0 2\n1 3\n2 3\n")
    assert main(["oracle-check", "--dag", str(g), "--trials", "50", "--seed", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["passed"] and out["paths"] == 2
    g.write_text("3 3 0 2\n0 1\n1 2\n2 0\n")
    assert main(["oracle-check", "--dag", str(g), "--trials", "5"]) == 2


def test_sweep(tmp_path, capsys):
    p = write_config(tmp_path)
    assert main(["sweep", "--config", str(p), "--vary", "n=8,16"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert [o["n"] for o in out] == [8, 16]
    assert main(["sweep", "--config", str(p), "--vary", "eta=1"]) == 2
