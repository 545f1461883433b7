import csv
import json
import subprocess
import sys

import pytest

from splitplan.cli import main
from splitplan.profile import resnet18_profile, save_profile
from splitplan.scenario import sample_scenario, save_scenario


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "s.json"
    save_scenario(sample_scenario(6, 20e9, resnet18_profile(), 11), path)
    return path


@pytest.fixture
def toy_file(tmp_path, toy_scenario):
    path = tmp_path / "toy.json"
    save_scenario(toy_scenario, path)
    return path


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_solve(scenario_file, tmp_path, capsys):
    out = tmp_path / "plan.json"
    assert main(["solve", "--scenario", str(scenario_file), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert set(doc) >= {"best_cuts", "shares_hz", "client_latencies_s", "round_latency_s",
                        "search_table"}
    assert len(doc["shares_hz"]) == 6
    assert len(doc["search_table"]) == 45
    assert doc["search_table"][0]["cuts"] == doc["best_cuts"]
    assert "best cuts" in capsys.readouterr().out


def test_solve_with_profile_override(scenario_file, tmp_path, toy):
    save_profile(toy, tmp_path / "toy_profile.json")
    out = tmp_path / "plan.json"
    assert main(["solve", "--scenario", str(scenario_file), "--profile",
                 str(tmp_path / "toy_profile.json"), "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())["search_table"]) == 6


def test_solve_missing_file(tmp_path, capsys):
    assert main(["solve", "--scenario", str(tmp_path / "nope.json")]) == 2
    assert "nope.json" in capsys.readouterr().err


def test_solve_malformed(tmp_path, scenario_file, capsys):
    doc = json.loads(scenario_file.read_text())
    del doc["clients"][0]["uplink_bps"]
    scenario_file.write_text(json.dumps(doc))
    assert main(["solve", "--scenario", str(scenario_file)]) == 2
    assert "uplink_bps" in capsys.readouterr().err


def test_sweep_capacity(tmp_path):
    out = tmp_path / "cap.csv"
    assert main(["sweep-capacity", "--n", "20", "--steps", "5", "--seed", "3",
                 "--out", str(out)]) == 0
    rows = _rows(out)
    assert list(rows[0]) == ["fs_hz", "lscra_s", "bench_a_s", "bench_b_s"]
    assert [float(r["fs_hz"]) for r in rows] == [10e9, 20e9, 30e9, 40e9, 50e9]
    lscra = [float(r["lscra_s"]) for r in rows]
    assert all(b <= a for a, b in zip(lscra, lscra[1:]))
    for r in rows:
        assert float(r["lscra_s"]) <= float(r["bench_a_s"])
        assert float(r["lscra_s"]) <= float(r["bench_b_s"])


def test_sweep_capacity_single_step(tmp_path):
    out = tmp_path / "cap.csv"
    assert main(["sweep-capacity", "--n", "5", "--steps", "1", "--out", str(out)]) == 0
    assert len(_rows(out)) == 1


def test_sweep_clients(tmp_path):
    out = tmp_path / "n.csv"
    assert main(["sweep-clients", "--n-min", "5", "--n-max", "25", "--steps", "5",
                 "--out", str(out)]) == 0
    rows = _rows(out)
    assert list(rows[0]) == ["n", "lscra_s", "bench_a_s", "bench_b_s"]
    assert [int(r["n"]) for r in rows] == [5, 10, 15, 20, 25]
    lscra = [float(r["lscra_s"]) for r in rows]
    assert all(b >= a for a, b in zip(lscra, lscra[1:]))
    assert all(float(r["bench_a_s"]) - float(r["lscra_s"]) >= 0 for r in rows)


def test_sweep_clients_single_row(tmp_path):
    out = tmp_path / "n.csv"
    assert main(["sweep-clients", "--n-min", "7", "--n-max", "7", "--out", str(out)]) == 0
    assert len(_rows(out)) == 1


def test_sweep_trials_and_byte_identical(tmp_path, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep-capacity", "--n", "8", "--steps", "3", "--trials", "2", "--seed", "9"]
    monkeypatch.setenv("SPLITPLAN_THREADS", "1")
    assert main(args + ["--out", str(a)]) == 0
    monkeypatch.setenv("SPLITPLAN_THREADS", "3")
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_toy(toy_file, tmp_path, capsys):
    out = tmp_path / "trace.csv"
    assert main(["simulate", "--scenario", str(toy_file), "--rounds", "5",
                 "--out", str(out)]) == 0
    text = capsys.readouterr().out
    rel = float(text.split("rel ")[1].split(")")[0])
    assert rel <= 1e-9
    makespans = text.split("round makespans: ")[1].splitlines()[0].split()
    assert len(makespans) == 5 and len(set(makespans)) == 1
    rows = _rows(out)
    assert list(rows[0]) == ["client", "step", "phase", "start_s", "end_s"]


def test_simulate_with_plan(scenario_file, tmp_path):
    plan = tmp_path / "plan.json"
    assert main(["solve", "--scenario", str(scenario_file), "--out", str(plan)]) == 0
    assert main(["simulate", "--scenario", str(scenario_file), "--plan", str(plan),
                 "--out", str(tmp_path / "t.csv")]) == 0


def test_simulate_invalid_plan(scenario_file, tmp_path):
    plan = tmp_path / "plan.json"
    plan.write_text(json.dumps({"best_cuts": [5, 2], "shares_hz": [1] * 6}))
    assert main(["simulate", "--scenario", str(scenario_file), "--plan", str(plan)]) == 2
    plan.write_text("{not json")
    assert main(["simulate", "--scenario", str(scenario_file), "--plan", str(plan)]) == 2


def test_entry_point(toy_file, tmp_path):
    proc = subprocess.run([sys.executable, "-m", "splitplan", "solve", "--scenario",
                           str(toy_file), "--out", str(tmp_path / "p.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "splitplan", "solve", "--scenario",
                           str(tmp_path / "missing.json")], capture_output=True, text=True)
    assert proc.returncode == 2


def test_internal_error_exit_code(toy_file, monkeypatch, capsys):
    from splitplan import cli
    from splitplan.errors import InternalError

    def broken(scenario):
        raise InternalError("bisection did not converge")

    monkeypatch.setattr(cli, "solve_lscra", broken)
    assert main(["solve", "--scenario", str(toy_file)]) == 3
    assert "internal error" in capsys.readouterr().err
