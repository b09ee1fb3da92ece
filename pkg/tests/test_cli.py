import json
import math
from pathlib import Path

import numpy as np
import pytest

from unipark.cli import main
from unipark.scenarios import (CSV_HEADER, load_scenario, parse_scenario,
                               read_trajectory_csv, write_trajectory_csv)
from unipark.errors import ScenarioError
from unipark.sim import integrate

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"
FIG2 = SCENARIO_DIR / "fig2_bidirectional.json"


def minimal_doc(**overrides):
    doc = {
        "schema": 1,
        "controller": {"family": "bidirectional",
                       "gains": {"k1": 1.0, "k2": 1.0, "k3": 1.0, "k4": 1.0}},
        "initial": {"rho": 1.0, "delta": 0.4, "gamma": -0.2},
        "sim": {"dt": 1e-2, "horizon": 0.5},
    }
    doc.update(overrides)
    return doc


def test_validate_ok():
    assert main(["validate", str(FIG2)]) == 0


def test_validate_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["validate", str(bad)]) == 2
    assert main(["validate", str(tmp_path / "missing.json")]) == 2


@pytest.mark.parametrize("mutate,desc", [
    (lambda d: d.update(extra=1), "unknown top key"),
    (lambda d: d.update(schema=2), "schema version"),
    (lambda d: d["controller"].update(family="warp"), "unknown family"),
    (lambda d: d["controller"]["gains"].update(k1=-1.0), "negative gain"),
    (lambda d: d["initial"].update(rho=0.0), "nonpositive rho"),
    (lambda d: d["sim"].update(dt="fast"), "non-numeric dt"),
    (lambda d: d["initial"].update(junk=3), "unknown initial key"),
])
def test_parse_rejections(mutate, desc):
    doc = minimal_doc()
    mutate(doc)
    with pytest.raises(ScenarioError):
        parse_scenario(doc)


def test_initial_angles_are_wrapped():
    doc = minimal_doc()
    doc["initial"].update(delta=2 * math.pi + 0.4, gamma=-2 * math.pi - 0.2)
    loaded = parse_scenario(doc)
    assert loaded.scenario.initial.delta == pytest.approx(0.4, abs=1e-12)
    assert loaded.scenario.initial.gamma == pytest.approx(-0.2, abs=1e-12)


def test_run_writes_outputs_and_round_trips(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["run", str(FIG2), "--csv", "out.csv", "--metrics", "m.json"]) == 0
    metrics = json.loads((tmp_path / "m.json").read_text())
    assert set(metrics) == {"settling_time", "lambda_hat", "K_hat", "max_v",
                            "max_omega", "min_y", "J", "final_V", "status"}
    assert metrics["status"] == "Parked"

    channels = read_trajectory_csv(tmp_path / "out.csv")
    loaded = load_scenario(FIG2)
    traj = integrate(loaded.scenario)
    assert (channels["t"] == traj.times).all()
    assert (channels["rho"] == traj.states[:, 0]).all()
    assert (channels["omega"] == traj.inputs[:, 1]).all()
    assert (channels["V"] == traj.v_values).all()
    assert np.isnan(channels["eps1_hat"]).all()
    assert (np.diff(channels["t"]) > 0).all()


def test_csv_header_exact(tmp_path):
    loaded = load_scenario(FIG2)
    scenario = loaded.scenario
    short = integrate(type(scenario)(controller=scenario.controller,
                                     initial=scenario.initial, dt=1e-2, horizon=0.1))
    path = tmp_path / "t.csv"
    write_trajectory_csv(path, short)
    header = path.read_text().splitlines()[0]
    assert header == ",".join(CSV_HEADER)
    assert header == "t,rho,delta,gamma,x,y,theta,v,omega,V,l_running,eps1_hat,eps2_hat"


def test_run_exit_codes(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(minimal_doc(schema=5)))
    assert main(["run", str(bad)]) == 2


def test_suite_empty_list(tmp_path, capsys):
    listing = tmp_path / "empty.txt"
    listing.write_text("# nothing here\n")
    assert main(["suite", str(listing)]) == 0
    assert "nothing to run" in capsys.readouterr().out


def test_suite_policy_flag(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    doc = minimal_doc()
    doc["assertions"] = {"final_norm_lt": 1e-12}   # unattainable in 0.5 s
    failing = tmp_path / "failing.json"
    failing.write_text(json.dumps(doc))
    listing = tmp_path / "list.txt"
    listing.write_text("failing.json\n")
    assert main(["suite", str(listing)]) == 1
    assert main(["suite", str(listing), "--no-strict"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" in out


def test_bundled_suite_subset(tmp_path, monkeypatch):
    """Two bundled scenarios run end to end with their embedded assertions."""
    monkeypatch.chdir(tmp_path)
    listing = tmp_path / "subset.txt"
    listing.write_text(f"{SCENARIO_DIR / 'fig9_pt_T2.json'}\n"
                       f"{SCENARIO_DIR / 'fig10_curb_mid.json'}\n")
    assert main(["suite", str(listing)]) == 0


def test_suite_parallel(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    doc = minimal_doc()
    for i in range(3):
        (tmp_path / f"s{i}.json").write_text(json.dumps(doc))
    listing = tmp_path / "list.txt"
    listing.write_text("\n".join(f"s{i}.json" for i in range(3)))
    monkeypatch.setenv("PARK_THREADS", "2")
    assert main(["suite", str(listing)]) == 0
