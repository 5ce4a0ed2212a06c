"""CLI dispatch, file formats, exit codes, atomic writes."""

import hashlib
import json
import math
import os

import numpy as np
import pytest

from siba import cli


def run_cli(args):
    return cli.main(args)


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as exc:
        run_cli(["frobnicate"])
    assert exc.value.code == 2


def test_missing_config_names_path(tmp_path, capsys):
    code = run_cli(["potential", "--config", str(tmp_path / "nope.json"),
                    "--out", str(tmp_path / "o.csv")])
    assert code == cli.EXIT_VALIDATION
    assert "nope.json" in capsys.readouterr().err


def test_full_mode_stability_precheck(tmp_path, capsys):
    code = run_cli(["simulate", "--mode", "full", "--dt", "1.0",
                    "--out", str(tmp_path / "t.csv")])
    assert code == cli.EXIT_VALIDATION
    assert "dt too coarse" in capsys.readouterr().err


def test_potential_csv_columns_and_roundtrip(tmp_path):
    out = tmp_path / "pot.csv"
    assert run_cli(["potential", "--grid", "101", "--out", str(out)]) == 0
    lines = out.read_text().split("\n")
    assert lines[0] == "x,f1,n1,U_tot,F"
    assert lines[-1] == ""  # trailing newline
    data = np.genfromtxt(out, delimiter=",", names=True)
    assert data.shape[0] == 101
    # full round-trip precision: U(0) reproduced bit-for-bit
    from siba import trap
    from siba.model import load_config
    from importlib import resources
    ref = resources.files("siba.data") / "reference_config.json"
    with resources.as_file(ref) as p:
        config = load_config(p)
    i = np.argmin(np.abs(data["x"]))
    assert data["U_tot"][i] == trap.potential(config, data["x"][i])
    # no temp files left behind
    assert not [f for f in os.listdir(tmp_path) if f.endswith(".tmp")]


def test_metrics_json(tmp_path):
    out = tmp_path / "m.json"
    assert run_cli(["metrics", "--ekin", "0.2", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["depth"] == pytest.approx(2 * math.atan(50.0))
    assert doc["turning_points"][0] < doc["minimum_position"] \
        < doc["turning_points"][1]
    assert doc["e_kin"] == pytest.approx(0.2 * doc["depth"])


def test_simulate_adiabatic_csv(tmp_path):
    out = tmp_path / "traj.csv"
    assert run_cli(["simulate", "--ekin", "0.1", "--periods", "2",
                    "--out", str(out)]) == 0
    data = np.genfromtxt(out, delimiter=",", names=True)
    assert set(data.dtype.names) == {"t", "x", "p", "n_1", "U", "H_eff"}
    # H_eff stays inside the O(dt^2) Verlet oscillation band
    assert np.max(np.abs(data["H_eff"] - data["H_eff"][0])) \
        < 5e-4 * abs(data["H_eff"][0])


def test_manifest_records_config_hash(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = {"modes": [{"profile": {"kind": "fundamental"}, "kappa_ex": 0.5,
                      "kappa_in": 0.5, "drive_flux_sq": 1.0,
                      "detuning_tilde": -5.0, "eta": 10.0}]}
    cfg_path = tmp_path / "c.json"
    cfg_path.write_text(json.dumps(cfg))
    assert run_cli(["metrics", "--config", str(cfg_path),
                    "--out", str(tmp_path / "m.json")]) == 0
    manifest = json.loads((tmp_path / "metrics.manifest.json").read_text())
    expected = hashlib.sha256(cfg_path.read_bytes()).hexdigest()
    assert manifest["config"]["sha256"] == expected
    assert manifest["subcommand"] == "metrics"
    assert manifest["versions"]["siba"]


def test_eta_scan_csv(tmp_path):
    assert run_cli(["eta-scan", "--q", "1e4,1e6", "--nu", "1",
                    "--points", "40", "--out", str(tmp_path)]) == 0
    data = np.genfromtxt(tmp_path / "figS1.csv", delimiter=",", names=True)
    assert set(data.dtype.names) == {"kr", "eta_Q10000", "eta_Q1e06"}
    meta = json.loads((tmp_path / "figS1.meta.json").read_text())
    assert "optima" in meta["provenance"]


def test_validate_subset(tmp_path, capsys):
    code = run_cli(["validate", "--criteria", "1,3,7",
                    "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("PASS") == 4  # three criteria plus the overall line
    report = json.loads((tmp_path / "validate.report.json").read_text())
    assert len(report) == 3 and all(r["passed"] for r in report)


def test_fig2_outputs(tmp_path):
    assert run_cli(["fig2", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "fig2.csv").exists()
    meta = json.loads((tmp_path / "fig2.meta.json").read_text())
    assert meta["provenance"]["params"]["eta_values"] == [0.1, 10.0, 50.0]
