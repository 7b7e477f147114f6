import json
import math
import subprocess
import sys

import numpy as np
import pytest

from choreo8.cli import EXIT_OK, EXIT_VALIDATION, main
from choreo8.io import read_csv


def run(*argv):
    return main([str(a) for a in argv])


def test_simulate_grid_and_report(tmp_path):
    out = tmp_path / "sim"
    assert run("simulate", "--grid-step-deg", 30, "--out", out, "--check") == EXIT_OK
    header, rows = read_csv(out / "trajectory.csv")
    assert len(rows) == 13 and header[:3] == ["tau", "r1x", "r1y"]
    assert rows[0][1] == 0.746156
    rep = json.loads((out / "trajectory.report.json").read_text())
    assert rep["full_period"] and rep["closure"] < 1e-5
    assert rep["energy_initial"] == pytest.approx(-0.6215955544, abs=1e-9)
    man = json.loads((out / "simulate.manifest.json").read_text())
    assert man["command"] == "simulate" and man["tolerance"] == 1e-12
    assert str(out / "trajectory.csv") in man["outputs"]
    assert set(man["versions"]) >= {"numpy", "scipy", "kernel_backend"}


def test_simulate_half_period(tmp_path):
    out = tmp_path / "half.csv"
    assert run("simulate", "--tau-end-deg", 180, "--grid-step-deg", 45, "--out", out) == EXIT_OK
    _, rows = read_csv(out)
    assert rows[-1][0] == pytest.approx(180.0)
    assert abs(rows[-1][2]) < 1e-5


def test_simulate_json_and_si(tmp_path):
    cfg = tmp_path / "u.json"
    cfg.write_text(json.dumps({"R_m": 1.0, "m_total_kg": 1.0}))
    out = tmp_path / "j"
    assert run("simulate", "--format", "json", "--config", cfg, "--grid-step-deg", 90, "--out", out) == EXIT_OK
    rows = json.loads((out / "trajectory.json").read_text())
    assert len(rows) == 5 and set(rows[0]) >= {"tau", "r1x", "v3y"}
    si = json.loads((out / "trajectory.report.json").read_text())["si"]
    assert si["period_days"] == pytest.approx(8.9017, abs=1e-3)


def test_state_file_and_bad_state(tmp_path):
    st = tmp_path / "s.json"
    st.write_text(json.dumps({"r": [[1, 0], [0, 0], [-1, 0]], "v": [[0, 0.5], [0, -1], [0, 0.5]]}))
    assert run("simulate", "--state", st, "--tau-end-deg", 10, "--out", tmp_path / "o") == EXIT_OK
    st.write_text("{}")
    assert run("simulate", "--state", st, "--out", tmp_path / "o") == EXIT_VALIDATION


def test_events_check(tmp_path):
    out = tmp_path / "ev"
    # the six-decimal start misses the 1e-6 collinear velocity checks
    assert run("events", "--out", out, "--check") == EXIT_VALIDATION
    assert run("events", "--out", out) == EXIT_OK
    d = json.loads((out / "events.json").read_text())
    assert len(d["events"]) == 12 and len(d["collinear"]) == 6 and len(d["isosceles"]) == 6
    failed = {k for k, c in d["checks"].items() if not c["passed"]}
    assert failed <= {"collinear_velocity_ratio", "collinear_speed_ratio"}
    assert run("events", "--initial", "reference", "--out", tmp_path / "ref", "--check") == EXIT_OK


def test_events_off_orbit(tmp_path):
    st = tmp_path / "s.json"
    st.write_text(json.dumps({"r": [[1, 0], [0, 0], [-1, 0]], "v": [[0, 0.5], [0, -1], [0, 0.5]]}))
    assert run("events", "--state", st, "--tol", 1e-9, "--out", tmp_path / "o") in (2, 3)


def test_fit_commands(tmp_path):
    assert run("fit", "perimeter", "--grid-step-deg", 0.5, "--out", tmp_path) == EXIT_OK
    d = json.loads((tmp_path / "fit_perimeter.json").read_text())
    assert d["multipliers"] == [6, 12]
    assert d["coefficients"][0] == pytest.approx(2.763093, abs=1e-5)
    assert (tmp_path / "fit_perimeter.residual.csv").exists()
    assert run("fit", "r23", "--method", "collocation", "--out", tmp_path) == EXIT_OK
    d = json.loads((tmp_path / "fit_r23.json").read_text())
    assert d["multipliers"] == [2]
    assert d["coefficients"] == pytest.approx([0.928549, -0.451923], abs=1e-3)
    assert run("fit", "r12", "--multipliers", "", "--out", tmp_path) == EXIT_OK
    assert json.loads((tmp_path / "fit_r12.json").read_text())["multipliers"] == []
    assert run("fit", "r12", "--multipliers", "2,x", "--out", tmp_path) == EXIT_VALIDATION
    assert run("fit", "r12", "--multipliers", "2,2", "--out", tmp_path) == EXIT_VALIDATION


def test_curves_command(tmp_path):
    assert run("curves", "lb", "--samples", 101, "--out", tmp_path) == EXIT_OK
    rep = json.loads((tmp_path / "curve_lb.report.json").read_text())
    assert rep["theta_T"] == pytest.approx(34.26465, abs=1e-4)
    _, rows = read_csv(tmp_path / "curve_lb.csv")
    assert len(rows) == 101
    assert run("curves", "hp", "--k", 1.4706, "--fit-tangent", 42.8434, "--fit-collinear", 14.0688,
               "--out", tmp_path) == EXIT_OK
    fit = json.loads((tmp_path / "curve_hp.hippopede_fit.json").read_text())
    assert fit["k"] == pytest.approx(1.4204, abs=1e-3)
    assert run("curves", "hp", "--k", 1.0, "--out", tmp_path) == EXIT_VALIDATION
    assert run("curves", "ring", "--out", tmp_path) == EXIT_VALIDATION
    assert run("curves", "cardioid", "--out", tmp_path) == EXIT_VALIDATION


def test_compare_command(tmp_path):
    assert run("compare", "--out", tmp_path) == EXIT_OK
    d = json.loads((tmp_path / "compare.json").read_text())
    rows = {r["row"]: r for r in d["rows"]}
    assert rows["length_a1"]["ratio"] == pytest.approx(1.024368, abs=1e-4)
    assert run("compare", "--against", "lb", "--out", tmp_path / "lb") == EXIT_OK


def test_diagrams_command(tmp_path):
    assert run("diagrams", "--grid-step-deg", 1, "--out", tmp_path) == EXIT_OK
    for name in ("separations", "hodograph", "acceleration", "cog", "pk_ratio", "pedal", "chords", "energies",
                 "arclength", "ds_dr", "angular_momentum", "relative_midpoint_relative"):
        assert (tmp_path / f"{name}.csv").exists(), name
    marks = json.loads((tmp_path / "diagram_marks.json").read_text())
    assert marks["hodograph"]["winding"] == 0
    assert marks["separations"]["l_max"] == pytest.approx(1.38047, abs=1e-4)
    assert run("diagrams", "--kind", "hodograph", "--particle", 2, "--out", tmp_path / "h") == EXIT_OK


def test_deterministic_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run("simulate", "--grid-step-deg", 5, "--out", a)
    run("simulate", "--grid-step-deg", 5, "--out", b)
    assert a.read_bytes() == b.read_bytes()


def test_tolerance_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("CHOREO8_TOL", "1e-10")
    out = tmp_path / "o"
    assert run("simulate", "--tau-end-deg", 30, "--out", out) == EXIT_OK
    assert json.loads((out / "simulate.manifest.json").read_text())["tolerance"] == 1e-10
    monkeypatch.setenv("CHOREO8_TOL", "tight")
    assert run("simulate", "--out", out) == EXIT_VALIDATION
    monkeypatch.delenv("CHOREO8_TOL")
    assert run("simulate", "--tol", 1e-3, "--out", out) == EXIT_VALIDATION


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "choreo8.cli", "simulate", "--tau-end-deg", "30",
                          "--grid-step-deg", "30", "--out", str(tmp_path / "t.csv")],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    _, rows = read_csv(tmp_path / "t.csv")
    assert np.array(rows).shape == (2, 13)
    assert math.isclose(rows[1][0], 30.0)
