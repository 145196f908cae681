from __future__ import annotations

import csv
import json
import subprocess
import sys

import pytest

from polyriemann.cli import main

MONO_NONUNIQ = ["--uL", "0.9,0.2", "--uR", "0.6705635395420806,0.5"]


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def test_solve_three_waves(tmp_path):
    assert run(tmp_path, "solve", "--model", "monotone", "--uL", "0.9,0.8", "--uR", "0.3,0.2",
               "--criterion", "it", "--samples", "10000") == 0
    data = json.loads((tmp_path / "solution.json").read_text())
    assert len(data["waves"]) == 3 and data["valid"]["valid"]
    assert set(data) >= {"model", "alpha", "UL", "UR", "waves", "valid"}
    with open(tmp_path / "profile.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["xi", "s", "c"] and len(rows) == 10001


def test_solve_identity_data(tmp_path):
    assert run(tmp_path, "solve", "--uL", "0.5,0.5", "--uR", "0.5,0.5") == 0
    assert json.loads((tmp_path / "solution.json").read_text())["waves"] == []


def test_solve_with_adsorption(tmp_path):
    assert run(tmp_path, "solve", "--alpha", "0.05", "--uL", "0.95,0.3", "--uR", "0.2,0.1") == 0
    kinds = [w["kind"] for w in json.loads((tmp_path / "solution.json").read_text())["waves"]]
    assert "CShock" in kinds


def test_no_admissible_solution_exit_code(tmp_path):
    assert run(tmp_path, "solve", "--model", "boomerang", "--criterion", "dsm",
               "--uL", "0.65,0.05", "--uR", "0.05,0.65") == 2


@pytest.mark.parametrize("argv", [
    ["solve", "--uL", "0.5", "--uR", "0.5,0.5"],
    ["solve", "--uL", "1.5,0.5", "--uR", "0.5,0.5"],
    ["solve", "--uL", "0.5,0.5", "--uR", "0.5,0.5", "--window", "2,1"],
    ["solve", "--uL", "0.5,0.5"],
    ["limit", "--um", "0.3,0.1", "--up", "0.6,0.8"],
    ["limit", "--um", "0.4,0.2", "--up", "0.4,0.2", "--alphas", "0.1,0.2"],
])
def test_malformed_input_exit_code(tmp_path, argv, capsys):
    try:
        code = run(tmp_path, *argv)
    except SystemExit as exc:  # argparse errors
        code = exc.code
    assert code == 1
    err = capsys.readouterr().err
    assert any(name in err for name in ("uL", "uR", "window", "um", "up", "f/s", "alphas", "required"))


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# test settings\nmodel = monotone\nalpha = 0.05\nsamples = 11\n")
    out = tmp_path / "a"
    assert main(["solve", "--config", str(cfg), "--alpha", "0", "--uL", "0.9,0.8", "--uR", "0.3,0.2",
                 "--out", str(out)]) == 0
    data = json.loads((out / "solution.json").read_text())
    assert data["alpha"] == 0.0
    assert len((out / "profile.csv").read_text().splitlines()) == 12
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert main(["solve", "--config", str(bad), "--uL", "0.5,0.5", "--uR", "0.5,0.5"]) == 1


def test_curves_outputs(tmp_path):
    assert run(tmp_path, "curves", "--u0", "0.5,0.3") == 0
    for kind in ("hugoniot", "integral", "contact"):
        lines = (tmp_path / f"curve_{kind}.csv").read_text().splitlines()
        assert lines[0] == "s,c,sigma_or_level" and len(lines) > 10


@pytest.mark.parametrize("um,up,verdict", [
    ("0.5,0.8", None, "Admissible"),
    ("0.5,0.2", None, "Admissible"),
])
def test_limit_command(tmp_path, um, up, verdict):
    from polyriemann.model import FluxModel, level_roots
    model = FluxModel.monotone()
    s, c = (float(v) for v in um.split(","))
    c_p = 0.3 if c > 0.5 else 0.6
    s_p = level_roots(model, c_p, model.f(s, c) / s, 0.0)["lower"]
    assert run(tmp_path, "limit", "--um", um, "--up", f"{s_p!r},{c_p}") == 0
    rep = json.loads((tmp_path / "limit_report.json").read_text())
    assert rep["verdict"] == verdict and len(rep["l1"]) == 7


def test_limit_command_crossing(tmp_path):
    from polyriemann.model import FluxModel, level_roots
    model = FluxModel.monotone()
    lv = model.f(0.55, 0.0) / 0.55
    s_m = level_roots(model, 0.2, lv, 0.0)["upper"]
    s_p = level_roots(model, 0.4, lv, 0.0)["lower"]
    assert run(tmp_path, "limit", "--um", f"{s_m!r},0.2", "--up", f"{s_p!r},0.4") == 0
    rep = json.loads((tmp_path / "limit_report.json").read_text())
    assert rep["verdict"] == "NotAdmissible" and rep["delta"] > 0


def test_validate_round_trip(tmp_path, capsys):
    assert run(tmp_path, "solve", "--uL", "0.95,0.3", "--uR", "0.2,0.1") == 0
    assert main(["validate", str(tmp_path / "solution.json")]) == 0
    data = json.loads((tmp_path / "solution.json").read_text())
    shock = next(w for w in data["waves"] if w["kind"] == "SShock")
    shock["speed"] += 1e-3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert main(["validate", str(bad)]) == 3
    assert main(["validate", str(tmp_path / "missing.json")]) == 1


def test_nonuniq_command(tmp_path):
    assert run(tmp_path, "nonuniq", *MONO_NONUNIQ) == 0
    assert json.loads((tmp_path / "nonuniq_distance.json").read_text())["l1"] > 0.01
    for name in ("single_contact", "three_wave"):
        assert json.loads((tmp_path / f"nonuniq_{name}.json").read_text())["valid"]["valid"]


def test_travwave_alpha_outside_range(tmp_path):
    assert run(tmp_path, "travwave", "--model", "boomerang", "--alphas", "0.6,0.3") == 2


def test_travwave_outputs(tmp_path):
    assert run(tmp_path, "travwave", "--model", "boomerang", "--alphas", "0.2", "--kappa", "1") == 0
    assert (tmp_path / "limit_study_kappa1.0.csv").read_text().startswith("alpha,sigma,")
    assert (tmp_path / "orbit_kappa1.0_alpha0.csv").read_text().startswith("xi,s,c\n")


def test_outputs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["solve", "--alpha", "0.05", "--uL", "0.3,0.3", "--uR", "0.9,0.7", "--out", str(out)]) == 0
        assert main(["nonuniq", *MONO_NONUNIQ, "--out", str(out)]) == 0
    for f in sorted(p.name for p in a.iterdir()):
        assert (a / f).read_bytes() == (b / f).read_bytes(), f


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "polyriemann.cli", "solve", "--uL", "0.5,0.5",
                           "--uR", "0.5,0.5", "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0
