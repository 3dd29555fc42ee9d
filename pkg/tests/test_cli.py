import json
import subprocess
import sys

import pytest

from freewave.cli import main
from freewave.report import read_profile


def report(out):
    return json.loads((out / "report.json").read_text())


def test_solve_example(tmp_path):
    out = tmp_path / "solve"
    code = main(["solve", "--k", "1", "--amplitude", "0.05", "--n", "64", "--out", str(out)])
    rep = report(out)
    assert code == 0 and rep["exit_code"] == 0
    assert rep["result"]["residual_max"] < 1e-10
    assert rep["schema_version"] == "1.0"
    cols = read_profile(out / "profile.csv")
    assert list(cols) == ["x", "zeta", "phi_s", "kinematic_residual", "bernoulli_residual"]
    assert cols["x"].size == 64


def test_validate_trivial_suite(tmp_path):
    code = main(["validate", "--suite", "trivial", "--out", str(tmp_path)])
    rep = report(tmp_path)
    assert code == 0
    assert all(v < 1e-10 for v in rep["checks"].values())


def test_negative_amplitude_config(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text('command = "solve"\namplitude = -1.0\n')
    code = main(["--config", str(cfg), "--out", str(tmp_path / "o")])
    rep = report(tmp_path / "o")
    assert code == 3
    assert rep["error"]["message"] == "amplitude must be nonnegative"


def test_unknown_key_rejected(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text('command = "solve"\nwavelength = 3.0\n')
    assert main(["--config", str(cfg), "--out", str(tmp_path / "o")]) == 3
    assert "wavelength" in report(tmp_path / "o")["error"]["message"]


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('command = "evolve"\nn = 16\nm = 12\nsteps = 3\namplitude = 0.01\n')
    out = tmp_path / "o"
    assert main(["--config", str(cfg), "--steps", "5", "--out", str(out)]) == 0
    rep = report(out)
    assert rep["config"]["steps"] == 5 and rep["config"]["n"] == 16


def test_solver_nonconvergence_exit_code(tmp_path):
    code = main(["solve", "--amplitude", "0.35", "--n", "32", "--max-iter", "3",
                 "--out", str(tmp_path)])
    assert code == 2
    assert report(tmp_path)["status"] == "not_converged"


def test_evolve_fencepost_and_pde_audit(tmp_path):
    code = main(["evolve", "--n", "16", "--m", "12", "--steps", "100", "--amplitude", "0.01",
                 "--out", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "conservation.csv").read_text().splitlines()
    assert lines[0] == "t,H,mass" and len(lines) == 102
    assert float(lines[1].split(",")[0]) == 0.0
    assert report(tmp_path)["result"]["mass_drift"] < 1e-10


def test_sweep_cardinality(tmp_path):
    code = main(["sweep", "--amplitude", "0.05", "--n", "32", "--out", str(tmp_path)])
    assert code == 0
    assert len(list(tmp_path.glob("profile_*.csv"))) == 5
    branch = (tmp_path / "branch.csv").read_text().splitlines()
    assert branch[0] == "a,lambda,residual" and len(branch) == 6


def test_reports_are_byte_identical(tmp_path):
    # the report records the output path, so rerun into the same directory
    args = ["solve", "--amplitude", "0.02", "--n", "32", "--out", str(tmp_path)]
    main(args)
    first = {name: (tmp_path / name).read_bytes() for name in ("report.json", "profile.csv")}
    main(args)
    for name, a in first.items():
        assert (tmp_path / name).read_bytes() == a and b"\r\n" not in a


def test_profile_round_trip_audit(tmp_path):
    main(["solve", "--amplitude", "0.03", "--n", "32", "--out", str(tmp_path / "s")])
    lam = report(tmp_path / "s")["result"]["lambda"]
    code = main(["validate", "--suite", "profile", "--input", str(tmp_path / "s" / "profile.csv"),
                 "--lambda", repr(lam), "--out", str(tmp_path / "v")])
    rep = report(tmp_path / "v")
    assert code == 0
    assert rep["checks"]["kinematic_max"] < 1e-10 and rep["checks"]["bernoulli_max"] < 1e-10


def test_hodge_command(tmp_path):
    assert main(["hodge", "--n", "32", "--m", "24", "--amplitude", "0.1",
                 "--out", str(tmp_path)]) == 0
    checks = report(tmp_path)["checks"]
    assert checks["orthogonality"] < 1e-10 and checks["uniqueness"] < 1e-8


def test_rayleigh_command_reports(tmp_path):
    code = main(["rayleigh", "--mass", "0.05", "--n", "32", "--max-iter", "20",
                 "--out", str(tmp_path)])
    rep = report(tmp_path)
    assert code in (0, 2)
    assert rep["result"]["max_mass_error"] < 1e-12 and rep["result"]["monotone"]


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    proc = subprocess.run([sys.executable, "-m", "freewave", "validate",
                           "--out", str(blocker / "sub")], capture_output=True, text=True)
    assert proc.returncode == 1


@pytest.mark.parametrize("flag,value", [("--n", "7"), ("--m", "2"), ("--k", "-1"),
                                        ("--threads", "0")])
def test_invalid_numeric_ranges(tmp_path, flag, value):
    assert main(["solve", "--amplitude", "0.01", flag, value, "--out", str(tmp_path)]) == 3


def test_console_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "freewave", "--help"], capture_output=True,
                          text=True)
    assert proc.returncode == 0 and "--amplitude" in proc.stdout
