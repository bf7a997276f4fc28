import json

import numpy as np
import pytest

from acplus import cli
from acplus.analysis import ErrorPoint, fit_exponential_rate
from acplus.io import (
    read_profile,
    read_snapshot_table,
    write_convergence_report,
    write_profile,
    write_snapshots,
)
from acplus.pde import Grid1D, IMEX_PROJECTED, SimConfig, run_simulation
from acplus.profile import evaluate_profile, solve_profile


@pytest.fixture(scope="module")
def small_sol(cubic):
    return solve_profile(cubic, -0.8, ds=5e-3)


def test_profile_round_trip(tmp_path, small_sol):
    base = tmp_path / "prof"
    write_profile(small_sol, base)
    back = read_profile(base)
    assert np.array_equal(back.s_grid, small_sol.s_grid)
    assert np.array_equal(back.phi, small_sol.phi)
    assert np.array_equal(back.psi, small_sol.psi)
    assert back.c == small_sol.c
    assert back.c_identity == small_sol.c_identity
    assert back.kind == small_sol.kind
    # the rebuilt solution evaluates identically
    xs = np.linspace(-1.0, 20.0, 97)
    assert np.array_equal(evaluate_profile(back, xs), evaluate_profile(small_sol, xs))


def _tiny_run(cubic, small_sol):
    grid = Grid1D(-8.0, 8.0, 199)
    u0 = evaluate_profile(small_sol, grid.nodes())
    cfg = SimConfig(scheme=IMEX_PROJECTED, dt=1e-2, t_end=0.1,
                    bc_left=-0.8, bc_right=float(evaluate_profile(small_sol, grid.x_max)),
                    snapshot_every=5)
    return grid, run_simulation(cfg, u0, cubic, grid, alpha=-0.8)


def test_snapshot_round_trip(tmp_path, cubic, small_sol):
    grid, series = _tiny_run(cubic, small_sol)
    csv_path, json_path = write_snapshots(series, grid, tmp_path / "run")
    table = read_snapshot_table(csv_path)
    n_rows = len(series.snapshots) * grid.n
    assert table.shape == (n_rows, 4)
    # exact float round trip of the last snapshot
    last = table[-grid.n:]
    assert np.array_equal(last[:, 2], series.snapshots[-1].u)
    assert np.array_equal(last[:, 3], series.snapshots[-1].eta)
    sidecar = json.loads(json_path.read_text())
    assert sidecar["config"]["scheme"] == IMEX_PROJECTED
    assert len(sidecar["r_series"]) == len(series.snapshots)
    assert "wall_time_s" in sidecar["non_deterministic"]


def test_outputs_deterministic(tmp_path, cubic, small_sol):
    paths = []
    for tag in ("a", "b"):
        grid, series = _tiny_run(cubic, small_sol)
        paths.append(write_snapshots(series, grid, tmp_path / f"run_{tag}"))
    csv_a, json_a = paths[0]
    csv_b, json_b = paths[1]
    assert csv_a.read_bytes() == csv_b.read_bytes()
    side_a = json.loads(json_a.read_text())
    side_b = json.loads(json_b.read_text())
    side_a.pop("non_deterministic")
    side_b.pop("non_deterministic")
    assert side_a == side_b


def test_convergence_report_io(tmp_path):
    ts = np.linspace(0.0, 10.0, 21)
    pts = [ErrorPoint(float(t), 2.0 * np.exp(-0.5 * t), -0.1 * t, -0.1 * t) for t in ts]
    rep = fit_exponential_rate(pts, t_start=0.0, c_alpha=-0.1)
    json_path, csv_path = write_convergence_report(rep, tmp_path / "conv")
    payload = json.loads(json_path.read_text())
    assert payload["kappa_fit"] == pytest.approx(0.5, rel=1e-9)
    table = np.atleast_2d(np.genfromtxt(csv_path, delimiter=",", skip_header=1))
    assert table.shape == (21, 4)


def test_cli_profile_and_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"ds": 5e-3}))
    out = tmp_path / "out"
    rc = cli.main(["profile", "--config", str(cfg), "--out", str(out), "--alpha", "-0.8"])
    assert rc == 0
    assert (out / "profile_alpha-0.8000.csv").exists()
    assert (out / "profile_alpha-0.8000.json").exists()
    text = capsys.readouterr().out
    assert "c_identity" in text

    # inadmissible level: config error
    rc = cli.main(["profile", "--config", str(cfg), "--out", str(out), "--alpha", "0.5"])
    assert rc == cli.EXIT_CONFIG


def test_cli_sweep_monotone(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"ds": 5e-3}))
    out = tmp_path / "out"
    # leading dash requires the '=' form so argparse does not read it as a flag
    rc = cli.main(["sweep", "--config", str(cfg), "--out", str(out),
                   "--alpha-list=-0.9:-0.1:0.2"])
    assert rc == 0
    table = np.genfromtxt(out / "family.csv", delimiter=",", skip_header=1, usecols=(0, 1, 2))
    assert table.shape[0] == 5
    cs = table[:, 1]
    assert np.all(np.diff(cs) < 0.0)  # strictly decreasing in alpha


def test_cli_simulate(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "ds": 5e-3,
        "grid": {"x_min": -8.0, "x_max": 8.0, "n": 399},
        "sim": {"dt": 5e-3, "t_end": 0.2, "snapshot_every": 10},
    }))
    out = tmp_path / "out"
    rc = cli.main(["simulate", "--config", str(cfg), "--out", str(out), "--alpha", "-0.8"])
    assert rc == 0
    assert (out / "run.csv").exists()
    assert "fitted_drift" in capsys.readouterr().out


def test_cli_simulate_cfl_guard(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "ds": 5e-3,
        "grid": {"x_min": -8.0, "x_max": 8.0, "n": 399},
        "sim": {"scheme": "explicit_positive_part", "dt": 5e-3, "t_end": 0.2},
    }))
    rc = cli.main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o"), "--alpha", "-0.8"])
    assert rc == cli.EXIT_CONFIG


def test_cli_verify_single_and_sabotage(tmp_path, capsys, monkeypatch):
    out = tmp_path / "out"
    rc = cli.main(["verify", "--out", str(out), "--only", "velocity-identity"])
    assert rc == 0
    report = json.loads((out / "verify_report.json").read_text())
    assert report["all_passed"]
    assert report["criteria"][0]["name"] == "velocity-identity"
    assert "[PASS] velocity-identity" in capsys.readouterr().out

    # a sabotaged tolerance must flip the same criterion to a failure
    monkeypatch.setenv("ACPLUS_TOL_SCALE_VELOCITY_IDENTITY", "1e-20")
    rc = cli.main(["verify", "--out", str(out), "--only", "velocity-identity"])
    assert rc == cli.EXIT_ACCEPT_FAIL
    report = json.loads((out / "verify_report.json").read_text())
    assert not report["all_passed"]
    assert report["criteria"][0]["name"] == "velocity-identity"
    assert not report["criteria"][0]["passed"]
