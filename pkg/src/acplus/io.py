"""CSV/JSON emission and ingestion for profiles, runs and reports.

All numeric CSV fields use %.17g so values round-trip exactly through the
readers.  JSON files are written with sorted keys; wall time, the only
non-deterministic field, is confined to run sidecars and flagged as such.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .analysis import ConvergenceReport
from .pde import SnapshotSeries
from .profile import ProfileSolution

FMT = "%.17g"


def _g(value: float) -> str:
    return FMT % value


def write_profile(sol: ProfileSolution, base: Path) -> tuple[Path, Path]:
    """Write <base>.csv (columns s, phi, psi) and <base>.json (header)."""
    base = Path(base)
    csv_path = Path(str(base) + ".csv")
    json_path = Path(str(base) + ".json")
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s", "phi", "psi"])
        for s, p, q in zip(sol.s_grid, sol.phi, sol.psi):
            writer.writerow([_g(s), _g(p), _g(q)])
    header = {
        "alpha": sol.alpha,
        "c": sol.c,
        "c_identity": sol.c_identity,
        "ds": sol.ds,
        "residual_at_end": sol.residual_at_end,
        "kind": sol.kind,
        "mu": sol.mu,
        "alpha_mu": sol.alpha_mu,
        "fprime_aplus": sol.fprime_aplus,
        "a_plus": sol.a_plus,
    }
    json_path.write_text(json.dumps(header, sort_keys=True, indent=2) + "\n")
    return csv_path, json_path


def read_profile(base: Path) -> ProfileSolution:
    """Rebuild a ProfileSolution from its CSV/JSON pair."""
    base = Path(base)
    header = json.loads(Path(str(base) + ".json").read_text())
    data = np.genfromtxt(Path(str(base) + ".csv"), delimiter=",", skip_header=1)
    data = np.atleast_2d(data)
    return ProfileSolution(
        alpha=header["alpha"],
        c=header["c"],
        s_grid=data[:, 0],
        phi=data[:, 1],
        psi=data[:, 2],
        ds=header["ds"],
        residual_at_end=header["residual_at_end"],
        c_identity=header["c_identity"],
        kind=header["kind"],
        mu=header["mu"],
        alpha_mu=header["alpha_mu"],
        fprime_aplus=header["fprime_aplus"],
        a_plus=header["a_plus"],
    )


def write_snapshots(series: SnapshotSeries, grid, base: Path) -> tuple[Path, Path]:
    """Write one long-format CSV (t, x, u, eta) and a JSON sidecar per run."""
    base = Path(base)
    csv_path = Path(str(base) + ".csv")
    json_path = Path(str(base) + ".json")
    x = grid.nodes()
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x", "u", "eta"])
        for snap in series.snapshots:
            ts = _g(snap.t)
            for xi, ui, ei in zip(x, snap.u, snap.eta):
                writer.writerow([ts, _g(xi), _g(ui), _g(ei)])
    sidecar = {
        "config": {
            "scheme": series.config.scheme,
            "dt": series.config.dt,
            "t_end": series.config.t_end,
            "bc_left": series.config.bc_left,
            "bc_right": series.config.bc_right,
            "snapshot_every": series.config.snapshot_every,
        },
        "grid": {"x_min": grid.x_min, "x_max": grid.x_max, "n": grid.n},
        "alpha": series.alpha,
        "r_series": [[s.t, s.r] for s in series.snapshots],
        "min_increment": series.min_increment,
        "boundary_flag": series.boundary_flag,
        "non_deterministic": {"wall_time_s": series.wall_time},
    }
    json_path.write_text(json.dumps(sidecar, sort_keys=True, indent=2) + "\n")
    return csv_path, json_path


def read_snapshot_table(csv_path: Path) -> np.ndarray:
    """Read a run CSV back as a (rows, 4) float array."""
    return np.atleast_2d(np.genfromtxt(csv_path, delimiter=",", skip_header=1))


def write_family_table(entries, path: Path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "c", "c_identity", "error"])
        for e in entries:
            writer.writerow([_g(e.alpha), _g(e.c), _g(e.c_identity), e.error or ""])
    return path


def write_convergence_report(report: ConvergenceReport, base: Path) -> tuple[Path, Path]:
    """JSON summary plus a CSV of the underlying error series."""
    base = Path(base)
    json_path = Path(str(base) + ".json")
    csv_path = Path(str(base) + "_series.csv")
    payload = {
        "x0_fit": report.x0_fit,
        "kappa_fit": report.kappa_fit,
        "K_fit": report.K_fit,
        "r_squared": report.r_squared,
        "negative_rate": report.negative_rate,
        "t_start": report.t_start,
        "floor": report.floor,
    }
    json_path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "sup_error", "shift", "r"])
        for p in report.error_series:
            writer.writerow([_g(p.t), _g(p.sup_error), _g(p.shift),
                             _g(p.r) if p.r is not None else ""])
    return json_path, csv_path


def write_json(payload: dict, path: Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + "\n")
    return path


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, float) and math.isnan(obj):
        return None
    raise TypeError(f"cannot serialize {type(obj)}")
