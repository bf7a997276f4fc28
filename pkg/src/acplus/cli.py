"""Command-line entry points: profile, simulate, sweep and verify.

Configuration is a JSON document (see README); every flag has a config
counterpart and flags win.  Exit codes: 0 success, 1 acceptance failure,
2 configuration/precondition error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import acceptance, analysis, pde, profile
from .errors import ConfigError, LabError, NumericsError
from .io import (
    write_convergence_report,
    write_family_table,
    write_json,
    write_profile,
    write_snapshots,
)
from .potential import check_alpha, make_cubic, make_polynomial, validate_bistable

EXIT_OK = 0
EXIT_ACCEPT_FAIL = 1
EXIT_CONFIG = 2
EXIT_NUMERICS = 3


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def _nonlinearity(cfg: dict):
    entry = cfg.get("nonlinearity", {"kind": "cubic"})
    kind = entry.get("kind", "cubic")
    if kind == "cubic":
        nl = make_cubic()
    elif kind == "polynomial":
        nl = make_polynomial(entry["coeffs"], entry["roots"], entry["lambda"])
    else:
        raise ConfigError(f"unknown nonlinearity kind {kind!r}")
    report = validate_bistable(nl)
    if not report.passed:
        bad = ", ".join(c.name for c in report.failures())
        raise ConfigError(f"nonlinearity failed validation: {bad}")
    return nl


def _grid(cfg: dict) -> pde.Grid1D:
    g = cfg.get("grid", {})
    return pde.Grid1D(
        x_min=float(g.get("x_min", -20.0)),
        x_max=float(g.get("x_max", 30.0)),
        n=int(g.get("n", 4999)),
    )


def _alpha_list(args, cfg: dict) -> list[float]:
    if args.alpha_list:
        lo, hi, step = (float(v) for v in args.alpha_list.split(":"))
        count = int(round((hi - lo) / step)) + 1
        return [lo + k * step for k in range(count)]
    if args.alpha is not None:
        return [float(args.alpha)]
    if "alpha" in cfg:
        a = cfg["alpha"]
        return [float(v) for v in a] if isinstance(a, list) else [float(a)]
    raise ConfigError("no alpha given (use --alpha, --alpha-list or the config)")


def _out_dir(args, cfg: dict) -> Path:
    out = Path(args.out or cfg.get("out", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_profile(args) -> int:
    cfg = _load_config(args.config)
    nl = _nonlinearity(cfg)
    out = _out_dir(args, cfg)
    ds = float(cfg.get("ds", 1e-3))
    rows = []
    for alpha in _alpha_list(args, cfg):
        adm = check_alpha(nl, alpha)
        if not adm.satisfies_hyp:
            raise ConfigError(f"alpha not admissible: {adm.reason}")
        sol = profile.solve_profile(nl, alpha, ds=ds)
        write_profile(sol, out / f"profile_alpha{alpha:+.4f}")
        rows.append((alpha, sol.c, sol.c_identity))
    print(f"{'alpha':>10} {'c':>22} {'c_identity':>22}")
    for alpha, c, cid in rows:
        print(f"{alpha:>10.4f} {c:>22.15g} {cid:>22.15g}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    nl = _nonlinearity(cfg)
    out = _out_dir(args, cfg)
    alphas = _alpha_list(args, cfg)
    entries = profile.profile_family(nl, alphas, ds=float(cfg.get("ds", 1e-3)))
    path = write_family_table(entries, out / "family.csv")
    print(f"{'alpha':>10} {'c':>22} {'c_identity':>22}  error")
    for e in entries:
        print(f"{e.alpha:>10.4f} {e.c:>22.15g} {e.c_identity:>22.15g}  {e.error or ''}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    nl = _nonlinearity(cfg)
    grid = _grid(cfg)
    out = _out_dir(args, cfg)
    alpha = _alpha_list(args, cfg)[0]
    adm = check_alpha(nl, alpha)
    if not adm.satisfies_hyp:
        raise ConfigError(f"alpha not admissible: {adm.reason}")
    sim = cfg.get("sim", {})
    scheme = args.scheme or sim.get("scheme", pde.IMEX_PROJECTED)
    dt = float(sim.get("dt", 1e-3))
    t_end = float(sim.get("t_end", 10.0))
    snapshot_every = int(sim.get("snapshot_every", 200))

    ds = float(cfg.get("ds", 1e-3))
    sol = profile.solve_profile(nl, alpha, ds=ds)
    scenario = cfg.get("scenario", args.scenario or "traveling-wave")
    x = grid.nodes()
    if scenario == "traveling-wave":
        u0 = profile.evaluate_profile(sol, x)
        bc_left = alpha
    elif scenario == "compliant":
        comp = cfg.get("compliant", {})
        xi1 = float(comp.get("xi1", -5.0))
        width = float(comp.get("ramp_width", 3.0))
        top = float(comp.get("top", 0.9))
        u0 = pde.build_compliant_initial_data(nl, alpha, xi1, width, top, grid)
        bc_left = alpha
    else:
        raise ConfigError(f"unknown scenario {scenario!r}")
    bc_right = float(profile.evaluate_profile(sol, grid.x_max))
    run_cfg = pde.SimConfig(scheme=scheme, dt=dt, t_end=t_end,
                            bc_left=bc_left, bc_right=bc_right,
                            snapshot_every=snapshot_every)
    series = pde.run_simulation(run_cfg, u0, nl, grid, alpha=alpha)
    write_snapshots(series, grid, out / "run")

    points = analysis.build_error_series(series, sol, grid)
    final = points[-1]
    drift = final.shift - sol.c * final.t
    print(f"scenario={scenario} t_end={t_end} fitted_drift={drift:.6g} sup_err={final.sup_error:.6g}")
    if scenario == "compliant":
        errs = np.array([p.sup_error for p in points])
        floor = acceptance.ERR_FLOOR_MULT * float(np.median(errs[-10:]))
        t2 = analysis.detect_phase2(series, nl, grid, alpha)
        rep = analysis.fit_exponential_rate(points, t_start=t2 or 0.0, c_alpha=sol.c, floor=floor)
        write_convergence_report(rep, out / "convergence")
        print(f"t2={t2} kappa={rep.kappa_fit:.6g} r2={rep.r_squared:.6g} x0={rep.x0_fit:.6g}")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _load_config(args.config)
    out = _out_dir(args, cfg)
    only = [args.only] if args.only else None
    ws = acceptance.Workspace()
    results = acceptance.run_criteria(ws, only=only, printer=print)
    payload = {
        "criteria": [
            {"name": r.name, "passed": r.passed, "details": r.details} for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    write_json(payload, out / "verify_report.json")
    return EXIT_OK if payload["all_passed"] else EXIT_ACCEPT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acplus",
        description="Traveling waves and constrained dynamics of the one-directional Allen-Cahn flow",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--alpha", type=float, help="obstacle level")
    common.add_argument("--alpha-list", help="range lo:hi:step of obstacle levels")

    p = sub.add_parser("profile", parents=[common], help="solve wave profiles and write CSV/JSON")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("sweep", parents=[common], help="velocity table over an alpha family")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", parents=[common], help="run the constrained evolution")
    p.add_argument("--scheme", choices=[pde.EXPLICIT_POSITIVE_PART, pde.IMEX_PROJECTED])
    p.add_argument("--scenario", choices=["traveling-wave", "compliant"])
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    p.add_argument("--only", help="run a single named criterion")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error ({exc.code}): {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericsError as exc:
        print(f"error ({exc.code}): {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except LabError as exc:
        print(f"error ({exc.code}): {exc}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
