"""The acceptance suite: one callable per criterion, plus a shared workspace.

Every criterion returns a CriterionResult with measured values and the
tolerance it was judged against.  Expensive artifacts (profiles, long runs)
are computed once per Workspace and shared across criteria.

Tolerance overrides: setting the environment variable
``ACPLUS_TOL_SCALE_<NAME>`` (criterion name upper-cased, dashes to
underscores) multiplies that criterion's primary tolerance; this exists so
the reporting pipeline can be exercised end to end on a forced failure.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import analysis, comparison, pde, potential, profile
from .errors import LabError

# default desk-scale instance
ALPHAS_MAIN = (-0.9, -0.8, -0.7, -0.65)
ALPHAS_FAMILY = (-0.9, -0.7, -0.5, -0.3, -0.1)
ALPHA_STAR = -0.8
GRID = dict(x_min=-20.0, x_max=30.0, n=4999)   # h = 0.01
DS = 1e-3
DS_STUDY = (2e-3, 1e-3, 5e-4)
MUS = (0.1, 0.05, 0.025)

# rate-fit floor guards: the sup-error saturates at the discretization
# floor (~dt scale), so the fit keeps only points a factor ERR_FLOOR_MULT
# above the measured floor; the front-deviation series saturates earlier,
# at the offset between the shape-fit and front-fit asymptotes, where a
# smaller guard suffices because that series is single-mode until its floor.
ERR_FLOOR_MULT = 20.0
FRONT_FLOOR_MULT = 5.0


@dataclass
class CriterionResult:
    name: str
    passed: bool
    details: dict

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        keys = ", ".join(f"{k}={_fmt(v)}" for k, v in self.details.items() if not k.startswith("_"))
        return f"[{status}] {self.name}: {keys}"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)) and v and isinstance(v[0], float):
        return "[" + ", ".join(f"{x:.6g}" for x in v) + "]"
    return str(v)


def _tol(name: str, default: float) -> float:
    key = "ACPLUS_TOL_SCALE_" + name.upper().replace("-", "_")
    scale = float(os.environ.get(key, "1.0"))
    return default * scale


class Workspace:
    """Lazily computed shared artifacts for the acceptance criteria."""

    def __init__(self):
        self.nl = potential.make_cubic()
        self.grid = pde.Grid1D(**GRID)
        self._profiles: dict[tuple[float, float], profile.ProfileSolution] = {}
        self._reg_profiles: dict[float, profile.ProfileSolution] = {}
        self._runs: dict[str, pde.SnapshotSeries] = {}
        self._series_cache: dict[str, list[analysis.ErrorPoint]] = {}
        self._report: analysis.ConvergenceReport | None = None
        self._env_consts: comparison.EnvelopeConstants | None = None
        self._t2: float | None = None

    # ---------------- profiles ----------------

    def prof(self, alpha: float, ds: float = DS) -> profile.ProfileSolution:
        key = (alpha, ds)
        if key not in self._profiles:
            self._profiles[key] = profile.solve_profile(self.nl, alpha, tol_c=0.0, ds=ds)
        return self._profiles[key]

    def prof_reg(self, mu: float) -> profile.ProfileSolution:
        if mu not in self._reg_profiles:
            self._reg_profiles[mu] = profile.solve_profile_regularized(
                self.nl, ALPHA_STAR, mu, tol_c=0.0, ds=DS
            )
        return self._reg_profiles[mu]

    # ---------------- simulations ----------------

    def wave_run(self) -> pde.SnapshotSeries:
        """Traveling-wave persistence run: u0 = profile samples, T = 10."""
        if "wave" not in self._runs:
            sol = self.prof(ALPHA_STAR)
            x = self.grid.nodes()
            u0 = profile.evaluate_profile(sol, x)
            cfg = pde.SimConfig(
                scheme=pde.IMEX_PROJECTED,
                dt=1e-3,
                t_end=10.0,
                bc_left=sol.alpha,
                bc_right=float(profile.evaluate_profile(sol, self.grid.x_max)),
                snapshot_every=1000,
            )
            self._runs["wave"] = pde.run_simulation(cfg, u0, self.nl, self.grid, alpha=sol.alpha)
        return self._runs["wave"]

    def compliant_run(self) -> pde.SnapshotSeries:
        """The long compliant-data run: alpha = -0.8, xi1 = -5, top = 0.9, T = 40."""
        if "compliant" not in self._runs:
            sol = self.prof(ALPHA_STAR)
            u0 = pde.build_compliant_initial_data(self.nl, ALPHA_STAR, -5.0, 3.0, 0.9, self.grid)
            # dt chosen so the error floor sits low enough to leave a clean
            # decade of decay for the rate fits; snapshots every 0.2 time units
            cfg = pde.SimConfig(
                scheme=pde.IMEX_PROJECTED,
                dt=5e-4,
                t_end=40.0,
                bc_left=ALPHA_STAR,
                bc_right=float(profile.evaluate_profile(sol, self.grid.x_max)),
                snapshot_every=400,
            )
            self._runs["compliant"] = pde.run_simulation(cfg, u0, self.nl, self.grid, alpha=ALPHA_STAR)
        return self._runs["compliant"]

    def scheme_pair(self) -> tuple[pde.SnapshotSeries, pde.SnapshotSeries]:
        """Explicit and projected runs from identical compliant data to T = 1."""
        if "explicit1" not in self._runs:
            sol = self.prof(ALPHA_STAR)
            u0 = pde.build_compliant_initial_data(self.nl, ALPHA_STAR, -5.0, 3.0, 0.9, self.grid)
            bcr = float(profile.evaluate_profile(sol, self.grid.x_max))
            h2 = self.grid.h**2
            cfg_e = pde.SimConfig(
                scheme=pde.EXPLICIT_POSITIVE_PART, dt=pde.CFL_FACTOR * h2, t_end=1.0,
                bc_left=ALPHA_STAR, bc_right=bcr, snapshot_every=10**6,
            )
            cfg_i = pde.SimConfig(
                scheme=pde.IMEX_PROJECTED, dt=2.5e-4, t_end=1.0,
                bc_left=ALPHA_STAR, bc_right=bcr, snapshot_every=10**6,
            )
            self._runs["explicit1"] = pde.run_simulation(cfg_e, u0, self.nl, self.grid, alpha=ALPHA_STAR)
            self._runs["imex1"] = pde.run_simulation(cfg_i, u0, self.nl, self.grid, alpha=ALPHA_STAR)
        return self._runs["explicit1"], self._runs["imex1"]

    def steady_runs(self) -> list[pde.SnapshotSeries]:
        """Constant steady states under both schemes, 1e4 steps each."""
        if "steady" not in self._runs:
            runs = []
            grid = pde.Grid1D(-5.0, 5.0, 499)
            for gamma in (ALPHA_STAR, (ALPHA_STAR + self.nl.a_zero) / 2.0):
                u0 = np.full(grid.n, gamma)
                for scheme, dt in (
                    (pde.EXPLICIT_POSITIVE_PART, pde.CFL_FACTOR * grid.h**2),
                    (pde.IMEX_PROJECTED, 0.05),
                ):
                    cfg = pde.SimConfig(scheme=scheme, dt=dt, t_end=dt * 10**4,
                                        bc_left=gamma, bc_right=gamma, snapshot_every=2500)
                    runs.append(pde.run_simulation(cfg, u0, self.nl, grid, alpha=gamma))
            self._runs["steady"] = runs  # type: ignore[assignment]
        return self._runs["steady"]  # type: ignore[return-value]

    def all_series(self) -> list[pde.SnapshotSeries]:
        out: list[pde.SnapshotSeries] = []
        for v in self._runs.values():
            if isinstance(v, list):
                out.extend(v)
            else:
                out.append(v)
        return out

    # ---------------- derived artifacts ----------------

    def error_series(self) -> list[analysis.ErrorPoint]:
        if "compliant" not in self._series_cache:
            self._series_cache["compliant"] = analysis.build_error_series(
                self.compliant_run(), self.prof(ALPHA_STAR), self.grid
            )
        return self._series_cache["compliant"]

    def t2(self) -> float:
        if self._t2 is None:
            t2 = analysis.detect_phase2(self.compliant_run(), self.nl, self.grid, ALPHA_STAR)
            if t2 is None:
                raise LabError("phase-2 structure was never reached in the compliant run")
            self._t2 = t2
        return self._t2

    def report(self) -> analysis.ConvergenceReport:
        if self._report is None:
            pts = self.error_series()
            errs = np.array([p.sup_error for p in pts])
            floor = ERR_FLOOR_MULT * float(np.median(errs[-10:]))
            self._report = analysis.fit_exponential_rate(
                pts, t_start=self.t2(), c_alpha=self.prof(ALPHA_STAR).c, floor=floor
            )
        return self._report

    def env_consts(self) -> comparison.EnvelopeConstants:
        if self._env_consts is None:
            self._env_consts = comparison.compute_envelope_constants(self.prof(ALPHA_STAR), self.nl)
        return self._env_consts


# ---------------- criteria ----------------

def crit_velocity_identity(ws: Workspace) -> CriterionResult:
    tol = _tol("velocity-identity", 1e-3)
    rows = []
    ok = True
    for alpha in ALPHAS_MAIN:
        sol = ws.prof(alpha)
        rel = abs(sol.c - sol.c_identity) / abs(sol.c)
        c2 = profile.velocity_bound(ws.nl, alpha)
        good = rel < tol and sol.c < 0.0 and sol.c_identity < 0.0 and -c2 <= sol.c
        ok &= good
        rows.append((alpha, sol.c, sol.c_identity, rel, good))
    return CriterionResult(
        "velocity-identity", ok,
        {"tol": tol, "max_rel_gap": max(r[3] for r in rows), "c": [r[1] for r in rows]},
    )


def crit_velocity_monotonicity(ws: Workspace) -> CriterionResult:
    margin = _tol("velocity-monotonicity", 1e-8)
    cs = [ws.prof(a).c for a in ALPHAS_FAMILY]
    gaps = [cs[i] - cs[i + 1] for i in range(len(cs) - 1)]
    ok = all(g > margin for g in gaps)
    return CriterionResult(
        "velocity-monotonicity", ok,
        {"margin": margin, "min_gap": min(gaps), "c": cs},
    )


def crit_grid_convergence(ws: Workspace) -> CriterionResult:
    ratio_min = _tol("grid-convergence-c", 3.0)
    cs = [ws.prof(ALPHA_STAR, ds=ds).c for ds in DS_STUDY]
    e1 = abs(cs[0] - cs[1])
    e2 = abs(cs[1] - cs[2])
    ulp = 8.0 * np.finfo(float).eps * abs(cs[1])
    if e1 <= ulp and e2 <= ulp:
        # both differences at the rounding floor: converged beyond measurability
        ok = True
        ratio = math.inf
    else:
        ratio = e1 / e2 if e2 > 0 else math.inf
        ok = ratio >= ratio_min
    return CriterionResult(
        "grid-convergence-c", ok,
        {"ratio_min": ratio_min, "ratio": ratio, "diff_coarse": e1, "diff_fine": e2},
    )


def crit_degeneracy_jump(ws: Workspace) -> CriterionResult:
    sol = ws.prof(ALPHA_STAR)
    falpha = float(ws.nl.value(ALPHA_STAR))
    left, right = profile.profile_second_derivative_limits(sol, ws.nl)
    exact_ok = left == 0.0 and abs(right - falpha) < 1e-12

    run = ws.wave_run()
    mid = len(run.snapshots) // 2
    rep = analysis.check_free_boundary_regularity(
        (run.snapshots[mid], run.snapshots[mid + 1]), ws.nl, ws.grid, ALPHA_STAR
    )
    h = ws.grid.h
    tol_curv = _tol("degeneracy-jump", 5.0 * h * falpha)
    tol_slope = 5.0 * h
    pde_ok = abs(rep.curvature_at_front - falpha) <= tol_curv and abs(rep.slope_at_front) <= tol_slope
    return CriterionResult(
        "degeneracy-jump", exact_ok and pde_ok,
        {
            "right_limit": right, "target": falpha,
            "pde_curvature": rep.curvature_at_front, "curv_tol": tol_curv,
            "pde_slope": rep.slope_at_front, "slope_tol": tol_slope,
        },
    )


def crit_regularized_consistency(ws: Workspace) -> CriterionResult:
    sol = ws.prof(ALPHA_STAR)
    sups, dcs, amus = [], [], []
    xs = np.arange(-5.0, 30.0, 0.01)
    ref = profile.evaluate_profile(sol, xs)
    for mu in MUS:
        reg = ws.prof_reg(mu)
        # align the regularized orbit at its alpha-crossing
        cross = float(np.interp(ALPHA_STAR, reg.phi, reg.s_grid))
        vals = profile.evaluate_profile(reg, xs + cross)
        sups.append(float(np.max(np.abs(vals - ref))))
        dcs.append(abs(reg.c - sol.c))
        amus.append(reg.alpha_mu)
    dec_sup = all(sups[i] > sups[i + 1] for i in range(len(sups) - 1))
    dec_c = all(dcs[i] > dcs[i + 1] for i in range(len(dcs) - 1))
    inc_amu = all(amus[i] < amus[i + 1] for i in range(len(amus) - 1))
    in_range = all(ws.nl.a_minus < a < ALPHA_STAR for a in amus)
    ok = dec_sup and dec_c and inc_amu and in_range
    return CriterionResult(
        "regularized-consistency", ok,
        {"sup_dist": sups, "c_gap": dcs, "alpha_mu": amus},
    )


def crit_wave_persistence(ws: Workspace) -> CriterionResult:
    sol = ws.prof(ALPHA_STAR)
    run = ws.wave_run()
    final = run.snapshots[-1]
    shift, sup_err = analysis.fit_wave_position(final, sol, ws.grid)
    h = ws.grid.h
    tol_shift = _tol("wave-persistence", 5.0 * h)
    tol_shape = 10.0 * h * h
    drift_err = abs(shift - sol.c * final.t)
    ok = drift_err <= tol_shift and sup_err <= tol_shape
    return CriterionResult(
        "wave-persistence", ok,
        {"drift_err": drift_err, "tol_shift": tol_shift, "sup_err": sup_err, "tol_shape": tol_shape},
    )


def crit_exponential_convergence(ws: Workspace) -> CriterionResult:
    rep = ws.report()
    terminal = ws.error_series()[-1].sup_error
    r2_min = 0.95
    tol_terminal = _tol("exponential-convergence", 1e-3)
    ok = rep.kappa_fit > 0.0 and rep.r_squared > r2_min and terminal < tol_terminal
    return CriterionResult(
        "exponential-convergence", ok,
        {"kappa": rep.kappa_fit, "r2": rep.r_squared, "terminal_err": terminal,
         "t2": rep.t_start, "x0": rep.x0_fit},
    )


def crit_front_rate(ws: Workspace) -> CriterionResult:
    rep = ws.report()
    lo, hi = 0.35, _tol("free-boundary-rate", 1.5)
    pts = [p for p in rep.error_series if p.t >= rep.t_start and p.r is not None]
    sol = ws.prof(ALPHA_STAR)
    dev = np.array([abs(p.r - sol.c * p.t - rep.x0_fit) for p in pts])
    floor = FRONT_FLOOR_MULT * float(np.median(dev[-10:]))
    ratio = analysis.check_front_rate(rep, sol.c, floor=floor)
    ok = lo <= ratio <= hi
    return CriterionResult(
        "free-boundary-rate", ok,
        {"ratio": ratio, "band_lo": lo, "band_hi": hi, "floor": floor},
    )


def _lhs_draws(consts: comparison.EnvelopeConstants, n: int, seed: int = 20260808):
    """Latin-hypercube draws from the admissible (delta, beta, sigma) box."""
    rng = np.random.default_rng(seed)
    strata = (np.arange(n)[:, None] + rng.random((n, 3))) / n
    for j in range(3):
        strata[:, j] = strata[rng.permutation(n), j]
    draws = []
    for u1, u2, u3 in strata:
        delta = (0.1 + 0.8 * u1) * consts.delta0
        beta = (0.1 + 0.8 * u2) * consts.beta0
        sigma = consts.sigma_beta(beta) * (1.1 + 1.9 * u3)
        draws.append((delta, beta, sigma))
    return draws


def crit_envelope_validity(ws: Workspace) -> CriterionResult:
    sol = ws.prof(ALPHA_STAR)
    consts = ws.env_consts()
    grid = pde.Grid1D(-25.0, 25.0, 4000)
    times = (0.0, 1.0, 5.0, 20.0)
    worst_pass = math.inf
    all_ok = True
    for delta, beta, sigma in _lhs_draws(consts, 10):
        env = comparison.ComparisonEnvelope(sol, delta, sigma, beta, 0.0, comparison.PLUS)
        rep = comparison.check_residual_sign(env, ws.nl, grid, times)
        worst_pass = min(worst_pass, rep.worst_residual)
        all_ok &= rep.passed
    # matching subsolution check on its validity region
    beta = consts.beta0 / 2.0
    delta = min(consts.delta0 / 2.0, 0.05)
    env_minus = comparison.ComparisonEnvelope(
        sol, delta, 2.0 * consts.sigma_beta(beta), beta, 0.0, comparison.MINUS
    )
    rep_minus = comparison.check_residual_sign(env_minus, ws.nl, grid, times)
    all_ok &= rep_minus.passed
    # negative control: sigma ten times below the admissible threshold must fail
    env_bad = comparison.ComparisonEnvelope(
        sol, delta, consts.sigma_beta(beta) / 10.0, beta, 0.0, comparison.PLUS
    )
    rep_bad = comparison.check_residual_sign(env_bad, ws.nl, grid, times)
    ok = all_ok and not rep_bad.passed
    return CriterionResult(
        "envelope-validity", ok,
        {"worst_admissible_residual": worst_pass, "minus_ok": rep_minus.passed,
         "control_failed": not rep_bad.passed, "control_residual": rep_bad.worst_residual,
         "delta0": consts.delta0, "beta0": consts.beta0},
    )


def crit_comparison_ordering(ws: Workspace) -> CriterionResult:
    sol = ws.prof(ALPHA_STAR)
    consts = ws.env_consts()
    run = ws.compliant_run()
    t2 = ws.t2()
    snaps = [s for s in run.snapshots if s.t >= t2]
    sub = pde.SnapshotSeries(snaps, run.config, run.alpha)
    beta = consts.beta0 / 2.0
    delta = min(consts.delta0 / 2.0, 0.05)
    sigma = 2.0 * consts.sigma_beta(beta)
    x = ws.grid.nodes()
    u0 = snaps[0].u
    x0_plus = _cover_shift_above(sol, x, u0, delta) - ws.grid.h
    x0_minus = _cover_shift_below(sol, x, u0, delta) + ws.grid.h
    env_plus = comparison.ComparisonEnvelope(sol, delta, sigma, beta, x0_plus, comparison.PLUS)
    env_minus = comparison.ComparisonEnvelope(sol, delta, sigma, beta, x0_minus, comparison.MINUS)
    tol = _tol("comparison-ordering", 1e-8)
    rep = comparison.check_ordering(sub, env_minus, env_plus, ws.grid, tol=tol)
    return CriterionResult(
        "comparison-ordering", rep.passed,
        {"worst_gap": rep.worst_gap, "tol": tol, "t_anchor": t2,
         "x0_plus": x0_plus, "x0_minus": x0_minus},
    )


def _profile_inverse(sol: profile.ProfileSolution, v: float) -> float:
    """Position where the profile attains v (v in (alpha, a_plus))."""
    if v <= sol.phi[0]:
        return 0.0
    if v >= sol.phi[-1]:
        gap = max(sol.a_plus - v, 1e-300)
        return sol.s_end + math.log((sol.a_plus - float(sol.phi[-1])) / gap) / sol.tail_rate
    return float(np.interp(v, sol.phi, sol.s_grid))


def _cover_shift_above(sol, x, u, delta) -> float:
    """Largest x0 with profile(x - x0) + delta >= u(x) at every node."""
    best = math.inf
    for xi, ui in zip(x, u):
        v = ui - delta
        if v <= sol.phi[0]:
            continue
        best = min(best, xi - _profile_inverse(sol, v))
    return best


def _cover_shift_below(sol, x, u, delta) -> float:
    """Smallest x0 with profile(x - x0) - delta <= u(x) at every node."""
    best = -math.inf
    for xi, ui in zip(x, u):
        v = ui + delta
        if v >= sol.a_plus:
            continue
        best = max(best, xi - _profile_inverse(sol, v))
    return best


def crit_multiplier_structure(ws: Workspace) -> CriterionResult:
    nl, grid = ws.nl, ws.grid
    falpha = float(nl.value(ALPHA_STAR))
    h = grid.h
    tol_band = _tol("multiplier-structure", 5.0 * h * falpha)
    x = grid.nodes()
    sol = ws.prof(ALPHA_STAR)
    worst_contact = 0.0
    worst_free = 0.0
    # the characteristic-function structure is a statement about the exact
    # wave: evaluate the multiplier on sampled wave states at several shifts
    for t in (0.0, 2.5, 5.0, 7.5, 10.0):
        shift = sol.c * t
        u = profile.evaluate_profile(sol, x - shift)
        snap = pde.initial_state(
            u, nl, grid, ALPHA_STAR,
            float(profile.evaluate_profile(sol, grid.x_max - shift)), alpha=ALPHA_STAR,
        )
        left = x < snap.r - 2.0 * h
        right = x > snap.r + 2.0 * h
        if left.any():
            worst_contact = max(worst_contact, float(np.max(np.abs(snap.eta[left] + falpha))))
        if right.any():
            worst_free = max(worst_free, float(np.max(np.abs(snap.eta[right]))))
    band_ok = worst_contact <= tol_band and worst_free <= tol_band

    sign_ok = True
    max_eta = -math.inf
    for series in ws.all_series():
        for snap in series.snapshots:
            m = float(np.max(snap.eta))
            max_eta = max(max_eta, m)
            sign_ok &= m <= 1e-12

    weighted_ok = True
    worst_excess = -math.inf
    for series in (ws.wave_run(), ws.compliant_run()):
        g = grid
        xs = g.nodes()
        center = 0.5 * (g.x_min + g.x_max)
        width = (g.x_max - g.x_min) / 8.0
        rho = np.exp(-((xs - center) ** 2) / (2.0 * width**2))
        rhs_field = np.minimum(
            pde.second_difference(series.snapshots[0].u, g,
                                  series.snapshots[0].bc_left, series.snapshots[0].bc_right)
            - nl.value(series.snapshots[0].u), 0.0)
        rhs = float(np.sum(rhs_field**2 * rho) * g.h)
        bound = rhs + 1e-4 * rhs + 1e-10
        for snap in series.snapshots:
            lhs = float(np.sum(snap.eta**2 * rho) * g.h)
            worst_excess = max(worst_excess, lhs - rhs)
            weighted_ok &= lhs <= bound
    ok = band_ok and sign_ok and weighted_ok
    return CriterionResult(
        "multiplier-structure", ok,
        {"worst_contact_gap": worst_contact, "worst_free_gap": worst_free, "band_tol": tol_band,
         "max_eta": max_eta, "weighted_excess": worst_excess},
    )


def crit_steady_states(ws: Workspace) -> CriterionResult:
    drift_tol = _tol("steady-states-monotonicity", 1e-12)
    worst_drift = 0.0
    for series in ws.steady_runs():
        u0 = series.snapshots[0].u
        uT = series.snapshots[-1].u
        worst_drift = max(worst_drift, float(np.max(np.abs(uT - u0))))
    # monotonicity across every run the suite performs
    ws.wave_run()
    ws.compliant_run()
    ws.scheme_pair()
    min_inc = min(s.min_increment for s in ws.all_series())
    ok = worst_drift <= drift_tol and min_inc >= -1e-12
    return CriterionResult(
        "steady-states-monotonicity", ok,
        {"worst_drift": worst_drift, "drift_tol": drift_tol, "min_increment": min_inc},
    )


def crit_scheme_cross_validation(ws: Workspace) -> CriterionResult:
    run_e, run_i = ws.scheme_pair()
    gap = float(np.max(np.abs(run_e.snapshots[-1].u - run_i.snapshots[-1].u)))
    tol = _tol("scheme-cross-validation", 1e-3)
    return CriterionResult(
        "scheme-cross-validation", gap <= tol, {"sup_gap": gap, "tol": tol},
    )


def crit_family_instability(ws: Workspace) -> CriterionResult:
    sol1 = ws.prof(-0.8)
    sol2 = ws.prof(-0.75)
    dc = abs(sol1.c - sol2.c)
    T = math.ceil(5.0 / dc) + 1.0
    lo = min(sol1.c, sol2.c) * T - 20.0
    hi = max(sol1.c, sol2.c) * T + 20.0
    xs = np.arange(lo, hi, 0.01)
    gap = float(np.max(np.abs(
        profile.evaluate_profile(sol1, xs - sol1.c * T)
        - profile.evaluate_profile(sol2, xs - sol2.c * T)
    )))
    need = _tol("family-instability", (ws.nl.a_plus - ws.nl.a_zero) / 2.0)
    return CriterionResult(
        "family-instability", gap > need,
        {"sup_gap": gap, "threshold": need, "T": T, "separation": dc * T},
    )


def crit_weighted_energy(ws: Workspace) -> CriterionResult:
    nl, grid = ws.nl, ws.grid
    sol = ws.prof(ALPHA_STAR)
    run = ws.compliant_run()
    t2 = ws.t2()
    snaps = [s for s in run.snapshots if s.t >= t2 and s.r is not None]
    anchor = min(s.r - sol.c * s.t for s in snaps) - 0.5
    energies = [analysis.weighted_energy(s, sol, nl, grid, anchor=anchor) for s in snaps]
    e0 = energies[0]
    slack = _tol("weighted-energy-decay", 1e-6) * e0
    increases = [energies[i + 1] - energies[i] for i in range(len(energies) - 1)]
    decay_ok = max(increases) <= slack

    # exact wave samples: the energy of the steady frame must be constant
    x = grid.nodes()
    e_wave = []
    for t in np.linspace(0.0, 10.0, 21):
        u = profile.evaluate_profile(sol, x - sol.c * t)
        snap = pde.PdeState(float(t), u, np.zeros_like(u), 0.0 + sol.c * t, u,
                            sol.alpha, float(profile.evaluate_profile(sol, grid.x_max - sol.c * t)))
        e_wave.append(analysis.weighted_energy(snap, sol, nl, grid, anchor=-1.0))
    e_wave = np.array(e_wave)
    rel_var = float(np.max(np.abs(e_wave - e_wave[0])) / abs(e_wave[0]))
    ok = decay_ok and rel_var <= 1e-4
    return CriterionResult(
        "weighted-energy-decay", ok,
        {"max_increase": max(increases), "slack": slack, "E_t2": e0,
         "E_final": energies[-1], "wave_rel_variation": rel_var},
    )


REGISTRY: dict[str, Callable[[Workspace], CriterionResult]] = {
    "velocity-identity": crit_velocity_identity,
    "velocity-monotonicity": crit_velocity_monotonicity,
    "grid-convergence-c": crit_grid_convergence,
    "degeneracy-jump": crit_degeneracy_jump,
    "regularized-consistency": crit_regularized_consistency,
    "wave-persistence": crit_wave_persistence,
    "exponential-convergence": crit_exponential_convergence,
    "free-boundary-rate": crit_front_rate,
    "envelope-validity": crit_envelope_validity,
    "comparison-ordering": crit_comparison_ordering,
    "multiplier-structure": crit_multiplier_structure,
    "steady-states-monotonicity": crit_steady_states,
    "scheme-cross-validation": crit_scheme_cross_validation,
    "family-instability": crit_family_instability,
    "weighted-energy-decay": crit_weighted_energy,
}


def run_criteria(ws: Workspace | None = None, only: list[str] | None = None,
                 printer: Callable[[str], None] | None = None) -> list[CriterionResult]:
    """Run all (or the named) criteria, printing one pass/fail line each."""
    ws = ws or Workspace()
    names = list(REGISTRY) if not only else list(only)
    unknown = [n for n in names if n not in REGISTRY]
    if unknown:
        raise KeyError(f"unknown criteria: {unknown}")
    results = []
    for name in names:
        try:
            res = REGISTRY[name](ws)
        except LabError as exc:
            res = CriterionResult(name, False, {"error": f"{exc.code}: {exc}"})
        results.append(res)
        if printer is not None:
            printer(res.line())
    return results
