"""Sub- and supersolution envelopes built from a traveling-wave profile.

An envelope is a shifted-and-lifted copy of the profile,

    w(x, t) = profile(x - x0 - c t +/- sigma*delta*(1 - e^{-beta t})) +/- delta*e^{-beta t},

which bounds solutions from above (PLUS) everywhere, or from below (MINUS)
on the region right of the moving shift line.  Admissibility of the
constants (delta, beta, sigma) is decided by ``compute_envelope_constants``,
which reconstructs numeric analogs of the classical sufficient conditions:
delta below delta0, beta below beta0, sigma above sigma_beta(beta).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import ConfigError, NoAdmissibleDelta
from .pde import Grid1D, SnapshotSeries
from .potential import Nonlinearity
from .profile import ProfileSolution, evaluate_profile, evaluate_profile_slope

ArrayLike = Union[float, np.ndarray]

PLUS = "plus"
MINUS = "minus"

_SCAN_POINTS = 200
_SCAN_FLOOR = 2.0**-20
_SCAN_CEIL = 2.0**20


@dataclass(frozen=True)
class EnvelopeConstants:
    """Admissibility thresholds for one profile: delta0, beta0 and sigma_beta(.).

    ``r_inner``/``R_outer`` delimit the middle interval on which the slope
    bound m was taken; they are kept for diagnostics.
    """

    delta0: float
    beta0: float
    sigma_beta: Callable[[float], float]
    r_inner: float
    R_outer: float
    slope_min: float
    sup_fprime: float


@dataclass(frozen=True)
class ComparisonEnvelope:
    profile: ProfileSolution
    delta: float
    sigma: float
    beta_rate: float
    x0: float
    sign: str

    def __post_init__(self):
        if self.sign not in (PLUS, MINUS):
            raise ConfigError("sign must be 'plus' or 'minus'")
        if min(self.delta, self.sigma, self.beta_rate) <= 0.0:
            raise ConfigError("delta, sigma and beta_rate must be positive")

    def shift_line(self, t: ArrayLike) -> ArrayLike:
        """Front line x0 + c t + sigma*delta*(1 - e^{-beta t}) bounding the MINUS region."""
        return self.x0 + self.profile.c * t + self.sigma * self.delta * (1.0 - np.exp(-self.beta_rate * t))


def is_admissible(env: ComparisonEnvelope, consts: EnvelopeConstants) -> bool:
    return (
        env.delta < consts.delta0
        and env.beta_rate < consts.beta0
        and env.sigma > consts.sigma_beta(env.beta_rate)
    )


def _scan_grid_left(sol: ProfileSolution, r: float) -> np.ndarray:
    lo = min(r, 0.0) - 2.0
    return np.concatenate(([lo - 10.0], np.linspace(lo, r, _SCAN_POINTS)))


def _left_condition(nl: Nonlinearity, sol: ProfileSolution, delta: float, r: float,
                    svals: np.ndarray) -> bool:
    ys = _scan_grid_left(sol, r)
    vals = evaluate_profile(sol, ys)[:, None] + svals[None, :] * delta
    return bool(np.min(nl.deriv(vals)) > float(nl.deriv(sol.alpha)) / 2.0)


def _right_inf(nl: Nonlinearity, sol: ProfileSolution, delta: float, R: float,
               svals: np.ndarray) -> float:
    span = 10.0 * (nl.a_plus - nl.a_minus)
    ys = np.linspace(R, R + span, _SCAN_POINTS)
    vals = evaluate_profile(sol, ys)[:, None] + svals[None, :] * delta
    return float(np.min(nl.deriv(vals)))


def compute_envelope_constants(sol: ProfileSolution, nl: Nonlinearity) -> EnvelopeConstants:
    """Numeric admissibility constants for envelopes around one profile.

    The lift bound delta0 is taken as HALF the largest feasible lift: at the
    feasibility edge the inner radius r collapses to the contact point, the
    slope minimum m goes to zero and sigma_beta diverges, which would make
    the sufficient condition vacuous.  Backing off keeps sigma_beta within
    roughly a decade of the actual supersolution threshold.

    The outer radius R is pushed out until the right-tail slope bound
    reaches min(f'(alpha)/2, its asymptotic sup), so the decay bound beta0
    is never throttled by an unnecessarily marginal c_R.
    """
    fpa = float(nl.deriv(sol.alpha))
    svals = np.linspace(0.0, 1.0, _SCAN_POINTS)
    cap = (nl.a_plus - nl.a_minus) / 4.0

    def scan_r(delta: float) -> float | None:
        r = 1.0
        while r >= _SCAN_FLOOR:
            if _left_condition(nl, sol, delta, r, svals):
                return r
            r *= 0.5
        return None

    def scan_R(delta: float) -> float | None:
        R = 1.0
        while R <= _SCAN_CEIL:
            if _right_inf(nl, sol, delta, R, svals) > 0.0:
                return R
            R *= 2.0
        return None

    def feasible(delta: float) -> bool:
        return scan_r(delta) is not None and scan_R(delta) is not None

    if not feasible(1e-6):
        raise NoAdmissibleDelta(
            "no admissible lift even at delta = 1e-6 (is f'(alpha) > 0?)"
        )
    lo, hi = 1e-6, cap
    if feasible(cap):
        delta_max = cap
    else:
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if feasible(mid):
                lo = mid
            else:
                hi = mid
        delta_max = lo
    delta0 = delta_max / 2.0

    # inner radius: largest r (within a factor-2 bracket) satisfying the left condition
    r = scan_r(delta0)
    lo_r, hi_r = r, 2.0 * r
    for _ in range(40):
        mid = 0.5 * (lo_r + hi_r)
        if _left_condition(nl, sol, delta0, mid, svals):
            lo_r = mid
        else:
            hi_r = mid
    r_inner = lo_r

    # outer radius: smallest R whose right-tail slope inf reaches the target level
    asymptotic = float(np.min(nl.deriv(nl.a_plus + svals * delta0)))
    target = min(fpa / 2.0, 0.999 * asymptotic)
    R = scan_R(delta0)
    while R <= _SCAN_CEIL and _right_inf(nl, sol, delta0, R, svals) < target:
        R *= 2.0
    lo_R, hi_R = R / 2.0, R
    for _ in range(40):
        mid = 0.5 * (lo_R + hi_R)
        if _right_inf(nl, sol, delta0, mid, svals) >= target:
            hi_R = mid
        else:
            lo_R = mid
    R_outer = hi_R
    c_R = _right_inf(nl, sol, delta0, R_outer, svals)
    beta0 = min(c_R, fpa / 2.0)

    ys = np.linspace(r_inner, R_outer, 2000)
    slope_min = float(np.min(evaluate_profile_slope(sol, ys)))
    band = np.linspace(nl.a_minus - delta0, nl.a_plus + delta0, 2000)
    sup_fprime = float(np.max(np.abs(nl.deriv(band))))

    def sigma_beta(beta: float) -> float:
        if beta <= 0.0:
            raise ConfigError("beta must be positive")
        return (sup_fprime / beta + 1.0) / slope_min

    return EnvelopeConstants(
        delta0=float(delta0),
        beta0=float(beta0),
        sigma_beta=sigma_beta,
        r_inner=float(r_inner),
        R_outer=float(R_outer),
        slope_min=slope_min,
        sup_fprime=sup_fprime,
    )


def eval_envelope(env: ComparisonEnvelope, x: ArrayLike, t: ArrayLike) -> ArrayLike:
    """Envelope value; the PLUS sign lifts and advances, MINUS lowers and delays."""
    sgn = 1.0 if env.sign == PLUS else -1.0
    t = np.asarray(t, dtype=float)
    decay = np.exp(-env.beta_rate * t)
    z = x - env.x0 - env.profile.c * t + sgn * env.sigma * env.delta * (1.0 - decay)
    return evaluate_profile(env.profile, z) + sgn * env.delta * decay


@dataclass(frozen=True)
class ResidualReport:
    passed: bool
    worst_residual: float
    worst_x: float
    worst_t: float
    tol_res: float


def _residual_on_grid(env: ComparisonEnvelope, nl: Nonlinearity, xs: np.ndarray,
                      t: float) -> np.ndarray:
    """parabolic residual w_t - D2 w + f(w) at interior points of xs."""
    sgn = 1.0 if env.sign == PLUS else -1.0
    c = env.profile.c
    decay = math.exp(-env.beta_rate * t)
    z = xs - env.x0 - c * t + sgn * env.sigma * env.delta * (1.0 - decay)
    w = evaluate_profile(env.profile, z) + sgn * env.delta * decay
    slope = evaluate_profile_slope(env.profile, z)
    # exact t-derivative of the envelope formula
    wt = slope * (-c + sgn * env.sigma * env.delta * env.beta_rate * decay) \
        - sgn * env.delta * env.beta_rate * decay
    h = xs[1] - xs[0]
    d2 = (w[:-2] - 2.0 * w[1:-1] + w[2:]) / (h * h)
    return wt[1:-1] - d2 + nl.value(w[1:-1])


def check_residual_sign(
    env: ComparisonEnvelope,
    nl: Nonlinearity,
    grid: Grid1D,
    times,
    tol_safety: float = 2.0,
) -> ResidualReport:
    """Verify the defining sign of the envelope's parabolic residual.

    PLUS envelopes must have residual >= -tol everywhere; MINUS envelopes
    residual <= +tol right of the moving shift line.  The tolerance is
    C * h^2 with C estimated by Richardson comparison against a half-step
    grid (the residual uses a discrete second difference, so it carries an
    O(h^2) error even for an exact envelope).

    The envelope is only C^1 across its moving contact line, where the
    second difference jumps by O(1) regardless of h.  That band (2 cells
    wide) is excluded from the Richardson calibration, and on the MINUS
    side also from the sign region, which is open in the continuum
    statement anyway; the PLUS residual at the kink is biased positive and
    needs no exclusion.
    """
    xs = np.linspace(grid.x_min, grid.x_max, grid.n + 2)
    xs_half = np.linspace(grid.x_min, grid.x_max, 2 * (grid.n + 1) + 1)
    h = xs[1] - xs[0]

    sgn = 1.0 if env.sign == PLUS else -1.0
    worst = math.inf
    worst_x = math.nan
    worst_t = math.nan
    richardson = 0.0
    for t in times:
        t = float(t)
        res = _residual_on_grid(env, nl, xs, t)
        res_half = _residual_on_grid(env, nl, xs_half, t)[1::2]
        x_int = xs[1:-1]
        decay = math.exp(-env.beta_rate * t)
        kink = env.x0 + env.profile.c * t - sgn * env.sigma * env.delta * (1.0 - decay)
        smooth = np.abs(x_int - kink) > 2.0 * h
        if smooth.any():
            richardson = max(richardson, float(np.max(np.abs(res - res_half)[smooth])))
        signed = sgn * res  # must be >= -tol on the admissible region
        if env.sign == MINUS:
            keep = x_int > env.shift_line(t) + 2.0 * h
            if not keep.any():
                continue
            signed = signed[keep]
            x_here = x_int[keep]
        else:
            x_here = x_int
        i = int(np.argmin(signed))
        if signed[i] < worst:
            worst = float(signed[i])
            worst_x = float(x_here[i])
            worst_t = t
    c_est = richardson / (0.75 * h * h)
    tol_res = tol_safety * max(c_est, 1.0) * h * h
    return ResidualReport(
        passed=bool(worst >= -tol_res),
        worst_residual=worst,
        worst_x=worst_x,
        worst_t=worst_t,
        tol_res=tol_res,
    )


@dataclass(frozen=True)
class OrderingReport:
    passed: bool
    worst_gap: float
    worst_t: float
    worst_x: float


def check_ordering(
    series: SnapshotSeries,
    env_minus: ComparisonEnvelope,
    env_plus: ComparisonEnvelope,
    grid: Grid1D,
    tol: float = 1e-8,
) -> OrderingReport:
    """Check w- <= u <= w+ at every snapshot node.

    The envelope clock starts at the first snapshot of the series; ordering
    must hold there (precondition), and is then verified at every later
    snapshot.
    """
    x = grid.nodes()
    t0 = series.snapshots[0].t

    def gaps(snap):
        tau = snap.t - t0
        wm = eval_envelope(env_minus, x, tau)
        wp = eval_envelope(env_plus, x, tau)
        return np.minimum(snap.u - wm, wp - snap.u)

    g0 = gaps(series.snapshots[0])
    if float(g0.min()) < -tol:
        i = int(np.argmin(g0))
        raise ConfigError(
            f"envelopes not ordered at the initial snapshot: gap {g0[i]:.3e} at x = {x[i]:.4f}"
        )
    worst = math.inf
    worst_t = math.nan
    worst_x = math.nan
    for snap in series.snapshots:
        g = gaps(snap)
        i = int(np.argmin(g))
        if float(g[i]) < worst:
            worst = float(g[i])
            worst_t = snap.t
            worst_x = float(x[i])
    return OrderingReport(passed=bool(worst >= -tol), worst_gap=worst, worst_t=worst_t, worst_x=worst_x)
