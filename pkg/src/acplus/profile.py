"""Degenerate traveling-wave profiles by shooting in the phase plane.

The wave profile solves  phi'' = f(phi) - c * phi'  on s > 0 with the
contact conditions phi(0) = alpha, phi'(0) = 0, and climbs monotonically to
a_plus as s -> +infinity.  The velocity c < 0 is the unique value for which
the orbit launched at (alpha, 0) lands on the saddle (a_plus, 0); it is
found by bisection on the event classification of fixed-step RK4 orbits:

* OVERSHOOT -- phi crosses a_plus with phi' still positive (|c| too large:
  the anti-damping -c*phi' feeds in too much energy);
* TURNBACK  -- phi' drops to zero short of a_plus (|c| too small);
* CONVERGED -- the orbit passes within ``tol_asym`` of (a_plus, 0).

Forward integration through a saddle cannot approach it closer than
roughly |dc|^q with q = m_s/(m_s + m_u) (stable/unstable rates), which in
double precision bottoms out near 1e-7 .. 1e-6 depending on alpha.  The
default ``tol_asym`` is set accordingly; the converged orbit is truncated
at its closest approach and the exact exponential tail takes over beyond
the stored grid (see ``evaluate_profile``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Union

import numpy as np
from scipy.optimize import brentq

from .errors import (
    BracketInvalid,
    ConfigError,
    DivideNearZero,
    NoConvergence,
    NoEvent,
    NoRootAlphaMu,
)
from .potential import AdmissibleAlpha, Nonlinearity, check_alpha

ArrayLike = Union[float, np.ndarray]

OVERSHOOT = "OVERSHOOT"
TURNBACK = "TURNBACK"
CONVERGED = "CONVERGED"
NO_EVENT = "NO_EVENT"

SHARP = "sharp"
REGULARIZED = "regularized"

DEFAULT_DS = 1e-3
DEFAULT_TOL_C = 1e-12
DEFAULT_TOL_ASYM = 2e-5
EVENT_REFINE = 1e-6          # event located to within ds * EVENT_REFINE
LAUNCH_SCALE = 1e-7          # offset along the unstable eigenvector, relative to a_plus - a_minus
BRACKET_UPPER = -1e-12       # c = 0 is excluded; keep the bracket strictly negative
MAX_BISECT = 200


@dataclass(frozen=True)
class Trajectory:
    """A shot orbit: s is uniform at step ds except possibly the refined last point."""

    s: np.ndarray
    phi: np.ndarray
    psi: np.ndarray


@dataclass(frozen=True)
class ProfileSolution:
    """A computed traveling-wave profile with its velocity and diagnostics."""

    alpha: float
    c: float
    s_grid: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    ds: float
    residual_at_end: float
    c_identity: float
    kind: str = SHARP
    mu: float | None = None
    alpha_mu: float | None = None
    fprime_aplus: float = 0.0
    a_plus: float = 1.0

    @property
    def s_end(self) -> float:
        return float(self.s_grid[-1])

    @property
    def tail_rate(self) -> float:
        """Decay rate nu of a_plus - phi ~ exp(-nu s): positive root of
        nu^2 - c*nu - f'(a_plus) = 0, forced by decay toward a_plus."""
        c = self.c
        return (c + math.sqrt(c * c + 4.0 * self.fprime_aplus)) / 2.0


def _fast_poly(coeffs: tuple[float, ...]) -> Callable[[float], float]:
    """Scalar Horner evaluator; specialized for the common low degrees."""
    cd = tuple(reversed(coeffs))
    if len(cd) == 4:
        c3, c2, c1, c0 = cd
        return lambda x: ((c3 * x + c2) * x + c1) * x + c0
    if len(cd) == 5:
        c4, c3, c2, c1, c0 = cd
        return lambda x: (((c4 * x + c3) * x + c2) * x + c1) * x + c0

    def generic(x: float) -> float:
        acc = 0.0
        for c in cd:
            acc = acc * x + c
        return acc

    return generic


def _shoot(
    f: Callable[[float], float],
    a_plus: float,
    p: float,
    q: float,
    c: float,
    ds: float,
    n_max: int,
    tol_asym: float,
    stop_on_converged: bool,
    pen_alpha: float = math.inf,
    pen_inv_mu: float = 0.0,
):
    """Fixed-step RK4 on (phi' = psi, psi' = g(phi) - c psi) until an event.

    g = f plus the one-sided quadratic-penalty slope (s - pen_alpha)/mu for
    s < pen_alpha (inactive for the sharp problem).  Returns the recorded
    orbit, the event name, the closest-approach index and residual.  The
    event location is refined by bisection on the last step.
    """
    phis = [p]
    psis = [q]
    best_res = abs(p - a_plus) + abs(q)
    best_idx = 0
    event = NO_EVENT
    s_event = None
    half = 0.5 * ds
    sixth = ds / 6.0

    def g(x: float) -> float:
        v = f(x)
        if pen_inv_mu != 0.0 and x < pen_alpha:
            v += (x - pen_alpha) * pen_inv_mu
        return v

    def rk4(p0: float, q0: float, h: float) -> tuple[float, float]:
        k1p = q0
        k1q = g(p0) - c * q0
        p1 = p0 + 0.5 * h * k1p
        q1 = q0 + 0.5 * h * k1q
        k2p = q1
        k2q = g(p1) - c * q1
        p1 = p0 + 0.5 * h * k2p
        q1 = q0 + 0.5 * h * k2q
        k3p = q1
        k3q = g(p1) - c * q1
        p1 = p0 + h * k3p
        q1 = q0 + h * k3q
        k4p = q1
        k4q = g(p1) - c * q1
        return (
            p0 + h / 6.0 * (k1p + 2.0 * (k2p + k3p) + k4p),
            q0 + h / 6.0 * (k1q + 2.0 * (k2q + k3q) + k4q),
        )

    def event_of(pp: float, qq: float) -> str | None:
        if stop_on_converged and abs(pp - a_plus) + abs(qq) < tol_asym:
            return CONVERGED
        if pp >= a_plus and qq > 0.0:
            return OVERSHOOT
        if qq <= 0.0 and pp < a_plus - tol_asym:
            return TURNBACK
        return None

    for k in range(1, n_max + 1):
        # inlined rk4 (hot loop)
        k1p = q
        k1q = g(p) - c * q
        p1 = p + half * k1p
        q1 = q + half * k1q
        k2p = q1
        k2q = g(p1) - c * q1
        p1 = p + half * k2p
        q1 = q + half * k2q
        k3p = q1
        k3q = g(p1) - c * q1
        p1 = p + ds * k3p
        q1 = q + ds * k3q
        k4p = q1
        k4q = g(p1) - c * q1
        pn = p + sixth * (k1p + 2.0 * (k2p + k3p) + k4p)
        qn = q + sixth * (k1q + 2.0 * (k2q + k3q) + k4q)

        ev = event_of(pn, qn)
        if ev is not None:
            # refine the crossing on [0, ds] to ds * EVENT_REFINE
            lo, hi = 0.0, ds
            p_hi, q_hi = pn, qn
            while hi - lo > ds * EVENT_REFINE:
                mid = 0.5 * (lo + hi)
                pm, qm = rk4(p, q, mid)
                if event_of(pm, qm) is not None:
                    hi, p_hi, q_hi = mid, pm, qm
                else:
                    lo = mid
            event = event_of(p_hi, q_hi)
            phis.append(p_hi)
            psis.append(q_hi)
            s_event = (k - 1) * ds + hi
            res = abs(p_hi - a_plus) + abs(q_hi)
            if res < best_res:
                best_res = res
                best_idx = k
            break

        p, q = pn, qn
        phis.append(p)
        psis.append(q)
        res = abs(p - a_plus) + abs(q)
        if res < best_res:
            best_res = res
            best_idx = k

    s = np.arange(len(phis), dtype=float) * ds
    if s_event is not None:
        s[-1] = s_event
    return Trajectory(s, np.array(phis), np.array(psis)), event, best_idx, best_res


def _default_s_max(nl: Nonlinearity) -> float:
    # fronts decay exponentially; a fixed multiple of the well separation suffices
    return 40.0 * (nl.a_plus - nl.a_minus)


def integrate_profile_ode(
    nl: Nonlinearity,
    alpha: float,
    c: float,
    ds: float = DEFAULT_DS,
    s_max: float | None = None,
    tol_asym: float = DEFAULT_TOL_ASYM,
) -> tuple[Trajectory, str]:
    """Shoot the profile ODE from (alpha, 0) and classify the orbit.

    Raises NoEvent when s_max is exhausted without a classification (s_max
    too small, or c numerically at the connection).
    """
    if ds <= 0.0 or (s_max is not None and s_max <= 0.0):
        raise ConfigError("ds and s_max must be positive")
    if c >= 0.0:
        raise ConfigError("the wave velocity must be negative")
    s_max = _default_s_max(nl) if s_max is None else s_max
    f = _fast_poly(nl.coeffs)
    traj, event, _, _ = _shoot(
        f, nl.a_plus, alpha, 0.0, c, ds, int(round(s_max / ds)), tol_asym, stop_on_converged=True
    )
    if event == NO_EVENT:
        raise NoEvent(f"no event before s_max = {s_max} (alpha = {alpha}, c = {c})")
    return traj, event


def _classify_side(f, a_plus, p0, q0, c, ds, n_max, tol_asym, pen_alpha=math.inf, pen_inv_mu=0.0):
    """Terminal OVERSHOOT/TURNBACK side of an orbit, ignoring the converged event."""
    _, event, _, best_res = _shoot(
        f, a_plus, p0, q0, c, ds, n_max, tol_asym, stop_on_converged=False,
        pen_alpha=pen_alpha, pen_inv_mu=pen_inv_mu,
    )
    if event == NO_EVENT:
        raise NoEvent(f"no event before n_max * ds = {n_max * ds} (c = {c})")
    return event, best_res


def velocity_bound(nl: Nonlinearity, alpha: float) -> float:
    """Lower bound C2 on |c|: sup|f| / sqrt(2 * integral of f from alpha to a_zero)."""
    well = nl.primitive(nl.a_zero) - nl.primitive(alpha)
    return nl.sup_abs_value() / math.sqrt(2.0 * well)


def slope_bound(nl: Nonlinearity, alpha: float) -> float:
    """Upper bound C1 on the profile slope."""
    drop = -(nl.primitive(nl.a_plus) - nl.primitive(alpha))
    sup_left = float(np.max(nl.value(np.linspace(nl.a_minus, nl.a_zero, 2001))))
    return math.sqrt(2.0) * math.sqrt(drop + (nl.a_zero - alpha + 1.0) * sup_left)


def _bisect_velocity(classify, c_lo: float, c_hi: float, tol_c: float, tol_asym: float):
    """Bisection on the orbit classification over [c_lo, c_hi].

    The orientation of the OVERSHOOT/TURNBACK sides is detected from the
    bracket ends rather than assumed.  Returns (c, best) where best is the
    smallest closest-approach residual seen at any midpoint.
    """
    cls_lo, _ = classify(c_lo)
    cls_hi, _ = classify(c_hi)
    if {cls_lo, cls_hi} != {OVERSHOOT, TURNBACK}:
        raise BracketInvalid(
            f"bracket ends classify as ({cls_lo}, {cls_hi}); expected one OVERSHOOT and one TURNBACK"
        )
    best_c = math.nan
    best_res = math.inf
    iterations = 0
    while iterations < MAX_BISECT:
        iterations += 1
        mid = 0.5 * (c_lo + c_hi)
        if mid == c_lo or mid == c_hi:
            break
        cls_mid, res = classify(mid)
        if res < best_res:
            best_c, best_res = mid, res
        if cls_mid == cls_lo:
            c_lo = mid
        else:
            c_hi = mid
        if (c_hi - c_lo) < tol_c and best_res < tol_asym:
            break
    else:
        raise NoConvergence(f"bisection did not converge within {MAX_BISECT} iterations")
    return 0.5 * (c_lo + c_hi), best_c, best_res


def _truncate_at_closest(traj: Trajectory, a_plus: float) -> tuple[Trajectory, float]:
    """Cut the orbit at its closest approach to (a_plus, 0).

    Only points with psi > 0 and phi < a_plus are eligible, so the stored
    profile keeps the strict monotonicity and sub-a_plus bounds even when
    the final shot sits marginally on the overshoot side.
    """
    res = np.abs(traj.phi - a_plus) + np.abs(traj.psi)
    ok = (traj.psi > 0.0) & (traj.phi < a_plus)
    ok[0] = True
    # eligibility must hold for the whole retained prefix
    ok = np.logical_and.accumulate(ok)
    res_masked = np.where(ok, res, np.inf)
    idx = int(np.argmin(res_masked))
    idx = max(idx, 1)
    return (
        Trajectory(traj.s[: idx + 1].copy(), traj.phi[: idx + 1].copy(), traj.psi[: idx + 1].copy()),
        float(res[idx]),
    )


def solve_profile(
    nl: Nonlinearity,
    alpha: float,
    tol_c: float = DEFAULT_TOL_C,
    ds: float = DEFAULT_DS,
    s_max: float | None = None,
    tol_asym: float = DEFAULT_TOL_ASYM,
    admissibility: AdmissibleAlpha | None = None,
) -> ProfileSolution:
    """Compute the traveling-wave profile and velocity for an obstacle level.

    Parameters
    ----------
    tol_c : float
        Bisection stops once the velocity bracket is narrower than this and
        a converged orbit has been seen.  Pass 0.0 to bisect to the limit of
        double precision.
    ds, s_max, tol_asym : float
        Fixed RK4 step, integration horizon and the closeness threshold for
        the CONVERGED event.
    """
    adm = admissibility if admissibility is not None else check_alpha(nl, alpha)
    if not adm.satisfies_hyp:
        raise ConfigError(f"alpha not admissible: {adm.reason}")
    s_max = _default_s_max(nl) if s_max is None else s_max
    f = _fast_poly(nl.coeffs)
    n_max = int(round(s_max / ds))

    def classify(c: float):
        return _classify_side(f, nl.a_plus, alpha, 0.0, c, ds, n_max, tol_asym)

    c_lo = -(velocity_bound(nl, alpha) + 1.0)
    c, best_c, _ = _bisect_velocity(classify, c_lo, BRACKET_UPPER, tol_c, tol_asym)

    traj, residual = None, math.inf
    for candidate in (c, best_c):
        # the final bracket midpoint was never itself classified; if its
        # orbit misses, fall back to the best midpoint seen in the bisection
        shot, _, _, _ = _shoot(
            f, nl.a_plus, alpha, 0.0, candidate, ds, n_max, tol_asym, stop_on_converged=False
        )
        shot, res = _truncate_at_closest(shot, nl.a_plus)
        if res < residual:
            traj, residual, c = shot, res, candidate
        if residual <= tol_asym:
            break
    if residual > tol_asym:
        raise NoConvergence(
            f"closest approach {residual:.3e} misses (a_plus, 0) by more than tol_asym = {tol_asym:.1e}"
        )
    sol = ProfileSolution(
        alpha=float(alpha),
        c=float(c),
        s_grid=traj.s,
        phi=traj.phi,
        psi=traj.psi,
        ds=float(ds),
        residual_at_end=residual,
        c_identity=math.nan,
        fprime_aplus=float(nl.deriv(nl.a_plus)),
        a_plus=float(nl.a_plus),
    )
    return replace(sol, c_identity=velocity_identity(nl, sol))


def velocity_identity(nl: Nonlinearity, sol: ProfileSolution) -> float:
    """Velocity recomputed from the energy balance.

    c = (W(a_plus) - W(alpha)) / integral of phi'^2 over the real line; the
    integral is a trapezoid over the stored grid plus the analytic
    contribution of the exponential tail beyond it.
    """
    base = sol.alpha_mu if sol.kind == REGULARIZED and sol.alpha_mu is not None else sol.alpha
    numerator = float(nl.primitive(nl.a_plus) - nl.primitive(base))
    integral = float(np.trapezoid(sol.psi**2, sol.s_grid))
    if integral < 1e-14:
        raise DivideNearZero("integral of phi'^2 is numerically zero; degenerate trajectory")
    nu = sol.tail_rate
    integral += nu * (nl.a_plus - float(sol.phi[-1])) ** 2 / 2.0
    return numerator / integral


def penalized_reaction(nl: Nonlinearity, alpha: float, mu: float):
    """The smoothed reaction f(s) + (s - alpha)/mu * [s < alpha] and its root alpha_mu."""
    def g(s: float) -> float:
        v = float(nl.value(s))
        if s < alpha:
            v += (s - alpha) / mu
        return v

    # g(a_minus) = (a_minus - alpha)/mu < 0 and g -> f(alpha) > 0 at alpha
    try:
        root = brentq(g, nl.a_minus + 1e-15, alpha - 1e-15, xtol=1e-15)
    except ValueError as exc:
        raise NoRootAlphaMu(f"penalized reaction has no root in ({nl.a_minus}, {alpha})") from exc
    return g, float(root)


def solve_profile_regularized(
    nl: Nonlinearity,
    alpha: float,
    mu: float,
    tol_c: float = DEFAULT_TOL_C,
    ds: float = DEFAULT_DS,
    s_max: float | None = None,
    tol_asym: float = DEFAULT_TOL_ASYM,
    launch_scale: float = LAUNCH_SCALE,
) -> ProfileSolution:
    """Profile of the quadratic-penalty regularization of the obstacle.

    The hard constraint phi >= alpha is replaced by the one-sided penalty
    (s - alpha)^2 / (2 mu), which shifts the launch equilibrium to the root
    alpha_mu of the penalized reaction in (a_minus, alpha).  The orbit is
    launched a distance ``LAUNCH_SCALE * (a_plus - a_minus)`` along the
    unstable eigenvector of the saddle (alpha_mu, 0); bisection on c then
    proceeds exactly as in the sharp solve.
    """
    if not (0.0 < mu <= 1.0):
        raise ConfigError("mu must lie in (0, 1]")
    adm = check_alpha(nl, alpha)
    if not adm.satisfies_hyp:
        raise ConfigError(f"alpha not admissible: {adm.reason}")
    s_max = _default_s_max(nl) if s_max is None else s_max
    _, alpha_mu = penalized_reaction(nl, alpha, mu)
    f = _fast_poly(nl.coeffs)
    n_max = int(round(s_max / ds))
    eps = launch_scale * (nl.a_plus - nl.a_minus)
    gprime = float(nl.deriv(alpha_mu)) + 1.0 / mu

    def launch(c: float) -> tuple[float, float]:
        m_plus = (-c + math.sqrt(c * c + 4.0 * gprime)) / 2.0
        # unstable eigenvector (1, m_plus), normalized to unit psi-component
        return alpha_mu + eps / m_plus, eps

    def classify(c: float):
        p0, q0 = launch(c)
        return _classify_side(
            f, nl.a_plus, p0, q0, c, ds, n_max, tol_asym, pen_alpha=alpha, pen_inv_mu=1.0 / mu
        )

    c_lo = -(velocity_bound(nl, alpha) + 1.0)
    c, best_c, _ = _bisect_velocity(classify, c_lo, BRACKET_UPPER, tol_c, tol_asym)

    traj, residual = None, math.inf
    for candidate in (c, best_c):
        p0, q0 = launch(candidate)
        shot, _, _, _ = _shoot(
            f, nl.a_plus, p0, q0, candidate, ds, n_max, tol_asym, stop_on_converged=False,
            pen_alpha=alpha, pen_inv_mu=1.0 / mu,
        )
        shot, res = _truncate_at_closest(shot, nl.a_plus)
        if res < residual:
            traj, residual, c = shot, res, candidate
        if residual <= tol_asym:
            break
    if residual > tol_asym:
        raise NoConvergence(f"regularized orbit misses (a_plus, 0) by {residual:.3e}")
    sol = ProfileSolution(
        alpha=float(alpha),
        c=float(c),
        s_grid=traj.s,
        phi=traj.phi,
        psi=traj.psi,
        ds=float(ds),
        residual_at_end=residual,
        c_identity=math.nan,
        kind=REGULARIZED,
        mu=float(mu),
        alpha_mu=alpha_mu,
        fprime_aplus=float(nl.deriv(nl.a_plus)),
        a_plus=float(nl.a_plus),
    )
    return replace(sol, c_identity=velocity_identity(nl, sol))


@dataclass(frozen=True)
class FamilyEntry:
    alpha: float
    c: float
    c_identity: float
    error: str | None = None


def profile_family(
    nl: Nonlinearity,
    alphas,
    tol_c: float = DEFAULT_TOL_C,
    ds: float = DEFAULT_DS,
    tol_asym: float = DEFAULT_TOL_ASYM,
) -> list[FamilyEntry]:
    """Solve the wave family over a set of obstacle levels, sorted by alpha.

    Individual failures are recorded per entry and do not abort the family.
    """
    entries: list[FamilyEntry] = []
    for alpha in sorted(float(a) for a in alphas):
        try:
            sol = solve_profile(nl, alpha, tol_c=tol_c, ds=ds, tol_asym=tol_asym)
            entries.append(FamilyEntry(alpha, sol.c, sol.c_identity))
        except Exception as exc:  # per-entry failure, family continues
            entries.append(FamilyEntry(alpha, math.nan, math.nan, error=f"{type(exc).__name__}: {exc}"))
    return entries


def evaluate_profile(sol: ProfileSolution, x: ArrayLike) -> ArrayLike:
    """Profile value at arbitrary positions.

    Constant at the left limit for x <= 0, linear interpolation on the
    stored grid, and the exponential tail
    a_plus - (a_plus - phi_end) * exp(-nu (x - s_end)) beyond it.
    """
    left = float(sol.phi[0])
    xs = np.asarray(x, dtype=float)
    out = np.interp(xs, sol.s_grid, sol.phi)
    out = np.where(xs <= sol.s_grid[0], left, out)
    tail = sol.a_plus - (sol.a_plus - float(sol.phi[-1])) * np.exp(-sol.tail_rate * (xs - sol.s_end))
    out = np.where(xs > sol.s_end, tail, out)
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out)
    return out


def evaluate_profile_slope(sol: ProfileSolution, x: ArrayLike) -> ArrayLike:
    """Profile derivative at arbitrary positions (0 left of the contact point)."""
    xs = np.asarray(x, dtype=float)
    out = np.interp(xs, sol.s_grid, sol.psi)
    out = np.where(xs <= sol.s_grid[0], 0.0 if sol.kind == SHARP else float(sol.psi[0]), out)
    nu = sol.tail_rate
    tail = nu * (sol.a_plus - float(sol.phi[-1])) * np.exp(-nu * (xs - sol.s_end))
    out = np.where(xs > sol.s_end, tail, out)
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out)
    return out


def profile_second_derivative_limits(sol: ProfileSolution, nl: Nonlinearity) -> tuple[float, float]:
    """One-sided limits of phi'' at the contact point: (0, f(alpha))."""
    left = 0.0
    right = float(nl.value(sol.phi[0])) - sol.c * float(sol.psi[0])
    return left, right
