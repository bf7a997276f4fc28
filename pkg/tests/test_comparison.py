import numpy as np
import pytest

from acplus.comparison import (
    MINUS,
    PLUS,
    ComparisonEnvelope,
    check_ordering,
    check_residual_sign,
    compute_envelope_constants,
    eval_envelope,
    is_admissible,
)
from acplus.errors import ConfigError, NoAdmissibleDelta
from acplus.pde import Grid1D, PdeState, SimConfig, SnapshotSeries, IMEX_PROJECTED
from acplus.profile import evaluate_profile, solve_profile


@pytest.fixture(scope="module")
def consts(ws, sol08):
    return ws.env_consts()


def test_constants_sanity(consts, cubic, sol08):
    fpa = cubic.deriv(-0.8)
    assert fpa > 0.0
    assert 0.0 < consts.delta0 <= (cubic.a_plus - cubic.a_minus) / 4.0
    assert 0.0 < consts.beta0 <= fpa / 2.0
    assert consts.slope_min > 0.0
    assert 0.0 < consts.r_inner < consts.R_outer


def test_sigma_beta_monotone_and_divergent(consts):
    betas = np.array([consts.beta0 / k for k in (2, 4, 8, 16, 64)])
    sigmas = [consts.sigma_beta(float(b)) for b in betas]
    assert all(sigmas[i] < sigmas[i + 1] for i in range(len(sigmas) - 1))
    assert consts.sigma_beta(1e-9) > 1e6


def test_gate_on_fprime(cubic):
    # f'(-0.5) < 0: no admissible lift exists for that level
    sol = solve_profile(cubic, -0.5, ds=2e-3)
    with pytest.raises(NoAdmissibleDelta):
        compute_envelope_constants(sol, cubic)


def test_eval_envelope_limits(sol08, consts):
    delta, beta = 0.02, consts.beta0 / 2.0
    sigma = 2.0 * consts.sigma_beta(beta)
    env = ComparisonEnvelope(sol08, delta, sigma, beta, 1.5, PLUS)
    xs = np.linspace(-3.0, 8.0, 50)
    # t = 0: pure lift, no shift
    assert np.allclose(eval_envelope(env, xs, 0.0), evaluate_profile(sol08, xs - 1.5) + delta)
    # t -> infinity (in the co-moving frame): pure shift, no lift
    big_t = 1e6
    assert np.allclose(
        eval_envelope(env, xs + sol08.c * big_t, big_t),
        evaluate_profile(sol08, xs - 1.5 + sigma * delta),
        atol=1e-12,
    )
    env_m = ComparisonEnvelope(sol08, delta, sigma, beta, 1.5, MINUS)
    # left of the shift line the lower envelope sits strictly below alpha
    t = 0.7
    x_line = env_m.shift_line(t)
    assert eval_envelope(env_m, x_line - 1.0, t) < sol08.alpha


def test_envelope_monotone_in_x(sol08, consts):
    beta = consts.beta0 / 2.0
    env = ComparisonEnvelope(sol08, 0.02, 2.0 * consts.sigma_beta(beta), beta, 0.0, PLUS)
    xs = np.linspace(-5.0, 25.0, 400)
    vals = eval_envelope(env, xs, 3.0)
    assert np.all(np.diff(vals) >= -1e-14)


def test_envelope_validation(sol08):
    with pytest.raises(ConfigError):
        ComparisonEnvelope(sol08, -0.1, 1.0, 0.1, 0.0, PLUS)
    with pytest.raises(ConfigError):
        ComparisonEnvelope(sol08, 0.1, 1.0, 0.1, 0.0, "up")


def test_admissibility_monotone(consts, sol08):
    beta = consts.beta0 / 2.0
    delta = consts.delta0 / 2.0
    sigma = 2.0 * consts.sigma_beta(beta)
    base = ComparisonEnvelope(sol08, delta, sigma, beta, 0.0, PLUS)
    assert is_admissible(base, consts)
    # smaller lift, larger shift gain stay admissible
    assert is_admissible(ComparisonEnvelope(sol08, delta / 3, sigma * 2, beta, 0.0, PLUS), consts)
    assert not is_admissible(ComparisonEnvelope(sol08, delta, sigma / 10, beta, 0.0, PLUS), consts)


def test_residual_sign_admissible_and_control(sol08, cubic, consts):
    grid = Grid1D(-25.0, 25.0, 2000)
    beta = consts.beta0 / 2.0
    delta = min(consts.delta0 / 2.0, 0.05)
    times = (0.0, 1.0, 5.0, 20.0)
    good = ComparisonEnvelope(sol08, delta, 2.0 * consts.sigma_beta(beta), beta, 0.0, PLUS)
    rep = check_residual_sign(good, cubic, grid, times)
    assert rep.passed, rep
    bad = ComparisonEnvelope(sol08, delta, consts.sigma_beta(beta) / 10.0, beta, 0.0, PLUS)
    rep_bad = check_residual_sign(bad, cubic, grid, times)
    assert not rep_bad.passed
    # the failure shows up strictly inside the transition region
    assert consts.r_inner < rep_bad.worst_x - bad.shift_line(rep_bad.worst_t) < consts.R_outer


def test_residual_sign_minus_side(sol08, cubic, consts):
    grid = Grid1D(-25.0, 25.0, 2000)
    beta = consts.beta0 / 2.0
    delta = min(consts.delta0 / 2.0, 0.05)
    env = ComparisonEnvelope(sol08, delta, 2.0 * consts.sigma_beta(beta), beta, 0.0, MINUS)
    rep = check_residual_sign(env, cubic, grid, (0.0, 1.0, 5.0, 20.0))
    assert rep.passed, rep


def _wave_series(sol, grid, times):
    x = grid.nodes()
    snaps = []
    for t in times:
        u = evaluate_profile(sol, x - sol.c * t)
        snaps.append(PdeState(float(t), u, np.zeros_like(u), sol.c * t, u,
                              sol.alpha, float(evaluate_profile(sol, grid.x_max - sol.c * t))))
    cfg = SimConfig(scheme=IMEX_PROJECTED, dt=1e-3, t_end=float(times[-1]) if times[-1] else 1.0,
                    bc_left=sol.alpha, bc_right=1.0, snapshot_every=1)
    return SnapshotSeries(snaps, cfg, sol.alpha)


def test_ordering_on_exact_wave(sol08, consts, cubic):
    grid = Grid1D(-15.0, 20.0, 1500)
    series = _wave_series(sol08, grid, np.linspace(0.0, 8.0, 9))
    beta = consts.beta0 / 2.0
    delta = consts.delta0 / 2.0
    sigma = 2.0 * consts.sigma_beta(beta)
    env_minus = ComparisonEnvelope(sol08, delta, sigma, beta, 0.5, MINUS)
    env_plus = ComparisonEnvelope(sol08, delta, sigma, beta, -0.5, PLUS)
    rep = check_ordering(series, env_minus, env_plus, grid)
    assert rep.passed, rep


def test_ordering_precondition(sol08, consts, cubic):
    grid = Grid1D(-15.0, 20.0, 1500)
    series = _wave_series(sol08, grid, [0.0, 1.0])
    beta = consts.beta0 / 2.0
    delta = consts.delta0 / 2.0
    sigma = 2.0 * consts.sigma_beta(beta)
    env_minus = ComparisonEnvelope(sol08, delta, sigma, beta, 0.5, MINUS)
    # upper envelope shifted so far right it starts below the data somewhere
    env_plus = ComparisonEnvelope(sol08, delta, sigma, beta, 8.0, PLUS)
    with pytest.raises(ConfigError):
        check_ordering(series, env_minus, env_plus, grid)
