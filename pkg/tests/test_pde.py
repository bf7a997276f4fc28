import numpy as np
import pytest

from acplus.errors import BoundaryProximityWarning, CflViolation, ConfigError, RampOutOfGrid
from acplus.pde import (
    EXPLICIT_POSITIVE_PART,
    IMEX_PROJECTED,
    Grid1D,
    SimConfig,
    build_compliant_initial_data,
    compute_multiplier,
    free_boundary_threshold,
    initial_state,
    locate_free_boundary,
    run_simulation,
    step_explicit_positive_part,
    step_imex_projected,
)
from acplus.profile import evaluate_profile


@pytest.fixture(scope="module")
def grid():
    return Grid1D(-10.0, 10.0, 999)  # h = 0.02


def make_state(u, nl, grid, bc_left, bc_right, alpha=None):
    return initial_state(np.asarray(u, dtype=float), nl, grid, bc_left, bc_right, alpha=alpha)


def test_grid_geometry():
    g = Grid1D(0.0, 1.0, 99)
    assert g.h == pytest.approx(0.01)
    x = g.nodes()
    assert x[0] == pytest.approx(0.01) and x[-1] == pytest.approx(0.99)
    with pytest.raises(ConfigError):
        Grid1D(1.0, 0.0, 99)
    with pytest.raises(ConfigError):
        Grid1D(0.0, 1.0, 4)


def test_equilibrium_at_a_plus(cubic, grid):
    u = np.full(grid.n, cubic.a_plus)
    st = make_state(u, cubic, grid, cubic.a_plus, cubic.a_plus)
    new = step_explicit_positive_part(st, cubic, grid, 1e-4)
    assert np.array_equal(new.u, u)
    assert np.all(new.eta == 0.0)


@pytest.mark.parametrize("scheme", [EXPLICIT_POSITIVE_PART, IMEX_PROJECTED])
def test_constant_below_zero_is_steady(cubic, grid, scheme):
    # any constant in (a_minus, a_zero) is frozen by the constraint
    gamma = -0.37
    u = np.full(grid.n, gamma)
    st = make_state(u, cubic, grid, gamma, gamma)
    step = step_explicit_positive_part if scheme == EXPLICIT_POSITIVE_PART else step_imex_projected
    new = st
    for _ in range(50):
        new = step(new, cubic, grid, 1e-4)
    assert np.array_equal(new.u, u)


def test_constant_above_zero_climbs(cubic, grid):
    # on (a_zero, a_plus) the unconstrained velocity is positive: one
    # explicit step adds exactly dt * (-f(gamma))
    gamma = 0.4
    dt = 1e-4
    u = np.full(grid.n, gamma)
    st = make_state(u, cubic, grid, gamma, gamma)
    new = step_explicit_positive_part(st, cubic, grid, dt)
    inc = new.u - u
    assert np.allclose(inc[1:-1], -dt * cubic.value(gamma), rtol=0, atol=1e-15)
    assert float(np.min(inc)) >= 0.0


def test_cfl_guards(cubic, grid):
    u = np.full(grid.n, 0.5)
    st = make_state(u, cubic, grid, 0.5, 0.5)
    with pytest.raises(CflViolation):
        step_explicit_positive_part(st, cubic, grid, grid.h**2)  # > 0.4 h^2
    with pytest.raises(CflViolation):
        step_imex_projected(st, cubic, grid, 0.2)  # > 0.2 / sup|f'| = 0.1


def test_imex_matches_explicit_to_dt2(cubic, grid, sol08):
    # one step of each scheme agrees to O(dt^2) on smooth data
    u0 = evaluate_profile(sol08, grid.nodes() + 3.0)
    bcl = -0.8
    bcr = float(evaluate_profile(sol08, grid.x_max + 3.0))
    st = make_state(u0, cubic, grid, bcl, bcr, alpha=-0.8)
    gaps = []
    for dt in (1e-4, 5e-5):
        ue = step_explicit_positive_part(st, cubic, grid, dt).u
        ui = step_imex_projected(st, cubic, grid, dt).u
        gap = float(np.max(np.abs(ue - ui)))
        gaps.append(gap)
        assert gap <= 20.0 * dt * dt
    # halving dt shrinks the one-step gap at a superlinear rate
    assert gaps[0] / gaps[1] > 2.5


def test_multiplier_fields(cubic, grid):
    u = np.full(grid.n, cubic.a_plus)
    st = make_state(u, cubic, grid, cubic.a_plus, cubic.a_plus)
    assert np.all(compute_multiplier(st, cubic, grid) == 0.0)
    gamma = -0.37
    st = make_state(np.full(grid.n, gamma), cubic, grid, gamma, gamma)
    eta = compute_multiplier(st, cubic, grid)
    assert np.allclose(eta, -cubic.value(gamma))
    assert np.all(eta < 0.0)


def test_multiplier_on_wave(cubic, grid, sol08):
    # translated wave: eta ~ -f(alpha) on the contact side, ~0 ahead
    shift = -2.0
    x = grid.nodes()
    u = evaluate_profile(sol08, x - shift)
    st = make_state(u, cubic, grid, -0.8, float(evaluate_profile(sol08, grid.x_max - shift)), alpha=-0.8)
    falpha = cubic.value(-0.8)
    tol = 5.0 * grid.h * falpha
    contact = x < shift - 2 * grid.h
    ahead = x > shift + 2 * grid.h
    assert np.max(np.abs(st.eta[contact] + falpha)) <= tol
    assert np.max(np.abs(st.eta[ahead])) <= tol
    assert np.max(st.eta) <= 1e-12


def test_locate_free_boundary_cases(cubic, grid, sol08):
    x = grid.nodes()
    for shift in (-3.0, 0.0, 2.345):
        u = evaluate_profile(sol08, x - shift)
        st = make_state(u, cubic, grid, -0.8, float(evaluate_profile(sol08, grid.x_max - shift)), alpha=-0.8)
        r = locate_free_boundary(st, -0.8, cubic, grid)
        assert r == pytest.approx(shift, abs=50 * grid.h**2)
    # everywhere-contact convention
    st = make_state(np.full(grid.n, -0.8), cubic, grid, -0.8, -0.8, alpha=-0.8)
    assert locate_free_boundary(st, -0.8, cubic, grid) == grid.x_max
    # no contact at all
    eps = free_boundary_threshold(cubic, -0.8, grid)
    st = make_state(np.full(grid.n, -0.8 + 2 * eps), cubic, grid, -0.8, -0.8, alpha=-0.8)
    assert locate_free_boundary(st, -0.8, cubic, grid) is None


def test_compliant_data_shape(cubic, grid):
    u0 = build_compliant_initial_data(cubic, -0.8, -3.0, 2.0, 0.9, grid)
    x = grid.nodes()
    assert np.all(u0[x <= -3.0] == -0.8)
    assert np.all(u0[x >= -1.0] == pytest.approx(0.9))
    d = np.diff(u0)
    assert np.all(d >= -1e-15)  # monotone ramp
    assert np.max(u0) < cubic.a_plus and np.min(u0) >= -0.8


def test_compliant_data_guards(cubic, grid):
    with pytest.raises(ConfigError):
        build_compliant_initial_data(cubic, -0.8, -3.0, 2.0, cubic.a_plus, grid)  # top < a_plus strict
    with pytest.raises(RampOutOfGrid):
        build_compliant_initial_data(cubic, -0.8, 9.0, 5.0, 0.9, grid)


def test_run_simulation_bookkeeping(cubic, grid, sol08):
    u0 = evaluate_profile(sol08, grid.nodes())
    cfg = SimConfig(
        scheme=IMEX_PROJECTED, dt=1e-3, t_end=0.1,
        bc_left=-0.8, bc_right=float(evaluate_profile(sol08, grid.x_max)),
        snapshot_every=20,
    )
    series = run_simulation(cfg, u0, cubic, grid, alpha=-0.8)
    # 100 steps, every 20 -> snapshots at steps 0, 20, ..., 100
    assert len(series.snapshots) == 100 // 20 + 1
    assert series.snapshots[0].t == 0.0
    assert series.snapshots[-1].t == pytest.approx(0.1)
    assert series.min_increment >= -1e-12
    for snap in series.snapshots:
        assert np.max(snap.eta) <= 1e-12
        assert np.all(snap.u >= snap.obstacle - 1e-12)


def test_maximum_principle(cubic, grid):
    # bounds gamma- = a_minus, gamma+ = a_plus are respected for data inside
    rng = np.random.default_rng(5)
    x = grid.nodes()
    u0 = 0.1 + 0.5 * np.sin(0.7 * x) + 0.2 * rng.standard_normal(grid.n) * 0.0
    u0 = np.clip(u0, -0.95, 0.95)
    cfg = SimConfig(scheme=IMEX_PROJECTED, dt=5e-3, t_end=0.5,
                    bc_left=float(u0[0]), bc_right=float(u0[-1]), snapshot_every=20)
    series = run_simulation(cfg, u0, cubic, grid)
    for snap in series.snapshots:
        assert np.min(snap.u) >= cubic.a_minus - 1e-10
        assert np.max(snap.u) <= cubic.a_plus + 1e-10


def test_boundary_proximity_warning(cubic, sol08):
    grid = Grid1D(-2.0, 10.0, 599)
    # front starts one cell cluster away from the left edge
    u0 = evaluate_profile(sol08, grid.nodes() + 1.95)
    cfg = SimConfig(scheme=IMEX_PROJECTED, dt=1e-3, t_end=0.05,
                    bc_left=-0.8, bc_right=float(evaluate_profile(sol08, grid.x_max + 1.95)),
                    snapshot_every=10)
    with pytest.warns(BoundaryProximityWarning):
        run_simulation(cfg, u0, cubic, grid, alpha=-0.8)


def test_monotone_in_time_wave(cubic, grid, sol08):
    u0 = evaluate_profile(sol08, grid.nodes())
    cfg = SimConfig(scheme=EXPLICIT_POSITIVE_PART, dt=0.4 * grid.h**2, t_end=0.01,
                    bc_left=-0.8, bc_right=float(evaluate_profile(sol08, grid.x_max)),
                    snapshot_every=50)
    series = run_simulation(cfg, u0, cubic, grid, alpha=-0.8)
    assert series.min_increment >= -1e-12
