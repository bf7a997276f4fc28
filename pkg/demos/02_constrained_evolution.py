"""Time-stepping the constrained flow and reading off its structure.

A wave launched from exact profile samples should translate at its
velocity while keeping its shape; the Lagrange multiplier (the clipped
part of the velocity) equals -f(alpha) on the flat region and vanishes
ahead of the front; and the tracked free boundary moves with the wave.
"""
import numpy as np

from acplus import (
    Grid1D,
    IMEX_PROJECTED,
    SimConfig,
    build_compliant_initial_data,
    evaluate_profile,
    fit_wave_position,
    make_cubic,
    run_simulation,
    solve_profile,
)

nl = make_cubic()
alpha = -0.8
sol = solve_profile(nl, alpha)
grid = Grid1D(-10.0, 15.0, 1249)   # h = 0.02
x = grid.nodes()

print("-- wave persistence --")
cfg = SimConfig(
    scheme=IMEX_PROJECTED, dt=1e-3, t_end=5.0,
    bc_left=alpha, bc_right=float(evaluate_profile(sol, grid.x_max)),
    snapshot_every=1000,
)
series = run_simulation(cfg, evaluate_profile(sol, x), nl, grid, alpha=alpha)
print(f"{'t':>6} {'front r(t)':>12} {'fitted shift':>13} {'c*t':>10} {'shape error':>12}")
for snap in series.snapshots:
    shift, err = fit_wave_position(snap, sol, grid)
    print(f"{snap.t:>6.1f} {snap.r:>12.5f} {shift:>13.5f} {sol.c * snap.t:>10.5f} {err:>12.3e}")
print(f"per-step monotonicity floor: {series.min_increment:.1e} (never negative)")

print("\n-- multiplier structure on the final snapshot --")
last = series.snapshots[-1]
contact = x < last.r - 2 * grid.h
ahead = x > last.r + 2 * grid.h
print(f"eta on the flat side:  mean {last.eta[contact].mean():+.6f}  (target -f(alpha) = {-nl.value(alpha):+.6f})")
print(f"eta ahead of the front: max |eta| = {np.max(np.abs(last.eta[ahead])):.2e}  (target 0)")
print(f"eta is nonpositive everywhere: max eta = {last.eta.max():.2e}")

print("\n-- a constrained start: ramp data held down by the obstacle --")
u0 = build_compliant_initial_data(nl, alpha, xi1=-4.0, ramp_width=3.0, top=0.9, grid=grid)
cfg2 = SimConfig(scheme=IMEX_PROJECTED, dt=1e-3, t_end=3.0,
                 bc_left=alpha, bc_right=float(evaluate_profile(sol, grid.x_max)),
                 snapshot_every=1500)
series2 = run_simulation(cfg2, u0, nl, grid, alpha=alpha)
for snap in series2.snapshots:
    n_pinned = int(np.sum(np.abs(snap.u - u0) < 1e-12))
    print(f"t = {snap.t:4.1f}: front at {snap.r:+.4f}, nodes still pinned at the initial datum: {n_pinned}")
print("the flow only ever increases u; pinned nodes release as the front organizes")
