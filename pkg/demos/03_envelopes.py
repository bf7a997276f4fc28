"""Sub/supersolution envelopes: certified bounds that squeeze solutions.

Shifted-and-lifted copies of the wave profile bound solutions from above
and below once their constants (lift delta, decay beta, shift gain sigma)
are admissible.  This script computes the admissibility thresholds for
alpha = -0.8, verifies the defining residual signs on a fine grid, shows
that a deliberately undersized sigma fails, and sandwiches an actual
simulation between the two envelopes.
"""
import numpy as np

from acplus import (
    ComparisonEnvelope,
    Grid1D,
    IMEX_PROJECTED,
    MINUS,
    PLUS,
    SimConfig,
    check_ordering,
    check_residual_sign,
    compute_envelope_constants,
    evaluate_profile,
    make_cubic,
    run_simulation,
    solve_profile,
)

nl = make_cubic()
sol = solve_profile(nl, -0.8)
consts = compute_envelope_constants(sol, nl)
print("admissibility thresholds at alpha = -0.8:")
print(f"  lift bound    delta0 = {consts.delta0:.5f}")
print(f"  decay bound   beta0  = {consts.beta0:.5f}  (= f'(alpha)/2 here)")
print(f"  shift gain    sigma_beta(beta0/2) = {consts.sigma_beta(consts.beta0 / 2):.2f}")
print(f"  transition window [{consts.r_inner:.3f}, {consts.R_outer:.3f}], slope floor {consts.slope_min:.4f}")

beta = consts.beta0 / 2
delta = min(consts.delta0 / 2, 0.05)
grid = Grid1D(-25.0, 25.0, 4000)
times = (0.0, 1.0, 5.0, 20.0)

print("\n-- residual signs --")
for sigma, label in ((2 * consts.sigma_beta(beta), "sigma = 2*sigma_beta (admissible)"),
                     (consts.sigma_beta(beta) / 10, "sigma = sigma_beta/10 (undersized)")):
    env = ComparisonEnvelope(sol, delta, sigma, beta, 0.0, PLUS)
    rep = check_residual_sign(env, nl, grid, times)
    verdict = "supersolution confirmed" if rep.passed else \
        f"FAILS: residual {rep.worst_residual:.4e} at x = {rep.worst_x:.2f}, t = {rep.worst_t}"
    print(f"  upper envelope, {label}: {verdict}")
env_minus = ComparisonEnvelope(sol, delta, 2 * consts.sigma_beta(beta), beta, 0.0, MINUS)
rep = check_residual_sign(env_minus, nl, grid, times)
print(f"  lower envelope on its validity region: {'subsolution confirmed' if rep.passed else 'failed'}")

print("\n-- sandwiching a run --")
sim_grid = Grid1D(-10.0, 15.0, 1249)
x = sim_grid.nodes()
cfg = SimConfig(scheme=IMEX_PROJECTED, dt=1e-3, t_end=4.0,
                bc_left=-0.8, bc_right=float(evaluate_profile(sol, sim_grid.x_max)),
                snapshot_every=500)
series = run_simulation(cfg, evaluate_profile(sol, x), nl, sim_grid, alpha=-0.8)
sigma = 2 * consts.sigma_beta(beta)
env_plus = ComparisonEnvelope(sol, delta, sigma, beta, -0.5, PLUS)
env_minus = ComparisonEnvelope(sol, delta, sigma, beta, 0.5, MINUS)
order = check_ordering(series, env_minus, env_plus, sim_grid)
print(f"w- <= u <= w+ at every node of every snapshot: {order.passed} "
      f"(tightest gap {order.worst_gap:.3e} at t = {order.worst_t})")
