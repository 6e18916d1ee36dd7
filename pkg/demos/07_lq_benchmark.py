"""Validating the game solver against the quadratic-ansatz solution.

With a genuine penalty (epsilon > q^2) the stationary game admits a closed
form: a quadratic value function whose coefficients follow from matching
powers, a compatible damping weight gamma*, an exit cost that pins the
value at the default boundary, and the closed-form density at the effective
reversion rate a_eff = A + q + a.  Feeding the solver that density, the
ansatz boundary/terminal data and gamma*, the numerical pair must stay on
the analytic solution up to discretization error.
"""

import numpy as np

from bankmfg import (
    ModelParams,
    SpaceTimeGrid,
    assemble_stationary_solution,
    compute_lq_coefficients,
    equilibrium_control,
    full_feedback_control,
    solve_mfg,
)

base = ModelParams(a=0.5, x0=2.0, sigma=1.0, r=0.5, q=0.1, epsilon=0.5)
coef = compute_lq_coefficients(base)
print("ansatz coefficients:")
print(f"  A = {coef.A:.6f}  B = {coef.B:.6f}  C = {coef.C:.6f}")
print(f"  gamma*    = {coef.gamma_star:.6f}   (exact drift reduction would need "
      f"{coef.gamma_exact:.4f}, outside (0, 1])")
print(f"  exit cost = {coef.exit_cost:.6f}")
print(f"  stationary pair: e0 = {coef.e0_eff:.6f} at mean {coef.mbar}")

# the two reported control forms differ by the borrowing incentive term
x_probe = np.array([1.0, 2.0, 3.0])
print("  control -u'(x)          :", equilibrium_control(coef, x_probe))
print("  control -u'(x)+q(m-x)   :", full_feedback_control(coef, x_probe, base))

# --- solve the finite-difference system against the ansatz ---------------------
params = ModelParams(a=0.5, x0=2.0, sigma=1.0, r=0.5, q=0.1, epsilon=0.5,
                     gamma=coef.gamma_star)
u_ans, m_ans = assemble_stationary_solution(coef, params)
grid = SpaceTimeGrid(length=8.0, horizon=1.2, n_space=320, n_time=60)
m0 = m_ans.snapshot(grid.h, grid.n_space + 1).values
m0 /= grid.h * m0.sum()
sol = solve_mfg(m0, grid, params, u_left=coef.exit_cost,
                u_right=(float(u_ans(grid.x[-2])), float(u_ans(grid.x[-1]))),
                u_terminal=u_ans(grid.x))

interior = slice(1, grid.n_space - 1)
ua = u_ans(grid.x)
gap_u = np.max(np.abs(sol.U[0][interior] - ua[interior])) / np.max(np.abs(ua[interior]))
l1_m = grid.h * np.abs(sol.M[-1] - m_ans.density(grid.x)).sum()
print(f"\nnumerical vs analytic after {sol.n_iterations} outer iterations:")
print(f"  relative sup gap of the value at t = 0 : {gap_u:.2%}")
print(f"  L1 gap of the plateau density          : {l1_m:.4f}")
print("  (with gamma* the stationary mean drifts at the slow rate "
      f"{(1 - coef.gamma_star**2) * coef.e0_eff * coef.mbar:.4f} per unit time, "
      "so long horizons walk away from the closed form)")
