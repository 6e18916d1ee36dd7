"""The coupled value/density game system on the baseline configuration.

Each bank controls its borrowing/lending rate to minimize a discounted
quadratic cost before default; the population's density feeds back into
every bank's problem through its mean and its default rate.  The solver
alternates forward density sweeps and backward value sweeps until the pair
stops moving.

On the baseline configuration the penalty is degenerate (epsilon = q^2), so
the optimal control vanishes and the value function is identically zero --
the density dynamics alone carries the interesting behavior: the default
rate climbs from zero to a stationary plateau.
"""

import numpy as np

from bankmfg import ModelParams, SpaceTimeGrid, solve_mfg, truncated_gaussian_profile
from bankmfg.mfg import fp_system_residual

grid = SpaceTimeGrid(length=10.0, horizon=10.0, n_space=200, n_time=100)

for x0 in (2.0, 3.0):
    params = ModelParams(a=0.5, x0=x0, sigma=1.0, r=0.5, q=0.1, epsilon=0.01)
    sol = solve_mfg(truncated_gaussian_profile(grid, x0), grid, params,
                    outer_tol=1e-6, outer_max=200)
    rate = sol.default_rate_path()
    mean = sol.mean_path()
    print(f"x0 = {x0}: converged in {sol.n_iterations} outer iterations; "
          f"self-consistency residual {fp_system_residual(sol):.1e}")
    print(f"  default rate: 0 -> {rate[-1]:.4f}   mean: {mean[0]:.3f} -> {mean[-1]:.3f}")
    print("  rate path:", "  ".join(f"{rate[k]:.4f}" for k in range(0, 101, 10)))
    print()

# Starting further from the boundary (x0 = 3) the system is almost inert:
# the mean barely moves and the default rate stays near zero, while the
# x0 = 2 run settles into a visible stationary default flow.
