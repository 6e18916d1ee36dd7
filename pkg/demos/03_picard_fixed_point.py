"""Picard iteration for the mean-field expected default count.

In the mean-field limit the expected cumulative default count e_t solves a
fixed-point problem: feeding a candidate curve into the hat-transformed
dynamics and counting level crossings must return the same curve.  Starting
from zero, the iterates increase monotonically -- pathwise, not just on
average, thanks to common random numbers -- and converge on short horizons.
"""

import numpy as np

from bankmfg import FixedPointConfig, RateCurve, apply_map_M, erfc_level_sum, picard_iterate

cfg = FixedPointConfig(a=0.0, x0=2.0, T=1.0, n_paths=20_000, dt=1e-3,
                       max_iter=25, tol=1e-4, seed=0)
result = picard_iterate(cfg)

print(f"converged: {result.converged} after {result.n_iterations} iterations")
print("sup-norm gaps between successive iterates:")
for k, gap in enumerate(result.sup_gaps, start=1):
    print(f"  iteration {k:2d}: {gap:.2e}")

# --- the fan of iterates ------------------------------------------------------
print("\nvalue at T of each iterate (monotone increasing):")
print("  ", np.array([it.values[-1] for it in result.iterates]))

# --- analytic guardrails ------------------------------------------------------
# The first iterate is dominated by the line t/x0, and the level-crossing
# series of the unit-drift Brownian motion dominates every admissible input.
t = cfg.times
assert np.all(result.iterates[0].values <= t / cfg.x0 + 1e-12)
print("\nfirst iterate stays below t/x0: True")
print("closed-form level sum at T:", erfc_level_sum(cfg.T, cfg.x0),
      "vs fixed point:", result.e_star.values[-1])

# --- the map is monotone -------------------------------------------------------
rng = np.random.default_rng(cfg.seed)
inc = cfg.draw_noise(rng)
z0 = cfg.draw_initial(rng)
lo = apply_map_M(RateCurve(t, 0.1 * t), cfg, increments=inc, z0=z0)
hi = apply_map_M(RateCurve(t, 0.2 * t), cfg, increments=inc, z0=z0)
print("map preserves the pointwise order of inputs:",
      bool(np.all(hi.curve.values >= lo.curve.values)))
