"""Evolutionary density solver for the uncontrolled reserve dynamics.

Advances the density of the mean-reverting diffusion with absorption at 0
and point re-injection at the (possibly moving) mean: per step the default
rate is read off the current boundary slope, the drift row
-a (x - mean) - alpha * mean * rate is formed, the density advances with
the same upwind transport / implicit diffusion stencils as the controlled
solver (explicit transport here, so an advective CFL bound applies), and
the rate mass enters through the two-node hat quadrature at the mean.

The reversion/injection level starts at the model's x0 and evolves by the
closed-form identity mean_t = x0 * exp((1 - alpha) e_t); for alpha = 1 it
stays constant, which is the forced-mean setting of the blow-up analysis
(the level need not coincide with the first moment of an off-center p0).

Breakdown is reported through flags rather than exceptions: a default rate
above the configured ceiling or a one-step mass loss beyond tolerance stops
the run (the numerical symptom of the no-global-solution regime); only a
CFL violation by the *initial* drift field refuses to start.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .mfg import SpaceTimeGrid, beta_weights, solve_fp_step, transport_coefficients
from .model import DensitySnapshot, ModelParams

__all__ = ["FPRun", "evolve_density", "weak_form_residual"]


@dataclass
class FPRun:
    """Recorded history of one evolutionary density run."""

    grid: SpaceTimeGrid
    params: ModelParams
    alpha: float
    density: np.ndarray  # (n_steps_done+1, n_space+1)
    times: np.ndarray
    mean_path: np.ndarray  # reversion/injection level per step
    rate_path: np.ndarray  # boundary default rate per step
    cumulative_rate: np.ndarray  # e_t
    mass_path: np.ndarray
    breakdown: bool = False
    breakdown_reason: str | None = None
    breakdown_time: float | None = None

    def final_snapshot(self) -> DensitySnapshot:
        return DensitySnapshot(np.maximum(self.density[-1], 0.0), self.grid.h)


def _drift_row(x: np.ndarray, a: float, mean: float, alpha: float, rate: float) -> np.ndarray:
    return -a * (x - mean) - alpha * mean * rate


def evolve_density(
    p0: DensitySnapshot,
    params: ModelParams,
    grid: SpaceTimeGrid,
    alpha: float | None = None,
    rate_ceiling: float = 1e3,
    mass_loss_tol: float = 0.01,
) -> FPRun:
    """Evolve the density p0 over the grid horizon.

    Requires the grid to resolve the re-injection level (h <= x0 / 10) and
    to match the snapshot's step.  Raises ValueError with a suggested dt
    when the initial drift field violates the advective CFL bound
    dt <= h / max|drift|; later CFL violations (driven by a growing rate)
    are reported as breakdown instead, as are a rate above ``rate_ceiling``
    and a one-step relative mass loss beyond ``mass_loss_tol``.
    """
    if alpha is None:
        alpha = params.alpha
    h, dt = grid.h, grid.dt
    if abs(p0.h - h) > 1e-12 * h or p0.values.size != grid.n_space + 1:
        raise ValueError("initial snapshot must be sampled on the run grid")
    if h > params.x0 / 10.0 + 1e-15:
        raise ValueError(f"grid too coarse: need h <= x0/10 = {params.x0 / 10}, got {h}")

    n, nt = grid.n_space, grid.n_time
    x = grid.x
    P = np.zeros((nt + 1, n + 1))
    P[0] = p0.values
    P[0, [0, n - 1, n]] = 0.0
    mean = np.empty(nt + 1)
    rate = np.empty(nt + 1)
    cum = np.empty(nt + 1)
    mass = np.empty(nt + 1)
    mean[0] = params.x0
    cum[0] = 0.0
    mass[0] = h * P[0].sum()
    zero_u = np.zeros(n + 1)

    breakdown = False
    reason = None
    t_break = None
    steps_done = 0
    for k in range(nt):
        rate[k] = params.sigma**2 * (P[k, 1] - P[k, 0]) / (2.0 * h)
        if rate[k] > rate_ceiling:
            breakdown, reason, t_break = True, "rate_ceiling", grid.t[k]
            break
        drift = _drift_row(x, params.a, mean[k], alpha, rate[k])
        vmax = float(np.max(np.abs(drift)))
        if vmax > 0.0 and dt > h / vmax:
            if k == 0:
                raise ValueError(
                    f"explicit upwind transport unstable: dt={dt} exceeds h/max|drift| = "
                    f"{h / vmax:.3e}; reduce dt to at most that value"
                )
            breakdown, reason, t_break = True, "cfl", grid.t[k]
            break
        # drift plays the role of the Hamiltonian vertex with a zero value row
        beta = beta_weights(P[k], mean[k], grid, params.sigma)
        P[k + 1] = solve_fp_step(P[k], zero_u, grid, params, beta, drift,
                                 implicit_transport=False)
        cum[k + 1] = cum[k] + rate[k] * dt
        mean[k + 1] = params.x0 * math.exp((1.0 - alpha) * cum[k + 1])
        mass[k + 1] = h * P[k + 1].sum()
        steps_done = k + 1
        if mass[k + 1] < mass[k] * (1.0 - mass_loss_tol):
            breakdown, reason, t_break = True, "mass_loss", grid.t[k + 1]
            break
    if not breakdown:
        rate[nt] = params.sigma**2 * (P[nt, 1] - P[nt, 0]) / (2.0 * h)

    last = steps_done
    return FPRun(
        grid=grid,
        params=params,
        alpha=alpha,
        density=P[: last + 1],
        times=grid.t[: last + 1],
        mean_path=mean[: last + 1],
        rate_path=rate[: last + 1],
        cumulative_rate=cum[: last + 1],
        mass_path=mass[: last + 1],
        breakdown=breakdown,
        breakdown_reason=reason,
        breakdown_time=t_break,
    )


def weak_form_residual(run: FPRun, testfn) -> float:
    """Largest defect of the weak formulation along a completed run.

    For a smooth test function phi (with x * phi' bounded), compares the
    centered time derivative of <phi, p> against

        < phi' * drift + (sigma^2/2) phi'', p > + rate * (phi(mean) - phi(0)),

    all integrals by the rectangular rule.  First order in (h, dt).
    """
    if run.breakdown:
        raise ValueError("weak-form residual needs a run without breakdown")
    grid, params, alpha = run.grid, run.params, run.alpha
    x, h, dt = grid.x, grid.h, grid.dt
    phi = np.asarray([testfn(v) for v in x], dtype=float)
    dphi = np.gradient(phi, h)
    d2phi = np.gradient(dphi, h)
    pairing = run.density @ phi * h
    worst = 0.0
    for k in range(1, run.times.size - 1):
        lhs = (pairing[k + 1] - pairing[k - 1]) / (2.0 * dt)
        drift = _drift_row(x, params.a, run.mean_path[k], alpha, run.rate_path[k])
        rhs = h * float(
            np.dot(dphi * drift + 0.5 * params.sigma**2 * d2phi, run.density[k])
        ) + run.rate_path[k] * (testfn(run.mean_path[k]) - testfn(0.0))
        worst = max(worst, abs(lhs - rhs))
    return worst
