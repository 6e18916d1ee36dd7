"""Core model algebra shared by every solver.

Holds the scalar model constants, grid-sampled densities and rate curves,
the density moments (first moment and boundary default rate), and the
quadratic Hamiltonian of the controlled reserve dynamics together with its
minimizing feedback control.

All operations here are pure functions of their arguments and are safe to
call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

__all__ = [
    "ModelParams",
    "DensitySnapshot",
    "RateCurve",
    "mass_moment",
    "default_rate_moment",
    "hamiltonian",
    "hamiltonian_vertex",
    "hamiltonian_offset",
    "optimal_control",
    "controlled_drift",
    "running_cost",
]

_MASS_TOL = 1e-3


@dataclass(frozen=True)
class ModelParams:
    """Scalar constants of the reserve model.

    a       mean-reversion rate toward the population mean (1/time)
    x0      initial / target mean reserve level (money)
    sigma   diffusion coefficient (money per sqrt-time)
    alpha   re-injection weight in the uncontrolled density evolution
    gamma   damping weight on the default-rate drift term, in (0, 1]
    q       borrowing incentive (1/time)
    epsilon deviation penalty weight (1/time^2), with q^2 <= epsilon
    r       discount rate (1/time)
    """

    a: float
    x0: float
    sigma: float = 1.0
    alpha: float = 1.0
    gamma: float = 1.0
    q: float = 0.1
    epsilon: float = 0.01
    r: float = 0.5

    def __post_init__(self) -> None:
        if not (self.a >= 0.0):
            raise ValueError(f"mean-reversion rate a must be >= 0, got {self.a}")
        if not (self.x0 > 0.0):
            raise ValueError(f"mean level x0 must be > 0, got {self.x0}")
        if not (self.sigma > 0.0):
            raise ValueError(f"diffusion sigma must be > 0, got {self.sigma}")
        if not (self.r > 0.0):
            raise ValueError(f"discount rate r must be > 0, got {self.r}")
        if not (self.q > 0.0):
            raise ValueError(f"incentive q must be > 0, got {self.q}")
        if not (self.epsilon > 0.0):
            raise ValueError(f"penalty epsilon must be > 0, got {self.epsilon}")
        if self.q**2 > self.epsilon * (1.0 + 1e-12):
            raise ValueError(
                f"running cost not convex: need q^2 <= epsilon, got q^2={self.q**2} > {self.epsilon}"
            )
        if not (0.0 < self.gamma <= 1.0):
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not math.isfinite(self.alpha):
            raise ValueError(f"alpha must be finite, got {self.alpha}")

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ModelParams":
        known = {f: float(mapping[f]) for f in cls.__dataclass_fields__ if f in mapping}
        return cls(**known)


@dataclass(frozen=True)
class DensitySnapshot:
    """A nonnegative density sampled on the uniform grid x_i = i*h, i=0..n.

    The origin is an absorbing boundary, so values[0] must vanish.  Total
    mass (rectangular rule) must not exceed 1 by more than a small tolerance;
    sub-unit mass is allowed (densities may lose mass to the boundary).
    """

    values: np.ndarray
    h: float

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("density grid needs at least two nodes")
        if not (self.h > 0.0):
            raise ValueError(f"grid step h must be > 0, got {self.h}")
        if not np.all(np.isfinite(values)):
            raise ValueError("density values must be finite")
        if abs(values[0]) > 1e-12:
            raise ValueError(f"absorbing boundary requires values[0] = 0, got {values[0]}")
        if values.min() < -1e-12:
            raise ValueError(f"density must be nonnegative, min={values.min()}")
        mass = self.h * float(values.sum())
        if mass > 1.0 + _MASS_TOL or mass < -1e-12:
            raise ValueError(f"total mass {mass} outside [0, 1+tol]")

    @property
    def x(self) -> np.ndarray:
        return self.h * np.arange(self.values.size)

    def mass(self) -> float:
        return self.h * float(self.values.sum())


@dataclass(frozen=True)
class RateCurve:
    """A sampled nonnegative function of time on a uniform grid over [0, T].

    Used both for cumulative expected default counts (nondecreasing) and for
    instantaneous default rates.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if times.ndim != 1 or times.size < 2 or times.shape != values.shape:
            raise ValueError("times and values must be 1-d arrays of equal length >= 2")
        steps = np.diff(times)
        if times[0] != 0.0 or not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
            raise ValueError("times must form a uniform grid starting at 0")
        if not np.all(np.isfinite(values)) or values.min() < -1e-12:
            raise ValueError("rate values must be finite and nonnegative")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def T(self) -> float:
        return float(self.times[-1])

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def is_nondecreasing(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.diff(self.values) >= -tol))

    @classmethod
    def zero(cls, T: float, n_steps: int) -> "RateCurve":
        times = np.linspace(0.0, T, n_steps + 1)
        return cls(times, np.zeros(n_steps + 1))


def mass_moment(m: DensitySnapshot) -> float:
    """First moment h * sum_i x_i m_i of a grid density (rectangular rule)."""
    return m.h * float(np.dot(m.x, m.values))


def default_rate_moment(m: DensitySnapshot, sigma: float = 1.0) -> float:
    """Boundary default rate sigma^2 (m_1 - m_0) / (2 h) of a grid density."""
    return sigma**2 * (float(m.values[1]) - float(m.values[0])) / (2.0 * m.h)


def hamiltonian_vertex(x, mbar: float, erate: float, params: ModelParams):
    """Vertex phi of the quadratic Hamiltonian: the control-free effective drift."""
    return (params.q + params.a) * (mbar - x) - params.gamma * erate * mbar


def hamiltonian_offset(x, mbar: float, erate: float, params: ModelParams):
    """Offset psi such that H(x, m, p) = (p - phi)^2 / 2 - psi."""
    phi = hamiltonian_vertex(x, mbar, erate, params)
    return 0.5 * (phi**2 - (params.q**2 - params.epsilon) * (mbar - x) ** 2)


def hamiltonian(x, mbar: float, erate: float, p, params: ModelParams):
    """Quadratic Hamiltonian H(x, m, p) of the controlled reserve dynamics.

    Equals the negated infimum over controls xi of
    ``drift(x, m, xi) * p + running_cost(x, m, xi)``.
    """
    phi = hamiltonian_vertex(x, mbar, erate, params)
    psi = hamiltonian_offset(x, mbar, erate, params)
    return 0.5 * (p - phi) ** 2 - psi


def optimal_control(x, mbar: float, p, params: ModelParams):
    """Minimizing feedback control xi = -p + q (mbar - x) of the Hamiltonian."""
    return -p + params.q * (mbar - x)


def controlled_drift(x, mbar: float, erate: float, xi, params: ModelParams):
    """Drift b(x, m, xi) = xi + a (mbar - x) - gamma * erate * mbar."""
    return xi + params.a * (mbar - x) - params.gamma * erate * mbar


def running_cost(x, mbar: float, xi, params: ModelParams):
    """Quadratic running cost xi^2/2 - q xi (mbar - x) + eps/2 (mbar - x)^2."""
    return 0.5 * xi**2 - params.q * xi * (mbar - x) + 0.5 * params.epsilon * (mbar - x) ** 2
