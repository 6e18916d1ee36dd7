"""Blow-up certificate for the evolutionary density equation.

A global-in-time weak solution cannot exist when the initial density puts
enough mass near the origin, quantified through a Laplace-transform test:
for some mu > max(2 a x0, 1),

    int exp(-mu x) p0(x) dx  >=  (1 - exp(-mu x0)) / (mu x0).

The certificate evaluates both sides by quadrature.  The admissibility
threshold on mu is enforced by default; evaluation below the threshold is
still allowed (``strict=False``) because the inequality itself is defined
for every mu > 0 and is useful as a concentration diagnostic, but only an
admissible mu certifies non-existence.  ``scan_mu`` searches a log grid for
the first admissible triggering mu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy import integrate

from .model import DensitySnapshot

__all__ = [
    "BlowupCertificate",
    "check_blowup_condition",
    "triangular_density",
    "TriangularDensity",
    "laplace_moment",
    "scan_mu",
]

DensityLike = Union[DensitySnapshot, Callable[[float], float]]


@dataclass(frozen=True)
class BlowupCertificate:
    """Outcome of the Laplace-transform concentration test at one mu."""

    mu: float
    lhs: float  # int exp(-mu x) p0(x) dx
    rhs: float  # (1 - exp(-mu x0)) / (mu x0)
    triggered: bool
    mu_bound: float  # admissibility threshold max(2 a x0, 1)
    admissible: bool  # mu > mu_bound; required for the non-existence conclusion


@dataclass(frozen=True)
class TriangularDensity:
    """Triangle on (0, 2c): x/c^2 on (0, c), (2c - x)/c^2 on (c, 2c)."""

    c: float

    def __post_init__(self) -> None:
        if not (self.c > 0.0):
            raise ValueError(f"half-width c must be > 0, got {self.c}")

    @property
    def support(self) -> tuple[float, float]:
        return (0.0, 2.0 * self.c)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        c = self.c
        up = np.where((x > 0.0) & (x < c), x / c**2, 0.0)
        down = np.where((x >= c) & (x < 2.0 * c), (2.0 * c - x) / c**2, 0.0)
        out = up + down
        return float(out) if out.ndim == 0 else out


def triangular_density(c: float) -> TriangularDensity:
    """Unit-mass triangular density supported on (0, 2c) with mode 1/c at c."""
    return TriangularDensity(c)


def laplace_moment(p: DensityLike, mu: float) -> float:
    """int exp(-mu x) p(x) dx; rectangular rule for snapshots, quadrature otherwise."""
    if mu < 0.0:
        raise ValueError(f"mu must be >= 0, got {mu}")
    if isinstance(p, DensitySnapshot):
        return p.h * float(np.dot(np.exp(-mu * p.x), p.values))
    if isinstance(p, TriangularDensity):
        lo, hi = p.support
        val, _ = integrate.quad(lambda x: math.exp(-mu * x) * float(p(x)), lo, hi,
                                points=[p.c], limit=200, epsabs=1e-13, epsrel=1e-12)
        return val
    val, _ = integrate.quad(lambda x: math.exp(-mu * x) * float(p(x)), 0.0, np.inf,
                            limit=300, epsabs=1e-12, epsrel=1e-11)
    return val


def check_blowup_condition(
    p0: DensityLike, a: float, x0: float, mu: float, strict: bool = True
) -> BlowupCertificate:
    """Evaluate the concentration inequality for initial density p0 at mu.

    ``strict=True`` rejects mu at or below the admissibility threshold
    max(2 a x0, 1); with ``strict=False`` the inequality is evaluated anyway
    and the certificate records ``admissible=False``.
    """
    if not (x0 > 0.0):
        raise ValueError(f"x0 must be > 0, got {x0}")
    bound = max(2.0 * a * x0, 1.0)
    admissible = mu > bound
    if strict and not admissible:
        raise ValueError(f"mu={mu} is not admissible: need mu > max(2*a*x0, 1) = {bound}")
    if mu <= 0.0:
        raise ValueError(f"mu must be > 0, got {mu}")
    lhs = laplace_moment(p0, mu)
    rhs = -math.expm1(-mu * x0) / (mu * x0)
    return BlowupCertificate(
        mu=mu, lhs=lhs, rhs=rhs, triggered=lhs >= rhs, mu_bound=bound, admissible=admissible
    )


def scan_mu(
    p0: DensityLike, a: float, x0: float, mu_max: float = 1e3, n_grid: int = 400
) -> BlowupCertificate | None:
    """First triggering certificate on a log grid of admissible mu values.

    The non-existence result quantifies existentially over mu, so a single
    admissible triggering mu suffices.  Returns None when no grid point
    triggers.
    """
    bound = max(2.0 * a * x0, 1.0)
    if mu_max <= bound:
        raise ValueError(f"mu_max={mu_max} must exceed the admissibility bound {bound}")
    grid = np.geomspace(bound * (1.0 + 1e-9), mu_max, n_grid)
    for mu in grid:
        cert = check_blowup_condition(p0, a, x0, float(mu), strict=True)
        if cert.triggered:
            return cert
    return None
