"""Closed-form stationary density of the reserve diffusion with re-injection.

The stationary density p of the mean-reverting diffusion absorbed at 0 and
re-injected at the mean x0 is known in closed form up to a single scalar
e0, the stationary default rate, which solves F(e0) = G(e0) with

    F(u) = (1/tau^2) * int_{2 x0 u / tau - tau x0}^{2 x0 u / tau}
               exp(y^2/2) * (int_y^inf exp(-s^2/2) ds) dy,    tau = sqrt(2 a),
    G(u) = 1 / (2 u).

F is strictly decreasing (as is G, but faster near 0: F stays finite while
G blows up, and F dominates again for large u by its logarithmic bounds),
so a guarded bisection between a tiny left endpoint and the analytic upper
bound for e0 is robust.  For a = 0 the rate is exactly 1/x0^2.

The density itself and its inner integral are evaluated through Dawson
functions, which avoids both overflow and quadrature error: the moment
identities int p = 1, int x p = x0 and p'(0) = 2 e0 hold to machine
precision (for sigma = 1; general sigma rescales as documented on
:func:`stationary_solution`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy import integrate, special

__all__ = [
    "F_of_u",
    "e0_upper_bound",
    "solve_e0",
    "StationarySolution",
    "stationary_solution",
]

_SQRT_HALF_PI = math.sqrt(math.pi / 2.0)
_SQRT2 = math.sqrt(2.0)


def gaussian_tail_weighted(y):
    """exp(y^2/2) * int_y^inf exp(-s^2/2) ds, stable for both signs of y.

    Bounded by 1/y for large y > 0; grows like sqrt(2 pi) exp(y^2/2) for
    y < 0.
    """
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    pos = y >= 0
    out[pos] = _SQRT_HALF_PI * special.erfcx(y[pos] / _SQRT2)
    yn = y[~pos]
    out[~pos] = _SQRT_HALF_PI * (2.0 * np.exp(0.5 * yn**2) - special.erfcx(-yn / _SQRT2))
    return out if out.ndim else float(out)


def F_of_u(u: float, a: float, x0: float, precise: bool = False) -> float:
    """Left-hand side F(u) of the stationary default-rate equation.

    With ``precise=True`` the integral is evaluated in 30-digit arithmetic;
    this matters only when F is large (small roots), where double-precision
    quadrature cannot resolve the absolute residual F - G below ~1e-8.
    """
    if not (u > 0.0 and a > 0.0 and x0 > 0.0):
        raise ValueError("F_of_u needs u > 0, a > 0, x0 > 0")
    tau = math.sqrt(2.0 * a)
    hi = 2.0 * x0 * u / tau
    lo = hi - tau * x0
    if precise:
        with mp.workdps(30):
            g = lambda y: mp.exp(y * y / 2) * mp.sqrt(mp.pi / 2) * mp.erfc(y / mp.sqrt(2))
            val = mp.quad(g, [mp.mpf(lo), mp.mpf(hi)])
            return float(val / (tau * tau))
    val, _ = integrate.quad(
        lambda y: float(gaussian_tail_weighted(y)), lo, hi, epsabs=1e-13, epsrel=1e-12, limit=300
    )
    return val / tau**2


def e0_upper_bound(a: float, x0: float) -> float:
    """Analytic upper bound for the stationary default rate (a > 0).

    max(2a / log(2 a x0^2), (e^2 (1 + 2 a x0^2) - 1) / (2 x0^2)), keeping
    only branches whose logarithm is defined.
    """
    cands = [(math.e**2 * (1.0 + 2.0 * a * x0**2) - 1.0) / (2.0 * x0**2)]
    if 2.0 * a * x0**2 > 1.0:
        cands.append(2.0 * a / math.log(2.0 * a * x0**2))
    return max(cands)


def solve_e0(a: float, x0: float, tol: float = 1e-9) -> float:
    """Stationary default rate e0 for mean-reversion a >= 0 and mean x0 > 0.

    For a = 0 returns 1/x0^2 exactly.  For a > 0 bisects F - G on
    (tiny, upper bound): F - G -> -inf at 0+ and stays positive beyond the
    single root, so the bracket is guaranteed by the analytic bound.  A
    second bisection stage with high-precision F pushes the absolute
    residual |F(e0) - G(e0)| below ``tol``.
    """
    if not (x0 > 0.0):
        raise ValueError(f"x0 must be > 0, got {x0}")
    if not (tol > 0.0):
        raise ValueError(f"tol must be > 0, got {tol}")
    if a < 0.0:
        raise ValueError(f"a must be >= 0, got {a}")
    if a == 0.0:
        return 1.0 / x0**2

    lo = 1e-300
    hi = e0_upper_bound(a, x0)
    f_hi = F_of_u(hi, a, x0) - 0.5 / hi
    if not (f_hi > 0.0):
        raise ArithmeticError(
            "no sign change in the e0 bracket: "
            f"F({hi})={F_of_u(hi, a, x0)}, G({hi})={0.5 / hi} (a={a}, x0={x0})"
        )

    # Stage 1: cheap bisection on the scaled residual 2 u F(u) - 1.
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if 2.0 * mid * F_of_u(mid, a, x0) - 1.0 < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-11 * hi:
            break

    # Stage 2: refine on the absolute residual with high-precision F.
    mid = 0.5 * (lo + hi)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        res = F_of_u(mid, a, x0, precise=True) - 0.5 / mid
        if abs(res) < tol:
            return mid
        if res < 0.0:
            lo = mid
        else:
            hi = mid
    return mid


@dataclass(frozen=True)
class StationarySolution:
    """Evaluator for the closed-form stationary density.

    ``a``, ``x0`` and ``sigma`` are the model constants; ``e0`` is the
    stationary default rate for that sigma.  The density is expressed via
    the reduced (sigma = 1) constants a_red = a / sigma^2 and
    e0_red = e0 / sigma^2; its value does not change under this reduction.
    """

    a: float
    x0: float
    e0: float
    sigma: float = 1.0

    @property
    def _a_red(self) -> float:
        return self.a / self.sigma**2

    @property
    def _e0_red(self) -> float:
        return self.e0 / self.sigma**2

    def density(self, x):
        """Density p(x) for x >= 0; vectorized over numpy arrays."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 0.0):
            raise ValueError("stationary density is defined on x >= 0")
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        a, e0, x0 = self._a_red, self._e0_red, self.x0
        b = 2.0 * x0 * (e0 - a)
        m = np.minimum(x, x0)
        if a == 0.0:
            inner = (np.exp(2.0 * x0 * e0 * m) - 1.0) / (2.0 * x0 * e0)
            out = 2.0 * e0 * inner * np.exp(-2.0 * x0 * e0 * x)
        else:
            # int_0^m exp(a y^2 + b y) dy folded against exp(-a x^2 - b x)
            # through Dawson's integral; all exponents stay bounded.
            sa = math.sqrt(a)
            c = b / (2.0 * sa)
            expo = a * m**2 + b * m - a * x**2 - b * x
            out = (2.0 * e0 / sa) * (
                special.dawsn(sa * m + c) * np.exp(expo)
                - np.exp(-a * x**2 - b * x) * special.dawsn(c)
            )
        out = np.where(out < 0.0, 0.0, out)  # clip -1e-300-scale roundoff
        return float(out[0]) if scalar else out

    def __call__(self, x):
        return self.density(x)

    def snapshot(self, h: float, n_nodes: int):
        """Sample the density on the uniform grid i*h, i = 0..n_nodes-1."""
        from .model import DensitySnapshot

        x = h * np.arange(n_nodes)
        return DensitySnapshot(self.density(x), h)

    def sample(self, n: int, rng: np.random.Generator, x_max: float | None = None) -> np.ndarray:
        """Draw n samples by inverse transform on a fine grid."""
        if x_max is None:
            spread = 8.0 if self._a_red == 0.0 else 8.0 / math.sqrt(2.0 * self._a_red)
            x_max = self.x0 + max(spread, 4.0 / (2.0 * self.x0 * self._e0_red + 1e-300))
        grid = np.linspace(0.0, x_max, 8192)
        pdf = self.density(grid)
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(grid))])
        cdf /= cdf[-1]
        u = rng.uniform(size=n)
        return np.interp(u, cdf, grid)


def stationary_solution(a: float, x0: float, sigma: float = 1.0, tol: float = 1e-9) -> StationarySolution:
    """Solve for e0 and build the stationary density evaluator.

    For sigma != 1 the problem reduces to the unit-diffusion one with
    a_red = a / sigma^2; the reduced rate e0_red = solve_e0(a_red, x0)
    corresponds to the physical rate e0 = sigma^2 * e0_red, consistent with
    the boundary identity e0 = (sigma^2 / 2) p'(0).
    """
    e0_red = solve_e0(a / sigma**2, x0, tol=tol)
    return StationarySolution(a=a, x0=x0, e0=sigma**2 * e0_red, sigma=sigma)
