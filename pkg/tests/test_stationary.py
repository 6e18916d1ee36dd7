import math

import numpy as np
import pytest
from scipy import integrate

from bankmfg import F_of_u, e0_upper_bound, solve_e0, stationary_solution


def total_mass(sol, x_hi=np.inf):
    lo, _ = integrate.quad(sol.density, 0.0, sol.x0, epsabs=1e-12, limit=300)
    hi, _ = integrate.quad(sol.density, sol.x0, x_hi, epsabs=1e-12, limit=300)
    return lo + hi


def mean_value(sol):
    lo, _ = integrate.quad(lambda x: x * sol.density(x), 0.0, sol.x0, epsabs=1e-12, limit=300)
    hi, _ = integrate.quad(lambda x: x * sol.density(x), sol.x0, np.inf, epsabs=1e-12, limit=300)
    return lo + hi


class TestSolveE0:
    def test_zero_drift_closed_form(self):
        for x0 in (1.0, 2.0, 5.0):
            assert solve_e0(0.0, x0) == 1.0 / x0**2

    def test_residual_and_bound(self):
        for a in (0.5, 2.0):
            for x0 in (1.0, 2.0):
                e0 = solve_e0(a, x0)
                assert abs(F_of_u(e0, a, x0, precise=True) - 0.5 / e0) < 1e-8
                assert 0.0 < e0 < e0_upper_bound(a, x0)

    def test_monotone_in_a_and_x0(self):
        grid = {
            (a, x0): solve_e0(a, x0) for a in (0.01125, 0.5) for x0 in (1.0, 2.0)
        }
        assert grid[(0.01125, 1.0)] >= grid[(0.5, 1.0)] >= 0
        assert grid[(0.01125, 2.0)] >= grid[(0.5, 2.0)]
        assert grid[(0.01125, 1.0)] >= grid[(0.01125, 2.0)]
        assert grid[(0.5, 1.0)] >= grid[(0.5, 2.0)]

    def test_continuity_at_zero_drift(self):
        for x0 in (1.0, 2.0):
            tiny = solve_e0(1e-6, x0)
            assert abs(tiny - 1.0 / x0**2) / (1.0 / x0**2) < 1e-3

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            solve_e0(0.5, -1.0)
        with pytest.raises(ValueError):
            solve_e0(-0.5, 1.0)
        with pytest.raises(ValueError):
            solve_e0(0.5, 1.0, tol=0.0)


class TestFOfU:
    def test_upper_bound_large_u(self):
        a, x0 = 0.5, 2.0
        tau2 = 2.0 * a
        for u in (1.0, 3.0, 10.0, 50.0):
            assert F_of_u(u, a, x0) <= (1.0 / tau2) * math.log(2 * u / (2 * u - tau2)) + 1e-12

    def test_lower_bound(self):
        a, x0 = 0.5, 2.0
        tau2 = 2.0 * a
        for u in (0.6, 1.0, 3.0):
            lower = (1.0 / (2 * tau2)) * math.log(
                (tau2 + 4 * x0**2 * u**2) / (tau2 + (2 * x0 * u - tau2 * x0) ** 2)
            )
            assert F_of_u(u, a, x0) >= lower - 1e-12

    def test_strictly_decreasing(self):
        # dF/du is proportional to g(c1) - g(c1 - c2) with g(y) =
        # exp(y^2/2) * int_y^inf exp(-s^2/2) ds and g' = y*g - 1 < 0 globally,
        # so F decreases on all of (0, inf); the single crossing with 1/(2u)
        # comes from the endpoint limits, not from an interior peak.
        for a, x0 in [(0.8, 1.5), (2.0, 2.0), (0.1, 1.0)]:
            peak = 2.0 * a / 4.0
            us = np.concatenate([
                np.linspace(0.01 * peak, peak, 8),
                np.linspace(peak, 20 * peak, 8)[1:],
            ])
            vals = [F_of_u(float(u), a, x0) for u in us]
            assert np.all(np.diff(vals) < 0)


class TestDensity:
    def test_vanishes_at_origin(self):
        for a in (0.0, 0.5, 2.0):
            sol = stationary_solution(a, 2.0)
            assert sol.density(0.0) == 0.0

    def test_boundary_slope_is_twice_e0(self):
        for a in (0.0, 0.5, 2.0):
            sol = stationary_solution(a, 2.0)
            for x in (1e-6, 1e-7):
                assert sol.density(x) / x == pytest.approx(2.0 * sol.e0, rel=1e-4)

    def test_unit_mass_and_mean(self):
        for a, x0 in [(0.0, 2.0), (0.5, 1.0), (2.0, 2.0), (0.01125, 3.0)]:
            sol = stationary_solution(a, x0)
            assert total_mass(sol) == pytest.approx(1.0, abs=1e-9)
            assert mean_value(sol) == pytest.approx(x0, abs=1e-9)

    def test_derivative_jump_at_x0(self):
        sol = stationary_solution(1.3, 2.0)
        d = 1e-6
        right = (sol.density(sol.x0 + d) - sol.density(sol.x0)) / d
        left = (sol.density(sol.x0) - sol.density(sol.x0 - d)) / d
        assert right - left == pytest.approx(-2.0 * sol.e0, rel=1e-3)

    def test_negative_argument_rejected(self):
        sol = stationary_solution(0.5, 2.0)
        with pytest.raises(ValueError):
            sol.density(-0.1)

    def test_gaussian_tail_beyond_x0(self):
        # for x >= x0 the density is a pure (tilted) Gaussian decay
        sol = stationary_solution(2.0, 2.0)
        a, x0, e0 = 2.0, 2.0, sol.e0
        px0 = sol.density(x0)
        for x in (2.5, 3.0, 4.0):
            expected = px0 * math.exp(-a * (x - x0) ** 2 - 2 * x0 * e0 * (x - x0))
            assert sol.density(x) == pytest.approx(expected, rel=1e-10)

    def test_sigma_rescaling_identities(self):
        # general sigma: mass and mean invariant, boundary slope gives back e0
        sol = stationary_solution(2.0, 2.0, sigma=1.3)
        assert total_mass(sol) == pytest.approx(1.0, abs=1e-9)
        assert mean_value(sol) == pytest.approx(2.0, abs=1e-9)
        d = 1e-7
        slope = sol.density(d) / d
        assert 0.5 * 1.3**2 * slope == pytest.approx(sol.e0, rel=1e-4)

    def test_sampler_matches_density(self):
        sol = stationary_solution(2.0, 2.0)
        rng = np.random.default_rng(42)
        draws = sol.sample(200_000, rng)
        assert draws.mean() == pytest.approx(2.0, abs=0.01)
        hist, edges = np.histogram(draws, bins=np.arange(0.0, 5.0, 0.1), density=True)
        centers = 0.5 * (edges[:-1] + edges[1:])
        l1 = np.sum(np.abs(hist - sol.density(centers))) * 0.1
        assert l1 < 0.03
