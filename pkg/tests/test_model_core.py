import numpy as np
import pytest

from bankmfg import (
    DensitySnapshot,
    ModelParams,
    RateCurve,
    controlled_drift,
    default_rate_moment,
    hamiltonian,
    hamiltonian_offset,
    hamiltonian_vertex,
    mass_moment,
    optimal_control,
    running_cost,
    stationary_solution,
)


def make_params(**kw):
    base = dict(a=0.5, x0=2.0, sigma=1.0, q=0.1, epsilon=0.5, r=0.5, gamma=0.8)
    base.update(kw)
    return ModelParams(**base)


class TestModelParams:
    def test_valid_roundtrip(self):
        p = make_params()
        assert ModelParams.from_mapping(p.as_dict()) == p

    @pytest.mark.parametrize(
        "bad",
        [
            dict(a=-0.1),
            dict(x0=0.0),
            dict(sigma=0.0),
            dict(r=0.0),
            dict(q=0.0),
            dict(epsilon=0.0),
            dict(q=1.0, epsilon=0.5),  # q^2 > epsilon
            dict(gamma=0.0),
            dict(gamma=1.2),
            dict(alpha=float("nan")),
        ],
    )
    def test_invariants_rejected(self, bad):
        with pytest.raises(ValueError):
            make_params(**bad)

    def test_epsilon_equal_q_squared_allowed(self):
        p = make_params(q=0.1, epsilon=0.01)
        # degenerate penalty: cost collapses to a perfect square
        xi = 0.3
        f = running_cost(1.0, 2.0, xi, p)
        assert f == pytest.approx(0.5 * (xi - p.q * (2.0 - 1.0)) ** 2, abs=1e-15)


class TestSnapshotsAndCurves:
    def test_snapshot_rejects_bad_grids(self):
        with pytest.raises(ValueError):
            DensitySnapshot(np.array([0.0]), 0.1)  # too short
        with pytest.raises(ValueError):
            DensitySnapshot(np.array([0.5, 0.5]), 0.1)  # nonzero at origin
        with pytest.raises(ValueError):
            DensitySnapshot(np.array([0.0, -0.5]), 0.1)  # negative
        with pytest.raises(ValueError):
            DensitySnapshot(np.array([0.0, 30.0]), 0.1)  # mass > 1 + tol

    def test_rate_curve_validation(self):
        t = np.linspace(0.0, 1.0, 11)
        RateCurve(t, np.zeros(11))
        with pytest.raises(ValueError):
            RateCurve(t + 0.5, np.zeros(11))  # does not start at 0
        with pytest.raises(ValueError):
            RateCurve(t, -np.ones(11))

    def test_rate_curve_monotone_helper(self):
        t = np.linspace(0.0, 1.0, 5)
        assert RateCurve(t, np.array([0.0, 0.1, 0.1, 0.2, 0.3])).is_nondecreasing()
        assert not RateCurve(t, np.array([0.0, 0.2, 0.1, 0.2, 0.3])).is_nondecreasing()


class TestMoments:
    def test_point_mass_column(self):
        h = 0.05
        values = np.zeros(40)
        j = 17
        values[j] = 1.0 / h
        m = DensitySnapshot(values, h)
        assert mass_moment(m) == pytest.approx(j * h, abs=1e-14)

    def test_zero_density(self):
        m = DensitySnapshot(np.zeros(20), 0.1)
        assert mass_moment(m) == 0.0
        assert default_rate_moment(m) == 0.0

    def test_stationary_density_moments(self):
        sol = stationary_solution(2.0, 2.0)
        h = 1e-3
        snap = sol.snapshot(h, int(8.0 / h))
        assert mass_moment(snap) == pytest.approx(2.0, abs=5e-3)
        assert default_rate_moment(snap, sigma=1.0) == pytest.approx(sol.e0, rel=0.05)

    def test_linear_slope(self):
        h = 0.01
        m = DensitySnapshot(0.7 * h * np.arange(30), h)
        assert default_rate_moment(m, sigma=1.0) == pytest.approx(0.35, abs=1e-14)

    def test_rate_moment_first_order_in_h(self):
        sol = stationary_solution(0.5, 2.0)
        errs = []
        for h in (2e-3, 1e-3, 5e-4):
            snap = sol.snapshot(h, int(1.0 / h))
            errs.append(abs(default_rate_moment(snap) - sol.e0))
        assert errs[0] / errs[1] > 1.5 and errs[1] / errs[2] > 1.5


class TestHamiltonian:
    def test_value_at_vertex(self):
        p = make_params()
        for x, mbar, erate in [(0.5, 2.0, 0.1), (3.0, 1.5, 0.0), (2.0, 2.0, 0.3)]:
            phi = hamiltonian_vertex(x, mbar, erate, p)
            psi = hamiltonian_offset(x, mbar, erate, p)
            assert hamiltonian(x, mbar, erate, phi, p) == pytest.approx(-psi, abs=1e-14)

    def test_at_the_mean_without_rate(self):
        p = make_params()
        for pp in (-2.0, 0.0, 1.3):
            assert hamiltonian(2.0, 2.0, 0.0, pp, p) == pytest.approx(0.5 * pp**2, abs=1e-14)

    def test_degenerate_penalty_form(self):
        # with epsilon = q^2 and no rate term: H = p^2/2 - (q+a)(mbar-x) p
        p = make_params(q=0.1, epsilon=0.01)
        x, mbar, pp = 1.2, 2.0, 0.7
        expected = 0.5 * pp**2 - (p.q + p.a) * (mbar - x) * pp
        assert hamiltonian(x, mbar, 0.0, pp, p) == pytest.approx(expected, abs=1e-14)

    def test_matches_brute_force_infimum(self):
        p = make_params()
        rng = np.random.default_rng(7)
        xi_grid = np.linspace(-30.0, 30.0, 240_001)
        step = xi_grid[1] - xi_grid[0]
        for _ in range(25):
            x, mbar = rng.uniform(0.0, 4.0, 2)
            erate, pp = rng.uniform(0.0, 0.5), rng.uniform(-3.0, 3.0)
            objective = controlled_drift(x, mbar, erate, xi_grid, p) * pp + running_cost(
                x, mbar, xi_grid, p
            )
            brute = -objective.min()
            assert hamiltonian(x, mbar, erate, pp, p) == pytest.approx(brute, abs=step**2)

    def test_convex_in_p(self):
        p = make_params()
        rng = np.random.default_rng(11)
        for _ in range(200):
            x, mbar = rng.uniform(0.0, 4.0, 2)
            erate = rng.uniform(0.0, 0.5)
            p1, p2 = rng.uniform(-5.0, 5.0, 2)
            mid = hamiltonian(x, mbar, erate, 0.5 * (p1 + p2), p)
            avg = 0.5 * (
                hamiltonian(x, mbar, erate, p1, p) + hamiltonian(x, mbar, erate, p2, p)
            )
            assert mid <= avg + 1e-12


class TestOptimalControl:
    def test_simple_values(self):
        p = make_params()
        assert optimal_control(2.0, 2.0, 0.0, p) == 0.0
        assert optimal_control(1.0, 2.0, 0.0, make_params(q=0.1)) == pytest.approx(0.1)

    def test_first_order_condition(self):
        # derivative of xi -> xi*p + xi^2/2 - q xi (mbar - x) vanishes at the minimizer
        p = make_params()
        rng = np.random.default_rng(3)
        for _ in range(100):
            x, mbar, pp = rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0), rng.uniform(-3, 3)
            xi = optimal_control(x, mbar, pp, p)
            grad = pp + xi - p.q * (mbar - x)
            assert abs(grad) < 1e-12

    def test_exchange_identity_with_hamiltonian(self):
        # b(x,m,Xi) p + f(x,m,Xi) = -H(x,m,p) for all p
        p = make_params()
        rng = np.random.default_rng(5)
        for _ in range(100):
            x, mbar = rng.uniform(0.0, 4.0, 2)
            erate, pp = rng.uniform(0.0, 0.5), rng.uniform(-3.0, 3.0)
            xi = optimal_control(x, mbar, pp, p)
            lhs = controlled_drift(x, mbar, erate, xi, p) * pp + running_cost(x, mbar, xi, p)
            assert lhs == pytest.approx(-hamiltonian(x, mbar, erate, pp, p), abs=1e-12)

    def test_is_a_minimum_against_perturbations(self):
        p = make_params()
        rng = np.random.default_rng(9)
        for _ in range(100):
            x, mbar = rng.uniform(0.0, 4.0, 2)
            erate, pp = rng.uniform(0.0, 0.5), rng.uniform(-3.0, 3.0)
            xi = optimal_control(x, mbar, pp, p)

            def objective(c):
                return controlled_drift(x, mbar, erate, c, p) * pp + running_cost(x, mbar, c, p)

            assert objective(xi) <= objective(xi + 0.1) + 1e-12
            assert objective(xi) <= objective(xi - 0.1) + 1e-12
