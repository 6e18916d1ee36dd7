import numpy as np
import pytest
from scipy import optimize

from bankmfg import (
    ModelParams,
    SpaceTimeGrid,
    beta_weights,
    discrete_hamiltonian,
    discrete_hamiltonian_grad,
    fp_system_residual,
    hamiltonian,
    solve_fp_step,
    solve_hjb_step,
    solve_mfg,
    truncated_gaussian_profile,
)
from bankmfg.mfg import _phi_psi_rows, _transport_divergence, boundary_rate, first_moment, transport_coefficients


def small_grid(**kw):
    base = dict(length=4.0, horizon=1.0, n_space=40, n_time=10)
    base.update(kw)
    return SpaceTimeGrid(**base)


def random_density_row(grid, rng):
    vals = rng.uniform(0.0, 1.0, grid.n_space + 1)
    vals[0] = 0.0
    vals[-2:] = 0.0
    return vals / (grid.h * vals.sum())


def make_params(**kw):
    base = dict(a=0.5, x0=2.0, sigma=1.0, q=0.1, epsilon=0.5, r=0.5)
    base.update(kw)
    return ModelParams(**base)


class TestGrid:
    def test_validation(self):
        with pytest.raises(ValueError):
            SpaceTimeGrid(length=1.0, horizon=1.0, n_space=4, n_time=10)
        with pytest.raises(ValueError):
            SpaceTimeGrid(length=1.0, horizon=1.0, n_space=10, n_time=1)

    def test_ind_node_aligned(self):
        grid = small_grid()
        for j in (0, 1, 17, 39):
            assert grid.ind(grid.x[j]) == j
        assert grid.ind(grid.x[5] + 0.3 * grid.h) == 5
        with pytest.raises(ValueError):
            grid.ind(grid.length)


class TestBetaWeights:
    def test_node_aligned_point(self):
        grid = small_grid()
        rng = np.random.default_rng(0)
        M = random_density_row(grid, rng)
        erate = boundary_rate(M, grid, 1.0)
        beta = beta_weights(M, float(grid.x[7]), grid, 1.0)
        assert beta[7] == pytest.approx(erate / grid.h, abs=1e-14)
        assert beta[8] == 0.0
        assert np.count_nonzero(beta) <= 2

    def test_mass_and_interpolation_identities(self):
        grid = small_grid()
        rng = np.random.default_rng(1)
        for _ in range(300):
            M = random_density_row(grid, rng)
            mu = float(rng.uniform(0.0, grid.length - grid.h))
            erate = boundary_rate(M, grid, 1.0)
            beta = beta_weights(M, mu, grid, 1.0)
            assert grid.h * beta.sum() == pytest.approx(erate, abs=1e-14)
            W = rng.uniform(-2.0, 2.0, grid.n_space + 1)
            w_mu = np.interp(mu, grid.x, W)
            assert grid.h * float(np.dot(beta, W)) == pytest.approx(
                erate * w_mu, abs=1e-13 * max(1.0, abs(erate))
            )

    def test_outside_grid_rejected(self):
        grid = small_grid()
        M = random_density_row(grid, np.random.default_rng(2))
        with pytest.raises(ValueError):
            beta_weights(M, -0.1, grid, 1.0)
        with pytest.raises(ValueError):
            beta_weights(M, grid.length + 0.1, grid, 1.0)


class TestDiscreteHamiltonian:
    def test_consistency_on_the_diagonal(self):
        grid = small_grid()
        params = make_params()
        rng = np.random.default_rng(3)
        M = random_density_row(grid, rng)
        mbar = first_moment(M, grid)
        erate = boundary_rate(M, grid, params.sigma)
        for _ in range(200):
            x = float(rng.uniform(0.0, grid.length))
            p = float(rng.uniform(-3.0, 3.0))
            assert discrete_hamiltonian(x, M, p, p, params, grid) == pytest.approx(
                hamiltonian(x, mbar, erate, p, params), abs=1e-12
            )

    def test_value_at_vertex(self):
        grid = small_grid()
        params = make_params()
        M = random_density_row(grid, np.random.default_rng(4))
        phi, psi, _, _ = _phi_psi_rows(M, grid, params)
        for i in (3, 11, 30):
            got = discrete_hamiltonian(float(grid.x[i]), M, float(phi[i]), float(phi[i]), params, grid)
            assert got == pytest.approx(-float(psi[i]), abs=1e-13)

    def test_monotone_in_slopes(self):
        grid = small_grid()
        params = make_params()
        rng = np.random.default_rng(5)
        M = random_density_row(grid, rng)
        for _ in range(300):
            x = float(rng.uniform(0.0, grid.length))
            p1, p2, d = rng.uniform(-3.0, 3.0, 3)
            d = abs(d)
            base = discrete_hamiltonian(x, M, p1, p2, params, grid)
            assert discrete_hamiltonian(x, M, p1 + d, p2, params, grid) <= base + 1e-12
            assert discrete_hamiltonian(x, M, p1, p2 + d, params, grid) >= base - 1e-12

    def test_gradients(self):
        grid = small_grid()
        params = make_params()
        rng = np.random.default_rng(6)
        M = random_density_row(grid, rng)
        phi, _, _, _ = _phi_psi_rows(M, grid, params)
        # vertex: both one-sided derivatives vanish
        g1, g2 = discrete_hamiltonian_grad(float(grid.x[5]), M, float(phi[5]), float(phi[5]), params, grid)
        assert g1 == 0.0 and g2 == 0.0
        # below the vertex the p1-derivative is the (negative) gap itself
        g1, _ = discrete_hamiltonian_grad(float(grid.x[5]), M, float(phi[5]) - 0.7, 0.0, params, grid)
        assert g1 == pytest.approx(-0.7, abs=1e-14)
        # central differences away from the kink
        for _ in range(100):
            x = float(rng.uniform(0.0, grid.length))
            p1, p2 = rng.uniform(-3.0, 3.0, 2)
            fx = np.interp(x, grid.x, phi)
            if min(abs(p1 - fx), abs(p2 - fx)) < 1e-3:
                continue
            eps = 1e-7
            g1, g2 = discrete_hamiltonian_grad(x, M, p1, p2, params, grid)
            fd1 = (
                discrete_hamiltonian(x, M, p1 + eps, p2, params, grid)
                - discrete_hamiltonian(x, M, p1 - eps, p2, params, grid)
            ) / (2 * eps)
            fd2 = (
                discrete_hamiltonian(x, M, p1, p2 + eps, params, grid)
                - discrete_hamiltonian(x, M, p1, p2 - eps, params, grid)
            ) / (2 * eps)
            assert abs(g1 - fd1) < 1e-6 and abs(g2 - fd2) < 1e-6

    def test_convex_in_slope_pair(self):
        grid = small_grid()
        params = make_params()
        rng = np.random.default_rng(7)
        M = random_density_row(grid, rng)
        for _ in range(200):
            x = float(rng.uniform(0.0, grid.length))
            pa = rng.uniform(-3.0, 3.0, 2)
            pb = rng.uniform(-3.0, 3.0, 2)
            mid = discrete_hamiltonian(x, M, *(0.5 * (pa + pb)), params, grid)
            avg = 0.5 * (
                discrete_hamiltonian(x, M, *pa, params, grid)
                + discrete_hamiltonian(x, M, *pb, params, grid)
            )
            assert mid <= avg + 1e-12


class TestHJBStep:
    def test_zero_density_degenerate_penalty(self):
        # with no population and epsilon = q^2 the zero row solves the step
        grid = small_grid()
        params = make_params(epsilon=0.01)
        M = np.zeros(grid.n_space + 1)
        U = solve_hjb_step(np.zeros(grid.n_space + 1), M, grid, params)
        assert np.allclose(U, 0.0, atol=1e-12)

    def test_residual_after_solve(self):
        grid = small_grid()
        params = make_params()
        rng = np.random.default_rng(8)
        M = random_density_row(grid, rng)
        U_next = rng.uniform(-0.5, 0.5, grid.n_space + 1)
        U_next[[0, -2, -1]] = 0.0
        U = solve_hjb_step(U_next, M, grid, params, newton_tol=1e-11)
        # re-substitute into the discrete equation
        phi, psi, _, _ = _phi_psi_rows(M, grid, params)
        idx = np.arange(1, grid.n_space - 1)
        fwd = (U[1:] - U[:-1]) / grid.h
        d1 = np.minimum(fwd[idx] - phi[idx], 0.0)
        d2 = np.maximum(fwd[idx - 1] - phi[idx], 0.0)
        ham = 0.5 * (d1**2 + d2**2) - psi[idx]
        lap = (U[idx + 1] - 2 * U[idx] + U[idx - 1]) / grid.h**2
        res = params.r * U[idx] + (U[idx] - U_next[idx]) / grid.dt - 0.5 * params.sigma**2 * lap + ham
        assert np.max(np.abs(res)) < 1e-11

    def test_matches_dense_root_finder_on_coarse_grid(self):
        grid = SpaceTimeGrid(length=2.0, horizon=0.5, n_space=8, n_time=4)
        params = make_params()
        rng = np.random.default_rng(9)
        M = random_density_row(grid, rng)
        U_next = rng.uniform(-0.3, 0.3, 9)
        U_next[[0, -2, -1]] = 0.0
        U = solve_hjb_step(U_next, M, grid, params, newton_tol=1e-13)

        phi, psi, _, _ = _phi_psi_rows(M, grid, params)

        def residual(u_int):
            U_full = np.zeros(9)
            U_full[1:7] = u_int
            idx = np.arange(1, 7)
            fwd = (U_full[1:] - U_full[:-1]) / grid.h
            d1 = np.minimum(fwd[idx] - phi[idx], 0.0)
            d2 = np.maximum(fwd[idx - 1] - phi[idx], 0.0)
            ham = 0.5 * (d1**2 + d2**2) - psi[idx]
            lap = (U_full[idx + 1] - 2 * U_full[idx] + U_full[idx - 1]) / grid.h**2
            return (
                params.r * U_full[idx]
                + (U_full[idx] - U_next[idx]) / grid.dt
                - 0.5 * params.sigma**2 * lap
                + ham
            )

        brute = optimize.root(residual, np.zeros(6), method="hybr", tol=1e-14)
        assert brute.success
        assert np.max(np.abs(U[1:7] - brute.x)) < 1e-8

    def test_newton_failure_carries_residual(self):
        grid = small_grid()
        params = make_params()
        M = random_density_row(grid, np.random.default_rng(10))
        with pytest.raises(ArithmeticError, match="residual"):
            solve_hjb_step(np.zeros(grid.n_space + 1), M, grid, params,
                           newton_tol=1e-16, newton_max=1)


class TestFPStep:
    def test_pure_diffusion_conserves_mass(self):
        grid = SpaceTimeGrid(length=8.0, horizon=1.0, n_space=160, n_time=50)
        params = make_params(q=0.1, epsilon=0.01, a=0.0)
        M = truncated_gaussian_profile(grid, 4.0, std=0.4)
        U = np.zeros(grid.n_space + 1)
        phi = np.zeros(grid.n_space + 1)  # no drift, no injection
        beta = np.zeros(grid.n_space + 1)
        mass0 = grid.h * M.sum()
        for _ in range(grid.n_time):
            M = solve_fp_step(M, U, grid, params, beta, phi)
        assert grid.h * M.sum() == pytest.approx(mass0, abs=1e-3)
        assert M.min() > -1e-10

    def test_transport_pushes_density_toward_lower_value(self):
        # U decreasing in x with a flat vertex row: velocity -H_p = +1
        grid = SpaceTimeGrid(length=8.0, horizon=0.5, n_space=160, n_time=50)
        params = make_params()
        M = truncated_gaussian_profile(grid, 4.0, std=0.4)
        U = -grid.x.copy()
        phi = np.zeros(grid.n_space + 1)
        beta = np.zeros(grid.n_space + 1)
        com0 = first_moment(M, grid) / (grid.h * M.sum())
        M1 = solve_fp_step(M, U, grid, params, beta, phi)
        com1 = first_moment(M1, grid) / (grid.h * M1.sum())
        assert com1 > com0

    def test_refrozen_solve_is_reproducible(self):
        grid = small_grid(n_space=60, n_time=20)
        params = make_params(q=0.1, epsilon=0.01)
        m0 = truncated_gaussian_profile(grid, 2.0)
        sol = solve_mfg(m0, grid, params, outer_tol=1e-12, outer_max=400)
        assert sol.converged
        # one more forward sweep with everything frozen from the converged run
        from bankmfg.mfg import beta_weights as bw

        M = np.empty_like(sol.M)
        M[0] = m0
        for m in range(grid.n_time):
            row = sol.M[m + 1]
            beta = bw(row, first_moment(row, grid), grid, params.sigma)
            phi, _, _, _ = _phi_psi_rows(row, grid, params)
            M[m + 1] = solve_fp_step(M[m], sol.U[m], grid, params, beta, phi)
        assert np.max(np.abs(M - sol.M)) < 1e-10

    def test_conservation_ledger_per_step(self):
        # summing the interior equations gives an exact algebraic identity:
        # h * sum dM = dt * (h * sum beta + diffusive boundary flux + transport
        # boundary flux), to roundoff
        grid = small_grid(n_space=60, n_time=20)
        params = make_params()
        rng = np.random.default_rng(11)
        M = random_density_row(grid, rng)
        U = rng.uniform(-0.5, 0.5, grid.n_space + 1)
        phi, _, mbar, _ = _phi_psi_rows(M, grid, params)
        beta = beta_weights(M, mbar, grid, params.sigma)
        M1 = solve_fp_step(M, U, grid, params, beta, phi)
        h, dt, sig2 = grid.h, grid.dt, params.sigma**2
        n = grid.n_space
        a1, a2 = transport_coefficients(U, phi, h)
        dmass = h * (M1[1 : n - 1].sum() - M[1 : n - 1].sum())
        diff_flux = 0.5 * sig2 * (-M1[1] - M1[n - 2]) / h
        trans_flux = M1[n - 2] * a1[n - 2] - M1[0] * a1[0] + M1[n - 1] * a2[n - 1] - M1[1] * a2[1]
        rhs = dt * (h * beta[1 : n - 1].sum() + diff_flux + trans_flux)
        assert dmass == pytest.approx(rhs, abs=1e-8)


class TestSolveMFG:
    def test_boundary_pinning_and_nonnegativity(self):
        grid = small_grid(n_space=60, n_time=20)
        params = make_params(q=0.1, epsilon=0.01)
        sol = solve_mfg(truncated_gaussian_profile(grid, 2.0), grid, params)
        assert sol.converged
        n = grid.n_space
        assert np.all(sol.U[: grid.n_time, [0, n - 1, n]] == 0.0)
        assert np.all(sol.U[grid.n_time] == 0.0)
        assert np.all(sol.M[1:, [0, n - 1, n]] == 0.0)
        assert sol.M.min() > -1e-10

    def test_nonlinear_residual_small_at_convergence(self):
        grid = small_grid(n_space=60, n_time=20)
        params = make_params(q=0.1, epsilon=0.01)
        sol = solve_mfg(truncated_gaussian_profile(grid, 2.0), grid, params, outer_tol=1e-8)
        assert fp_system_residual(sol) < 10 * 1e-8 * 100  # normalized measure, see acceptance

    def test_nonconvergence_flagged(self):
        grid = small_grid(n_space=60, n_time=20)
        params = make_params(q=0.1, epsilon=0.01)
        sol = solve_mfg(truncated_gaussian_profile(grid, 2.0), grid, params,
                        outer_tol=1e-14, outer_max=2)
        assert not sol.converged
        assert sol.n_iterations == 2

    def test_value_boundary_overrides(self):
        grid = small_grid(n_space=60, n_time=20)
        params = make_params(q=0.1, epsilon=0.01)
        term = 0.1 * grid.x
        sol = solve_mfg(truncated_gaussian_profile(grid, 2.0), grid, params,
                        u_left=0.3, u_right=(0.2, 0.25), u_terminal=term)
        assert np.all(sol.U[: grid.n_time, 0] == 0.3)
        assert np.all(sol.U[: grid.n_time, grid.n_space - 1] == 0.2)
        assert np.array_equal(sol.U[grid.n_time], term)

    def test_bad_m0_rejected(self):
        grid = small_grid()
        params = make_params()
        with pytest.raises(ValueError):
            solve_mfg(np.ones(grid.n_space + 1), grid, params)  # nonzero at origin
        with pytest.raises(ValueError):
            solve_mfg(np.zeros(grid.n_space), grid, params)  # wrong size
