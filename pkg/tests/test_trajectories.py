import numpy as np
import pytest

from entlqg import (HOMODYNE_Q, FeedbackGain, NopoParams, SchemeId, SimConfig,
                    StabilityError, build_plant, closed_loop_for_scheme,
                    cost_matrix, lyapunov_steady, open_loop_V, optimal_nonlocal,
                    regulation_cost, regulation_cost_sem, riccati_steady,
                    scheme_realization, simulate_conditional)

OPTIMAL_UPSILON = np.array([[0, -1], [-1, 0]], dtype=complex)
ZERO_GAIN = FeedbackGain(np.zeros((4, 4)))
MC_FLOOR = 1e-9


@pytest.fixture(scope="module")
def zero_gain_run():
    plant = build_plant(NopoParams(0.25))
    cfg = SimConfig(dt=5e-3, t_final=40.0, n_traj=300, seed=11)
    return simulate_conditional(plant, HOMODYNE_Q, ZERO_GAIN, cfg)


@pytest.fixture(scope="module")
def optimal_run():
    p = NopoParams(0.3)
    plant = build_plant(p)
    u, gain = scheme_realization(p, optimal_nonlocal(p))
    cfg = SimConfig(dt=1e-3, t_final=20.0, n_traj=200, seed=5)
    return plant, u, simulate_conditional(plant, u, gain, cfg)


class TestDeterminism:
    def test_identical_seed_bitwise(self):
        plant = build_plant(NopoParams(0.2))
        cfg = SimConfig(dt=1e-2, t_final=5.0, n_traj=16, seed=99)
        a = simulate_conditional(plant, HOMODYNE_Q, ZERO_GAIN, cfg)
        b = simulate_conditional(plant, HOMODYNE_Q, ZERO_GAIN, cfg)
        assert np.array_equal(a.mean_outer, b.mean_outer)
        assert np.array_equal(a.outer_by_traj, b.outer_by_traj)
        assert np.array_equal(a.mean_by_traj, b.mean_by_traj)
        assert np.array_equal(a.v_c_final.data, b.v_c_final.data)

    def test_different_seed_differs(self):
        plant = build_plant(NopoParams(0.2))
        cfg1 = SimConfig(dt=1e-2, t_final=5.0, n_traj=16, seed=1)
        cfg2 = SimConfig(dt=1e-2, t_final=5.0, n_traj=16, seed=2)
        a = simulate_conditional(plant, HOMODYNE_Q, ZERO_GAIN, cfg1)
        b = simulate_conditional(plant, HOMODYNE_Q, ZERO_GAIN, cfg2)
        assert not np.array_equal(a.mean_outer, b.mean_outer)


class TestConditionalCovariance:
    def test_stays_on_riccati_fixed_point(self, optimal_run):
        plant, u, stats = optimal_run
        W = riccati_steady(plant, u)
        assert np.max(np.abs(stats.v_c_final.data - W.data)) <= 1e-6

    def test_step_size_insensitive(self):
        # the conditional covariance path is deterministic RK4; halving dt
        # moves the endpoint by far less than the statistical tolerances
        plant = build_plant(NopoParams(0.25))
        finals = []
        for dt in (4e-3, 2e-3, 1e-3):
            cfg = SimConfig(dt=dt, t_final=6.0, n_traj=1, seed=0)
            stats = simulate_conditional(plant, HOMODYNE_Q, ZERO_GAIN, cfg)
            finals.append(stats.v_c_final.data)
        assert np.max(np.abs(finals[0] - finals[1])) <= 1e-9
        assert np.max(np.abs(finals[1] - finals[2])) <= 1e-9

    def test_custom_start_converges(self):
        p = NopoParams(0.25)
        plant = build_plant(p)
        cfg = SimConfig(dt=2e-3, t_final=60.0, n_traj=1, seed=0)
        stats = simulate_conditional(plant, HOMODYNE_Q, ZERO_GAIN, cfg,
                                     v0=open_loop_V(p))
        W = riccati_steady(plant, HOMODYNE_Q)
        assert np.max(np.abs(stats.v_c_final.data - W.data)) <= 1e-6


class TestUnconditionalDecomposition:
    def test_zero_gain_recovers_open_loop(self, zero_gain_run):
        Vopen = open_loop_V(NopoParams(0.25)).data
        tol = 5.0 * zero_gain_run.mean_outer_sem() + MC_FLOOR
        assert np.all(np.abs(zero_gain_run.v_unconditional - Vopen) <= tol)

    def test_unconditional_estimate_is_physical(self, zero_gain_run):
        from entlqg import CovarianceMatrix, is_physical
        V = CovarianceMatrix(zero_gain_run.v_unconditional)
        assert is_physical(V, tol=1e-6)  # Monte-Carlo tolerance

    def test_optimal_gain_recovers_conditional(self, optimal_run):
        plant, u, stats = optimal_run
        W = riccati_steady(plant, u)
        tol = 5.0 * stats.mean_outer_sem() + MC_FLOOR
        assert np.all(np.abs(stats.v_unconditional - W.data) <= tol)

    def test_scheme_gain_matches_closed_loop_lyapunov(self):
        p = NopoParams(0.25)
        from entlqg import optimize_scheme
        result = optimize_scheme(p, SchemeId.LOCAL_III)
        u, gain = scheme_realization(p, result)
        loop, _, _ = closed_loop_for_scheme(p, result)
        plant = build_plant(p)
        cfg = SimConfig(dt=5e-3, t_final=40.0, n_traj=300, seed=3)
        stats = simulate_conditional(plant, u, gain, cfg)
        V_pred = lyapunov_steady(loop.A_prime, loop.D_prime).data
        tol = 5.0 * stats.mean_outer_sem() + MC_FLOOR
        assert np.all(np.abs(stats.v_unconditional - V_pred) <= tol)


class TestMeanRegulation:
    def test_time_averaged_means_near_zero(self, optimal_run):
        _, _, stats = optimal_run
        tol = 4.0 * stats.traj_mean_sem() + MC_FLOOR
        assert np.all(np.abs(stats.traj_mean()) <= tol)

    def test_mean_outer_near_zero(self, optimal_run):
        _, _, stats = optimal_run
        tol = 4.0 * stats.mean_outer_sem() + MC_FLOOR
        assert np.all(np.abs(stats.mean_outer) <= tol)


class TestRegulationCost:
    def test_optimal_scheme_cost(self):
        p = NopoParams(0.25)
        plant = build_plant(p)
        u, gain = scheme_realization(p, optimal_nonlocal(p))
        cfg = SimConfig(dt=1e-3, t_final=20.0, n_traj=100, seed=21)
        stats = simulate_conditional(plant, u, gain, cfg)
        cost = regulation_cost(stats, cost_matrix())
        tol = 3.0 * regulation_cost_sem(stats, cost_matrix()) + MC_FLOOR
        assert abs(cost - 0.5) <= tol

    def test_zero_gain_cost(self, zero_gain_run):
        cost = regulation_cost(zero_gain_run, cost_matrix())
        sem = regulation_cost_sem(zero_gain_run, cost_matrix())
        assert abs(cost - 2 / 3) <= 3.0 * sem + MC_FLOOR
        assert sem > 0

    def test_zero_cost_matrix(self, zero_gain_run):
        assert regulation_cost(zero_gain_run, np.zeros((4, 4))) == 0.0


class TestValidation:
    def test_unstable_closed_loop_rejected(self):
        plant = build_plant(NopoParams(0.25))
        from entlqg import homodyne_gain
        with pytest.raises(StabilityError):
            simulate_conditional(plant, HOMODYNE_Q, homodyne_gain(0.3, 0.0),
                                 SimConfig(dt=1e-2, t_final=2.0, n_traj=2, seed=0))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SimConfig(dt=0.05)  # above the step cap
        with pytest.raises(ValueError):
            SimConfig(n_traj=0)
        with pytest.raises(ValueError):
            SimConfig(burn_in=1.0)
        with pytest.raises(ValueError):
            SimConfig(t_final=1e-5, dt=1e-3)

    def test_short_horizon_warns(self):
        plant = build_plant(NopoParams(0.25))
        with pytest.warns(UserWarning, match="slowest closed-loop time constant"):
            simulate_conditional(plant, HOMODYNE_Q, ZERO_GAIN,
                                 SimConfig(dt=1e-2, t_final=2.0, n_traj=2, seed=0))
