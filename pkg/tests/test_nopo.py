import numpy as np
import pytest

from entlqg import (CHI_MAX, NopoParams, SchemeId, StabilityError, build_plant,
                    closed_loop_for_scheme, cost_matrix, diffusion_matrix,
                    drift_matrix, epr_variance, heterodyne_closed_form_V,
                    heterodyne_optimal_mu, homodyne_closed_form_V,
                    lyapunov_steady, open_loop_V, optimal_nonlocal,
                    optimal_nonlocal_alpha_beta, optimize_scheme, scheme_curves,
                    symmetric_family_W, verify_nonlocal_optimum, von_neumann_entropy)

CHI_GRID = np.linspace(0.05, 0.45, 9)


class TestBuildPlant:
    def test_zero_coupling(self):
        plant = build_plant(NopoParams(0.0))
        assert np.allclose(drift_matrix(plant), -np.eye(4) / 2, atol=1e-15)
        assert np.allclose(diffusion_matrix(plant), np.eye(4) / 2, atol=1e-15)

    def test_quarter_coupling_matrices(self):
        plant = build_plant(NopoParams(0.25))
        A = drift_matrix(plant)
        expected = np.array([[-0.5, 0, 0.25, 0], [0, -0.5, 0, -0.25],
                             [0.25, 0, -0.5, 0], [0, -0.25, 0, -0.5]])
        assert np.allclose(A, expected, atol=1e-14)
        assert np.allclose(diffusion_matrix(plant), np.eye(4) / 2, atol=1e-14)

    def test_hamiltonian_matrix_pattern(self):
        chi = 0.37
        G = build_plant(NopoParams(chi)).G
        assert np.array_equal(G, G.T)
        antidiag = [G[0, 3], G[1, 2], G[2, 1], G[3, 0]]
        assert np.allclose(antidiag, chi, atol=1e-15)
        assert np.count_nonzero(G) == 4

    def test_chi_domain(self):
        with pytest.raises(ValueError):
            NopoParams(0.5)
        with pytest.raises(ValueError):
            NopoParams(-0.01)
        NopoParams(CHI_MAX)  # boundary of the allowed domain


class TestOpenLoopV:
    def test_zero_coupling_vacuum(self):
        assert np.allclose(open_loop_V(NopoParams(0.0)).data, np.eye(4) / 2,
                           atol=1e-15)

    def test_quarter_coupling_values(self):
        V = open_loop_V(NopoParams(0.25)).data
        assert V[0, 0] == pytest.approx(2 / 3, abs=1e-15)
        assert V[0, 2] == pytest.approx(1 / 3, abs=1e-15)

    def test_matches_lyapunov_solver(self):
        for chi in np.linspace(0.0, 0.45, 20):
            p = NopoParams(chi)
            plant = build_plant(p)
            V = lyapunov_steady(drift_matrix(plant), diffusion_matrix(plant))
            assert np.max(np.abs(V.data - open_loop_V(p).data)) <= 1e-10


class TestCostMatrix:
    def test_vacuum_cost(self):
        assert np.trace(cost_matrix() @ (np.eye(4) / 2)) == pytest.approx(1.0,
                                                                          abs=1e-15)

    def test_symmetric_q_mode_costless(self):
        v = np.array([1.0, 0.0, 1.0, 0.0])
        assert np.allclose(cost_matrix() @ v, 0.0, atol=1e-15)

    def test_eigenvalues(self):
        w = np.sort(np.linalg.eigvalsh(cost_matrix()))
        assert np.allclose(w, [0.0, 0.0, 1.0, 1.0], atol=1e-14)


class TestOptimalNonlocal:
    def test_quarter_coupling(self):
        r = optimal_nonlocal(NopoParams(0.25))
        assert r.params["alpha"] == pytest.approx(0.625, abs=1e-12)
        assert r.params["beta"] == pytest.approx(0.375, abs=1e-12)
        assert r.m == pytest.approx(0.5, abs=1e-12)
        assert r.L == pytest.approx(1.0, abs=1e-12)
        assert r.S <= 1e-8
        assert r.recovery_residual <= 1e-8

    def test_zero_coupling(self):
        r = optimal_nonlocal(NopoParams(0.0))
        assert r.params["alpha"] == pytest.approx(0.5, abs=1e-15)
        assert r.params["beta"] == pytest.approx(0.0, abs=1e-15)
        assert r.m == pytest.approx(1.0, abs=1e-12)
        assert r.L == pytest.approx(0.0, abs=1e-12)

    def test_near_threshold_unbounded_growth(self):
        r = optimal_nonlocal(NopoParams(0.45))
        assert r.L == pytest.approx(-np.log2(0.1), abs=1e-9)
        assert r.L == pytest.approx(3.321928094887362, abs=1e-9)

    @pytest.mark.parametrize("chi", [0.1, 0.25, 0.4])
    def test_cost_entanglement_duality(self, chi):
        r = optimal_nonlocal(NopoParams(chi))
        assert r.L == pytest.approx(-np.log2(r.m), abs=1e-10)

    @pytest.mark.parametrize("chi", CHI_GRID)
    def test_purity_across_grid(self, chi):
        alpha, beta = optimal_nonlocal_alpha_beta(chi)
        W = symmetric_family_W(alpha, beta)
        assert von_neumann_entropy(W) <= 1e-8


class TestVerifyNonlocalOptimum:
    def test_quarter_coupling_grid(self):
        report = verify_nonlocal_optimum(NopoParams(0.25), grid=400)
        assert report.max_deviation <= 1e-6
        assert report.alpha_expected == pytest.approx(0.625)
        assert report.beta_expected == pytest.approx(0.375)
        assert report.monotone_along_boundary

    def test_small_coupling(self):
        report = verify_nonlocal_optimum(NopoParams(0.1))
        assert report.beta_expected == pytest.approx(0.1125, abs=1e-12)
        assert abs(report.beta_numeric - 0.1125) <= 1e-6

    def test_zero_coupling(self):
        report = verify_nonlocal_optimum(NopoParams(0.0))
        assert abs(report.beta_numeric) <= 1e-6
        assert report.m_expected == pytest.approx(1.0)


class TestHomodyneClosedForm:
    def test_zero_feedback_reduces_to_open_loop(self):
        p = NopoParams(0.3)
        V = homodyne_closed_form_V(p, 0.0, 0.0)
        assert np.max(np.abs(V.data - open_loop_V(p).data)) <= 1e-14

    def test_antisymmetric_feedback_at_coupling_strength(self):
        V = homodyne_closed_form_V(NopoParams(0.25), 0.0, 0.25).data
        assert V[0, 0] == pytest.approx(0.625, abs=1e-12)
        assert V[0, 2] == pytest.approx(0.375, abs=1e-12)
        assert V[1, 1] == pytest.approx(2 / 3, abs=1e-12)
        assert V[1, 3] == pytest.approx(-1 / 3, abs=1e-12)

    def test_opposite_sign_feedback(self):
        V = homodyne_closed_form_V(NopoParams(0.25), -0.25, 0.25).data
        assert V[0, 0] == pytest.approx(0.5, abs=1e-12)
        assert V[0, 2] == pytest.approx(0.25, abs=1e-12)

    def test_unstable_parameters_rejected(self):
        with pytest.raises(StabilityError):
            homodyne_closed_form_V(NopoParams(0.25), 0.2, 0.0)

    def test_matches_lyapunov_solver(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            chi = rng.uniform(0.01, 0.45)
            lp = rng.uniform(-0.5, 0.25 - chi / 2 - 1e-3)
            lm = rng.uniform(-0.5, 0.25 + chi / 2 - 1e-3)
            p = NopoParams(chi)
            plant = build_plant(p)
            from entlqg import HOMODYNE_Q, closed_loop, homodyne_gain, measurement_model
            loop = closed_loop(drift_matrix(plant), diffusion_matrix(plant),
                               homodyne_gain(lp, lm),
                               measurement_model(plant, HOMODYNE_Q))
            V = lyapunov_steady(loop.A_prime, loop.D_prime)
            assert np.max(np.abs(V.data - homodyne_closed_form_V(p, lp, lm).data)) <= 1e-10


class TestHeterodyneClosedForm:
    def test_zero_feedback_reduces_to_open_loop(self):
        p = NopoParams(0.2)
        assert np.max(np.abs(heterodyne_closed_form_V(p, 0.0).data
                             - open_loop_V(p).data)) <= 1e-14

    def test_optimal_mu_matches_lyapunov(self):
        p = NopoParams(0.25)
        mu = heterodyne_optimal_mu(0.25)
        plant = build_plant(p)
        from entlqg import HETERODYNE, closed_loop, heterodyne_gain, measurement_model
        loop = closed_loop(drift_matrix(plant), diffusion_matrix(plant),
                           heterodyne_gain(mu), measurement_model(plant, HETERODYNE))
        V = lyapunov_steady(loop.A_prime, loop.D_prime)
        assert np.max(np.abs(V.data - heterodyne_closed_form_V(p, mu).data)) <= 1e-10

    def test_generic_point_both_oracles(self):
        p = NopoParams(0.1)
        plant = build_plant(p)
        from entlqg import HETERODYNE, closed_loop, heterodyne_gain, measurement_model
        loop = closed_loop(drift_matrix(plant), diffusion_matrix(plant),
                           heterodyne_gain(-0.05), measurement_model(plant, HETERODYNE))
        V = lyapunov_steady(loop.A_prime, loop.D_prime)
        assert np.max(np.abs(V.data - heterodyne_closed_form_V(p, -0.05).data)) <= 1e-10

    def test_unstable_mu_rejected(self):
        with pytest.raises(StabilityError):
            heterodyne_closed_form_V(NopoParams(0.25), 0.3)


class TestOptimizeScheme:
    def test_antisymmetric_scheme_optimum(self):
        r = optimize_scheme(NopoParams(0.25), SchemeId.LOCAL_III)
        assert r.params["lambda"] == pytest.approx(0.25, abs=1e-6)
        assert r.L == pytest.approx(0.7924812503605781, abs=1e-9)
        assert not r.at_boundary

    def test_opposite_sign_scheme_matches_antisymmetric(self):
        r3 = optimize_scheme(NopoParams(0.25), SchemeId.LOCAL_III)
        r4 = optimize_scheme(NopoParams(0.25), SchemeId.LOCAL_IV)
        assert r4.params["lambda"] == pytest.approx(-0.25, abs=1e-6)
        assert abs(r3.L - r4.L) <= 1e-9
        assert r4.S <= 1e-8
        assert r3.S > 0.01

    def test_heterodyne_optimum(self):
        r = optimize_scheme(NopoParams(0.25), SchemeId.HETERODYNE)
        assert r.params["mu"] == pytest.approx(-0.190983006, abs=1e-6)
        none = optimize_scheme(NopoParams(0.25), SchemeId.NONE)
        iii = optimize_scheme(NopoParams(0.25), SchemeId.LOCAL_III)
        assert none.L < r.L < iii.L

    def test_symmetric_combination_scheme_is_flat(self):
        # Feedback on the antisqueezed combination leaves the entanglement
        # exactly at its open-loop value; the optimizer reports zero feedback.
        for chi in (0.1, 0.25, 0.4):
            r = optimize_scheme(NopoParams(chi), SchemeId.LOCAL_II)
            assert r.params["lambda"] == 0.0
            assert r.L == pytest.approx(np.log2(1 + 2 * chi), abs=1e-9)
            assert not r.at_boundary

    def test_self_feedback_scheme_below_window_knee(self):
        # In-loop amplification of each mode's own current squeezes the
        # antisymmetric combination most strongly at lambda = chi; for
        # chi < 1/6 that stationary point is inside the stability window and
        # attains the same entanglement as the antisymmetric scheme.
        for chi in (0.05, 0.1, 0.15):
            r = optimize_scheme(NopoParams(chi), SchemeId.LOCAL_I)
            assert r.params["lambda"] == pytest.approx(chi, abs=1e-6)
            expected = -0.5 * np.log2((1 - 2 * chi) / (1 + 2 * chi))
            assert r.L == pytest.approx(expected, abs=1e-9)
            assert not r.at_boundary

    def test_self_feedback_scheme_beyond_window_knee(self):
        # For chi > 1/6 the stationary point lambda = chi lies outside the
        # window and the objective increases monotonically up to the
        # stability edge: the supremum is not attained.
        for chi in (0.25, 0.4):
            r = optimize_scheme(NopoParams(chi), SchemeId.LOCAL_I)
            assert r.at_boundary
            edge = 0.25 - chi / 2
            assert r.params["lambda"] == pytest.approx(edge, abs=1e-4)
            assert r.L > np.log2(1 + 2 * chi)

    def test_none_scheme_is_open_loop(self):
        p = NopoParams(0.3)
        r = optimize_scheme(p, SchemeId.NONE)
        assert np.array_equal(r.V.data, open_loop_V(p).data)
        assert r.params == {}

    def test_zero_coupling_all_schemes_idle(self):
        p = NopoParams(0.0)
        for scheme in SchemeId:
            r = optimize_scheme(p, scheme)
            assert r.L == pytest.approx(0.0, abs=1e-12)
            for value in r.params.values():
                if scheme is SchemeId.NONLOCAL:
                    continue
                assert value == 0.0


class TestSchemeCurves:
    def test_closed_form_columns(self):
        rows = scheme_curves(0.1, 0.4, 4, (SchemeId.NONLOCAL, SchemeId.NONE))
        assert len(rows) == 8
        for r in rows:
            if r.scheme is SchemeId.NONLOCAL:
                assert r.L == pytest.approx(-np.log2(1 - 2 * r.chi), abs=1e-9)
            else:
                assert r.L == pytest.approx(np.log2(1 + 2 * r.chi), abs=1e-9)

    def test_row_ordering_and_entropy(self):
        rows = scheme_curves(0.05, 0.45, 5)
        by_chi = {}
        for r in rows:
            by_chi.setdefault(round(r.chi, 6), {})[r.scheme] = r
        assert len(by_chi) == 5
        for chi, group in by_chi.items():
            assert (group[SchemeId.NONLOCAL].L >= group[SchemeId.LOCAL_III].L
                    >= group[SchemeId.HETERODYNE].L >= group[SchemeId.NONE].L)
            assert abs(group[SchemeId.LOCAL_III].L - group[SchemeId.LOCAL_IV].L) <= 1e-9
            assert group[SchemeId.NONLOCAL].S <= 1e-8
            assert group[SchemeId.LOCAL_IV].S <= 1e-8
            if chi >= 0.1:
                assert group[SchemeId.LOCAL_III].S > 0.01

    def test_deterministic_order(self):
        rows = scheme_curves(0.1, 0.2, 2, (SchemeId.NONE, SchemeId.NONLOCAL))
        assert [r.scheme for r in rows] == [SchemeId.NONLOCAL, SchemeId.NONE] * 2
        assert rows[0].chi <= rows[-1].chi

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            scheme_curves(0.4, 0.1, 3)
        with pytest.raises(ValueError):
            scheme_curves(0.0, 0.3, 0)


class TestEprBound:
    @pytest.mark.parametrize("chi", CHI_GRID)
    def test_open_loop_epr_variance(self, chi):
        V = open_loop_V(NopoParams(chi))
        for theta in (0.0, 1.0, np.pi / 3):
            value = epr_variance(V, theta)
            assert value == pytest.approx(1 / (1 + 2 * chi), abs=1e-12)
            assert value >= 0.5

    def test_closed_loop_matrices_consistent(self):
        p = NopoParams(0.25)
        for scheme in (SchemeId.NONE, SchemeId.LOCAL_III, SchemeId.LOCAL_IV,
                       SchemeId.HETERODYNE):
            r = optimize_scheme(p, scheme)
            loop, _, _ = closed_loop_for_scheme(p, r)
            V = lyapunov_steady(loop.A_prime, loop.D_prime)
            assert np.max(np.abs(V.data - r.V.data)) <= 1e-9
