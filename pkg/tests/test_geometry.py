import numpy as np
import pytest

from nusphere import (DegenerateState, Trajectory, bloch_from_density, density_from_bloch,
                      eigen_decomposition, initial_bloch, initial_density, to_sphere,
                      transition_probability)
from nusphere.geometry import SpherePoint, bloch_at, eigenvectors_from_angles, survival_series

from conftest import THETA, figure1_params


class TestToSphere:
    @pytest.mark.parametrize("phi", [0.0, 0.9, np.pi, 5.0])
    def test_initial_flavor_state(self, phi):
        p = figure1_params(phi=phi)
        point = to_sphere(initial_bloch(p))
        assert point.r == pytest.approx(1.0, abs=1e-12)
        assert point.alpha == pytest.approx(2 * THETA, abs=1e-12)
        assert point.beta == pytest.approx(phi, abs=1e-12)  # [0, 2pi) convention
        assert point.valid_beta

    def test_pole_carries_previous_azimuth(self):
        prev = SpherePoint(r=1.0, alpha=0.5, beta=2.2)
        point = to_sphere(np.array([0.0, 0.0, 0.5]), prev)
        assert point.r == 0.5
        assert point.alpha == pytest.approx(0.0)
        assert point.beta == 2.2
        assert not point.valid_beta

    def test_center_carries_both_angles(self):
        prev = SpherePoint(r=0.4, alpha=1.1, beta=-0.7)
        point = to_sphere(np.zeros(3), prev)
        assert (point.alpha, point.beta, point.valid_beta) == (1.1, -0.7, False)

    def test_unwrap_continuity(self):
        prev = SpherePoint(r=1.0, alpha=np.pi / 2, beta=3.1)
        # raw azimuth -3.13 is near +3.15 after unwrapping
        point = to_sphere([np.cos(3.15), np.sin(3.15), 0.0], prev)
        assert point.beta == pytest.approx(3.15, abs=1e-12)

    def test_mixture_weights(self):
        point = to_sphere(np.array([0.0, 0.0, 0.62]))
        assert point.lambda_e == pytest.approx(0.81)
        assert point.lambda_mu == pytest.approx(0.19)
        assert point.lambda_e + point.lambda_mu == 1.0


class TestEigenDecomposition:
    def test_initial_state_eigenvector(self):
        p = figure1_params(phi=1.3)
        dec = eigen_decomposition(initial_bloch(p))
        assert dec.lambda_e == pytest.approx(1.0, abs=1e-12)
        assert dec.lambda_mu == pytest.approx(0.0, abs=1e-12)
        expected = np.array([np.cos(THETA), np.exp(1.3j) * np.sin(THETA)])
        assert np.allclose(dec.nu_e, expected, atol=1e-12)

    def test_north_pole(self):
        dec = eigen_decomposition(np.array([0.0, 0.0, 1.0]))
        assert np.allclose(dec.nu_e, [1.0, 0.0], atol=1e-15)
        assert dec.lambda_e == 1.0

    def test_orthonormal_and_reconstructs(self, rng):
        for _ in range(50):
            n = rng.normal(size=3)
            n *= rng.uniform(0.05, 1) / max(np.linalg.norm(n), 1e-12)
            dec = eigen_decomposition(n)
            assert abs(np.vdot(dec.nu_e, dec.nu_mu)) < 1e-12
            assert np.vdot(dec.nu_e, dec.nu_e) == pytest.approx(1.0, abs=1e-12)
            rebuilt = (dec.lambda_e * np.outer(dec.nu_e, dec.nu_e.conj())
                       + dec.lambda_mu * np.outer(dec.nu_mu, dec.nu_mu.conj()))
            assert np.max(np.abs(rebuilt - density_from_bloch(n))) < 1e-12

    def test_center_degeneracy(self):
        with pytest.raises(DegenerateState):
            eigen_decomposition(np.zeros(3))
        dec = eigen_decomposition(np.zeros(3), prev=SpherePoint(r=0.5, alpha=0.3, beta=0.4))
        assert dec.degenerate


class TestTransitionProbability:
    def test_initial_survival_is_one(self):
        p = figure1_params(phi=2.9)
        assert transition_probability(initial_bloch(p), p) == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed_is_half(self):
        p = figure1_params()
        assert transition_probability(np.zeros(3), p) == pytest.approx(0.5, abs=1e-15)

    def test_against_trace_oracle(self, rng):
        p = figure1_params(phi=1.9)
        rho_e0 = initial_density("e", p)
        for _ in range(100):
            n = rng.normal(size=3)
            n *= rng.uniform(0, 1) / max(np.linalg.norm(n), 1e-12)
            expected = float(np.real(np.trace(density_from_bloch(n) @ rho_e0)))
            got = transition_probability(n, p)
            assert got == pytest.approx(expected, abs=1e-12)
            assert 0.0 <= got <= 1.0


class TestTrajectory:
    def test_spiral_unwrap_monotone(self):
        # synthetic spiral crossing the +-pi seam repeatedly
        beta = np.linspace(0.0, 12.0, 400)
        n = np.stack([0.8 * np.cos(beta), 0.8 * np.sin(beta), np.full_like(beta, 0.1)], axis=1)
        traj = Trajectory.from_bloch(np.linspace(0, 1, 400), n, beta_seed=0.0)
        assert np.all(np.diff(traj.beta) > 0)
        assert traj.beta[-1] == pytest.approx(12.0, abs=1e-9)

    def test_fast_and_sequential_paths_agree(self):
        beta = np.linspace(0.2, 9.0, 300)
        n = np.stack([0.7 * np.cos(beta), 0.7 * np.sin(beta), 0.3 * np.sin(beta / 3)], axis=1)
        t = np.linspace(0, 1, 300)
        fast = Trajectory.from_bloch(t, n, beta_seed=0.2)
        seq_r = np.empty(300)
        seq_alpha = np.empty(300)
        seq_beta = np.empty(300)
        point = SpherePoint(r=1.0, alpha=0.0, beta=0.2)
        for i in range(300):
            point = to_sphere(n[i], point)
            seq_r[i], seq_alpha[i], seq_beta[i] = point.r, point.alpha, point.beta
        assert np.allclose(fast.r, seq_r, atol=0)
        assert np.allclose(fast.alpha, seq_alpha, atol=0)
        assert np.allclose(fast.beta, seq_beta, atol=1e-12)

    def test_carried_nodes_flagged(self):
        n = np.array([[0.5, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.5, 0.0]])
        traj = Trajectory.from_bloch(np.array([0.0, 1.0, 2.0]), n)
        assert traj.valid_beta.tolist() == [True, False, True]
        assert traj.beta[1] == traj.beta[0]

    def test_bloch_at_interpolates(self):
        t = np.linspace(0, 10, 11)
        n = np.stack([t / 10, np.zeros_like(t), 1 - t / 10], axis=1) * 0.5
        traj = Trajectory.from_bloch(t, n)
        mid = bloch_at(traj, [4.5])
        assert np.allclose(mid[0], [0.225, 0.0, 0.275], atol=1e-15)

    def test_survival_series_matches_pointwise(self, rng):
        p = figure1_params(phi=0.7)
        from nusphere import bloch_trajectory

        traj, _ = bloch_trajectory(p, np.linspace(0, 1e12, 101))
        series = survival_series(traj, p)
        for i in (0, 37, 100):
            assert series[i] == pytest.approx(transition_probability(traj.n[i], p), abs=1e-12)


class TestEigenvectorsFromAngles:
    def test_vectorized_shape_and_units(self):
        alpha = np.array([0.3, 1.2, 2.8])
        beta = np.array([0.0, 2.0, -1.0])
        nu_e, nu_mu = eigenvectors_from_angles(alpha, beta)
        assert nu_e.shape == (3, 2)
        norms = np.abs(np.einsum("ij,ij->i", nu_e.conj(), nu_e))
        assert np.allclose(norms, 1.0, atol=1e-15)
        cross = np.abs(np.einsum("ij,ij->i", nu_e.conj(), nu_mu))
        assert np.allclose(cross, 0.0, atol=1e-15)
