import numpy as np
import pytest

from nusphere import (AngleOutOfRange, DecayMatrix, DecaySpec, NegativeDiagonalDecay,
                      NonHermitianInput, NonPositiveEnergy, VectorOutsideSphere,
                      bloch_from_density, density_from_bloch, initial_density, make_params)
from nusphere.core import purity, state_diagnostics

from conftest import THETA, figure1_params


class TestMakeParams:
    def test_figure1_values(self):
        p = figure1_params()
        assert p.omega == pytest.approx(4.0e-12, rel=1e-15)
        assert p.v0 == pytest.approx(4.0e-12, rel=1e-15)
        assert p.decay.c[0, 0] == pytest.approx(3.8e-13, rel=1e-15)
        assert p.a_cc == pytest.approx(8.0e-5, rel=1e-15)

    def test_eta_zero_gives_vacuum(self):
        p = make_params(1e7, 8e-5, THETA, 0.0, eta=0.0,
                        decay_spec=DecaySpec(0.095, 0.15, 0.15))
        assert p.v0 == 0.0
        assert np.all(p.decay.c == 0.0)

    def test_eta_scaling(self):
        p = make_params(1e7, 8e-5, THETA, 0.0, eta=2.0, decay_spec=DecaySpec(0, 0, 0))
        assert p.v0 == pytest.approx(8.0e-12, rel=1e-15)

    def test_v0_direct(self):
        p = make_params(1e7, 8e-5, THETA, 0.0, v0=5e-12, decay_spec=DecaySpec(0, 0, 0))
        assert p.eta == pytest.approx(1.25)

    def test_validation_errors(self):
        with pytest.raises(NonPositiveEnergy):
            make_params(-1e7, 8e-5, THETA, 0.0, eta=1.0)
        with pytest.raises(NonPositiveEnergy):
            make_params(1e7, 0.0, THETA, 0.0, eta=1.0)
        with pytest.raises(AngleOutOfRange):
            make_params(1e7, 8e-5, 0.0, 0.0, eta=1.0)
        with pytest.raises(AngleOutOfRange):
            make_params(1e7, 8e-5, np.pi / 2, 0.0, eta=1.0)
        with pytest.raises(AngleOutOfRange):
            make_params(1e7, 8e-5, THETA, 0.0, eta=-0.5)
        with pytest.raises(NegativeDiagonalDecay):
            DecaySpec(c11=-0.1)
        with pytest.raises(ValueError):
            make_params(1e7, 8e-5, THETA, 0.0)  # neither eta nor v0


class TestDecayMatrix:
    def test_sqrt_rule_is_rank1_psd(self):
        d = figure1_params().decay
        assert d.is_psd
        eigs = np.sort(np.linalg.eigvalsh(0.5 * (d.c + d.c.T)))[::-1]
        assert eigs[0] == pytest.approx(d.trace, rel=1e-12)
        assert abs(eigs[1]) < 1e-12 * d.trace
        assert abs(eigs[2]) < 1e-12 * d.trace

    def test_gamma_combinations(self):
        d = figure1_params().decay
        assert d.gamma(2, 3) == pytest.approx(d.c[1, 1] + d.c[2, 2], rel=1e-15)

    def test_non_psd_warns_not_fails(self):
        c = np.diag([1e-13, 1e-13, 1e-13]).astype(float)
        c[0, 1] = c[1, 0] = 5e-13  # symmetric part indefinite
        with pytest.warns(UserWarning):
            d = DecayMatrix(c)
        assert not d.is_psd

    def test_negative_diagonal_rejected(self):
        with pytest.raises(NegativeDiagonalDecay):
            DecayMatrix(np.diag([-1e-13, 0, 0]).astype(float))


class TestInitialDensity:
    def test_maximal_mixing(self):
        p = make_params(1e7, 8e-5, np.pi / 4, 0.0, eta=0.0, decay_spec=DecaySpec(0, 0, 0))
        rho = initial_density("e", p)
        assert np.allclose(rho, 0.5 * np.ones((2, 2)), atol=1e-15)

    def test_quarter_phase_offdiagonal(self):
        p = make_params(1e7, 8e-5, THETA, np.pi / 2, eta=0.0, decay_spec=DecaySpec(0, 0, 0))
        rho = initial_density("e", p)
        assert rho[0, 1] == pytest.approx(-0.5j * np.sin(0.376 * np.pi), abs=1e-15)

    def test_both_flavors_pure_unit_trace(self):
        p = figure1_params(phi=1.3)
        for flavor in ("e", "mu"):
            rho = initial_density(flavor, p)
            assert np.trace(rho) == pytest.approx(1.0, abs=1e-15)
            assert purity(rho) == pytest.approx(1.0, abs=1e-12)
            assert np.allclose(rho @ rho, rho, atol=1e-14)

    def test_mu_is_antipodal(self):
        p = figure1_params(phi=2.2)
        ne = bloch_from_density(initial_density("e", p))
        nmu = bloch_from_density(initial_density("mu", p))
        assert np.allclose(nmu, -ne, atol=1e-14)

    def test_unknown_flavor(self):
        with pytest.raises(ValueError):
            initial_density("tau", figure1_params())


class TestBlochConversions:
    def test_initial_state_vector(self):
        p = figure1_params(phi=0.9)
        n = bloch_from_density(initial_density("e", p))
        expected = [np.sin(2 * THETA) * np.cos(0.9), np.sin(2 * THETA) * np.sin(0.9),
                    np.cos(2 * THETA)]
        assert np.allclose(n, expected, atol=1e-14)

    def test_maximally_mixed(self):
        assert np.allclose(bloch_from_density(np.eye(2) / 2), 0.0, atol=1e-15)

    def test_poles(self):
        assert np.allclose(density_from_bloch([0, 0, 1]), [[1, 0], [0, 0]], atol=1e-15)
        assert np.allclose(density_from_bloch([0, 0, 0]), np.eye(2) / 2, atol=1e-15)

    def test_round_trip_random(self, rng):
        worst = 0.0
        for _ in range(100):
            n = rng.normal(size=3)
            n *= rng.uniform(0, 1) / max(np.linalg.norm(n), 1e-12)
            back = bloch_from_density(density_from_bloch(n))
            worst = max(worst, np.max(np.abs(back - n)))
        assert worst < 1e-14

    def test_non_hermitian_rejected(self):
        with pytest.raises(NonHermitianInput):
            bloch_from_density(np.array([[0.5, 0.1], [0.3, 0.5]], dtype=complex))

    def test_outside_sphere_rejected(self):
        with pytest.raises(VectorOutsideSphere):
            density_from_bloch([1.1, 0, 0])

    def test_state_diagnostics(self):
        diag = state_diagnostics(density_from_bloch([0.2, 0.1, -0.4]))
        assert diag["trace_dev"] < 1e-15
        assert diag["hermiticity"] < 1e-15
        assert diag["min_eig"] > 0
