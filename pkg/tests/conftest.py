import numpy as np
import pytest

from nusphere import DecaySpec, make_params

THETA = 0.188 * np.pi


def figure1_params(phi=0.0, eta=1.0):
    """E = 10 MeV, dm2 = 8e-5 eV^2, theta = 0.188 pi, sqrt-rule decay."""
    decay = DecaySpec(c11=0.095, c22=0.15, c33=0.15, units="v0", offdiag="sqrt")
    return make_params(1.0e7, 8.0e-5, THETA, phi, eta=eta, decay_spec=decay)


def figure2_params(phi=0.0, eta=1.0):
    decay = DecaySpec(c11=0.1, c22=0.1, c33=0.1, units="v0", offdiag="sqrt")
    return make_params(1.0e7, 8.0e-5, THETA, phi, eta=eta, decay_spec=decay)


def vacuum_params(phi=0.0, eta=0.0, theta=THETA):
    return make_params(1.0e7, 8.0e-5, theta, phi, eta=eta, decay_spec=DecaySpec(0, 0, 0))


def random_psd_decay(rng, scale=1e-12):
    a = rng.normal(size=(3, 3))
    return a @ a.T * rng.uniform(0.0, scale)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260809)
