"""Mapping between oscillation parameters and the magnetic-resonance analog.

The two-level system with Hamiltonian

    H = M0 + H_rf,   M0 = (V0/2) s_z,
    H_rf = -(w/2) cos2t s_z + (w/2) sin2t cos(phi) s_x + (w/2) sin2t sin(phi) s_y

(w = dm2/2E) reproduces the traceless flavor Hamiltonian exactly, and a
single fluctuating field direction d = (d1, d2, d3) realizes the decay
matrix c_ij = d_i d_j.  Such a realization exists precisely when the
decay matrix is symmetric, PSD and rank <= 1, which is what the sqrt
off-diagonal completion rule produces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DecayMatrix, NotRankOne, OscillationParams

RANK1_TOL = 1e-10

# precession scale w for dm2 = 8.0e-5 eV^2 over E in [1, 10] MeV
OMEGA_REFERENCE_RANGE = (4.0e-12, 4.0e-11)


@dataclass(frozen=True)
class NmrProgram:
    """Static-field + fluctuation program realizing one parameter set.

    All fields in eV: ``omega`` is the precession scale dm2/2E, ``m0``
    the static-field coefficient V0/2, ``d`` the three fluctuation
    amplitudes.  ``theta`` and ``phi`` fix the drive orientation.
    """

    omega: float
    theta: float
    phi: float
    m0: float
    d: np.ndarray

    @property
    def v0(self) -> float:
        return 2.0 * self.m0

    @property
    def omega_in_reference_range(self) -> bool:
        """Whether omega lies in the detection window spanned by
        dm2 = 8.0e-5 eV^2 and E in [1, 10] MeV."""
        lo, hi = OMEGA_REFERENCE_RANGE
        return lo <= self.omega <= hi

    def decay_matrix(self) -> DecayMatrix:
        return DecayMatrix(np.outer(self.d, self.d))

    def hamiltonian(self) -> np.ndarray:
        """M0 + H_rf as a 2x2 matrix (equals the traceless flavor Hamiltonian)."""
        hz = 0.5 * self.v0 - 0.5 * self.omega * np.cos(2 * self.theta)
        hx = 0.5 * self.omega * np.sin(2 * self.theta) * np.cos(self.phi)
        hy = 0.5 * self.omega * np.sin(2 * self.theta) * np.sin(self.phi)
        return np.array([[hz, hx - 1j * hy], [hx + 1j * hy, -hz]], dtype=complex)


def _rank1_factor(c: np.ndarray) -> np.ndarray:
    """Factor a symmetric PSD rank-1 matrix as d d^T; raise NotRankOne otherwise."""
    scale = max(float(np.max(np.abs(c))), 0.0)
    if scale == 0.0:
        return np.zeros(3)
    asym = float(np.max(np.abs(c - c.T)))
    eigvals, eigvecs = np.linalg.eigh(0.5 * (c + c.T))
    # eigh sorts ascending; rank-1 PSD means only the last eigenvalue is nonzero
    residual = max(asym, float(np.max(np.abs(eigvals[:2]))), float(max(0.0, -eigvals[2])))
    nearest = max(eigvals[2], 0.0) * np.outer(eigvecs[:, 2], eigvecs[:, 2])
    if residual > RANK1_TOL * scale:
        raise NotRankOne(
            f"decay matrix is not d_i d_j (residual {residual:.3e} vs scale {scale:.3e})",
            nearest=nearest, residual=residual)
    d = np.sqrt(eigvals[2]) * eigvecs[:, 2]
    # global sign: first nonzero amplitude positive
    for comp in d:
        if abs(comp) > 0.0:
            if comp < 0:
                d = -d
            break
    return d


def to_nmr(params: OscillationParams) -> NmrProgram:
    """Fluctuating-field program realizing the given parameters.

    Raises NotRankOne (carrying the nearest rank-1 approximation and its
    residual) when the decay matrix is not of the d_i d_j form.
    """
    d = _rank1_factor(params.decay.c)
    return NmrProgram(omega=params.omega, theta=params.theta, phi=params.phi,
                      m0=0.5 * params.v0, d=d)


def from_nmr(prog: NmrProgram, energy_ev: float) -> OscillationParams:
    """Oscillation parameters reproducing a fluctuating-field program."""
    return OscillationParams(energy_ev=energy_ev,
                             dm2_ev2=2.0 * energy_ev * prog.omega,
                             theta=prog.theta, phi=prog.phi, v0=prog.v0,
                             decay=prog.decay_matrix())
