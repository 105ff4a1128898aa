"""Closed-form flavor Hamiltonian, matter-basis diagonalization and the
dissipation-free transition probability.

The traceless flavor-basis Hamiltonian is

    H = (1/4E) [[-dm2 cos2t + A_cc,  dm2 sin2t e^{-i phi}],
                [ dm2 sin2t e^{i phi},  dm2 cos2t - A_cc]]

with A_cc = 2 E V0.  The overall-phase diagonal term of the full
Hamiltonian (E + (m1^2+m2^2)/4E + V0/2) cancels in every observable in
scope and is never materialized.

The effective mixing angle in matter is fixed by the two-argument
arctangent of (dm2 sin2t, dm2 cos2t - A_cc), which keeps 2*theta_M in
(0, pi) and theta_M continuous across the resonance A_cc = dm2 cos2t;
at resonance theta_M = pi/4 (maximal mixing of the oscillation
amplitude).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import OscillationParams


@dataclass(frozen=True)
class MatterBasis:
    """Effective mixing angle, splitting and mixing matrix in matter."""

    theta_m: float
    dm2_m: float
    u_m: np.ndarray


def flavor_hamiltonian(params: OscillationParams) -> np.ndarray:
    """Traceless flavor-basis Hamiltonian (eV), Hermitian by construction."""
    dm2, e4 = params.dm2_ev2, 4.0 * params.energy_ev
    c2t, s2t = np.cos(2 * params.theta), np.sin(2 * params.theta)
    off = dm2 * s2t * np.exp(-1j * params.phi) / e4
    diag = (-dm2 * c2t + params.a_cc) / e4
    return np.array([[diag, off], [np.conj(off), -diag]], dtype=complex)


def matter_basis(params: OscillationParams) -> MatterBasis:
    """Effective mixing angle and squared-mass splitting in matter."""
    dm2 = params.dm2_ev2
    c2t, s2t = np.cos(2 * params.theta), np.sin(2 * params.theta)
    x = dm2 * c2t - params.a_cc
    y = dm2 * s2t
    dm2_m = float(np.hypot(x, y))
    theta_m = 0.5 * np.arctan2(y, x)
    um = np.array([[np.cos(theta_m), np.sin(theta_m) * np.exp(-1j * params.phi)],
                   [-np.sin(theta_m) * np.exp(1j * params.phi), np.cos(theta_m)]], dtype=complex)
    return MatterBasis(theta_m=theta_m, dm2_m=dm2_m, u_m=um)


def amplitudes(params: OscillationParams, t: float) -> tuple[complex, complex]:
    """Survival and transition amplitudes (psi_ee, psi_emu) at time t (1/eV).

    Closed form from the decoupled matter-basis evolution with the
    electron-flavor initial condition; the amplitude norm is 1 for all t.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    mb = matter_basis(params)
    xi = mb.dm2_m * t / (4.0 * params.energy_ev)
    c, s = np.cos(mb.theta_m), np.sin(mb.theta_m)
    psi_ee = c * c * np.exp(1j * xi) + s * s * np.exp(-1j * xi)
    psi_emu = 0.5 * np.exp(1j * params.phi) * np.sin(2 * mb.theta_m) * (np.exp(-1j * xi) - np.exp(1j * xi))
    return complex(psi_ee), complex(psi_emu)


def closed_form_probabilities(params: OscillationParams, t) -> tuple:
    """Dissipation-free probabilities (P_ee, P_emu) at time t (scalar or array).

    P_emu = sin^2(2 theta_M) sin^2(dm2_M t / 4E); independent of the CP
    phase phi.  Used as the primary physics oracle for the Bloch-space
    solvers.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    mb = matter_basis(params)
    p_emu = np.sin(2 * mb.theta_m) ** 2 * np.sin(mb.dm2_m * t / (4.0 * params.energy_ev)) ** 2
    return 1.0 - p_emu, p_emu
