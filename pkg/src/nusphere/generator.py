"""Bloch-space generator of the dissipative evolution, dn/dt = M n.

The master equation

    d rho/dt = -i [H, rho] + (1/2) sum_ij c_ij ([s_i rho, s_j] + [s_i, rho s_j])

maps onto a real 3x3 generator acting on the Bloch vector,

    M = [[-2 G23, -2 B-,  2 D+ ],
         [ 2 B+, -2 G13, -2 C- ],
         [-2 D-,  2 C+, -2 G12 ]]

with G_ij = c_ii + c_jj, B+- = h_z +- c_off, C+- = h_x +- c_off,
D+- = h_y +- c_off (the exact off-diagonal placements are below) and a
precession vector h that depends on the selected mode:

``"paper"``
    h = ((V0/2) sin2t cos phi, (V0/2) sin2t sin phi, (V0/2) cos2t - w/2).
    This is the flavor Hamiltonian rewritten in the rotated basis that
    carries the (cos t, e^{i phi} sin t) initial-state parameterization,
    so trajectories in this mode reproduce the closed-form matter
    transition probabilities exactly.  Use it for physics validation.

``"derived"``
    h = ((w/2) sin2t cos phi, (w/2) sin2t sin phi, (V0 - w cos2t)/2),
    read directly off the flavor-basis Hamiltonian.  Combined with the
    same initial-state parameterization this is the laboratory-frame
    program of the magnetic-resonance analog and is what the bundled
    parameter-sweep figures use.

(w = dm2/2E.)  The two modes share the dissipative part; only the
placement of V0 versus w in the precession differs.  With all c_ij = 0
both generators are antisymmetric with frequency |2h| = dm2_M/(2E).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import OscillationParams, PAULI, check_hermitian
from .hamiltonian import flavor_hamiltonian

MODE_PAPER = "paper"
MODE_DERIVED = "derived"
MODES = (MODE_PAPER, MODE_DERIVED)


@dataclass(frozen=True)
class BlochGenerator:
    """Real 3x3 Bloch generator with its coefficient decomposition (eV)."""

    m: np.ndarray
    mode: str
    b_plus: float
    b_minus: float
    c_plus: float
    c_minus: float
    d_plus: float
    d_minus: float
    gamma_12: float
    gamma_13: float
    gamma_23: float

    @property
    def gamma_total(self) -> float:
        """Trace of the decay matrix, c11 + c22 + c33."""
        return 0.5 * (self.gamma_12 + self.gamma_13 + self.gamma_23)


def precession_vector(params: OscillationParams, mode: str) -> np.ndarray:
    """Precession vector h (eV) of dn/dt = 2 h x n + dissipation."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    s2t, c2t = np.sin(2 * params.theta), np.cos(2 * params.theta)
    om, v0, phi = params.omega, params.v0, params.phi
    if mode == MODE_PAPER:
        return np.array([0.5 * v0 * s2t * np.cos(phi),
                         0.5 * v0 * s2t * np.sin(phi),
                         0.5 * v0 * c2t - 0.5 * om])
    return np.array([0.5 * om * s2t * np.cos(phi),
                     0.5 * om * s2t * np.sin(phi),
                     0.5 * (v0 - om * c2t)])


def mode_hamiltonian(params: OscillationParams, mode: str) -> np.ndarray:
    """Traceless 2x2 Hamiltonian h.sigma matching the selected mode."""
    if mode == MODE_DERIVED:
        return flavor_hamiltonian(params)
    hx, hy, hz = precession_vector(params, mode)
    return np.array([[hz, hx - 1j * hy], [hx + 1j * hy, -hz]], dtype=complex)


def build_generator(params: OscillationParams, mode: str = MODE_PAPER) -> BlochGenerator:
    """Assemble the 3x3 Bloch generator for the selected mode."""
    hx, hy, hz = precession_vector(params, mode)
    c = params.decay.c
    bp, bm = hz + c[0, 1], hz - c[1, 0]
    cp, cm = hx + c[1, 2], hx - c[2, 1]
    dp, dm = hy + c[2, 0], hy - c[0, 2]
    g12, g13, g23 = params.decay.gamma(1, 2), params.decay.gamma(1, 3), params.decay.gamma(2, 3)
    m = np.array([[-2 * g23, -2 * bm, 2 * dp],
                  [2 * bp, -2 * g13, -2 * cm],
                  [-2 * dm, 2 * cp, -2 * g12]])
    return BlochGenerator(m=m, mode=mode, b_plus=bp, b_minus=bm, c_plus=cp, c_minus=cm,
                          d_plus=dp, d_minus=dm, gamma_12=g12, gamma_13=g13, gamma_23=g23)


def dissipator(params: OscillationParams, rho: np.ndarray) -> np.ndarray:
    """(1/2) sum_ij c_ij ([s_i rho, s_j] + [s_i, rho s_j]) in matrix form."""
    c = params.decay.c
    out = np.zeros((2, 2), dtype=complex)
    for i in range(3):
        si = PAULI[i]
        si_rho = si @ rho
        for j in range(3):
            if c[i, j] == 0.0:
                continue
            sj = PAULI[j]
            # [s_i rho, s_j] + [s_i, rho s_j] = 2 s_i rho s_j - s_j s_i rho - rho s_j s_i
            out += 0.5 * c[i, j] * (2.0 * si_rho @ sj - sj @ si_rho - rho @ sj @ si)
    return out


def master_rhs(params: OscillationParams, rho: np.ndarray, mode: str = MODE_PAPER,
               validate: bool = True) -> np.ndarray:
    """Right-hand side -i[H, rho] + L rho of the master equation (eV).

    Traceless and Hermitian for Hermitian input; in Bloch form it equals
    ``build_generator(params, mode).m @ bloch_from_density(rho)`` for any
    symmetric decay matrix.  ``validate=False`` skips the Hermiticity
    check (used by the integrator, which projects states itself).
    """
    if validate:
        check_hermitian(rho)
    h = mode_hamiltonian(params, mode)
    return -1j * (h @ rho - rho @ h) + dissipator(params, rho)
