"""Parameter and state types for two-flavor neutrino evolution in matter.

Conventions used throughout the package (natural units, hbar = 1):

* energies in eV, times in 1/eV,
* density matrices are 2x2 complex ndarrays, Hermitian with unit trace,
* Bloch (Poincare) vectors are length-3 float ndarrays ``(u, v, w)``
  obtained from the Pauli expansion ``rho = (1 + n.sigma)/2``,
* the vacuum oscillation frequency is ``omega = dm2 / (2 E)`` and the
  charged-current term is ``A_cc = 2 E V0``.

The CP phase ``phi`` is stored unreduced; sweep output normalizes it to
``[0, 2pi)`` only for labeling.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)

PSD_TOL = 1e-12


class NuSphereError(Exception):
    """Base class for all package errors."""


class NonPositiveEnergy(NuSphereError):
    pass


class AngleOutOfRange(NuSphereError):
    pass


class NegativeDiagonalDecay(NuSphereError):
    pass


class NonHermitianInput(NuSphereError):
    pass


class VectorOutsideSphere(NuSphereError):
    pass


class BranchSelectionFailure(NuSphereError):
    pass


class SingularModeMatrix(NuSphereError):
    pass


class StepUnderflow(NuSphereError):
    pass


class ZeroOverlap(NuSphereError):
    pass


class SparseTrajectory(NuSphereError):
    pass


class VanishingTrace(NuSphereError):
    pass


class NotRankOne(NuSphereError):
    """Decay matrix is not of the single-field form c_ij = d_i d_j.

    Carries the nearest rank-1 approximation and its residual.
    """

    def __init__(self, message, nearest=None, residual=None):
        super().__init__(message)
        self.nearest = nearest
        self.residual = residual


class DegenerateState(NuSphereError):
    pass


@dataclass(frozen=True)
class DecayMatrix:
    """Real 3x3 matrix of decay coefficients c_ij (eV), indices (1,2,3)=(x,y,z).

    The diagonal must be nonnegative.  Any real off-diagonal part is
    accepted; complete positivity of the generated dynamics requires the
    symmetric part to be positive semidefinite, which is recorded in the
    ``is_psd`` diagnostic (a warning, not an error, is emitted when it
    fails -- figure reproduction only uses the PSD rank-1 rule).
    """

    c: np.ndarray
    is_psd: bool = field(init=False)

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        if c.shape != (3, 3):
            raise ValueError(f"decay matrix must be 3x3, got {c.shape}")
        if np.any(np.diag(c) < 0):
            raise NegativeDiagonalDecay(f"diagonal decay coefficients must be >= 0, got {np.diag(c)}")
        object.__setattr__(self, "c", c)
        sym = 0.5 * (c + c.T)
        scale = max(float(np.max(np.abs(c))), 1e-300)
        psd = bool(np.all(np.linalg.eigvalsh(sym) >= -PSD_TOL * scale))
        object.__setattr__(self, "is_psd", psd)
        if not psd:
            warnings.warn("decay matrix symmetric part is not PSD; dynamics may not be completely positive",
                          stacklevel=3)

    @classmethod
    def zero(cls) -> "DecayMatrix":
        return cls(np.zeros((3, 3)))

    def gamma(self, i: int, j: int) -> float:
        """Damping combination Gamma_ij = c_ii + c_jj (1-based indices)."""
        return float(self.c[i - 1, i - 1] + self.c[j - 1, j - 1])

    @property
    def trace(self) -> float:
        return float(np.trace(self.c))


@dataclass(frozen=True)
class DecaySpec:
    """Diagonal decay coefficients plus the off-diagonal completion rule.

    ``c11, c22, c33`` are either multiples of the matter potential V0
    (``units='v0'``, the figure convention) or absolute values in eV
    (``units='ev'``).  ``offdiag='sqrt'`` applies c_ij = sqrt(c_ii c_jj)
    (rank-1, PSD); ``offdiag='zero'`` leaves the matrix diagonal.
    """

    c11: float = 0.0
    c22: float = 0.0
    c33: float = 0.0
    units: str = "v0"
    offdiag: str = "sqrt"

    def __post_init__(self):
        if self.units not in ("v0", "ev"):
            raise ValueError(f"units must be 'v0' or 'ev', got {self.units!r}")
        if self.offdiag not in ("sqrt", "zero"):
            raise ValueError(f"offdiag must be 'sqrt' or 'zero', got {self.offdiag!r}")
        if min(self.c11, self.c22, self.c33) < 0:
            raise NegativeDiagonalDecay("diagonal decay coefficients must be >= 0")

    def resolve(self, v0: float) -> DecayMatrix:
        scale = v0 if self.units == "v0" else 1.0
        diag = np.array([self.c11, self.c22, self.c33]) * scale
        if self.offdiag == "sqrt":
            d = np.sqrt(diag)
            c = np.outer(d, d)
        else:
            c = np.diag(diag)
        return DecayMatrix(c)


@dataclass(frozen=True)
class OscillationParams:
    """Physical inputs of the two-flavor system.

    Parameters
    ----------
    energy_ev : float
        Neutrino energy E in eV (> 0).
    dm2_ev2 : float
        Mass-squared splitting dm^2_21 in eV^2 (> 0).
    theta : float
        Vacuum mixing angle in radians, in (0, pi/2).
    phi : float
        Intrinsic CP-violating (Majorana) phase in radians; stored unreduced.
    v0 : float
        Matter potential V0 in eV (>= 0).
    decay : DecayMatrix
        Decay coefficients of the dissipator.
    """

    energy_ev: float
    dm2_ev2: float
    theta: float
    phi: float
    v0: float
    decay: DecayMatrix

    def __post_init__(self):
        if not (self.energy_ev > 0 and np.isfinite(self.energy_ev)):
            raise NonPositiveEnergy(f"energy must be positive and finite, got {self.energy_ev}")
        if not (self.dm2_ev2 > 0 and np.isfinite(self.dm2_ev2)):
            raise NonPositiveEnergy(f"dm2 must be positive and finite, got {self.dm2_ev2}")
        if not (0.0 < self.theta < np.pi / 2):
            raise AngleOutOfRange(f"vacuum mixing angle must lie in (0, pi/2), got {self.theta}")
        if self.v0 < 0:
            raise AngleOutOfRange(f"matter potential must be >= 0, got {self.v0}")
        if not np.isfinite(self.omega) or self.omega <= 0:
            raise NonPositiveEnergy("vacuum oscillation frequency dm2/2E is not finite and positive")

    @property
    def omega(self) -> float:
        """Vacuum oscillation frequency dm^2/(2E) in eV."""
        return self.dm2_ev2 / (2.0 * self.energy_ev)

    @property
    def a_cc(self) -> float:
        """Charged-current term A_cc = 2 E V0 in eV^2."""
        return 2.0 * self.energy_ev * self.v0

    @property
    def eta(self) -> float:
        """Matter-potential-to-frequency ratio V0 / (dm^2/2E)."""
        return self.v0 / self.omega


def make_params(energy_ev: float, dm2_ev2: float, theta: float, phi: float,
                eta: float | None = None, decay_spec: DecaySpec | None = None,
                v0: float | None = None) -> OscillationParams:
    """Assemble validated parameters, resolving V0 and the decay matrix.

    Exactly one of ``eta`` (V0 as a multiple of dm^2/2E) or ``v0`` (eV)
    must be given.  With the figure convention (decay coefficients in
    multiples of V0 and the sqrt off-diagonal rule), eta = 0 yields a
    vacuum system with all c_ij = 0.
    """
    if (eta is None) == (v0 is None):
        raise ValueError("specify exactly one of eta or v0")
    if not (energy_ev > 0):
        raise NonPositiveEnergy(f"energy must be positive, got {energy_ev}")
    omega = dm2_ev2 / (2.0 * energy_ev)
    if v0 is None:
        if eta < 0:
            raise AngleOutOfRange(f"eta must be >= 0, got {eta}")
        v0 = eta * omega
    spec = decay_spec if decay_spec is not None else DecaySpec()
    return OscillationParams(energy_ev=energy_ev, dm2_ev2=dm2_ev2, theta=theta,
                             phi=phi, v0=v0, decay=spec.resolve(v0))


def initial_density(flavor: str, params: OscillationParams) -> np.ndarray:
    """Initial pure density matrix of the electron or muon flavor state.

    In the basis of the time-evolving eigenstate parameterization, the
    electron state is ``(cos(theta), e^{i phi} sin(theta))`` and the muon
    state is its orthogonal complement; both are projectors (purity 1).
    """
    t, p = params.theta, params.phi
    s2t = np.sin(2 * t)
    if flavor == "e":
        return np.array([[np.cos(t) ** 2, 0.5 * np.exp(-1j * p) * s2t],
                         [0.5 * np.exp(1j * p) * s2t, np.sin(t) ** 2]], dtype=complex)
    if flavor == "mu":
        return np.array([[np.sin(t) ** 2, -0.5 * np.exp(-1j * p) * s2t],
                         [-0.5 * np.exp(1j * p) * s2t, np.cos(t) ** 2]], dtype=complex)
    raise ValueError(f"flavor must be 'e' or 'mu', got {flavor!r}")


def check_hermitian(rho: np.ndarray, tol: float = 1e-12) -> None:
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise NonHermitianInput(f"expected a 2x2 matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise NonHermitianInput(f"matrix is not Hermitian within {tol}")


def bloch_from_density(rho: np.ndarray) -> np.ndarray:
    """Bloch vector (u, v, w) of a Hermitian unit-trace 2x2 matrix.

    u = rho12 + rho21, v = i(rho12 - rho21), w = rho11 - rho22.
    """
    check_hermitian(rho)
    u = rho[0, 1] + rho[1, 0]
    v = 1j * (rho[0, 1] - rho[1, 0])
    w = rho[0, 0] - rho[1, 1]
    return np.array([u.real, v.real, w.real])


def density_from_bloch(n: np.ndarray) -> np.ndarray:
    """Density matrix (1 + n.sigma)/2 of a Bloch vector inside the unit ball."""
    n = np.asarray(n, dtype=float)
    norm = np.linalg.norm(n)
    if norm > 1.0 + 1e-6:
        raise VectorOutsideSphere(f"|n| = {norm} exceeds the unit ball")
    return 0.5 * (np.eye(2, dtype=complex) + n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z)


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def state_diagnostics(rho: np.ndarray) -> dict:
    """Trace, Hermiticity residual and minimum eigenvalue of a state."""
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    tr = complex(np.trace(rho))
    eigs = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    return {"trace_dev": abs(tr - 1.0), "hermiticity": herm, "min_eig": float(eigs.min())}
