"""Geometric quantities on the Poincare sphere.

A Bloch vector is mapped to polar form r (radius), alpha (polar angle
from the w axis) and beta (azimuth).  beta is kept as an unwrapped,
cumulative angle because the phase functionals integrate d(beta); it is
reduced modulo 2pi only at presentation time.  At the poles and at the
sphere center the azimuth is undefined; the previous frame is carried
and flagged, which makes the phase integrands contribute nothing there
(d beta = 0 across carried nodes).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import DegenerateState, OscillationParams, VectorOutsideSphere, bloch_from_density, initial_density

RADIUS_EPS = 1e-12
POLE_EPS = 1e-12


@dataclass(frozen=True)
class SpherePoint:
    """Polar-form point: radius, polar angle, unwrapped azimuth."""

    r: float
    alpha: float
    beta: float
    valid_beta: bool = True

    @property
    def lambda_e(self) -> float:
        """Mixture weight of the instantaneous electron-like eigenstate."""
        return min(0.5 * (1.0 + self.r), 1.0)

    @property
    def lambda_mu(self) -> float:
        # r may exceed 1 by roundoff; the weight itself is never negative
        return max(0.5 * (1.0 - self.r), 0.0)


def to_sphere(n: np.ndarray, prev: SpherePoint | None = None) -> SpherePoint:
    """Polar form of a Bloch vector with continuity unwrapping.

    Without ``prev`` the azimuth is reduced to [0, 2pi); with ``prev`` it
    is shifted by the multiple of 2pi nearest to ``prev.beta``.  At the
    sphere center (r < 1e-12) both angles are carried from ``prev``; at a
    pole (sin alpha < 1e-12) only the azimuth is carried.  Carried points
    have ``valid_beta = False``.
    """
    n = np.asarray(n, dtype=float)
    r = float(np.linalg.norm(n))
    if r > 1.0 + 1e-9:
        raise VectorOutsideSphere(f"|n| = {r} exceeds the unit ball")
    if r < RADIUS_EPS:
        alpha = prev.alpha if prev is not None else 0.0
        beta = prev.beta if prev is not None else 0.0
        return SpherePoint(r=r, alpha=alpha, beta=beta, valid_beta=False)
    alpha = float(np.arccos(np.clip(n[2] / r, -1.0, 1.0)))
    if np.sin(alpha) < POLE_EPS:
        beta = prev.beta if prev is not None else 0.0
        return SpherePoint(r=r, alpha=alpha, beta=beta, valid_beta=False)
    raw = float(np.arctan2(n[1], n[0]))
    if prev is None:
        beta = raw % (2.0 * np.pi)
    else:
        beta = raw + 2.0 * np.pi * np.round((prev.beta - raw) / (2.0 * np.pi))
    return SpherePoint(r=r, alpha=alpha, beta=beta, valid_beta=True)


@dataclass(frozen=True)
class EigenDecomposition:
    lambda_e: float
    lambda_mu: float
    nu_e: np.ndarray
    nu_mu: np.ndarray
    degenerate: bool = False


def eigenvectors_from_angles(alpha, beta) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal eigenvector pair of the state at polar angles (alpha, beta).

    Accepts scalars or arrays; vectors are returned with the component
    axis last, e.g. shape (len(alpha), 2).
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    phase = np.exp(1j * beta)
    nu_e = np.stack([np.cos(alpha / 2) * np.ones_like(phase), phase * np.sin(alpha / 2)], axis=-1)
    nu_mu = np.stack([np.sin(alpha / 2) * np.ones_like(phase), -phase * np.cos(alpha / 2)], axis=-1)
    return nu_e, nu_mu


def eigen_decomposition(n: np.ndarray, prev: SpherePoint | None = None) -> EigenDecomposition:
    """Instantaneous eigen-decomposition of the state (1 + n.sigma)/2.

    At the sphere center the eigenbasis is not unique: with a previous
    frame available its basis is carried (flagged degenerate), otherwise
    DegenerateState is raised.
    """
    n = np.asarray(n, dtype=float)
    r = float(np.linalg.norm(n))
    if r < RADIUS_EPS and prev is None:
        raise DegenerateState("maximally mixed state has no unique eigenbasis")
    point = to_sphere(n, prev)
    nu_e, nu_mu = eigenvectors_from_angles(point.alpha, point.beta)
    return EigenDecomposition(lambda_e=point.lambda_e, lambda_mu=point.lambda_mu,
                              nu_e=nu_e, nu_mu=nu_mu, degenerate=not point.valid_beta and r < RADIUS_EPS)


def transition_probability(n: np.ndarray, params: OscillationParams) -> float:
    """Survival probability of the initial electron state, from geometry alone.

    P = 1/2 + (r/2) (cos2t cos(alpha) + sin2t sin(alpha) cos(beta - phi)),
    which equals tr(rho(t) rho_e(0)).
    """
    point = to_sphere(np.asarray(n, dtype=float))
    c2t, s2t = np.cos(2 * params.theta), np.sin(2 * params.theta)
    p = 0.5 + 0.5 * point.r * (c2t * np.cos(point.alpha)
                               + s2t * np.sin(point.alpha) * np.cos(point.beta - params.phi))
    return float(p)


def initial_bloch(params: OscillationParams) -> np.ndarray:
    """Bloch vector of the initial electron flavor state."""
    return bloch_from_density(initial_density("e", params))


@dataclass(frozen=True)
class Trajectory:
    """Time series of Bloch vectors with their polar form and mixture weights.

    ``beta`` is unwrapped (cumulative); ``valid_beta`` marks nodes where
    the azimuth was carried over a pole/center degeneracy.  ``provenance``
    records which solver produced the points.
    """

    t: np.ndarray
    n: np.ndarray
    r: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    valid_beta: np.ndarray
    provenance: str = "unspecified"

    @property
    def lambda_e(self) -> np.ndarray:
        return np.minimum(0.5 * (1.0 + self.r), 1.0)

    @property
    def lambda_mu(self) -> np.ndarray:
        # r may exceed 1 by roundoff; the weights stay in [0, 1]
        return np.maximum(0.5 * (1.0 - self.r), 0.0)

    def __len__(self) -> int:
        return len(self.t)

    @classmethod
    def from_bloch(cls, t: np.ndarray, n: np.ndarray, beta_seed: float | None = None,
                   provenance: str = "unspecified") -> "Trajectory":
        """Convert a Bloch time series to polar form with continuous azimuth.

        ``beta_seed`` selects the 2pi branch of the first azimuth (the
        natural seed for a flavor-state start is the CP phase, making
        beta(0) = phi exactly); without it the first azimuth lies in
        [0, 2pi).
        """
        t = np.asarray(t, dtype=float)
        n = np.asarray(n, dtype=float)
        if n.shape != (len(t), 3):
            raise ValueError(f"expected Bloch array of shape ({len(t)}, 3), got {n.shape}")
        r = np.linalg.norm(n, axis=1)
        if np.any(r > 1.0 + 1e-9):
            raise VectorOutsideSphere(f"max |n| = {r.max()} exceeds the unit ball")
        with np.errstate(invalid="ignore"):
            cos_a = np.where(r > 0, n[:, 2] / np.where(r > 0, r, 1.0), 1.0)
        alpha = np.arccos(np.clip(cos_a, -1.0, 1.0))
        valid = (r >= RADIUS_EPS) & (np.sin(alpha) >= POLE_EPS)
        if np.all(valid):
            beta = np.unwrap(np.arctan2(n[:, 1], n[:, 0]))
            if beta_seed is None:
                beta += (beta[0] % (2.0 * np.pi)) - beta[0]
            else:
                beta += 2.0 * np.pi * np.round((float(beta_seed) - beta[0]) / (2.0 * np.pi))
        else:
            # sequential path: carry angles across pole/center degeneracies
            beta = np.empty(len(t))
            point = None if beta_seed is None else SpherePoint(r=1.0, alpha=0.0, beta=float(beta_seed))
            for i in range(len(t)):
                point = to_sphere(n[i], point)
                r[i], alpha[i], beta[i], valid[i] = point.r, point.alpha, point.beta, point.valid_beta
        return cls(t=t, n=n, r=r, alpha=alpha, beta=beta, valid_beta=valid, provenance=provenance)


def bloch_at(traj: Trajectory, times) -> np.ndarray:
    """Linear interpolation of the Bloch series at arbitrary times.

    Interpolation stays inside the unit ball (convexity), so the result
    is always a valid state series.
    """
    times = np.asarray(times, dtype=float)
    out = np.empty((len(times), 3))
    for k in range(3):
        out[:, k] = np.interp(times, traj.t, traj.n[:, k])
    return out


def survival_series(traj: Trajectory, params: OscillationParams) -> np.ndarray:
    """Survival probability of the initial electron state along a trajectory."""
    c2t, s2t = np.cos(2 * params.theta), np.sin(2 * params.theta)
    return 0.5 + 0.5 * traj.r * (c2t * np.cos(traj.alpha)
                                 + s2t * np.sin(traj.alpha) * np.cos(traj.beta - params.phi))
