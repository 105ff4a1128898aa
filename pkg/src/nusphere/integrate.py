"""Runge-Kutta integration of the Bloch equation and the master equation.

This is the brute-force oracle for every closed-form result in the
package.  The default is classic fixed-step RK4 with the step bound

    h <= min(1e9 eV^-1, 1 / (50 ||M||_2)),

which keeps the local truncation error orders of magnitude below the
cross-check tolerances while staying bit-reproducible.  An embedded
adaptive RK45 (Dormand-Prince) is available through ``StepControl`` for
stiffness diagnostics; it raises StepUnderflow when the controller
requests steps below 1e-3 eV^-1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import OscillationParams, StepUnderflow, check_hermitian
from .generator import BlochGenerator, MODE_PAPER, build_generator, master_rhs
from .geometry import Trajectory

H_CAP = 1e9
H_MIN_ADAPTIVE = 1e-3

# Dormand-Prince 5(4) tableau
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)


@dataclass(frozen=True)
class StepControl:
    """Step selection: fixed RK4 (default) or adaptive RK45."""

    kind: str = "fixed"
    h_max: float | None = None
    rtol: float = 1e-10
    atol: float = 1e-14

    def __post_init__(self):
        if self.kind not in ("fixed", "adaptive"):
            raise ValueError(f"kind must be 'fixed' or 'adaptive', got {self.kind!r}")


def _check_grid(t_grid: np.ndarray) -> np.ndarray:
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 1:
        raise ValueError("t_grid must be a 1-d array with at least one node")
    if t_grid[0] != 0.0:
        raise ValueError(f"t_grid must start at 0, got {t_grid[0]}")
    if np.any(np.diff(t_grid) <= 0) and len(t_grid) > 1:
        raise ValueError("t_grid must be strictly ascending")
    return t_grid


def _rk4_nodes(rhs, y0, t_grid, h_max):
    """March y through all grid nodes with substeps of size <= h_max."""
    out = np.empty((len(t_grid),) + y0.shape, dtype=y0.dtype)
    out[0] = y0
    y = y0
    for i in range(len(t_grid) - 1):
        span = t_grid[i + 1] - t_grid[i]
        nsub = max(1, int(np.ceil(span / h_max - 1e-12)))
        h = span / nsub
        for _ in range(nsub):
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * h * k1)
            k3 = rhs(y + 0.5 * h * k2)
            k4 = rhs(y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = y
    return out


def _rk45_nodes(rhs, y0, t_grid, control: StepControl):
    out = np.empty((len(t_grid),) + y0.shape, dtype=y0.dtype)
    out[0] = y0
    y = y0
    h = (control.h_max or H_CAP)
    for i in range(len(t_grid) - 1):
        t, t_end = t_grid[i], t_grid[i + 1]
        while t < t_end:
            h = min(h, t_end - t)
            if h < H_MIN_ADAPTIVE:
                raise StepUnderflow(f"adaptive controller requested h = {h:.3e} eV^-1")
            k = [rhs(y)]
            for row in _DP_A[1:]:
                k.append(rhs(y + h * sum(a * ki for a, ki in zip(row, k))))
            y5 = y + h * sum(b * ki for b, ki in zip(_DP_B5, k))
            y4 = y + h * sum(b * ki for b, ki in zip(_DP_B4, k))
            scale = control.atol + control.rtol * np.max(np.abs(y5))
            err = np.max(np.abs(y5 - y4)) / scale
            if err <= 1.0:
                t += h
                y = y5
            h = h * min(5.0, max(0.2, 0.9 * (max(err, 1e-16)) ** -0.2))
        out[i + 1] = y
    return out


def integrate_bloch(gen: BlochGenerator, n0: np.ndarray, t_grid,
                    step_control: StepControl | None = None,
                    beta_seed: float | None = None) -> Trajectory:
    """Integrate dn/dt = M n through the grid nodes.

    Returns a Trajectory (polar form included) with provenance "rk4" or
    "rk45".
    """
    t_grid = _check_grid(t_grid)
    n0 = np.asarray(n0, dtype=float)
    control = step_control or StepControl()
    rhs = lambda y: gen.m @ y
    if control.kind == "fixed":
        h_max = control.h_max or min(H_CAP, 1.0 / (50.0 * np.linalg.norm(gen.m, 2)))
        nodes = _rk4_nodes(rhs, n0, t_grid, h_max)
        prov = "rk4"
    else:
        nodes = _rk45_nodes(rhs, n0, t_grid, control)
        prov = "rk45"
    return Trajectory.from_bloch(t_grid, nodes, beta_seed=beta_seed, provenance=prov)


@dataclass(frozen=True)
class MasterTrajectory:
    """Density-matrix time series with numerical-hygiene diagnostics."""

    t: np.ndarray
    rho: np.ndarray
    hermiticity_drift: float
    max_trace_dev: float


def integrate_master(params: OscillationParams, rho0: np.ndarray, t_grid,
                     mode: str = MODE_PAPER,
                     step_control: StepControl | None = None) -> MasterTrajectory:
    """Integrate the master equation in matrix form.

    Hermiticity is enforced by projecting rho <- (rho + rho^dag)/2 after
    every node; the largest projection applied is recorded as a drift
    diagnostic.  The trace is conserved by the dynamics and checked, not
    renormalized.
    """
    t_grid = _check_grid(t_grid)
    check_hermitian(rho0)
    rho0 = np.asarray(rho0, dtype=complex)
    control = step_control or StepControl()
    rhs = lambda rho: master_rhs(params, rho, mode, validate=False)

    m_norm = np.linalg.norm(build_generator(params, mode).m, 2)
    drift = 0.0
    trace_dev = 0.0
    out = np.empty((len(t_grid), 2, 2), dtype=complex)
    out[0] = rho0
    rho = rho0
    for i in range(len(t_grid) - 1):
        sub_grid = np.array([0.0, t_grid[i + 1] - t_grid[i]])
        if control.kind == "fixed":
            h_max = control.h_max or min(H_CAP, 1.0 / (50.0 * max(m_norm, 1e-300)))
            rho = _rk4_nodes(rhs, rho, sub_grid, h_max)[-1]
        else:
            rho = _rk45_nodes(rhs, rho, sub_grid, control)[-1]
        sym = 0.5 * (rho + rho.conj().T)
        drift = max(drift, float(np.max(np.abs(rho - sym))))
        rho = sym
        trace_dev = max(trace_dev, abs(complex(np.trace(rho)) - 1.0))
        out[i + 1] = rho
    return MasterTrajectory(t=t_grid, rho=out, hermiticity_drift=drift, max_trace_dev=trace_dev)
