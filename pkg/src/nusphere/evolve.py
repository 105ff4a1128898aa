"""High-level trajectory construction with solver fallback and cross-checks.

The production path decomposes the Bloch generator spectrally and
evaluates the closed solution on the time grid; degenerate or defective
generators fall back to fixed-step integration.  The fallback is always
reported through the trajectory provenance and the returned info record,
never silent.
"""

from __future__ import annotations

import numpy as np

from .core import OscillationParams, SingularModeMatrix
from .generator import MODE_PAPER, build_generator
from .geometry import Trajectory, initial_bloch
from .integrate import StepControl, integrate_bloch
from .spectral import evaluate, spectral_solve


def bloch_trajectory(params: OscillationParams, t_grid, mode: str = MODE_PAPER,
                     solver: str = "auto", cross_check: bool = False) -> tuple[Trajectory, dict]:
    """Evolve the initial electron state over the grid.

    ``solver`` is "auto" (spectral with integration fallback), "spectral"
    (raise on degeneracy) or "rk4".  With ``cross_check=True`` the other
    route is also run and the maximum componentwise Bloch deviation is
    recorded in the info dict.

    Returns (trajectory, info) where info carries ``solver`` (the route
    actually used), ``fallback`` and optionally ``cross_check_max_dev``.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    gen = build_generator(params, mode)
    n0 = initial_bloch(params)
    info: dict = {"mode": mode, "solver": None, "fallback": False}

    traj = None
    if solver in ("auto", "spectral"):
        try:
            sol = spectral_solve(gen, n0)
            nodes = evaluate(sol, t_grid)
            traj = Trajectory.from_bloch(t_grid, nodes, beta_seed=params.phi,
                                         provenance=f"spectral/{sol.source}")
            info["solver"] = "spectral"
        except SingularModeMatrix:
            if solver == "spectral":
                raise
            info["fallback"] = True
    if traj is None:
        if solver not in ("auto", "rk4"):
            raise ValueError(f"solver must be 'auto', 'spectral' or 'rk4', got {solver!r}")
        traj = integrate_bloch(gen, n0, t_grid, beta_seed=params.phi)
        info["solver"] = "rk4"

    if cross_check:
        if info["solver"] == "spectral":
            other = integrate_bloch(gen, n0, t_grid, beta_seed=params.phi)
        else:
            other = integrate_bloch(gen, n0, t_grid, beta_seed=params.phi,
                                    step_control=StepControl(kind="adaptive"))
        info["cross_check_max_dev"] = float(np.max(np.abs(traj.n - other.n)))
    return traj, info


def densify_until_smooth(params: OscillationParams, t_max: float, nodes: int,
                         mode: str = MODE_PAPER, max_rounds: int = 60,
                         max_nodes: int = 2_000_000) -> tuple[Trajectory, dict]:
    """Build a trajectory dense enough for the phase integrals.

    Whenever an azimuth step exceeds the integrator's density requirement
    the offending interval is subdivided and the solution re-evaluated on
    the enlarged grid; only the intervals that need it are split, which
    keeps close passes by the sphere center (where the azimuth swings
    almost discontinuously) affordable.  The requested nodes always stay
    on the grid.
    """
    from .phases import MAX_DBETA

    gen = build_generator(params, mode)
    n0 = initial_bloch(params)
    sol = None
    try:
        sol = spectral_solve(gen, n0)
        provenance = f"spectral/{sol.source}"
    except SingularModeMatrix:
        provenance = "rk4"

    t_grid = np.linspace(0.0, t_max, nodes) if t_max > 0 else np.array([0.0])
    rounds = 0
    while True:
        if sol is not None:
            traj = Trajectory.from_bloch(t_grid, evaluate(sol, t_grid),
                                         beta_seed=params.phi, provenance=provenance)
        else:
            traj = integrate_bloch(gen, n0, t_grid, beta_seed=params.phi)
        dbeta = np.abs(np.diff(traj.beta)) if len(traj) > 1 else np.zeros(0)
        bad = np.flatnonzero(dbeta >= 0.8 * MAX_DBETA)
        if bad.size == 0 or rounds >= max_rounds or len(t_grid) + 8 * bad.size > max_nodes:
            info = {"mode": mode, "solver": "spectral" if sol is not None else "rk4",
                    "fallback": sol is None, "refinement_rounds": rounds,
                    "nodes": len(t_grid)}
            return traj, info
        inserts = []
        for i in bad:
            k = min(int(dbeta[i] / (0.4 * MAX_DBETA)) + 1, 8)
            step = (t_grid[i + 1] - t_grid[i]) / (k + 1)
            inserts.extend(t_grid[i] + step * np.arange(1, k + 1))
        t_grid = np.unique(np.concatenate([t_grid, np.asarray(inserts)]))
        rounds += 1
