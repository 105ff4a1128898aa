"""Condensed oracle cross-checks behind the ``selftest`` subcommand."""

from __future__ import annotations

import numpy as np

from .core import DecaySpec, bloch_from_density, density_from_bloch, make_params
from .evolve import bloch_trajectory
from .generator import MODE_DERIVED, MODE_PAPER, build_generator, master_rhs
from .geometry import Trajectory, initial_bloch, survival_series
from .hamiltonian import closed_form_probabilities
from .integrate import integrate_bloch
from .nmr import from_nmr, to_nmr
from .phases import gauge_check, pancharatnam, pancharatnam_product
from .spectral import eigenvalues_closed_form
from .sweeps import FIGURES, figure_params


def _figure1_params(phi=0.7, eta=1.0):
    decay = DecaySpec(c11=0.095, c22=0.15, c33=0.15, units="v0", offdiag="sqrt")
    return make_params(1.0e7, 8.0e-5, 0.188 * np.pi, phi, eta=eta, decay_spec=decay)


def run_selftest(quick: bool = True) -> bool:
    checks: list[tuple[str, bool, str]] = []

    def record(name: str, ok: bool, detail: str) -> None:
        checks.append((name, ok, detail))

    # closed-form survival probability vs Bloch trajectory, no dissipation
    worst = 0.0
    for eta in (0.0, 1.0):
        params = make_params(1.0e7, 8.0e-5, 0.188 * np.pi, np.pi / 3, eta=eta,
                             decay_spec=DecaySpec(0, 0, 0))
        t_grid = np.linspace(0.0, 4.0e12, 500)
        traj, _ = bloch_trajectory(params, t_grid, mode=MODE_PAPER)
        p_ee, _ = closed_form_probabilities(params, t_grid)
        worst = max(worst, float(np.max(np.abs(survival_series(traj, params) - p_ee))))
    record("survival-oracle", worst < 1e-9, f"max |dP| = {worst:.2e}")

    # spectral vs fixed-step integration
    worst = 0.0
    for phi in (0.0, 2.0, 5.0):
        params = _figure1_params(phi=phi)
        t_grid = np.linspace(0.0, 2.0e12, 201)
        for mode in (MODE_PAPER, MODE_DERIVED):
            traj, _ = bloch_trajectory(params, t_grid, mode=mode)
            rk = integrate_bloch(build_generator(params, mode), initial_bloch(params), t_grid)
            worst = max(worst, float(np.max(np.abs(traj.n - rk.n))))
    record("spectral-vs-rk4", worst < 1e-6, f"max |dn| = {worst:.2e}")

    # radical-formula eigenvalues vs numeric spectrum
    from .spectral import _match_error

    rng = np.random.default_rng(1)
    worst = 0.0
    failures = 0
    for _ in range(20):
        params = _figure1_params(phi=rng.uniform(0, 2 * np.pi), eta=rng.uniform(0.1, 2.5))
        gen = build_generator(params, MODE_DERIVED)
        try:
            lam = eigenvalues_closed_form(gen)
        except Exception:
            failures += 1
            continue
        worst = max(worst, _match_error(lam, np.linalg.eigvals(gen.m)))
    record("eigenvalues-closed-form", failures == 0 and worst < 1e-9,
           f"{failures} failures, worst rel {worst:.2e}")

    # generator vs master equation
    params = _figure1_params()
    rho = density_from_bloch(np.array([0.3, -0.2, 0.4]))
    worst = 0.0
    for mode in (MODE_PAPER, MODE_DERIVED):
        lhs = bloch_from_density(master_rhs(params, rho, mode) + np.eye(2) / 2)
        rhs = build_generator(params, mode).m @ np.array([0.3, -0.2, 0.4])
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    record("generator-vs-master", worst < 1e-13, f"max dev = {worst:.2e}")

    # pure-loop geometric phase, decomposition and chain oracle
    n_nodes = 2001 if quick else 10001
    beta = np.linspace(0.0, 2.0 * np.pi, n_nodes)
    alpha = np.pi / 3
    loop = np.stack([np.sin(alpha) * np.cos(beta), np.sin(alpha) * np.sin(beta),
                     np.full_like(beta, np.cos(alpha))], axis=1)
    traj = Trajectory.from_bloch(np.linspace(0, 1, n_nodes), loop, beta_seed=0.0)
    gp = pancharatnam(traj).gamma_p
    gp_prod = pancharatnam_product(traj, 20000)
    ok = abs(gp + np.pi / 2) < 1e-5 and abs(gp_prod + np.pi / 2) < 1e-3
    record("berry-loop", ok, f"decomposition {gp:+.6f}, chain {gp_prod:+.6f}, target {-np.pi/2:+.6f}")

    # gauge invariance on a figure trajectory
    params = _figure1_params(phi=1.0)
    t_grid = np.linspace(0.0, 2.0e12, 2001)
    traj, _ = bloch_trajectory(params, t_grid, mode=MODE_DERIVED)
    dev = max(gauge_check(traj, lambda t: 0.4),
              gauge_check(traj, lambda t: 0.3 * np.sin(2e-12 * t)))
    record("gauge-invariance", dev < 1e-9, f"max dev = {dev:.2e}")

    # fluctuating-field program round trip on the five figure parameter sets
    worst = 0.0
    for number in sorted(FIGURES):
        params = figure_params(FIGURES[number], FIGURES[number].etas[0], 0.9)
        prog = to_nmr(params)
        back = from_nmr(prog, params.energy_ev)
        worst = max(worst, abs(back.dm2_ev2 - params.dm2_ev2) / params.dm2_ev2,
                    abs(back.v0 - params.v0) / max(params.v0, 1e-300),
                    float(np.max(np.abs(back.decay.c - params.decay.c)))
                    / max(float(np.max(np.abs(params.decay.c))), 1e-300))
    record("nmr-round-trip", worst < 1e-12, f"worst rel dev = {worst:.2e}")

    width = max(len(name) for name, _, _ in checks)
    all_ok = True
    for name, ok, detail in checks:
        status = "PASS" if ok else "FAIL"
        all_ok &= ok
        print(f"{name:<{width}}  {status}  {detail}")
    print(f"selftest: {'all checks passed' if all_ok else 'FAILURES present'}")
    return all_ok
