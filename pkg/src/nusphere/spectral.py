"""Closed-form spectral solution of the Bloch equation dn/dt = M n.

The generator's characteristic cubic is solved in radicals: with

    a = 8 (27 B+ C+ D+ + 9 C+ C- (G12 + G13 - 2 G23)
         + (9 D+ D- - (G12 + G13 - 2 G23)(2 G12 - G13 - G23)) (G12 - 2 G13 + G23)
         + 9 B- (-3 C- D- + B+ (-2 G12 + G13 + G23)))
    b = -4 (G12 + G13 + G23)^2
        + 12 (B+ B- + C+ C- + D+ D- + G13 G23 + G12 (G13 + G23))

the three eigenvalues are, writing S = c11 + c22 + c33 for the constant
shift and u = ((a + sqrt(4 b^3 + a^2)) / 2)^(1/3),

    l0  = -4S/3 - b/(3u) + u/3
    l+- = -4S/3 + (1 +- i sqrt3) b/(6u) - (1 -+ i sqrt3) u/6.

Note the two damping scales: the constant shift uses S = tr(c) (which
makes l0 + l+ + l- equal tr(M) = -4S), while the quadratic term of b
carries the doubled combination G12 + G13 + G23 = 2S.  These are the
unique assignments under which the radical formulas reproduce the
numeric spectrum (validated here to ~1e-14 relative on random draws).

Cube and square roots are multivalued; all six branch candidates
(two square-root signs times three cube roots of unity) are evaluated
and the candidate matching the numeric spectrum is selected.  If none
matches within 1e-6 relative, BranchSelectionFailure is raised and
callers fall back to the numeric eigendecomposition.

Mode (eigenvector) columns use the structured form

    (4 C+ C- + L X,  4 C- D- + 2 B+ L,  4 B+ C+ - 2 D- X),
    L = l + 2 G12,  X = l + 2 G13,

which is an exact eigenvector of M for every eigenvalue l but can
degenerate to the zero vector at special parameter points; the solver
then falls back to numeric eigenvectors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .core import BranchSelectionFailure, SingularModeMatrix
from .generator import BlochGenerator

log = logging.getLogger(__name__)

SQRT3 = np.sqrt(3.0)
CUBE_ROOTS_OF_UNITY = np.exp(2j * np.pi * np.arange(3) / 3)

DEGENERACY_GAP = 1e-6
BRANCH_TOL = 1e-6


@dataclass(frozen=True)
class SpectralSolution:
    """Eigen-decomposition of a Bloch generator with initial-condition weights.

    ``evaluate`` reconstructs n(t) = Re sum_i d_i exp(l_i t) mode_i.
    ``source`` records where the eigenvalues came from ("numeric" or
    "closed-form"); ``mode_form`` records whether the structured mode
    columns or numeric eigenvectors were used.
    """

    lambdas: np.ndarray
    modes: np.ndarray
    coeffs: np.ndarray
    source: str
    mode_form: str
    degenerate: bool


def _cubic_invariants(gen: BlochGenerator) -> tuple[float, float]:
    bp, bm = gen.b_plus, gen.b_minus
    cp, cm = gen.c_plus, gen.c_minus
    dp, dm = gen.d_plus, gen.d_minus
    g12, g13, g23 = gen.gamma_12, gen.gamma_13, gen.gamma_23
    a = 8.0 * (27.0 * bp * cp * dp
               + 9.0 * cp * cm * (g12 + g13 - 2.0 * g23)
               + (9.0 * dp * dm - (g12 + g13 - 2.0 * g23) * (2.0 * g12 - g13 - g23))
               * (g12 - 2.0 * g13 + g23)
               + 9.0 * bm * (-3.0 * cm * dm + bp * (-2.0 * g12 + g13 + g23)))
    gsum = g12 + g13 + g23
    b = -4.0 * gsum ** 2 + 12.0 * (bp * bm + cp * cm + dp * dm
                                   + g13 * g23 + g12 * (g13 + g23))
    return a, b


def _match_error(candidate: np.ndarray, reference: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(reference))), 1e-300)
    best = np.inf
    for perm in permutations(range(3)):
        err = float(np.max(np.abs(candidate[list(perm)] - reference))) / scale
        best = min(best, err)
    return best


def eigenvalues_closed_form(gen: BlochGenerator) -> np.ndarray:
    """Radical-formula eigenvalues (l0, l+, l-), branch-matched to the spectrum.

    Raises BranchSelectionFailure when no branch candidate agrees with the
    numeric spectrum to 1e-6 relative.
    """
    a, b = _cubic_invariants(gen)
    shift = -4.0 * gen.gamma_total / 3.0
    disc = complex(4.0 * b ** 3 + a ** 2)
    reference = np.linalg.eigvals(gen.m)

    best_err, best = np.inf, None
    for root in (np.sqrt(disc), -np.sqrt(disc)):
        big_a = a + root
        if big_a == 0:
            continue
        u0 = (big_a / 2.0) ** (1.0 / 3.0)
        for w in CUBE_ROOTS_OF_UNITY:
            u = u0 * w
            if u == 0:
                continue
            with np.errstate(all="ignore"):
                l0 = shift - b / (3.0 * u) + u / 3.0
                lp = shift + (1.0 + 1j * SQRT3) * b / (6.0 * u) - (1.0 - 1j * SQRT3) * u / 6.0
                lm = shift + (1.0 - 1j * SQRT3) * b / (6.0 * u) - (1.0 + 1j * SQRT3) * u / 6.0
            cand = np.array([l0, lp, lm])
            if not np.all(np.isfinite(cand.view(float))):
                continue
            err = _match_error(cand, reference)
            if err < best_err:
                best_err, best = err, cand
    if best is None or best_err > BRANCH_TOL:
        raise BranchSelectionFailure(
            f"no cube-root branch reproduces the numeric spectrum (best relative error {best_err:.3e})")
    return best


def structured_modes(gen: BlochGenerator, lambdas: np.ndarray) -> np.ndarray:
    """Eigenvector columns in the closed coefficient form, one per eigenvalue."""
    bp, cp, cm, dm = gen.b_plus, gen.c_plus, gen.c_minus, gen.d_minus
    g12, g13 = gen.gamma_12, gen.gamma_13
    cols = []
    for lam in np.asarray(lambdas, dtype=complex):
        lcap = lam + 2.0 * g12
        xcap = lam + 2.0 * g13
        cols.append([4.0 * cp * cm + lcap * xcap,
                     4.0 * cm * dm + 2.0 * bp * lcap,
                     4.0 * bp * cp - 2.0 * dm * xcap])
    return np.array(cols, dtype=complex).T


def closed_form_coefficient(gen: BlochGenerator, lambdas, n0, which: int = 0) -> complex:
    """Initial-condition weight d_i of the structured-mode expansion, in radicals.

    ``which`` selects d0, d+ or d- via the cyclic rule: d+ and d- are the
    same expression with the eigenvalue triple cyclically permuted.  The
    u(0) D-^2 term inside the C- group carries coefficient 2 (the value
    validated symbolically against the Cramer solution of the mode system).
    Raises ZeroDivisionError-like ValueError when the denominator is
    negligible relative to its natural scale.
    """
    lam = np.asarray(lambdas, dtype=complex)
    order = [(0, 1, 2), (1, 2, 0), (2, 0, 1)][which]
    l0, l2, l3 = lam[order[0]], lam[order[1]], lam[order[2]]
    bp, cp, cm, dm = gen.b_plus, gen.c_plus, gen.c_minus, gen.d_minus
    g12, g13 = gen.gamma_12, gen.gamma_13
    u0, v0, w0 = np.asarray(n0, dtype=float)
    lam2, lam3 = l2 + 2.0 * g12, l3 + 2.0 * g12
    xi2, xi3 = l2 + 2.0 * g13, l3 + 2.0 * g13
    num = (4.0 * u0 * bp ** 2 * cp + v0 * dm * xi2 * xi3
           + bp * (4.0 * u0 * dm * (g12 - g13) + w0 * lam2 * lam3 - 2.0 * v0 * cp * (lam2 + xi3))
           + 2.0 * cm * (2.0 * u0 * dm ** 2 - 2.0 * w0 * bp * cp
                         + dm * (-2.0 * v0 * cp + w0 * (lam2 + xi3))))
    den = 4.0 * (cm * dm ** 2 + bp * (bp * cp + dm * (g12 - g13))) * (l0 - l2) * (l0 - l3)
    scale = 4.0 * np.linalg.norm(gen.m) ** 3 * max(float(np.max(np.abs(lam))) ** 2, 1e-300)
    if abs(den) < 1e-12 * scale:
        raise ValueError(f"coefficient denominator {abs(den):.3e} below 1e-12 of scale {scale:.3e}")
    return complex(num / den)


def spectral_solve(gen: BlochGenerator, n0: np.ndarray, eigen_source: str = "numeric",
                   check_coefficients: bool = True) -> SpectralSolution:
    """Decompose the initial vector over the generator's eigenmodes.

    The production path uses numeric eigenvalues; ``eigen_source="closed"``
    substitutes the radical-formula eigenvalues (falling back with
    BranchSelectionFailure when branch matching fails).  The weights d are
    always obtained by solving the 3x3 mode system; the radical-formula
    weights are evaluated as a logged cross-check when the structured
    modes are in use and their denominators are well scaled.

    Raises SingularModeMatrix for (near-)degenerate spectra, signalling
    the caller to fall back to direct integration.
    """
    n0 = np.asarray(n0, dtype=float)
    if np.linalg.norm(n0) > 1.0 + 1e-9:
        raise ValueError(f"|n0| = {np.linalg.norm(n0)} outside the unit ball")
    if eigen_source == "closed":
        lambdas = eigenvalues_closed_form(gen)
        source = "closed-form"
    elif eigen_source == "numeric":
        lambdas = np.linalg.eigvals(gen.m).astype(complex)
        source = "numeric"
    else:
        raise ValueError(f"eigen_source must be 'numeric' or 'closed', got {eigen_source!r}")

    scale = max(float(np.max(np.abs(lambdas))), 1e-300)
    gaps = [abs(lambdas[i] - lambdas[j]) for i in range(3) for j in range(i + 1, 3)]
    degenerate = min(gaps) < DEGENERACY_GAP * scale
    if degenerate:
        raise SingularModeMatrix(
            f"eigenvalue gap {min(gaps):.3e} below {DEGENERACY_GAP:g} of scale {scale:.3e}")

    modes = structured_modes(gen, lambdas)
    mode_form = "structured"
    col_norms = np.linalg.norm(modes, axis=0)
    mode_scale = np.linalg.norm(gen.m) ** 2 + max(np.abs(lambdas)) ** 2
    if np.any(col_norms < 1e-9 * mode_scale):
        _, vecs = np.linalg.eig(gen.m)
        # reorder numeric eigenvectors to this lambda ordering
        num_l = np.linalg.eigvals(gen.m)
        idx = [int(np.argmin(np.abs(num_l - l))) for l in lambdas]
        modes = vecs[:, idx].astype(complex)
        mode_form = "eigen"

    try:
        coeffs = np.linalg.solve(modes, n0.astype(complex))
    except np.linalg.LinAlgError as exc:
        raise SingularModeMatrix(f"mode matrix is singular: {exc}") from exc

    resid = np.linalg.norm(np.real(modes @ coeffs) - n0)
    if resid > 1e-10 * max(1.0, np.linalg.norm(n0)):
        raise SingularModeMatrix(f"initial-condition reconstruction residual {resid:.3e}")

    if check_coefficients and mode_form == "structured":
        for k in range(3):
            try:
                dk = closed_form_coefficient(gen, lambdas, n0, which=k)
            except ValueError:
                continue
            ref = coeffs[k]
            if abs(ref) > 1e-300 and abs(dk - ref) / abs(ref) > 1e-8:
                log.warning("closed-form coefficient d%d deviates from linear solve: %.3e rel",
                            k, abs(dk - ref) / abs(ref))

    return SpectralSolution(lambdas=lambdas, modes=modes, coeffs=coeffs,
                            source=source, mode_form=mode_form, degenerate=degenerate)


def evaluate(sol: SpectralSolution, t) -> np.ndarray:
    """Bloch vector(s) at time(s) t: Re sum_i d_i exp(l_i t) mode_i.

    Scalar t gives shape (3,), an array of times gives shape (len(t), 3).
    The imaginary residual of the mode sum (which cancels between
    conjugate pairs) is checked to stay below 1e-10.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    phases = np.exp(np.outer(t_arr, sol.lambdas))
    full = (phases * sol.coeffs) @ sol.modes.T
    resid = float(np.max(np.abs(full.imag))) if full.size else 0.0
    if resid > 1e-10:
        log.warning("imaginary residual %.3e in spectral evaluation", resid)
    out = np.real(full)
    return out[0] if np.isscalar(t) or np.asarray(t).ndim == 0 else out
