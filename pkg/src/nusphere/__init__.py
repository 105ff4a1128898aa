"""Dissipative two-flavor neutrino evolution on the Poincare sphere.

A simulation library and CLI for mixed neutrino states propagating
through fluctuating matter: Lindblad dynamics in density-matrix and
Bloch form, a closed-form spectral solver with numeric and Runge-Kutta
oracles, time-dependent geometric quantities (sphere radius, azimuthal
angles, mixed-state total/dynamic/Pancharatnam phases, transition
probabilities), the fluctuating-field simulator mapping, and the
parameter sweeps behind the bundled report figures.

Natural units everywhere: hbar = 1, energies in eV, times in 1/eV.
"""

__version__ = "0.1.0"

from .core import (AngleOutOfRange, BranchSelectionFailure, DecayMatrix, DecaySpec,
                   DegenerateState, NegativeDiagonalDecay, NonHermitianInput,
                   NonPositiveEnergy, NotRankOne, NuSphereError, OscillationParams,
                   SingularModeMatrix, SparseTrajectory, StepUnderflow, VanishingTrace,
                   VectorOutsideSphere, ZeroOverlap, bloch_from_density,
                   density_from_bloch, initial_density, make_params)
from .evolve import bloch_trajectory, densify_until_smooth
from .generator import MODE_DERIVED, MODE_PAPER, BlochGenerator, build_generator, master_rhs
from .geometry import (SpherePoint, Trajectory, eigen_decomposition, initial_bloch,
                       to_sphere, transition_probability)
from .hamiltonian import MatterBasis, amplitudes, closed_form_probabilities, flavor_hamiltonian, matter_basis
from .integrate import StepControl, integrate_bloch, integrate_master
from .nmr import NmrProgram, from_nmr, to_nmr
from .phases import (PhaseReport, dynamic_phases, gauge_check, pancharatnam,
                     pancharatnam_product, total_phase, wrap_phase)
from .spectral import SpectralSolution, eigenvalues_closed_form, evaluate, spectral_solve
from .sweeps import FIGURES, figure_dataset

__all__ = [name for name in dir() if not name.startswith("_")]
