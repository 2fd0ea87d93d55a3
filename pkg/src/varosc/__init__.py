"""Variational oscillator-basis spectral solver for 1D polynomial potentials.

Pipeline: a confining polynomial potential is represented exactly, the
oscillator-basis frequency (and optionally a coordinate shift) is fixed at a
stationary point of the truncated Hamiltonian trace, the resulting dense
symmetric matrix is diagonalized, and Gaussian initial states are propagated
by the method of stationary states.
"""

from .eigen import DiagonalizationError, EigenSolution, diagonalize
from .evolve import (
    BasisResolutionError,
    EvolutionState,
    InitialGaussian,
    expectation_x,
    expectation_x2,
    make_evolution,
    observables_series,
    project_by_quadrature,
    project_centered_gaussian,
    project_shifted_gaussian,
    wavefunction_at,
)
from .oscbasis import (
    BasisConfig,
    HamiltonianMatrix,
    assemble_hamiltonian,
    basis_function_value,
    basis_functions,
    momentum_squared_matrix,
    position_power_closed_form,
    position_power_matrix,
)
from .pms import (
    ClosedFormBranchError,
    ConvergenceError,
    PmsResult,
    pms_omega_quartic_closed_form,
    pms_optimize,
    trace,
    trace_scan,
)
from .potential import PolynomialPotential, asym_demo, from_double_well, from_quartic
from .spectrum import (
    ConvergenceStudy,
    SpectrumReport,
    convergence_study,
    solve_centered,
    solve_spectrum,
)

__version__ = "0.1.0"
