"""Variance-based contracted quantum eigensolver at exact-statevector scale.

Parses FCIDUMP integrals, builds sector Hamiltonians over determinant
bases, and solves for ground and excited states by minimizing the energy
variance over unitary two-body exponentials, with an exact-diagonalization
reference and an emulated quantum-measurement pathway for the objective and
gradient.
"""

from .fci import SpectrumResult, diagonalize, eigenstate_overlap
from .fock import SectorBasis, apply_excitation, enumerate_sector
from .integrals import (
    FcidumpError,
    MolecularIntegrals,
    parse_fcidump,
    spin_orbital_h,
    write_fcidump,
)
from .measurement import (
    MeasurementConfig,
    emulated_gradient_kernel,
    emulated_variance,
    measure_variance,
    richardson,
    tilde_state,
)
from .pairs import PairBasis, TwoBodyCoefficients, pair_basis
from .solver import (
    ConvergenceRecord,
    LineSearchError,
    OccupationSpec,
    SolveResult,
    SolverConfig,
    VarianceCQE,
    bfgs_direction,
    initial_state,
    line_search,
    solve,
    variance_gradient,
)
from .statevector import (
    ExponentialSeriesError,
    HamiltonianOperator,
    StateVector,
    TwoRDM,
    apply_hamiltonian,
    apply_two_body,
    build_hamiltonian,
    compute_2rdm,
    cse_norm,
    exp_apply,
    expectation,
    spin_expectations,
    variance,
)

__version__ = "0.1.0"
