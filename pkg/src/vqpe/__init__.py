"""Classical simulation of variational quantum phase estimation."""

from .errors import (
    ContractViolationError,
    DegenerateProblemError,
    HamiltonianParseError,
    HermiticityError,
    InvalidArgumentError,
    NumericalFailureError,
    ResourceLimitError,
    VQPEError,
)
from .evolution import Propagator, evolve_exact, evolve_lanczos, evolved_sequence, trotter1_step
from .hamiltonian import (
    DenseHermitianMatrix,
    DiagonalHamiltonian,
    PauliSumHamiltonian,
    Spectrum,
    SupportSpace,
    build_linear_spectrum,
    build_tfim,
    diagonalize,
    load_hamiltonian,
    make_reference,
    support_space,
    to_dense,
)
from .krylov import (
    KrylovMatrices,
    OverlapGenerator,
    SolverConfig,
    SpectrumEstimate,
    TimeGrid,
    assemble_h_full,
    assemble_h_toeplitz,
    assemble_s,
    assemble_u,
    condition_number,
    measure_overlap_generator,
    solve_gevp,
    solve_unitary_gevp,
)
from .pauli import PauliString
from .trace import ConvergenceTrace, convergence_trace

__version__ = "0.1.0"

__all__ = [
    "ContractViolationError",
    "ConvergenceTrace",
    "DegenerateProblemError",
    "DenseHermitianMatrix",
    "DiagonalHamiltonian",
    "HamiltonianParseError",
    "HermiticityError",
    "InvalidArgumentError",
    "KrylovMatrices",
    "NumericalFailureError",
    "OverlapGenerator",
    "PauliString",
    "PauliSumHamiltonian",
    "Propagator",
    "ResourceLimitError",
    "SolverConfig",
    "Spectrum",
    "SpectrumEstimate",
    "SupportSpace",
    "TimeGrid",
    "VQPEError",
    "assemble_h_full",
    "assemble_h_toeplitz",
    "assemble_s",
    "assemble_u",
    "build_linear_spectrum",
    "build_tfim",
    "condition_number",
    "convergence_trace",
    "diagonalize",
    "evolve_exact",
    "evolve_lanczos",
    "evolved_sequence",
    "load_hamiltonian",
    "make_reference",
    "measure_overlap_generator",
    "solve_gevp",
    "solve_unitary_gevp",
    "support_space",
    "to_dense",
    "trotter1_step",
]
