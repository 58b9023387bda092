"""Exception hierarchy shared by every vqpe module."""


class VQPEError(Exception):
    """Base class for all errors raised by the package."""


class InvalidArgumentError(VQPEError, ValueError):
    """An argument is outside the documented domain."""


class ResourceLimitError(VQPEError):
    """A dense representation would exceed the configured dimension cap."""


class NumericalFailureError(VQPEError, ArithmeticError):
    """An iterative routine failed to converge."""


class DegenerateProblemError(VQPEError, ArithmeticError):
    """No singular value of the overlap matrix survives truncation."""


class ContractViolationError(VQPEError):
    """An operation was called outside the regime where its result is valid."""


class HamiltonianParseError(VQPEError, ValueError):
    """A Hamiltonian file is malformed."""


class HermiticityError(VQPEError, ValueError):
    """A matrix that must be Hermitian is not."""
