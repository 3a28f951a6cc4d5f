"""Exception types shared across the package."""

from __future__ import annotations


class QuantumMoneyError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(QuantumMoneyError, ValueError):
    """Operands have incompatible shapes or factored dimensions."""


class HermiticityError(QuantumMoneyError, ValueError):
    """A matrix that must be Hermitian is too far from Hermitian."""


class ChannelValidationError(QuantumMoneyError, ValueError):
    """A channel representation violates complete positivity or trace preservation."""


class EigendecompositionError(QuantumMoneyError, ArithmeticError):
    """The eigensolver failed to converge or produced an inaccurate factorization."""


class SolverError(QuantumMoneyError, RuntimeError):
    """The SDP solver could not reach the requested accuracy.

    The best iterate found is attached as ``solution`` so callers can inspect
    how far the run got.
    """

    def __init__(self, message: str, solution=None):
        super().__init__(message)
        self.solution = solution


class CertificationError(QuantumMoneyError, ValueError):
    """A claimed primal or dual point failed its independent feasibility check."""


class FileFormatError(QuantumMoneyError, ValueError):
    """A scheme or certificate file does not match the documented layout."""
