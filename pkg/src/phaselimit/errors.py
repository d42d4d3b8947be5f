"""Shared exception types."""


class ValidationError(ValueError):
    """Raised when an input violates a precondition or a type invariant."""


class ConvergenceError(RuntimeError):
    """Raised when an iterative or quadrature computation fails its
    convergence contract.  Carries enough context to diagnose the failure."""
