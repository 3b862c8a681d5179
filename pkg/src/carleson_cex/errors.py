"""Exception types shared across the package."""
from __future__ import annotations


class CarlesonError(Exception):
    """Base class for package errors."""


class DomainError(CarlesonError, ValueError):
    """An argument lies outside the domain of an operation."""


class PreconditionError(CarlesonError, ValueError):
    """A documented precondition between arguments is violated."""


class NumericError(CarlesonError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    Parameters
    ----------
    message : str
    achieved : float, optional
        Achieved error estimate or residual, when available.
    """

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message if achieved is None else f"{message} (achieved {achieved:.3e})")
        self.achieved = achieved


class ExperimentAborted(CarlesonError):
    """An experiment stopped early.

    Parameters
    ----------
    message : str
    partial : object
        Results computed before the failure.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
