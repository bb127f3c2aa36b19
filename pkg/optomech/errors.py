"""
Exceptions raised across the toolkit.

Every exception derives from OptomechError so callers can catch the whole
family, while also deriving from the closest built-in type so that generic
handlers (e.g. `except ValueError`) keep working.
"""

import numpy as np


class OptomechError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(OptomechError, ValueError):
    """
    Invalid, missing or unknown configuration field.

    Attributes
    ----------
    field : str or None
        Name of the offending configuration field.
    """
    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class CapabilityError(OptomechError, ValueError):
    """Requested option is not available for the chosen formalism."""


class DomainError(OptomechError, ValueError):
    """A formula was evaluated outside of its domain."""


class NoBistabilityError(OptomechError, ValueError):
    """Bistability is undefined for the given coupling and drive."""


class BranchIndexError(OptomechError, IndexError):
    """
    Steady-state branch index outside of the available roots.

    Attributes
    ----------
    branch_count : int
        Number of real roots available at the requested point.
    """
    def __init__(self, message, branch_count):
        super().__init__(message)
        self.branch_count = branch_count


class NumericError(OptomechError, ArithmeticError):
    """
    Numerical failure of a linear-algebra or root-finding kernel.

    Attributes
    ----------
    matrix : np.ndarray or None
        The matrix being processed when the failure occurred.
    """
    def __init__(self, message, matrix=None):
        if matrix is not None:
            with np.printoptions(precision=6, linewidth=120):
                message = f"{message}\nMatrix:\n{np.asarray(matrix)}"
        super().__init__(message)
        self.matrix = matrix


class ConditioningError(NumericError):
    """
    Resolvent (M - i*omega*I) is too close to singular.

    Attributes
    ----------
    omega : float
        Angular frequency (rad/s) at which the solve was attempted.
    condition : float
        Estimated 2-norm condition number.
    """
    def __init__(self, omega, condition, matrix=None):
        super().__init__(
            f"Resolvent is near-singular at omega={omega:.6e} rad/s "
            f"(condition number {condition:.3e})", matrix=matrix)
        self.omega = omega
        self.condition = condition


class IntegrationError(NumericError):
    """
    Adaptive time stepping failed.

    Attributes
    ----------
    time : float
        Simulation time (s) at which the step size underflowed.
    """
    def __init__(self, message, time):
        super().__init__(f"{message} (at t={time:.6e} s)")
        self.time = time
