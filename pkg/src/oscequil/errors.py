"""Exception and warning types raised across the package."""


class OscEquilError(Exception):
    """Base class for all package errors."""


class InvalidParam(OscEquilError, ValueError):
    """A physical or numerical parameter is outside its admissible range."""


class DomainError(OscEquilError, ValueError):
    """A frequency argument lies outside the band where a quantity is defined."""


class BranchCutError(OscEquilError, ValueError):
    """Evaluation requested on the branch cut without choosing a side."""


class QuadratureError(OscEquilError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class PoleError(OscEquilError, ZeroDivisionError):
    """Secular function evaluated on one of its poles."""


class RootCountError(OscEquilError, RuntimeError):
    """A root bracket of the secular equation has no sign change."""


class DegenerateModeError(OscEquilError, RuntimeError):
    """Mode vectors cannot be formed because a root sits on a pole."""


class GridError(OscEquilError, ValueError):
    """Time grid is empty, negative or not strictly increasing."""


class WindowError(OscEquilError, ValueError):
    """Fit window is outside the trajectory or holds too few samples."""


class UnderflowError(OscEquilError, ArithmeticError):
    """Residual is at the numerical floor, so there is nothing to fit."""


class OverdampedError(OscEquilError, ValueError):
    """Decay-rate prediction requested for an overdamped oscillator."""


class RecurrenceWarning(UserWarning):
    """Time grid extends past the finite-bath recurrence horizon."""
