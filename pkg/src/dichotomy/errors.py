"""Exception hierarchy shared by every module.

Each class carries the CLI exit status it maps to: contract violations
exit 2, numerical failures exit 3, and refusals caused by spectrum on
(or too close to) the critical set exit 4.
"""


class DichotomyError(Exception):
    """Base class for all library errors."""

    exit_status = 3


class InputError(DichotomyError):
    """Malformed or contract-violating input: bad shapes, non-finite
    entries, misaligned or non-uniform grids, invalid configuration."""

    exit_status = 2


class SpectrumHitError(DichotomyError):
    """A requested evaluation point lies within tolerance of the spectrum.

    Carries the offending point and the nearest eigenvalue so callers can
    report exactly which node collided.
    """

    exit_status = 4

    def __init__(self, message, point=None, eigenvalue=None):
        super().__init__(message)
        self.point = point
        self.eigenvalue = eigenvalue


class NotHyperbolicError(DichotomyError):
    """The operation requires a hyperbolic generator (spectral gap around
    the imaginary axis) and the input does not have one."""

    exit_status = 4


class NumericalError(DichotomyError):
    """Eigensolver breakdown, overflow, contour collision, or quadrature
    that failed to converge under refinement."""

    exit_status = 3


class BracketingError(NumericalError):
    """A bisection range does not bracket the sought transition."""
