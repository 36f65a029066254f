"""Exception hierarchy.

Every numerical failure derives from :class:`NumericalError` so callers (and
the CLI) can tell bad input apart from a solver that gave up.
"""


class S3SRError(Exception):
    pass


class InputError(S3SRError, ValueError):
    pass


class NumericalError(S3SRError, ArithmeticError):
    pass


class NonUnitInput(InputError):
    pass


class EmptyInput(InputError):
    pass


class NonHorizontalPath(InputError):
    pass


class InvalidParam(InputError):
    pass


class InvalidOmega(InputError):
    pass


class DomainError(InputError):
    pass


class VerticalLineCase(InputError):
    """Target lies on the fiber through the identity; use enumerate_to_fiber."""


class HorizontalSphereCase(InputError):
    """Target lies on the horizontal sphere (alpha = 0); the B = 0 family applies."""


class BasePointMismatch(InputError):
    pass


class ChartSingularity(NumericalError):
    pass


class StepSizeUnderflow(NumericalError):
    pass


class MonitorBreach(NumericalError):
    pass


class NoSolutionInBudget(NumericalError):
    pass


class ResolutionTooCoarse(NumericalError):
    pass
