"""Exception hierarchy.

Two families: ``ValidationError`` for inputs that violate a documented
precondition, and ``NumericalFailure`` for solver breakdowns (bracketing,
convergence, step control). The CLI maps them onto distinct exit codes.
"""


class PSpectralError(Exception):
    """Base class for all package errors."""


class ValidationError(PSpectralError, ValueError):
    pass


class NumericalFailure(PSpectralError, ArithmeticError):
    pass


# validation -----------------------------------------------------------------

class PoleError(ValidationError, ZeroDivisionError):
    """tan_p evaluated at a zero of cos_p."""


class ZeroFunction(ValidationError):
    pass


class ConstantFunction(ValidationError):
    pass


class RangeMismatch(ValidationError):
    pass


class SpecInfeasible(ValidationError):
    pass


# numerical ------------------------------------------------------------------

class StepSizeUnderflow(NumericalFailure):
    pass


class NoStationaryPoint(NumericalFailure):
    """The phase never reached the quarter period before the end time (b(a) = inf)."""


class NoCrossing(NumericalFailure):
    pass


class BracketFailure(NumericalFailure):
    pass


class RangeUnreachable(NumericalFailure):
    pass


class NonConvergence(NumericalFailure):
    pass


class CrossCheckFailure(NumericalFailure):
    """A debug-mode cross-check between two independent routes disagreed."""


class CurvatureViolated(PSpectralError):
    """Ric + Hess f >= kappa g fails somewhere on the constructed surface."""


class RangeUnreachableWarning(UserWarning):
    pass
