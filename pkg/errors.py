"""
Error Types Module

Typed exceptions raised by the meridian surface toolkit. Every error
derives from ValueError so callers that only care about "bad input"
can keep catching the built-in type.
"""

from typing import Optional


class MeridianLabError(ValueError):
    """Base class for all toolkit errors."""


class DomainError(MeridianLabError):
    """A point or profile lies outside the admissible domain."""


class FrameError(MeridianLabError):
    """An initial Frenet frame violates its Gram constraints."""


class SingularLambda(MeridianLabError):
    """A lambda formula vanishes (or nearly so) somewhere on the grid."""


class RegimeError(MeridianLabError):
    """A case formula is evaluated outside the regime where it is defined."""


class ConfigError(MeridianLabError):
    """
    A configuration file could not be parsed or normalised.

    Args:
        message: Human readable description
        field: Dotted path of the offending field, if known
        line: Line number in the source file, if known
    """

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field:
            location.append(f"field '{field}'")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(prefix + message)


class OdeError(MeridianLabError):
    """
    Integration of a classifying ODE stopped early.

    Attributes:
        u_stop: Last parameter value reached with an admissible state
        partial: Partial OdeSolution up to u_stop (may be None)
    """

    def __init__(self, message: str, u_stop: Optional[float] = None, partial=None):
        self.u_stop = u_stop
        self.partial = partial
        if u_stop is not None:
            message = f"{message} (stopped at u = {u_stop:.6g})"
        super().__init__(message)


class BlowUp(OdeError):
    """f reached zero, the slope angle ran away or the state went non-finite."""


class ConstraintError(OdeError):
    """A branch condition on f' (or an input precondition) was violated."""


class SingularDenominator(OdeError):
    """The second-kind reduction hit a vanishing denominator."""


class ReductionMismatch(OdeError):
    """The literal ODE residual disagrees with the first-integral residual."""
