"""
Exception hierarchy shared by every gbcmass app.

Library code raises these; the management commands map them onto exit
codes (see core.run_config.exit_codes).

Usage:
    from core.exceptions import DomainError

    if j > len(lam):
        raise DomainError(f"sigma_{j} undefined for {len(lam)} eigenvalues")
"""


class GBCError(Exception):
    """Base class for all gbcmass errors."""


class DomainError(GBCError):
    """Index or parameter outside the domain of an operation."""


class PreconditionError(GBCError):
    """A caller-certified hypothesis does not hold (e.g. sigma_m <= 0)."""


class WellDefinednessError(GBCError):
    """The decay order is too slow for the mass to be well defined."""

    def __init__(self, message, tau=None, threshold=None):
        super().__init__(message)
        self.tau = tau
        self.threshold = threshold


class SpecError(GBCError):
    """Invalid metric-spec document."""


class ExprSyntaxError(GBCError):
    """
    Syntax error in a radial profile expression.

    Attributes:
        offset: Byte offset (UTF-8) of the offending token
        expected: Tokens that would have been accepted at that offset
    """

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected {', '.join(self.expected)})"
        super().__init__(detail)


class ExprDomainError(GBCError):
    """Evaluation left the domain of an expression (ln of non-positive, 1/0, ...)."""

    def __init__(self, message, subexpression=''):
        self.subexpression = subexpression
        if subexpression:
            message = f"{message} in '{subexpression}'"
        super().__init__(message)


class SurfaceError(GBCError):
    """
    Degenerate or inadmissible boundary surface.

    Attributes:
        point: Offending point (list of floats) when one is known
    """

    def __init__(self, message, point=None):
        self.point = None if point is None else [float(v) for v in point]
        if self.point is not None:
            message = f"{message} at {self.point}"
        super().__init__(message)
