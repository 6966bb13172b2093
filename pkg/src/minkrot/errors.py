"""Exception hierarchy shared by every module."""


class MinkrotError(Exception):
    """Base class for all package errors."""


class DegenerateVector(MinkrotError, ValueError):
    """Raised when normalizing a vector whose squared norm is (near) zero."""


class ParseError(MinkrotError, ValueError):
    """Malformed profile expression.

    Attributes
    ----------
    offset : int
        Byte offset into the source text where parsing failed.
    expected : frozenset of str
        Token kinds that would have been accepted at ``offset``.
    """

    def __init__(self, message, offset, expected=(), text=None):
        self.offset = offset
        self.expected = frozenset(expected)
        self.text = text
        exp = ", ".join(sorted(self.expected))
        full = f"{message} at offset {offset}"
        if exp:
            full += f" (expected one of: {exp})"
        super().__init__(full)


class UnknownIdentifier(ParseError):
    """Name outside the function/variable whitelist."""


class DomainError(MinkrotError, ValueError):
    """Expression evaluated outside its real domain."""

    def __init__(self, message, u=None):
        self.u = u
        if u is not None:
            message = f"{message} (u={u!r})"
        super().__init__(message)


class InvalidSurface(MinkrotError, ValueError):
    """A validity inequality fails; ``inequality`` names it, ``u`` locates it."""

    def __init__(self, message, inequality=None, u=None):
        self.inequality = inequality
        self.u = u
        super().__init__(message)


class DegenerateSurface(MinkrotError, ArithmeticError):
    """A frame normalizer or curvature denominator is below tolerance."""


class StencilOutOfDomain(MinkrotError, ValueError):
    """Finite-difference stencil leaves the valid part of the surface."""


class NoRealSolution(MinkrotError, ArithmeticError):
    """Every branch of a profile inversion has a negative radicand."""


class InvalidCombination(MinkrotError, ValueError):
    """Requested (surface kind, fixed profile) pair cannot occur."""


class InvalidInitialData(MinkrotError, ValueError):
    """ODE initial data violates validity or hits a zero denominator.

    ``validity`` is True for the former, False for the latter.
    """

    def __init__(self, message, validity=True):
        self.validity = validity
        super().__init__(message)


class AllInvalid(MinkrotError, ValueError):
    """No vertex of a sampled grid is valid."""


class ConfigError(MinkrotError, ValueError):
    """Job configuration document is malformed."""


class IoError(MinkrotError, OSError):
    """Failure writing or reading an export file."""
