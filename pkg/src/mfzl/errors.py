"""Exception hierarchy shared by every mfzl module."""


class MfzlError(Exception):
    """Base class for all pipeline errors (CLI exit code 2)."""


class NonInvertible(MfzlError):
    pass


class DivisionByZeroSeries(MfzlError):
    pass


class UnknownTransform(MfzlError):
    pass


class RamificationLeak(MfzlError):
    pass


class InsufficientTruncation(MfzlError):
    pass


class NotPolynomial(MfzlError):
    pass


class BadDiscriminant(MfzlError):
    pass


class NonConvergence(MfzlError):
    pass


class TailBoundUnsatisfiable(MfzlError):
    pass


class NotRealOnArc(MfzlError):
    pass


class NotRealOnLine(MfzlError):
    pass


class ContourTooClose(MfzlError):
    pass


class ParseError(MfzlError):
    """Raised by the form-expression parser; ``position`` is a 0-based offset."""

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position
