"""Exception hierarchy shared by the codecs, the simulator and the CLI."""


class RackCodeError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(RackCodeError, ValueError):
    """Invalid code parameters or field choice.

    ``constraint`` names the violated condition (e.g. ``"dbar < kbar"``) so
    callers can report it without parsing the message.
    """

    def __init__(self, message, constraint=None):
        super().__init__(message)
        self.constraint = constraint


class SingularMatrixError(RackCodeError, ArithmeticError):
    pass


class InconsistentSystemError(RackCodeError, ArithmeticError):
    pass


class InsufficientDataError(RackCodeError):
    pass


class InconsistentDataError(RackCodeError):
    """Supplied symbols do not agree with any single codeword."""


class UnrecoverableError(RackCodeError):
    pass


class ChunkFormatError(RackCodeError, OSError):
    """A chunk file is truncated, has a bad magic, or holds out-of-range symbols."""
