"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`IomError`,
which is itself a ``ValueError`` so callers that only care about bad input can
catch that.
"""


class IomError(ValueError):
    """Base class for library errors."""


class InvalidParameter(IomError):
    pass


class InvalidInput(IomError):
    pass


class InvalidToken(IomError):
    pass


class UndefinedSimilarity(IomError):
    pass


class IncomparableCodes(IomError):
    pass


class InvalidThreshold(IomError):
    pass


class IllDefinedRanks(IomError):
    pass


class DegenerateRange(IomError):
    pass


class ProtocolInfeasible(IomError):
    pass


class UnsupportedAttack(IomError):
    pass


class FormatError(IomError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DuplicateKey(FormatError):
    pass


class VersionError(IomError):
    pass


class CorruptTemplate(IomError):
    pass
