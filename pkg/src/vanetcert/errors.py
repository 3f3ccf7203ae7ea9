"""Exception hierarchy shared by every vanetcert module."""


class VanetError(Exception):
    """Base class for all library errors."""


class InvalidInput(VanetError, ValueError):
    pass


class Malformed(VanetError, ValueError):
    """Bytes that do not decode to a well-formed value.

    ``offset`` is the position of the first offending byte when known.
    """

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class WrongRecipient(VanetError):
    """Ciphertext addressed to a different key."""


class UnknownReason(VanetError, LookupError):
    pass


class UnknownCategory(VanetError, LookupError):
    pass


class NotFound(VanetError, LookupError):
    pass


class ConfigError(VanetError, ValueError):
    """Invalid simulation configuration; ``field`` names the culprit."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class IncomparableRuns(VanetError):
    pass
