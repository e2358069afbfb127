"""Exception hierarchy shared by every subpackage."""


class SearnError(Exception):
    """Base class for all errors raised by this package."""


class IllegalAction(SearnError, ValueError):
    pass


class TerminalState(SearnError, ValueError):
    pass


class MissingReference(SearnError, ValueError):
    """The initial policy (or an exact cost) was requested on an unlabeled instance."""


class NoLearnedComponent(SearnError, ValueError):
    pass


class MismatchedActionCount(SearnError, ValueError):
    pass


class EmptyInput(SearnError, ValueError):
    pass


class TooLargeToEnumerate(SearnError, ValueError):
    pass


class LengthMismatch(SearnError, ValueError):
    pass


class DataError(SearnError):
    """Problems with input files; the CLI maps these to exit code 2."""


class MalformedRow(DataError, ValueError):
    def __init__(self, line, message=None):
        self.line = line
        super().__init__(message or f"malformed row at line {line}")


class EmptyFile(DataError, ValueError):
    pass


class UnsupportedVersion(DataError, ValueError):
    pass


class CorruptFile(DataError, ValueError):
    pass
