"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class SeqsimError(Exception):
    exit_code = 1


class UsageError(SeqsimError, ValueError):
    exit_code = 1


class QueryParseError(SeqsimError, ValueError):
    exit_code = 2

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class DataError(SeqsimError, ValueError):
    exit_code = 3


class ResourceError(SeqsimError, RuntimeError):
    exit_code = 4
