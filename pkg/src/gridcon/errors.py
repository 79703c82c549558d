"""Exception hierarchy shared by every gridcon module."""


class GridconError(Exception):
    """Base class for domain errors (the CLI maps these to exit code 1)."""


class EntityError(GridconError, ValueError):
    """Malformed or out-of-range entity identifier."""


class IdrSyntaxError(GridconError, ValueError):
    """IDR text that does not match the grammar."""

    def __init__(self, message, line=1, column=1):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class UnknownEntityError(GridconError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown entity"


class EvaluationError(GridconError, ValueError):
    """Expression evaluation against an incomplete or invalid state table."""


class NetworkError(GridconError, ValueError):
    """Network document or object violating a structural invariant."""


class CascadeError(GridconError, ValueError):
    pass


class ContingencyError(GridconError, ValueError):
    pass


class GameError(GridconError, ValueError):
    pass
