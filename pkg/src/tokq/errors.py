class TokqError(Exception):
    """Base class for tokq errors."""


class InvalidArgumentError(TokqError, ValueError):
    pass


class InvalidInstanceError(InvalidArgumentError):
    pass


class CapacityError(TokqError, ValueError):
    """Problem size exceeds a dense/exhaustive bound."""


class ParseError(TokqError, ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class NonFiniteObjectiveError(TokqError, FloatingPointError):
    pass
