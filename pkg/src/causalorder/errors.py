"""Exception types shared across the package."""


class CausalOrderError(Exception):
    """Base class for all package-specific errors."""


class ZeroVarianceColumn(CausalOrderError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column} has zero empirical variance")


class NotPositiveDefinite(CausalOrderError):
    """A covariance (sub)matrix failed the positive-definiteness guard."""


class CyclicInput(CausalOrderError):
    """A graph that must be acyclic contains a directed cycle."""


class ParseError(CausalOrderError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownNode(CausalOrderError):
    def __init__(self, label):
        self.label = label
        super().__init__(f"unknown node label {label!r}")


class DimensionMismatch(CausalOrderError):
    pass


class TooManyVariables(CausalOrderError):
    def __init__(self, p, limit):
        self.p = p
        self.limit = limit
        super().__init__(f"{p} variables exceeds the limit of {limit}")
