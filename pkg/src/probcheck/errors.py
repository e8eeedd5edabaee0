"""Exception hierarchy.

Two branches matter to callers: :class:`ParseError` for malformed text
(formulas, model files) and :class:`SemanticError` for well-formed input
that violates a contract. The command line maps them to exit codes 2 and 3.
"""


class ProbcheckError(Exception):
    """Root of every error raised by this package."""


class ParseError(ProbcheckError):
    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class SemanticError(ProbcheckError):
    """Input was understood but breaks a precondition or model invariant."""


class ModelError(SemanticError):
    pass


class DimensionError(SemanticError):
    pass


class SingularSystemError(SemanticError):
    pass


class ProbabilityError(SemanticError):
    pass


class AlphabetError(SemanticError):
    pass


class StateError(SemanticError):
    pass


class SchedulerError(SemanticError):
    pass


class BoundError(SemanticError):
    pass


class PathError(SemanticError):
    pass


class UnsupportedFragmentError(SemanticError):
    pass


class EmptyWordError(SemanticError):
    pass


class EpsilonCycleError(SemanticError):
    pass


class ConsistencyError(ProbcheckError):
    """Two independent computations of the same quantity disagreed."""
