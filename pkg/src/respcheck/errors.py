"""Exception hierarchy shared by all respcheck components."""


class RespcheckError(Exception):
    """Base class for all errors raised by this package."""


class ModelFormatError(RespcheckError):
    """A model or DFA text file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FormulaSyntaxError(RespcheckError):
    """A formula or plan string could not be parsed."""

    def __init__(self, message: str, line: int = 1, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


class SemanticError(RespcheckError):
    """A name (agent, state, action, proposition) is unknown to the model."""


class MissingTransitionError(RespcheckError):
    """A (state, joint action) pair required by a query has no transition entry."""

    def __init__(self, state: str, action):
        self.state = state
        self.action = action
        super().__init__(f"model has no transition entry for ({state}, {action})")


class EvaluationError(RespcheckError, ValueError):
    """Argument errors: bad lengths, horizons, or plan/history shapes."""


class DegreeError(RespcheckError):
    """A degree query is ill-posed (distinct from a degree of zero)."""


class OutcomeUnsatisfiableError(DegreeError):
    """No history satisfies the outcome, making the degree denominator empty."""


class OutcomeUnavoidableError(DegreeError):
    """No history violates the outcome, making the degree denominator empty."""


class BudgetExceededError(RespcheckError):
    """An explicit enumeration would exceed the configured history cap."""


class ConvergenceError(RespcheckError):
    """An iterative numerical routine failed to converge."""

    def __init__(self, message: str, iterations: int):
        self.iterations = iterations
        super().__init__(f"{message} (after {iterations} iterations)")
