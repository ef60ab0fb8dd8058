"""Exception taxonomy mapped onto CLI exit codes."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation (exit code 3)."""


class NonConvergenceError(RuntimeError):
    """Iterative solver failed to reach its tolerance (exit code 2)."""


class NumericalAbortError(RuntimeError):
    """A computation produced non-finite values and was aborted (exit code 5)."""
