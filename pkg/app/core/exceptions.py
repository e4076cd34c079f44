"""Error types raised by the solver services.

Every error carries an ``error_code`` so the command-line surface can render
it as an ``ErrorResponse`` and pick an exit status without string matching.
"""
from typing import Iterable, Optional, Sequence, Tuple


class SolverError(Exception):
    """Base class for all solver errors."""

    error_code: str = "SOLVER_ERROR"

    def __init__(self, detail: str, error_code: Optional[str] = None):
        super().__init__(detail)
        self.detail = detail
        if error_code is not None:
            self.error_code = error_code


class InstanceValidationError(SolverError):
    """A market description breaks one or more structural assumptions."""

    error_code = "INVALID_INSTANCE"

    def __init__(self, violations: Sequence["Violation"]):  # noqa: F821
        self.violations = list(violations)
        lines = "; ".join(v.message for v in self.violations)
        super().__init__(f"Invalid instance ({len(self.violations)} violations): {lines}")


class ConstraintValidationError(SolverError):
    """Assignment constraints reference participants the market does not have."""

    error_code = "INVALID_CONSTRAINTS"

    def __init__(self, violations: Sequence["Violation"]):  # noqa: F821
        self.violations = list(violations)
        lines = "; ".join(v.message for v in self.violations)
        super().__init__(f"Invalid assignment constraints: {lines}")


class InvalidMatchingError(SolverError):
    """A submitted matching is not a matching of the given market."""

    error_code = "INVALID_MATCHING"


class DigraphContractError(SolverError):
    """An operation was called outside its precondition."""

    error_code = "CONTRACT_VIOLATION"


class OracleBoundExceeded(SolverError):
    """The brute-force search space is larger than the configured bound."""

    error_code = "ORACLE_BOUND"

    def __init__(self, estimate: int, bound: int):
        self.estimate = estimate
        self.bound = bound
        super().__init__(
            f"Brute-force search space of {estimate} candidates exceeds the bound of {bound}"
        )


class InstanceFormatError(SolverError):
    """An instance file could not be parsed."""

    error_code = "PARSE_ERROR"

    def __init__(self, errors: Iterable[Tuple[int, str]]):
        self.errors = list(errors)
        lines = "; ".join(f"line {line}: {message}" for line, message in self.errors)
        super().__init__(f"Could not parse instance file: {lines}")
