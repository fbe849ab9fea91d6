"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: validation-type errors exit with 2,
indeterminate numerics with 3 and resource limits with 4.
"""


class CCodeError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ValidationError(CCodeError, ValueError):
    exit_code = 2


class ParseError(ValidationError):
    """Malformed graph6/digraph6 input; ``offset`` is the offending byte."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class DomainError(ValidationError):
    """Input is well formed but outside the domain of the operation."""


class NoEtaError(DomainError):
    """The skew part vanishes on the range of the real part, so no rank drop exists."""


class NotASchemeError(DomainError):
    def __init__(self, axiom, message):
        super().__init__(f"axiom ({axiom}) violated: {message}")
        self.axiom = axiom


class IntegrityError(ValidationError):
    """Checkpoint content or configuration hash mismatch."""


class IndeterminateError(CCodeError, ArithmeticError):
    exit_code = 3


class ResourceLimitError(CCodeError):
    exit_code = 4
