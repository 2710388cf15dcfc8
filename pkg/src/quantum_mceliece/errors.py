"""Exception hierarchy for the quantum McEliece toolkit.

Each category carries the process exit code the CLI reports for it, so the
library can raise precise errors while the command line stays a thin wrapper.
"""


class QuantumMcElieceError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class FormatError(QuantumMcElieceError):
    """A file or encoded value is malformed or has an unknown format version."""

    exit_code = 3


class DecodeError(FormatError):
    """A constant-weight word is outside the image of the encoder."""


class ParameterError(QuantumMcElieceError):
    """Incompatible dimensions or infeasible parameters."""

    exit_code = 4


class DimensionError(ParameterError):
    """Operand shapes do not agree."""


class NotFullRowRank(ParameterError):
    """A matrix that must have full row rank does not."""


class SingularMatrix(ParameterError):
    """Inversion requested for a rank-deficient square matrix."""


class UnknownSyndrome(ParameterError):
    """The syndrome does not belong to any correctable error."""


class SupportOutsideImage(ParameterError):
    """A supported basis state is not in the row space of the inverted map."""


class BudgetError(QuantumMcElieceError):
    """A computation would exceed its configured budget."""

    exit_code = 5


class QubitCapError(BudgetError):
    """A state would exceed the configured qubit cap."""


class SamplingError(BudgetError):
    """Rejection sampling ran out of attempts."""
