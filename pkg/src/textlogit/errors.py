"""Exception types shared across the package.

The CLI maps these onto exit codes: usage problems exit 1, data problems
exit 2, numerical problems exit 3.
"""


class TextlogitError(Exception):
    """Base class for all package errors."""


class ParameterError(TextlogitError, ValueError):
    """A caller-supplied parameter is outside its documented domain."""


class SchemaError(TextlogitError):
    """An input file does not have the expected columns or header."""


class RowParseError(TextlogitError):
    """A data row could not be parsed; carries the offending row index."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class EmptyCorpusError(TextlogitError):
    """Every document came out empty after preprocessing."""


class InsufficientDataError(TextlogitError):
    """Too few labeled documents for the requested operation."""


class DegenerateLabelsError(TextlogitError):
    """A fit was requested with only one class present."""


class DegenerateDesignError(TextlogitError):
    """The feature matrix carries no usable signal (e.g. all zeros)."""


class DimensionMismatchError(TextlogitError):
    """Two inputs that must agree in shape do not."""


class NumericalError(TextlogitError):
    """An optimization diverged or produced non-finite values."""


class VocabularyMismatchError(TextlogitError):
    """A serialized model does not match the supplied vocabulary."""
