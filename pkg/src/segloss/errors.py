"""Exception hierarchy: validation, degeneracy, and tensor-file errors."""


class SeglossError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SeglossError, ValueError):
    """Malformed input: bad shapes, out-of-range values, broken invariants."""


class DegenerateInputError(SeglossError, ValueError):
    """Structurally degenerate input for the requested operation.

    Raised when an operation is undefined on the given data (e.g. a
    boundary-distance loss where every foreground class is empty), as
    opposed to the data being malformed.
    """


class TensorFileError(SeglossError, ValueError):
    """Malformed tensor or image file.

    ``code`` is a stable machine-readable identifier of the failure class
    (``bad-magic``, ``truncated``, ``trailing-bytes``, ...); the message
    carries the human-readable details including a byte offset where that
    makes sense.
    """

    def __init__(self, message: str, code: str):
        super().__init__(message)
        self.code = code
