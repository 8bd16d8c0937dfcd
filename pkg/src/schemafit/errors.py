"""Exception types shared across the package."""


class SchemafitError(Exception):
    """Base class for every error this package raises deliberately."""


class ParseError(SchemafitError, ValueError):
    """Malformed input file: bad CSV structure, duplicate headers, ragged rows."""

    def __init__(self, message: str, row: int | None = None):
        if row is not None:
            message = f"{message} (row {row})"
        super().__init__(message)
        self.row = row


class DomainError(SchemafitError, ValueError):
    """Operation called outside its mathematical domain (empty sample, bad edges, ...)."""


class KindError(DomainError):
    """Numeric operation applied to a column that is not numeric."""


class DegenerateVarianceError(DomainError):
    """Variance-based test on a sample with zero variance; the pair is incomparable."""


class GroundTruthError(ParseError):
    """Ground-truth file is malformed or violates injectivity."""


class SpecError(SchemafitError, ValueError):
    """Synthetic dataset evolution script is inconsistent."""


class ConflictError(SchemafitError):
    """Review decision conflicts with the current session state."""


class NotFoundError(SchemafitError):
    """Referenced session or resource does not exist."""
