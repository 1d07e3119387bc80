"""Exception types shared across the engine."""


class SchurvarError(Exception):
    """Base class for all engine errors."""


class InputError(SchurvarError):
    """Malformed document, expression, or argument (CLI exit code 3)."""


class UnsupportedAlgebraError(SchurvarError):
    """A computation left the implemented algebraic strategies (exit code 4)."""


class NotAMorphismError(SchurvarError):
    """An explicit instance map failed the equivariance or membership checks."""


class DecompositionIncompleteError(UnsupportedAlgebraError):
    """A component could be neither split further nor certified prime."""


class InconclusiveError(SchurvarError):
    """A semi-decision search hit its configured cap (exit code 2)."""
