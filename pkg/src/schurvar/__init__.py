"""Exact conversion between equations and parametrizations for closed
subsets of polynomial functors over the rationals."""

__version__ = "0.1.0"

from .errors import (DecompositionIncompleteError, InputError,
                     NotAMorphismError, SchurvarError,
                     UnsupportedAlgebraError)

__all__ = [
    "DecompositionIncompleteError",
    "InputError",
    "NotAMorphismError",
    "SchurvarError",
    "UnsupportedAlgebraError",
]
