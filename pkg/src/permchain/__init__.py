"""Permutation antichains, their downward closures, and rational superclasses."""

from .errors import InvalidInputError, ResourceLimitError, VerificationError
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "InvalidInputError",
    "ResourceLimitError",
    "VerificationError",
]
