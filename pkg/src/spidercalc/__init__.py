"""Complementary spider diagrams, exact fibre-functor evaluation and Hadamard matrices."""

from .scalar import ExactScalar, HomogeneityError
from .tensor import Tensor

__all__ = ["ExactScalar", "HomogeneityError", "Tensor"]
__version__ = "0.1.0"
