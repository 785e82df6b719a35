"""Word-level bit-vector constraint solving with forbidden wrapping intervals."""

from .bv import BvVal
from .intervals import WInterval
from .terms import Poly, Constraint, Literal, Assign

__all__ = ["BvVal", "WInterval", "Poly", "Constraint", "Literal", "Assign"]
