"""Explicit factorization formulas for differences of CM values and their p-adic
theta-product analogues, with numerical verification at desk scale."""

from .quadratic import Setup, make_setup, rhs_product
from .rational import FactoredInteger, FactoredRational, factorize, kronecker

__version__ = "0.1.0"

__all__ = [
    "FactoredInteger",
    "FactoredRational",
    "Setup",
    "factorize",
    "kronecker",
    "make_setup",
    "rhs_product",
]
