"""Coarse geometry of inverse semigroups, computed on finite tables."""

from .semigroup import (
    Bicyclic,
    FiniteSemigroup,
    FreeInverseMonoid1,
    PartialBijection,
    SymmetricInverseMonoid,
    generate_closure,
    green_table,
    make_family,
    truncate,
)

__version__ = "0.1.0"

__all__ = [
    "Bicyclic",
    "FiniteSemigroup",
    "FreeInverseMonoid1",
    "PartialBijection",
    "SymmetricInverseMonoid",
    "generate_closure",
    "green_table",
    "make_family",
    "truncate",
]
