"""Commutator calculus workbench: free groups, Magnus expansions, finite groups
and abelianized tensor groups for checking commutator identities exactly."""

from cmlw.words import Word, commutator, conjugate, reduce
from cmlw.expr import Identity, parse, parse_identity, render

__all__ = [
    "Word",
    "reduce",
    "conjugate",
    "commutator",
    "parse",
    "parse_identity",
    "render",
    "Identity",
]
__version__ = "0.1.0"
