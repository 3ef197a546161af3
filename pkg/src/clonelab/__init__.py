"""Finite-universe toolkit for clones, transformation monoids and the
functional-graph structure of endofunctions."""

from .clone_engine import ClosureSet, clone_closure, monoid_closure, symmetric_closure
from .core import FnTable, Permutation, SmallnessIdeal, Universe, compose, conjugate
from .funcgraph import canonical_form, decompose, find_conjugator, realize_spectrum, spectrum

__all__ = [
    "ClosureSet",
    "FnTable",
    "Permutation",
    "SmallnessIdeal",
    "Universe",
    "canonical_form",
    "clone_closure",
    "compose",
    "conjugate",
    "decompose",
    "find_conjugator",
    "monoid_closure",
    "realize_spectrum",
    "spectrum",
    "symmetric_closure",
]
