"""Substructure patterns: a SMARTS subset compiler and matcher."""

from __future__ import annotations

from rxnlead.pattern.match import enumerate_matches, find_embeddings, has_match
from rxnlead.pattern.parse import AtomQuery, Pattern, parse_smarts

__all__ = [
    "AtomQuery",
    "Pattern",
    "parse_smarts",
    "enumerate_matches",
    "find_embeddings",
    "has_match",
]
