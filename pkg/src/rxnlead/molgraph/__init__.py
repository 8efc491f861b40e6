"""Molecular graphs: SMILES parsing, perception, canonical output."""

from __future__ import annotations

from rxnlead.molgraph.mol import (
    AROMATIC,
    Atom,
    Bond,
    DOUBLE,
    Molecule,
    RingInfo,
    SINGLE,
    TRIPLE,
    from_graph,
    mol_from_smiles,
    parse_smiles,
)

__all__ = [
    "AROMATIC",
    "Atom",
    "Bond",
    "DOUBLE",
    "Molecule",
    "RingInfo",
    "SINGLE",
    "TRIPLE",
    "from_graph",
    "mol_from_smiles",
    "parse_smiles",
]
