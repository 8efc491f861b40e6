"""The Molecule type: perception pipeline and derived views.

A Molecule is immutable once built.  Construction runs the full
pipeline: ring perception, aromatic resolution, implicit hydrogens,
valence validation and canonical ranking.  Hydrogens are stored as
per-atom counts, never as graph atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from rxnlead.errors import SmilesSyntaxError, ValenceError
from rxnlead.molgraph import elements
from rxnlead.molgraph.aromaticity import perceive_aromaticity
from rxnlead.molgraph.canon import canonical_ranks, write_smiles
from rxnlead.molgraph.parse import (
    B_AROM,
    B_DOUBLE,
    B_SINGLE,
    B_TRIPLE,
    RawAtom,
    parse_raw,
)
from rxnlead.molgraph.rings import find_bridges, find_sssr

SINGLE = B_SINGLE
DOUBLE = B_DOUBLE
TRIPLE = B_TRIPLE
AROMATIC = B_AROM

_BOND_VALUE = {SINGLE: 1, DOUBLE: 2, TRIPLE: 3, AROMATIC: 1}


@dataclass(frozen=True, slots=True)
class Atom:
    """One heavy atom: element, charge, attached hydrogens, flags."""

    symbol: str
    charge: int
    hydrogens: int
    aromatic: bool
    in_ring: bool

    @property
    def atomic_number(self) -> int:
        return elements.ATOMIC_NUMBER[self.symbol]


@dataclass(frozen=True, slots=True)
class Bond:
    """Edge between atom indices ``a`` and ``b``."""

    a: int
    b: int
    order: int  # SINGLE, DOUBLE, TRIPLE or AROMATIC

    def other(self, idx: int) -> int:
        return self.b if idx == self.a else self.a


class RingInfo:
    """SSSR rings with aromatic and heteroatom flags."""

    __slots__ = ("rings", "aromatic_flags", "hetero_flags")

    def __init__(self, rings: tuple[tuple[int, ...], ...],
                 aromatic_flags: tuple[bool, ...],
                 hetero_flags: tuple[bool, ...]) -> None:
        self.rings = rings
        self.aromatic_flags = aromatic_flags
        self.hetero_flags = hetero_flags

    @property
    def count(self) -> int:
        return len(self.rings)

    @property
    def aromatic_count(self) -> int:
        return sum(self.aromatic_flags)

    @property
    def hetero_count(self) -> int:
        return sum(self.hetero_flags)


class Molecule:
    """Immutable perceived molecular graph."""

    __slots__ = ("atoms", "bonds", "adjacency", "ring_info", "_ranks",
                 "_canonical", "_pi")

    def __init__(self, atoms: tuple[Atom, ...], bonds: tuple[Bond, ...],
                 adjacency: tuple[tuple[tuple[int, int], ...], ...],
                 ring_info: RingInfo, pi: dict[int, int]) -> None:
        self.atoms = atoms
        self.bonds = bonds
        self.adjacency = adjacency
        self.ring_info = ring_info
        self._pi = pi
        self._ranks: tuple[int, ...] | None = None
        self._canonical: str | None = None

    # --- derived views ---

    @property
    def canonical_ranks(self) -> tuple[int, ...]:
        if self._ranks is None:
            self._ranks = canonical_ranks(self)
        return self._ranks

    @property
    def canonical_smiles(self) -> str:
        if self._canonical is None:
            self._canonical = write_smiles(self)
        return self._canonical

    @property
    def heavy_atom_count(self) -> int:
        return len(self.atoms)

    @property
    def molecular_weight(self) -> float:
        total = 0.0
        for a in self.atoms:
            total += elements.ATOMIC_MASS[a.symbol]
            total += a.hydrogens * elements.ATOMIC_MASS["H"]
        return total

    def degree(self, idx: int) -> int:
        return len(self.adjacency[idx])

    def total_connections(self, idx: int) -> int:
        """Connections including hydrogens (the X primitive)."""
        return len(self.adjacency[idx]) + self.atoms[idx].hydrogens

    def bond_between(self, i: int, j: int) -> Bond | None:
        for nbr, bidx in self.adjacency[i]:
            if nbr == j:
                return self.bonds[bidx]
        return None

    def neighbors(self, idx: int) -> list[int]:
        return [nbr for nbr, _ in self.adjacency[idx]]

    def pi_contribution(self, idx: int) -> int | None:
        """Electrons the atom lends to its aromatic system (if any)."""
        return self._pi.get(idx)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Molecule):
            return NotImplemented
        return self.canonical_smiles == other.canonical_smiles

    def __hash__(self) -> int:
        return hash(self.canonical_smiles)

    def __repr__(self) -> str:
        return f"Molecule({self.canonical_smiles!r})"


def _build(
    raw_atoms: list[RawAtom],
    raw_bonds: list[tuple[int, int, int | None]],
    text: str,
) -> Molecule:
    n = len(raw_atoms)
    for atom in raw_atoms:
        if atom.symbol == "H":
            raise SmilesSyntaxError(
                f"explicit hydrogen atoms are not supported: {text!r}")
        if not elements.is_element(atom.symbol):
            raise SmilesSyntaxError(
                f"unknown element {atom.symbol!r} in {text!r}")
        if atom.aromatic and atom.symbol not in elements.AROMATIC_ELEMENTS:
            raise SmilesSyntaxError(
                f"element {atom.symbol!r} cannot be aromatic in {text!r}")

    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for bidx, (a, b, _) in enumerate(raw_bonds):
        if a == b:
            raise SmilesSyntaxError(f"self bond in {text!r}")
        adjacency[a].append((b, bidx))
        adjacency[b].append((a, bidx))

    bridges = find_bridges(n, adjacency)
    in_ring = [
        any(bidx not in bridges for _, bidx in adjacency[i]) for i in range(n)
    ]

    # Resolve unannotated bonds: aromatic candidates only inside rings.
    bonds: list[tuple[int, int, int]] = []
    for bidx, (a, b, code) in enumerate(raw_bonds):
        if code is None:
            both_aromatic = raw_atoms[a].aromatic and raw_atoms[b].aromatic
            code = B_AROM if both_aromatic and bidx not in bridges else B_SINGLE
        elif code == B_AROM:
            if not (raw_atoms[a].aromatic and raw_atoms[b].aromatic):
                raise SmilesSyntaxError(
                    f"':' bond between non-aromatic atoms in {text!r}")
        bonds.append((a, b, code))

    charges = [a.charge if a.charge is not None else 0 for a in raw_atoms]

    hydrogens: list[int] = []
    for i, atom in enumerate(raw_atoms):
        if atom.explicit_h is not None:
            hydrogens.append(atom.explicit_h)
            continue
        if atom.bracket:
            # a bracket atom with no H token has exactly zero hydrogens
            hydrogens.append(0)
            continue
        bond_sum = 0
        has_multiple = False
        for _, bidx in adjacency[i]:
            code = bonds[bidx][2]
            bond_sum += _BOND_VALUE[code]
            if code in (B_DOUBLE, B_TRIPLE):
                has_multiple = True
        hydrogens.append(elements.implicit_hydrogens(
            atom.symbol, charges[i], atom.aromatic, bond_sum, has_multiple))

    rings = find_sssr(n, [(a, b) for a, b, _ in bonds], adjacency)
    arom = perceive_aromaticity(
        [a.symbol for a in raw_atoms],
        charges,
        hydrogens,
        [a.aromatic for a in raw_atoms],
        in_ring,
        bonds,
        adjacency,
        rings,
    )

    final_bonds: list[Bond] = []
    for bidx, (a, b, code) in enumerate(bonds):
        if bidx in arom.aromatic_bonds:
            code = B_AROM
        final_bonds.append(Bond(a, b, code))

    atoms: list[Atom] = []
    for i, atom in enumerate(raw_atoms):
        aromatic = i in arom.aromatic_atoms
        atoms.append(Atom(atom.symbol, charges[i], hydrogens[i], aromatic,
                          in_ring[i]))

    # Valence validation with the aromatic pi term.
    for i, atom in enumerate(atoms):
        used = sum(_BOND_VALUE[final_bonds[bidx].order]
                   for _, bidx in adjacency[i])
        used += atom.hydrogens
        if atom.aromatic and arom.contributions.get(i) == 1:
            used += 1
        allowed = elements.allowed_valences(atom.symbol, atom.charge)
        if used not in allowed:
            raise ValenceError(
                f"atom {i} ({atom.symbol}{atom.charge:+d}) uses valence "
                f"{used}, allowed {list(allowed)}, in {text!r}")

    ring_info = RingInfo(
        tuple(tuple(r) for r in rings),
        tuple(arom.ring_flags),
        tuple(any(atoms[i].symbol != "C" for i in r) for r in rings))
    return Molecule(
        tuple(atoms),
        tuple(final_bonds),
        tuple(tuple(nbrs) for nbrs in adjacency),
        ring_info,
        dict(arom.contributions),
    )


def parse_smiles(text: str) -> Molecule:
    """Parse SMILES text into a perceived Molecule.

    Raises:
        SmilesSyntaxError: malformed text or unsupported atoms.
        RingClosureError: unmatched or inconsistent ring digits.
        ValenceError: valence or aromaticity violations.
    """
    g = parse_raw(text, allow_maps=False)
    return _build(g.atoms, g.bonds, text)


def from_graph(
    atoms: list[tuple[str, int, int | None, bool]],
    bonds: list[tuple[int, int, int | None]],
    label: str = "<graph>",
) -> Molecule:
    """Build a Molecule from explicit graph data.

    Each atom is (symbol, charge, hydrogens-or-None, aromatic flag);
    hydrogens None means recompute by the standard rules.  Bond codes
    use the module constants; None resolves like an unannotated SMILES
    bond.  The full perception pipeline runs, so invalid graphs raise
    the same errors as parsing.
    """
    raw_atoms = [RawAtom(sym, aromatic, charge, h)
                 for sym, charge, h, aromatic in atoms]
    raw_bonds: list[tuple[int, int, int | None]] = [
        (a, b, code) for a, b, code in bonds
    ]
    return _build(raw_atoms, raw_bonds, label)


@lru_cache(maxsize=200_000)
def mol_from_smiles(text: str) -> Molecule:
    """Cached parse for hot paths; Molecules are immutable so sharing is safe."""
    return parse_smiles(text)
