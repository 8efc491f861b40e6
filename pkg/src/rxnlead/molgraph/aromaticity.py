"""Aromatic ring perception over SSSR rings plus fused-ring envelopes.

The model is a simplified electron count: each candidate ring atom
contributes 0, 1 or 2 pi electrons (or blocks the ring entirely), and a
ring is aromatic when the total satisfies 4k+2.  This reproduces the
standard drug-like heterocycles (pyridine, pyrrole, furan, thiophene,
imidazole, indole, quinoline, tetrazole, pyridones) and stays fully
deterministic; it is not a general electronic-structure method.
"""

from __future__ import annotations

from rxnlead.errors import ValenceError
from rxnlead.molgraph.parse import B_AROM, B_DOUBLE, B_TRIPLE


def _pi_contribution(
    idx: int,
    symbol: str,
    charge: int,
    hydrogens: int,
    aromatic_input: bool,
    degree: int,
    double_partners: list[int],
    triple_in_ring: bool,
    in_ring: list[bool],
) -> int | None:
    """Electrons an atom lends to a candidate aromatic ring.

    None blocks the ring (saturated carbon, quaternary nitrogen, ...).
    """
    if triple_in_ring:
        return None
    if double_partners:
        # A double bond into the ring system supplies one electron; a
        # purely exocyclic double bond (ring carbonyl) supplies none.
        if any(in_ring[p] for p in double_partners):
            return 1
        return 0
    if aromatic_input:
        if symbol == "C":
            if charge == 1:
                return 0
            if charge == -1:
                return 2
            return 1
        if symbol in ("N", "P"):
            if charge == 1:
                return 1
            conn = degree + hydrogens
            return 2 if conn >= 3 or charge == -1 else 1
        if symbol in ("O", "S", "Se"):
            return 1 if charge == 1 else 2
        if symbol == "B":
            return 2 if charge == -1 else 0
        return None
    # Saturated atoms: heteroatoms may donate a lone pair.
    if symbol in ("N", "P"):
        if charge == 1:
            return None
        return 2
    if symbol in ("O", "S", "Se") and charge == 0:
        return 2
    if symbol == "C":
        if charge == 1:
            return 0
        if charge == -1:
            return 2
        return None
    if symbol == "B" and charge == 0:
        return 0
    return None


class AromaticityResult:
    __slots__ = ("aromatic_atoms", "aromatic_bonds", "contributions", "ring_flags")

    def __init__(
        self,
        aromatic_atoms: set[int],
        aromatic_bonds: set[int],
        contributions: dict[int, int],
        ring_flags: list[bool],
    ) -> None:
        self.aromatic_atoms = aromatic_atoms
        self.aromatic_bonds = aromatic_bonds
        self.contributions = contributions
        self.ring_flags = ring_flags


def perceive_aromaticity(
    symbols: list[str],
    charges: list[int],
    hydrogens: list[int],
    aromatic_input: list[bool],
    in_ring: list[bool],
    bonds: list[tuple[int, int, int]],
    adjacency: list[list[tuple[int, int]]],
    rings: list[list[int]],
) -> AromaticityResult:
    """Decide which SSSR rings (or fused envelopes) are aromatic."""
    n = len(symbols)
    double_partners: list[list[int]] = [[] for _ in range(n)]
    triple_flags = [False] * n
    for a, b, code in bonds:
        if code == B_DOUBLE:
            double_partners[a].append(b)
            double_partners[b].append(a)
        elif code == B_TRIPLE:
            if in_ring[a] and in_ring[b]:
                triple_flags[a] = True
                triple_flags[b] = True

    def contribution(i: int) -> int | None:
        return _pi_contribution(
            i,
            symbols[i],
            charges[i],
            hydrogens[i],
            aromatic_input[i],
            len(adjacency[i]),
            double_partners[i],
            triple_flags[i],
            in_ring,
        )

    contrib = [contribution(i) for i in range(n)]

    def huckel(cycle: list[int]) -> bool:
        total = 0
        for i in cycle:
            c = contrib[i]
            if c is None:
                return False
            total += c
        return total % 4 == 2

    bond_index: dict[tuple[int, int], int] = {}
    for idx, (a, b, _) in enumerate(bonds):
        bond_index[(a, b)] = idx
        bond_index[(b, a)] = idx

    def cycle_bonds(cycle: list[int]) -> list[int]:
        return [
            bond_index[(cycle[i], cycle[(i + 1) % len(cycle)])]
            for i in range(len(cycle))
        ]

    aromatic_atoms: set[int] = set()
    aromatic_bonds: set[int] = set()
    ring_flags = [False] * len(rings)
    for ri, ring in enumerate(rings):
        if huckel(ring):
            ring_flags[ri] = True
            aromatic_atoms.update(ring)
            aromatic_bonds.update(cycle_bonds(ring))

    # Fused envelopes (azulene-like): when single rings fail, test the
    # symmetric difference of a connected fused system's ring bonds.
    failed = [ri for ri, ok in enumerate(ring_flags) if not ok]
    if failed:
        ring_bond_sets = [set(cycle_bonds(r)) for r in rings]
        # group rings into fused systems by shared bonds
        parent = list(range(len(rings)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in range(len(rings)):
            for j in range(i + 1, len(rings)):
                if ring_bond_sets[i] & ring_bond_sets[j]:
                    parent[find(i)] = find(j)
        systems: dict[int, list[int]] = {}
        for i in range(len(rings)):
            systems.setdefault(find(i), []).append(i)
        for members in systems.values():
            if len(members) < 2 or all(ring_flags[m] for m in members):
                continue
            envelope: set[int] = set()
            for m in members:
                envelope ^= ring_bond_sets[m]
            cycle = _trace_single_cycle(envelope, bonds)
            if cycle is not None and huckel(cycle):
                aromatic_atoms.update(cycle)
                aromatic_bonds.update(cycle_bonds(cycle))
                # interior ring bonds joining two envelope atoms join
                # the aromatic system as well
                for m in members:
                    for bidx in ring_bond_sets[m]:
                        a, b, _ = bonds[bidx]
                        if a in aromatic_atoms and b in aromatic_atoms:
                            aromatic_bonds.add(bidx)
                for m in members:
                    if set(rings[m]) <= aromatic_atoms:
                        ring_flags[m] = True

    for i in range(n):
        if aromatic_input[i] and i not in aromatic_atoms:
            raise ValenceError(
                f"atom {i} ({symbols[i]}) is marked aromatic but sits in no "
                "aromatic ring")
    for idx, (a, b, code) in enumerate(bonds):
        if code == B_AROM and idx not in aromatic_bonds:
            raise ValenceError(
                f"aromatic bond {a}-{b} lies outside any aromatic ring")

    contributions = {
        i: contrib[i] for i in aromatic_atoms if contrib[i] is not None
    }
    return AromaticityResult(aromatic_atoms, aromatic_bonds, contributions, ring_flags)


def _trace_single_cycle(
    bond_ids: set[int], bonds: list[tuple[int, int, int]]
) -> list[int] | None:
    """Order a bond set into one simple cycle, or None if it is not one."""
    if not bond_ids:
        return None
    nbrs: dict[int, list[int]] = {}
    for bidx in bond_ids:
        a, b, _ = bonds[bidx]
        nbrs.setdefault(a, []).append(b)
        nbrs.setdefault(b, []).append(a)
    if any(len(v) != 2 for v in nbrs.values()):
        return None
    start = min(nbrs)
    cycle = [start]
    prev = None
    cur = start
    while True:
        a, b = nbrs[cur]
        nxt = b if a == prev else a
        if nxt == start:
            break
        cycle.append(nxt)
        prev, cur = cur, nxt
        if len(cycle) > len(bond_ids):
            return None
    return cycle if len(cycle) == len(bond_ids) else None
