"""Canonical atom ranking and SMILES output.

Ranking is an iterative partition refinement over local invariants
with deterministic tie-breaking.  Atoms left tied after refinement are
treated as symmetry-equivalent; for molecular graphs this holds in
practice, and the round-trip tests exercise it over random atom
permutations.
"""

from __future__ import annotations

import heapq
from typing import TYPE_CHECKING

from rxnlead.molgraph import elements
from rxnlead.molgraph.parse import B_AROM, B_DOUBLE, B_SINGLE, B_TRIPLE

if TYPE_CHECKING:  # pragma: no cover
    from rxnlead.molgraph.mol import Molecule

_BOND_TOKEN = {B_SINGLE: "", B_DOUBLE: "=", B_TRIPLE: "#", B_AROM: ""}


def _dense(keys: list) -> list[int]:
    order = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def canonical_ranks(mol: Molecule) -> tuple[int, ...]:
    """A permutation-stable rank (0..n-1, unique) for every atom."""
    n = len(mol.atoms)
    if n == 1:
        return (0,)
    keys = [
        (a.symbol, a.charge, len(mol.adjacency[i]), a.hydrogens,
         a.aromatic, a.in_ring)
        for i, a in enumerate(mol.atoms)
    ]
    ranks = _dense(keys)

    def refine(ranks: list[int]) -> list[int]:
        while True:
            classes = len(set(ranks))
            keyed = [
                (
                    ranks[i],
                    tuple(sorted(
                        (mol.bonds[bidx].order, ranks[j])
                        for j, bidx in mol.adjacency[i]
                    )),
                )
                for i in range(n)
            ]
            new_ranks = _dense(keyed)
            if len(set(new_ranks)) == classes:
                return new_ranks
            ranks = new_ranks

    ranks = refine(ranks)
    while len(set(ranks)) < n:
        counts: dict[int, int] = {}
        for r in ranks:
            counts[r] = counts.get(r, 0) + 1
        tied = min(r for r, c in counts.items() if c > 1)
        chosen = min(i for i in range(n) if ranks[i] == tied)
        keyed2 = [(ranks[i], 0 if i == chosen else 1) for i in range(n)]
        ranks = refine(_dense(keyed2))
    return tuple(ranks)


def _bare_token_ok(mol: Molecule, idx: int) -> bool:
    """True when the atom round-trips without brackets."""
    atom = mol.atoms[idx]
    if atom.charge != 0 or atom.symbol not in elements.ORGANIC_SUBSET:
        return False
    if atom.aromatic and atom.symbol not in ("B", "C", "N", "O", "P", "S"):
        return False
    bond_sum = 0
    has_multiple = False
    for _, bidx in mol.adjacency[idx]:
        order = mol.bonds[bidx].order
        bond_sum += 1 if order == B_AROM else order
        if order in (B_DOUBLE, B_TRIPLE):
            has_multiple = True
    implied = elements.implicit_hydrogens(
        atom.symbol, 0, atom.aromatic, bond_sum, has_multiple)
    return implied == atom.hydrogens


def _atom_token(mol: Molecule, idx: int) -> str:
    atom = mol.atoms[idx]
    sym = atom.symbol.lower() if atom.aromatic else atom.symbol
    if _bare_token_ok(mol, idx):
        return sym
    h = atom.hydrogens
    htok = "" if h == 0 else ("H" if h == 1 else f"H{h}")
    c = atom.charge
    if c == 0:
        ctok = ""
    elif c == 1:
        ctok = "+"
    elif c == -1:
        ctok = "-"
    else:
        ctok = f"+{c}" if c > 0 else str(c)
    return f"[{sym}{htok}{ctok}]"


def _bond_token(mol: Molecule, bidx: int) -> str:
    bond = mol.bonds[bidx]
    if bond.order == B_SINGLE:
        a, b = mol.atoms[bond.a], mol.atoms[bond.b]
        # single bond between two aromatic atoms must be explicit
        if a.aromatic and b.aromatic:
            return "-"
        return ""
    return _BOND_TOKEN[bond.order]


def write_smiles(mol: Molecule) -> str:
    """Canonical SMILES for the molecule (stereo-free dialect)."""
    n = len(mol.atoms)
    ranks = mol.canonical_ranks
    visited = [False] * n
    pieces: list[str] = []

    free_digits: list[int] = list(range(1, 100))
    heapq.heapify(free_digits)

    def digit_token(d: int) -> str:
        return str(d) if d < 10 else f"%{d:02d}"

    def walk_component(start: int) -> str:
        # Spanning tree with children in rank order; non-tree bonds
        # become ring closures recorded at both endpoints.
        order_key = lambda pair: ranks[pair[0]]
        tree_children: dict[int, list[tuple[int, int]]] = {}
        back_edges: dict[int, list[tuple[int, int]]] = {}
        seen = {start}
        seen_bonds: set[int] = set()

        def build(u: int) -> None:
            for v, bidx in sorted(mol.adjacency[u], key=order_key):
                if bidx in seen_bonds:
                    continue
                if v in seen:
                    seen_bonds.add(bidx)
                    back_edges.setdefault(u, []).append((v, bidx))
                    back_edges.setdefault(v, []).append((u, bidx))
                else:
                    seen.add(v)
                    seen_bonds.add(bidx)
                    tree_children.setdefault(u, []).append((v, bidx))
                    build(v)

        build(start)

        closure_digit: dict[int, int] = {}

        def emit(u: int) -> str:
            visited[u] = True
            out = [_atom_token(mol, u)]
            for v, bidx in sorted(back_edges.get(u, ()), key=order_key):
                if bidx in closure_digit:
                    d = closure_digit.pop(bidx)
                    heapq.heappush(free_digits, d)
                    out.append(_bond_token(mol, bidx) + digit_token(d))
                else:
                    d = heapq.heappop(free_digits)
                    closure_digit[bidx] = d
                    out.append(_bond_token(mol, bidx) + digit_token(d))
            children = tree_children.get(u, [])
            for i, (v, bidx) in enumerate(children):
                sub = _bond_token(mol, bidx) + emit(v)
                if i < len(children) - 1:
                    out.append(f"({sub})")
                else:
                    out.append(sub)
            return "".join(out)

        return emit(start)

    starts = sorted(range(n), key=lambda i: ranks[i])
    for s in starts:
        if not visited[s]:
            pieces.append(walk_component(s))
    return ".".join(pieces)
