"""Backtracking subgraph matcher for compiled patterns.

Matches are injective assignments of pattern atoms to molecule atoms.
``enumerate_matches`` returns every embedding in a deterministic order
keyed by canonical atom ranks, so the result is independent of input
atom numbering.
"""

from __future__ import annotations

from rxnlead.molgraph.mol import AROMATIC, Bond, Molecule, SINGLE
from rxnlead.pattern.parse import (
    And,
    B_ANY,
    B_AROM,
    B_DEFAULT,
    B_DOUBLE,
    B_SINGLE,
    B_TRIPLE,
    Not,
    Or,
    Pattern,
    Prim,
)

_ORDER_BY_KIND = {B_SINGLE: 1, B_DOUBLE: 2, B_TRIPLE: 3, B_AROM: 4}


def _atom_matches(mol: Molecule, idx: int, expr) -> bool:
    if isinstance(expr, Prim):
        kind = expr.kind
        if kind == "element":
            sym, aromatic = expr.value
            atom = mol.atoms[idx]
            if atom.symbol != sym:
                return False
            return aromatic is None or atom.aromatic == aromatic
        if kind == "wildcard":
            return True
        if kind == "aromatic":
            return mol.atoms[idx].aromatic == expr.value
        if kind == "connections":
            return mol.total_connections(idx) == expr.value
        if kind == "hydrogens":
            return mol.atoms[idx].hydrogens == expr.value
        if kind == "charge":
            return mol.atoms[idx].charge == expr.value
        if kind == "ring":
            return mol.atoms[idx].in_ring == expr.value
        if kind == "recursive":
            return has_match(mol, expr.value, anchor=idx)
        raise AssertionError(f"unknown primitive {kind}")
    if isinstance(expr, Not):
        return not _atom_matches(mol, idx, expr.child)
    if isinstance(expr, And):
        return all(_atom_matches(mol, idx, c) for c in expr.children)
    if isinstance(expr, Or):
        return any(_atom_matches(mol, idx, c) for c in expr.children)
    raise AssertionError(f"unknown expression node {expr!r}")


def _bond_matches(bond: Bond, kind: str) -> bool:
    if kind == B_ANY:
        return True
    if kind == B_DEFAULT:
        return bond.order in (SINGLE, AROMATIC)
    return bond.order == _ORDER_BY_KIND[kind]


def find_embeddings(
    mol: Molecule,
    pattern: Pattern,
    limit: int | None = None,
    anchor: int | None = None,
) -> list[tuple[int, ...]]:
    """All injective embeddings, each a tuple indexed by pattern atom.

    ``anchor`` pins pattern atom 0 to a molecule atom (recursive
    queries).  ``limit`` stops the search early; results are only
    sorted when the search ran to completion.
    """
    np_atoms = len(pattern.atoms)
    candidates: list[list[int]] = []
    for p, query in enumerate(pattern.atoms):
        if p == 0 and anchor is not None:
            pool = [anchor] if _atom_matches(mol, anchor, query.expr) else []
        else:
            pool = [i for i in range(len(mol.atoms))
                    if _atom_matches(mol, i, query.expr)]
        if not pool:
            return []
        candidates.append(pool)

    # Search order: rarest candidate pool first, then grow over pattern
    # bonds, preferring the rarest adjacent unplaced atom.
    if anchor is not None:
        first = 0
    else:
        first = min(range(np_atoms), key=lambda p: (len(candidates[p]), p))
    order = [first]
    placed = {first}
    while len(order) < np_atoms:
        frontier = [
            (len(candidates[q]), q)
            for p in order
            for q, _ in pattern.adjacency[p]
            if q not in placed
        ]
        if not frontier:
            raise AssertionError(
                f"disconnected pattern {pattern.smarts!r}")
        _, nxt = min(frontier)
        order.append(nxt)
        placed.add(nxt)

    # Bonds to check at each step: constraints into already-placed atoms.
    position = {p: i for i, p in enumerate(order)}
    checks: list[list[tuple[int, str]]] = [[] for _ in order]
    for b in pattern.bonds:
        later = b.i if position[b.i] > position[b.j] else b.j
        earlier = b.j if later == b.i else b.i
        checks[position[later]].append((earlier, b.kind))

    results: list[tuple[int, ...]] = []
    assignment: dict[int, int] = {}
    used: set[int] = set()

    def backtrack(step: int) -> bool:
        if step == np_atoms:
            results.append(tuple(assignment[p] for p in range(np_atoms)))
            return limit is not None and len(results) >= limit
        p = order[step]
        for cand in candidates[p]:
            if cand in used:
                continue
            ok = True
            for earlier, kind in checks[step]:
                bond = mol.bond_between(assignment[earlier], cand)
                if bond is None or not _bond_matches(bond, kind):
                    ok = False
                    break
            if not ok:
                continue
            assignment[p] = cand
            used.add(cand)
            if backtrack(step + 1):
                return True
            used.discard(cand)
            del assignment[p]
        return False

    stopped = backtrack(0)
    if not stopped:
        ranks = mol.canonical_ranks
        results.sort(key=lambda t: (tuple(ranks[i] for i in t), t))
    return results


def has_match(mol: Molecule, pattern: Pattern, anchor: int | None = None) -> bool:
    """True when at least one embedding exists."""
    return bool(find_embeddings(mol, pattern, limit=1, anchor=anchor))


def enumerate_matches(mol: Molecule, pattern: Pattern) -> list[tuple[int, ...]]:
    """Every embedding, ordered by canonical atom ranks then indices."""
    return find_embeddings(mol, pattern)
