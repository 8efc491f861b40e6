"""Descriptor tools: weight, functional groups, scaffold, fragments,
rings and reactive sites.

Each tool returns a ToolReport whose ``text`` is the single-line
rendering consumed by proposers; ``payload`` carries the same facts
structured for tests and metrics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from rxnlead.molgraph import Molecule
from rxnlead.molgraph.mol import from_graph
from rxnlead.pattern import enumerate_matches, parse_smarts

# (rendered name, pattern) in report order
FUNCGROUP_TABLE: tuple[tuple[str, str], ...] = (
    ("carboxylic acid", "[C&X3](=O)[O&X2&H1]"),
    ("ester", "[C&X3](=O)[O&X2][#6]"),
    ("amide", "[C&X3](=O)[N&X3]"),
    ("aldehyde", "[C&X3&H1]=O"),
    ("ketone", "[#6][C&X3](=[O&X1])[#6]"),
    ("primary amine", "[N&X3&H2;!$(NC=O)]"),
    ("secondary amine", "[N&X3&H1;!$(NC=O)]"),
    ("tertiary amine", "[N&X3&H0&+0;!$(NC=O)]"),
    ("alcohol", "[C&X4][O&X2&H1]"),
    ("phenol", "[c][O&X2&H1]"),
    ("ether", "[#6][O&X2&H0;!$(OC=O)][#6]"),
    ("nitrile", "[C&X2]#[N&X1]"),
    ("nitro", "[N&X3&+1](=[O&X1])[O&X1&-1]"),
    ("alkyl halide", "[C&X4][F,Cl,Br,I]"),
    ("aryl halide", "[c][F,Cl,Br,I]"),
    ("sulfonamide", "[S&X4](=[O&X1])(=[O&X1])[N&X3]"),
    ("tetrazole", "c1nnn[nH]1"),
)

# (short name, pattern): the five reactive-site motifs
SITE_TABLE: tuple[tuple[str, str], ...] = (
    ("carbonyl", "[CX3]=[OX1]"),
    ("nucl_amine", "[NX3;H1,H2;!$(NC=O)]"),
    ("hydroxyl", "[OX2H]"),
    ("halogen", "[F,Cl,Br,I]"),
    ("michael_acceptor", "[CX3]=[CX3]-[CX3]=[OX1]"),
)

# BRICS-style cleavage rules: the bond between pattern atoms 0 and 1 is
# cut when it is not a ring bond.
BRICS_RULES: tuple[tuple[str, str], ...] = (
    ("amide", "[C&X3;$(C=O)]-[N&X3]"),
    ("ester", "[C&X3;$(C=O)]-[O&X2&H0]"),
    ("ether_to_ring", "[O&X2&H0;!$(OC=O)]-[#6;R]"),
    ("amine_to_ring", "[N&X3;!R]-[#6;R]"),
    ("biaryl", "[c;R]-[c;R]"),
)


@dataclass(frozen=True)
class ToolReport:
    """One tool invocation's result."""

    kind: str
    text: str
    payload: dict = field(default_factory=dict)


@lru_cache(maxsize=None)
def _compiled(smarts: str):
    return parse_smarts(smarts)


def _distinct_matches(mol: Molecule, smarts: str) -> list[frozenset[int]]:
    seen: set[frozenset[int]] = set()
    out: list[frozenset[int]] = []
    for emb in enumerate_matches(mol, _compiled(smarts)):
        key = frozenset(emb)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


def tool_weight(mol: Molecule) -> ToolReport:
    """Molecular weight in daltons, rendered with two decimals."""
    w = mol.molecular_weight
    return ToolReport("weight", f"{w:.2f}", {"weight": w})


def tool_funcgroups(mol: Molecule) -> ToolReport:
    """Functional group census over the built-in table."""
    counts: list[tuple[str, int]] = []
    for name, smarts in FUNCGROUP_TABLE:
        n = len(_distinct_matches(mol, smarts))
        if n:
            counts.append((name, n))
    text = ", ".join(f"{name} ({n})" for name, n in counts) if counts else "none"
    return ToolReport("funcgroups", text, {"groups": dict(counts)})


def _ring_bond_set(mol: Molecule) -> set[tuple[int, int]]:
    out: set[tuple[int, int]] = set()
    for ring in mol.ring_info.rings:
        for i in range(len(ring)):
            a, b = ring[i], ring[(i + 1) % len(ring)]
            out.add((min(a, b), max(a, b)))
    return out


def murcko_scaffold(mol: Molecule) -> Molecule | None:
    """Ring systems plus linkers; None for acyclic molecules.

    Degree-one atoms outside rings are pruned to a fixed point.  An
    atom double-bonded to an aromatic ring atom (pyridinone oxygen)
    stays, since deleting it would break the ring's aromatic system.
    """
    if mol.ring_info.count == 0:
        return None
    alive = set(range(len(mol.atoms)))
    hydro = {i: a.hydrogens for i, a in enumerate(mol.atoms)}
    bond_alive = set(range(len(mol.bonds)))
    changed = True
    while changed:
        changed = False
        for i in sorted(alive):
            if mol.atoms[i].in_ring:
                continue
            incident = [bidx for _, bidx in mol.adjacency[i] if bidx in bond_alive]
            if len(incident) != 1:
                continue
            bond = mol.bonds[incident[0]]
            other = bond.other(i)
            if bond.order != 1 and mol.atoms[other].aromatic:
                continue
            alive.discard(i)
            bond_alive.discard(incident[0])
            hydro[other] += bond.order
            changed = True
    if not alive:
        return None
    index = {old: new for new, old in enumerate(sorted(alive))}
    atoms = [
        (mol.atoms[old].symbol, mol.atoms[old].charge, hydro[old],
         mol.atoms[old].aromatic)
        for old in sorted(alive)
    ]
    bonds = [
        (index[mol.bonds[bidx].a], index[mol.bonds[bidx].b],
         mol.bonds[bidx].order)
        for bidx in sorted(bond_alive)
        if mol.bonds[bidx].a in alive and mol.bonds[bidx].b in alive
    ]
    return from_graph(atoms, bonds, label="<scaffold>")


def tool_scaffold(mol: Molecule) -> ToolReport:
    """Murcko-style scaffold with its ring census."""
    scaffold = murcko_scaffold(mol)
    if scaffold is None:
        return ToolReport(
            "scaffold", "[Scaffold] none; rings=0; hetero=0",
            {"scaffold": None, "rings": 0, "hetero": 0})
    smiles = scaffold.canonical_smiles
    rings = scaffold.ring_info.count
    hetero = scaffold.ring_info.hetero_count
    return ToolReport(
        "scaffold", f"[Scaffold] {smiles}; rings={rings}; hetero={hetero}",
        {"scaffold": smiles, "rings": rings, "hetero": hetero})


def brics_fragments(mol: Molecule) -> list[str]:
    """Fragment SMILES after cutting the rule-matched acyclic bonds."""
    ring_bonds = _ring_bond_set(mol)
    cut: set[int] = set()
    for _, smarts in BRICS_RULES:
        for emb in enumerate_matches(mol, _compiled(smarts)):
            a, b = emb[0], emb[1]
            if (min(a, b), max(a, b)) in ring_bonds:
                continue
            for nbr, bidx in mol.adjacency[a]:
                if nbr == b and mol.bonds[bidx].order == 1:
                    cut.add(bidx)
    if not cut:
        return [mol.canonical_smiles]
    hydro = {i: a.hydrogens for i, a in enumerate(mol.atoms)}
    for bidx in cut:
        hydro[mol.bonds[bidx].a] += 1
        hydro[mol.bonds[bidx].b] += 1
    # connected components without the cut bonds
    comp: dict[int, int] = {}
    for root in range(len(mol.atoms)):
        if root in comp:
            continue
        comp[root] = root
        stack = [root]
        while stack:
            u = stack.pop()
            for v, bidx in mol.adjacency[u]:
                if bidx in cut or v in comp:
                    continue
                comp[v] = root
                stack.append(v)
    frags: list[str] = []
    for root in sorted(set(comp.values())):
        members = sorted(i for i in comp if comp[i] == root)
        index = {old: new for new, old in enumerate(members)}
        atoms = [
            (mol.atoms[i].symbol, mol.atoms[i].charge, hydro[i],
             mol.atoms[i].aromatic)
            for i in members
        ]
        bonds = [
            (index[b.a], index[b.b], b.order)
            for bidx, b in enumerate(mol.bonds)
            if bidx not in cut and b.a in index and b.b in index
        ]
        frags.append(from_graph(atoms, bonds, label="<fragment>").canonical_smiles)
    return frags


def tool_brics(mol: Molecule) -> ToolReport:
    """Rule-based fragmentation report."""
    frags = brics_fragments(mol)
    text = f"frag_count={len(frags)}; frags=[{', '.join(frags)}]"
    return ToolReport("brics", text, {"fragments": frags})


def tool_rings(mol: Molecule) -> ToolReport:
    """Ring census: totals plus one size/flag token per ring."""
    info = mol.ring_info
    total = info.count
    arom = info.aromatic_count
    hetero = info.hetero_count
    tokens: list[str] = []
    for ri, ring in enumerate(info.rings):
        tok = str(len(ring))
        if info.aromatic_flags[ri]:
            tok += "A"
        if info.hetero_flags[ri]:
            tok += "H"
        tokens.append(tok)
    tokens.sort(key=lambda t: (-int("".join(ch for ch in t if ch.isdigit())), t))
    text = f"total={total}; arom={arom}; hetero={hetero}; [{','.join(tokens)}]"
    return ToolReport(
        "rings", text,
        {"total": total, "aromatic": arom, "hetero": hetero, "tokens": tokens})


def tool_sites(mol: Molecule) -> ToolReport:
    """Reactive site types present, in table order."""
    present = [
        name for name, smarts in SITE_TABLE if _distinct_matches(mol, smarts)
    ]
    text = f"count={len(present)}; sites=[{', '.join(present)}]"
    return ToolReport("sites", text, {"sites": present})


def site_counts(mol: Molecule) -> tuple[int, ...]:
    """Per-type distinct match counts (policy features)."""
    return tuple(
        len(_distinct_matches(mol, smarts)) for _, smarts in SITE_TABLE
    )


def all_tool_reports(mol: Molecule) -> dict[str, str]:
    """The six tool texts keyed by wire name."""
    return {
        "weight": tool_weight(mol).text,
        "funcgroups": tool_funcgroups(mol).text,
        "scaffold": tool_scaffold(mol).text,
        "brics": tool_brics(mol).text,
        "rings": tool_rings(mol).text,
        "sites": tool_sites(mol).text,
    }
