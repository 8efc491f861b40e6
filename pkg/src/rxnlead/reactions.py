"""Reaction templates: records, library loading, template application.

A template pairs per-slot reactant patterns with a mapped product
graph.  Application enumerates per-slot embeddings in canonical order,
walks their cross product lexicographically in slot order and returns
the first combination whose assembled product survives the full
perception pipeline.  That "first valid product" rule is what makes
transitions exactly reproducible across runs and processes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from itertools import product as iter_product
from pathlib import Path

from rxnlead.errors import (
    NoEmbeddingError,
    NoValidProductError,
    ParameterMismatchError,
    RxnleadError,
    TemplateFormatError,
)
from rxnlead.molgraph.mol import AROMATIC, Molecule, from_graph
from rxnlead.molgraph.parse import RawAtom, parse_raw
from rxnlead.pattern import Pattern, enumerate_matches, has_match, parse_smarts

_BOND_H_VALUE = {1: 1, 2: 2, 3: 3, AROMATIC: 1}


@dataclass(frozen=True)
class ReactionTemplate:
    """One reaction template with compiled patterns."""

    id: str
    name: str
    arity: int
    reactant_smarts: tuple[str, ...]
    product_smarts: str
    input_slot: int | None
    patterns: tuple[Pattern, ...]
    product_atoms: tuple[RawAtom, ...]
    product_bonds: tuple[tuple[int, int, int | None], ...]

    def to_record(self) -> dict:
        rec = {
            "id": self.id,
            "name": self.name,
            "arity": self.arity,
            "reactant_smarts": list(self.reactant_smarts),
            "product_smarts": self.product_smarts,
        }
        if self.input_slot is not None:
            rec["input_slot"] = self.input_slot
        return rec


def compile_template(record: dict) -> ReactionTemplate:
    """Validate and compile one template record.

    Raises:
        TemplateFormatError: on any structural problem, including
            pattern compilation failures and map-label mismatches.
    """
    try:
        tid = record["id"]
        name = record.get("name", tid)
        arity = record["arity"]
        reactant_smarts = list(record["reactant_smarts"])
        product_smarts = record["product_smarts"]
    except (KeyError, TypeError) as exc:
        raise TemplateFormatError(f"template record missing field: {exc}") from exc
    input_slot = record.get("input_slot")
    if not isinstance(tid, str) or not tid:
        raise TemplateFormatError("template id must be a non-empty string")
    if not isinstance(arity, int) or arity < 1:
        raise TemplateFormatError(f"template {tid}: arity must be >= 1")
    if len(reactant_smarts) != arity:
        raise TemplateFormatError(
            f"template {tid}: {len(reactant_smarts)} reactant patterns "
            f"for arity {arity}")
    if input_slot is not None and not (0 <= input_slot < arity):
        raise TemplateFormatError(
            f"template {tid}: input_slot {input_slot} out of range")

    try:
        patterns = tuple(parse_smarts(s) for s in reactant_smarts)
    except RxnleadError as exc:
        raise TemplateFormatError(f"template {tid}: bad reactant pattern: {exc}") from exc
    try:
        graph = parse_raw(product_smarts, allow_maps=True)
    except RxnleadError as exc:
        raise TemplateFormatError(f"template {tid}: bad product side: {exc}") from exc

    # map labels: unique on each side; product labels must exist on the
    # reactant side
    reactant_labels: dict[int, tuple[int, int]] = {}
    for slot, pat in enumerate(patterns):
        for p_idx, query in enumerate(pat.atoms):
            if query.map_label is None:
                continue
            if query.map_label in reactant_labels:
                raise TemplateFormatError(
                    f"template {tid}: duplicate map label {query.map_label}")
            reactant_labels[query.map_label] = (slot, p_idx)
    seen_product: set[int] = set()
    for atom in graph.atoms:
        if atom.map_label is None:
            continue
        if atom.map_label in seen_product:
            raise TemplateFormatError(
                f"template {tid}: duplicate product map label {atom.map_label}")
        seen_product.add(atom.map_label)
        if atom.map_label not in reactant_labels:
            raise TemplateFormatError(
                f"template {tid}: product map label {atom.map_label} "
                "missing from reactant patterns")

    return ReactionTemplate(
        id=tid,
        name=name,
        arity=arity,
        reactant_smarts=tuple(reactant_smarts),
        product_smarts=product_smarts,
        input_slot=input_slot,
        patterns=patterns,
        product_atoms=tuple(graph.atoms),
        product_bonds=tuple(graph.bonds),
    )


class TemplateLibrary:
    """Ordered collection of templates with stable identity digest."""

    def __init__(self, templates: list[ReactionTemplate]) -> None:
        self.templates = list(templates)
        self.by_id: dict[str, ReactionTemplate] = {}
        for t in self.templates:
            if t.id in self.by_id:
                raise TemplateFormatError(f"duplicate template id {t.id!r}")
            self.by_id[t.id] = t

    def __len__(self) -> int:
        return len(self.templates)

    def __iter__(self):
        return iter(self.templates)

    def get(self, tid: str) -> ReactionTemplate | None:
        return self.by_id.get(tid)

    @property
    def digest(self) -> str:
        """SHA-256 over the serialized records, order included."""
        payload = json.dumps(
            [t.to_record() for t in self.templates],
            sort_keys=True, separators=(",", ":"),
        ).encode()
        return hashlib.sha256(payload).hexdigest()

    @classmethod
    def from_records(cls, records: list[dict]) -> TemplateLibrary:
        return cls([compile_template(r) for r in records])

    @classmethod
    def load(cls, path: str | Path) -> TemplateLibrary:
        """Read a JSONL template file; blank lines and # comments skipped."""
        records = []
        for lineno, line in enumerate(
                Path(path).read_text().splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            try:
                records.append(json.loads(stripped))
            except json.JSONDecodeError as exc:
                raise TemplateFormatError(
                    f"{path}:{lineno}: bad JSON: {exc}") from exc
        return cls.from_records(records)


def default_library() -> TemplateLibrary:
    """The built-in template library shipped with the package."""
    return TemplateLibrary.load(
        Path(__file__).parent / "data" / "templates.jsonl")


def match_templates(mol: Molecule, library: TemplateLibrary) -> list[ReactionTemplate]:
    """Templates whose input slot matches the molecule, library order."""
    out = []
    for t in library:
        if t.input_slot is not None:
            if has_match(mol, t.patterns[t.input_slot]):
                out.append(t)
        elif any(has_match(mol, p) for p in t.patterns):
            out.append(t)
    return out


def resolve_input_slot(template: ReactionTemplate, mol: Molecule) -> int | None:
    """Slot the input molecule occupies, or None when nothing matches."""
    if template.input_slot is not None:
        if has_match(mol, template.patterns[template.input_slot]):
            return template.input_slot
        return None
    for slot, pat in enumerate(template.patterns):
        if has_match(mol, pat):
            return slot
    return None


def assemble_reactants(
    template: ReactionTemplate,
    input_mol: Molecule,
    blocks: list[Molecule],
) -> list[Molecule] | None:
    """Place the input molecule at its slot and blocks at the rest.

    Returns None when the input matches no slot; raises on a block
    count mismatch.
    """
    slot = resolve_input_slot(template, input_mol)
    if slot is None:
        return None
    if len(blocks) != template.arity - 1:
        raise TemplateFormatError(
            f"template {template.id}: expected {template.arity - 1} "
            f"building blocks, got {len(blocks)}")
    reactants: list[Molecule] = []
    it = iter(blocks)
    for s in range(template.arity):
        reactants.append(input_mol if s == slot else next(it))
    return reactants


def _instantiate(
    template: ReactionTemplate,
    reactants: list[Molecule],
    embeddings: tuple[tuple[int, ...], ...],
) -> Molecule | None:
    """Build one candidate product; None when perception rejects it."""
    label_to_reactant: dict[int, tuple[int, int]] = {}
    matched: list[set[int]] = [set() for _ in reactants]
    for slot, pat in enumerate(template.patterns):
        emb = embeddings[slot]
        matched[slot].update(emb)
        for p_idx, query in enumerate(pat.atoms):
            if query.map_label is not None:
                label_to_reactant[query.map_label] = (slot, emb[p_idx])

    new_atoms: list[tuple[str, int, int | None, bool]] = []
    new_bonds: list[tuple[int, int, int | None]] = []
    # where each surviving reactant atom lands in the product
    landed: dict[tuple[int, int], int] = {}
    mapped_pairs: set[tuple[int, int]] = set()

    for t_idx, pa in enumerate(template.product_atoms):
        if pa.map_label is not None:
            slot, r_idx = label_to_reactant[pa.map_label]
            src = reactants[slot].atoms[r_idx]
            charge = pa.charge if pa.charge is not None else src.charge
            landed[(slot, r_idx)] = len(new_atoms)
            mapped_pairs.add((slot, r_idx))
            new_atoms.append((pa.symbol, charge, pa.explicit_h, pa.aromatic))
        else:
            new_atoms.append((pa.symbol, pa.charge if pa.charge is not None else 0,
                              pa.explicit_h, pa.aromatic))
    # product template atoms occupy indices 0..len-1 of new_atoms
    for a, b, code in template.product_bonds:
        new_bonds.append((a, b, code))

    # deleted: matched reactant atoms that carry no map label
    deleted: list[set[int]] = [
        matched[slot] - {r for s, r in mapped_pairs if s == slot}
        for slot in range(len(reactants))
    ]

    for slot, mol in enumerate(reactants):
        dead = deleted[slot]
        # connected components over surviving atoms
        survivors = [i for i in range(len(mol.atoms)) if i not in dead]
        comp: dict[int, int] = {}
        for root in survivors:
            if root in comp:
                continue
            stamp = root
            stack = [root]
            comp[root] = stamp
            while stack:
                u = stack.pop()
                for v in mol.neighbors(u):
                    if v in dead or v in comp:
                        continue
                    comp[v] = stamp
                    stack.append(v)
        keep_stamps = {comp[r] for s, r in mapped_pairs if s == slot}
        for i in survivors:
            if (slot, i) in landed:
                continue
            if comp[i] not in keep_stamps:
                continue
            atom = mol.atoms[i]
            lost = 0
            for j, bidx in mol.adjacency[i]:
                if j in dead:
                    lost += _BOND_H_VALUE[mol.bonds[bidx].order]
            landed[(slot, i)] = len(new_atoms)
            new_atoms.append((atom.symbol, atom.charge,
                              atom.hydrogens + lost, atom.aromatic))
        # carried bonds: both endpoints landed, and not already drawn by
        # the product template (mapped-mapped bonds the template redraws)
        drawn: set[tuple[int, int]] = set()
        for a, b, _ in template.product_bonds:
            drawn.add((min(a, b), max(a, b)))
        for bond in mol.bonds:
            key_a = (slot, bond.a)
            key_b = (slot, bond.b)
            if key_a not in landed or key_b not in landed:
                continue
            na, nb = landed[key_a], landed[key_b]
            if (min(na, nb), max(na, nb)) in drawn:
                continue
            # avoid duplicating a bond already carried
            if any((x, y) == (na, nb) or (x, y) == (nb, na)
                   for x, y, _ in new_bonds):
                continue
            new_bonds.append((na, nb, bond.order))

    try:
        built = from_graph(new_atoms, new_bonds,
                           label=f"product of {template.id}")
    except RxnleadError:
        return None
    return built


def apply_template(
    template: ReactionTemplate,
    reactants: list[Molecule],
) -> Molecule:
    """Apply a template to ordered reactants.

    Returns the first valid canonicalized product over the lexicographic
    cross product of per-slot embeddings.

    Raises:
        ParameterMismatchError: wrong reactant count.
        NoEmbeddingError: some reactant does not match its slot pattern.
        NoValidProductError: all embedding combinations failed.
    """
    if len(reactants) != template.arity:
        raise ParameterMismatchError(
            f"template {template.id}: {len(reactants)} reactants for "
            f"arity {template.arity}")
    per_slot: list[list[tuple[int, ...]]] = []
    for slot, (pat, mol) in enumerate(zip(template.patterns, reactants)):
        embs = enumerate_matches(mol, pat)
        if not embs:
            raise NoEmbeddingError(
                f"reactant {slot} ({mol.canonical_smiles}) does not match "
                f"slot pattern {pat.smarts!r} of template {template.id}")
        per_slot.append(embs)
    for combo in iter_product(*per_slot):
        built = _instantiate(template, reactants, combo)
        if built is not None:
            return built
    raise NoValidProductError(
        f"template {template.id}: no embedding combination yields a "
        "valid product")
