"""Replay-verified synthesis pathway export.

A pathway record names the lead, every templated step (template id and
name, building blocks, product), and the terminal score. Export
re-executes each step through the template engine and refuses to write
anything that does not replay exactly, so a corrupted cache or a
tampered log can never produce a plausible-looking pathway file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from rxnlead.errors import ReplayMismatchError, RxnleadError
from rxnlead.molgraph import mol_from_smiles
from rxnlead.reactions import TemplateLibrary, apply_template, assemble_reactants

PathwayStep = tuple[str, tuple[str, ...], str]


@dataclass(frozen=True)
class PathwayRecord:
    lead: str
    steps: tuple[PathwayStep, ...]
    final: str
    score: float

    def to_wire(self, library: TemplateLibrary) -> dict:
        return {
            "lead": self.lead,
            "steps": [
                {
                    "template_id": tid,
                    "template_name": library.by_id[tid].name,
                    "building_blocks": list(blocks),
                    "product": product,
                }
                for tid, blocks, product in self.steps
            ],
            "final": self.final,
            "score": self.score,
        }


def replay_pathway(library: TemplateLibrary, lead: str,
                   steps: tuple[PathwayStep, ...]) -> str:
    """Re-run every step; returns the terminal canonical SMILES.

    Raises:
        ReplayMismatchError: a step fails to execute or its recorded
            product differs from the recomputed one.
    """
    try:
        current = mol_from_smiles(lead)
    except RxnleadError as exc:
        raise ReplayMismatchError(f"lead {lead!r} does not parse") from exc
    for i, (tid, blocks, product) in enumerate(steps):
        template = library.get(tid)
        if template is None:
            raise ReplayMismatchError(
                f"step {i}: unknown template {tid!r}")
        try:
            block_mols = [mol_from_smiles(b) for b in blocks]
        except RxnleadError as exc:
            raise ReplayMismatchError(
                f"step {i}: building block does not parse: {exc}") from exc
        try:
            reactants = assemble_reactants(template, current, block_mols)
        except RxnleadError as exc:
            raise ReplayMismatchError(
                f"step {i}: block count does not fit {tid}") from exc
        if reactants is None:
            raise ReplayMismatchError(
                f"step {i}: molecule fits no slot of {tid}")
        try:
            result = apply_template(template, reactants)
        except RxnleadError as exc:
            raise ReplayMismatchError(
                f"step {i}: template {tid} failed: {exc}") from exc
        if result.canonical_smiles != product:
            raise ReplayMismatchError(
                f"step {i}: recorded product {product!r} but replay "
                f"gives {result.canonical_smiles!r}")
        current = result
    return current.canonical_smiles


def verify_record(library: TemplateLibrary, record: PathwayRecord) -> None:
    final = replay_pathway(library, record.lead, record.steps)
    if final != record.final:
        raise ReplayMismatchError(
            f"pathway for {record.lead!r} ends at {final!r}, "
            f"record claims {record.final!r}")


def export_pathways(library: TemplateLibrary,
                    records: list[PathwayRecord],
                    path: str | Path) -> None:
    """Write one JSON line per pathway, best score first; every record
    is replay-verified before anything is written."""
    for record in records:
        verify_record(library, record)
    ordered = sorted(records, key=lambda r: (-r.score, r.final, r.lead))
    with open(path, "w", encoding="utf-8") as fh:
        for record in ordered:
            fh.write(json.dumps(record.to_wire(library), sort_keys=True)
                     + "\n")


def load_pathways(path: str | Path) -> list[PathwayRecord]:
    """Read a pathway file back into records (no verification)."""
    records = []
    for lineno, line in enumerate(
            Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            steps = tuple(
                (s["template_id"], tuple(s["building_blocks"]), s["product"])
                for s in raw["steps"])
            records.append(PathwayRecord(
                raw["lead"], steps, raw["final"], raw["score"]))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ReplayMismatchError(
                f"{path}:{lineno}: malformed pathway record: {exc}") from exc
    return records
