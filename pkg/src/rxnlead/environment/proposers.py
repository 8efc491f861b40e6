"""Reaction proposers and their wire protocol.

A proposer receives the current molecule, the objective text, the
matched template descriptors and the six tool reports, and answers
with up to k_max (template, building blocks) proposals. Two
implementations ship: a deterministic heuristic working over a local
building-block file, and a remote client speaking JSON over HTTP.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import requests

from rxnlead.errors import (
    ProposerProtocolError,
    ProposerTimeoutError,
    ProposerUnavailableError,
    RxnleadError,
)
from rxnlead.fingerprints import morgan_fingerprint, tanimoto
from rxnlead.molgraph import Molecule, mol_from_smiles
from rxnlead.pattern import Pattern, has_match, parse_smarts
from rxnlead.reactions import ReactionTemplate

log = logging.getLogger("rxnlead.environment")

DEFAULT_K_MAX = 10
MIN_BLOCK_HEAVY_ATOMS = 2


@dataclass(frozen=True)
class TemplateDescriptor:
    """Template summary carried in proposer requests.

    input_slot travels with the descriptor for local proposers but is
    not part of the wire format.
    """

    id: str
    name: str
    arity: int
    reactant_smarts: tuple[str, ...]
    input_slot: int | None

    @classmethod
    def from_template(cls, t: ReactionTemplate) -> "TemplateDescriptor":
        return cls(t.id, t.name, t.arity, t.reactant_smarts, t.input_slot)

    def to_wire(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "arity": self.arity,
            "reactant_smarts": list(self.reactant_smarts),
        }


@dataclass(frozen=True)
class ProposerRequest:
    task_id: str
    smiles: str
    objective: str
    templates: tuple[TemplateDescriptor, ...]
    tools: dict[str, str]

    def to_wire(self) -> dict:
        return {
            "task_id": self.task_id,
            "smiles": self.smiles,
            "objective": self.objective,
            "templates": [t.to_wire() for t in self.templates],
            "tools": dict(self.tools),
        }


@dataclass(frozen=True)
class Proposal:
    template_id: str
    blocks: tuple[str, ...]


@dataclass(frozen=True)
class ProposerResponse:
    proposals: tuple[Proposal, ...]

    def to_wire(self) -> dict:
        return {
            "proposals": [
                {"template_id": p.template_id,
                 "building_blocks": list(p.blocks)}
                for p in self.proposals
            ]
        }


def _block_ok(smiles: str) -> Molecule | None:
    """Parse one building block; None when it must be dropped."""
    try:
        mol = mol_from_smiles(smiles)
    except RxnleadError:
        return None
    if mol.heavy_atom_count < MIN_BLOCK_HEAVY_ATOMS:
        return None
    return mol


def validate_response(request: ProposerRequest, raw: dict,
                      k_max: int = DEFAULT_K_MAX) -> ProposerResponse:
    """Validate a wire response, dropping bad entries with a logged reason.

    Raises:
        ProposerProtocolError: the overall shape is not a proposal list.
    """
    if not isinstance(raw, dict) or not isinstance(raw.get("proposals"), list):
        raise ProposerProtocolError("response must carry a proposals list")
    by_id = {t.id: t for t in request.templates}
    kept: list[Proposal] = []
    for entry in raw["proposals"]:
        if len(kept) == k_max:
            break
        if not isinstance(entry, dict):
            log.info("proposal dropped: entry is not an object")
            continue
        tid = entry.get("template_id")
        descriptor = by_id.get(tid)
        if descriptor is None:
            log.info("proposal dropped: unknown template %r", tid)
            continue
        blocks = entry.get("building_blocks", [])
        if not isinstance(blocks, list) or not all(
                isinstance(b, str) for b in blocks):
            log.info("proposal dropped (%s): malformed building blocks", tid)
            continue
        if len(blocks) != descriptor.arity - 1:
            log.info("proposal dropped (%s): %d blocks for arity %d",
                     tid, len(blocks), descriptor.arity)
            continue
        canonical: list[str] = []
        for b in blocks:
            mol = _block_ok(b)
            if mol is None:
                log.info("proposal dropped (%s): invalid or single-atom "
                         "building block %r", tid, b)
                canonical = None
                break
            canonical.append(mol.canonical_smiles)
        if canonical is None:
            continue
        kept.append(Proposal(tid, tuple(canonical)))
    return ProposerResponse(tuple(kept))


_TARGET_RE = re.compile(r"target=(\S+)")


def objective_target(objective: str) -> Molecule | None:
    """Extract a ``target=<smiles>`` fragment from objective text."""
    m = _TARGET_RE.search(objective)
    if m is None:
        return None
    try:
        return mol_from_smiles(m.group(1))
    except RxnleadError:
        return None


class HeuristicProposer:
    """Deterministic rule-based proposer over a local block library.

    Ranking: templates are served round-robin in request order so the
    response covers distinct templates before repeating one (and a
    repeated template always carries different blocks). Within a
    template, block combinations are ordered by total heavy-atom count
    (smaller first), then by descending similarity to the objective
    target when the objective text carries a ``target=<smiles>``
    fragment, then lexicographically.
    """

    PER_SLOT_CAP = 50

    def __init__(self, block_smiles: Iterable[str],
                 k_max: int = DEFAULT_K_MAX) -> None:
        self.k_max = k_max
        self.blocks: list[Molecule] = []
        seen: set[str] = set()
        for text in block_smiles:
            mol = _block_ok(text)
            if mol is None:
                log.info("building block %r skipped at load", text)
                continue
            if mol.canonical_smiles in seen:
                continue
            seen.add(mol.canonical_smiles)
            self.blocks.append(mol)
        self._patterns: dict[str, Pattern] = {}

    def _pattern(self, smarts: str) -> Pattern:
        pat = self._patterns.get(smarts)
        if pat is None:
            pat = parse_smarts(smarts)
            self._patterns[smarts] = pat
        return pat

    def _input_slot(self, descriptor: TemplateDescriptor,
                    mol: Molecule) -> int | None:
        if descriptor.input_slot is not None:
            return descriptor.input_slot
        for slot, smarts in enumerate(descriptor.reactant_smarts):
            if has_match(mol, self._pattern(smarts)):
                return slot
        return None

    def _combos(self, descriptor: TemplateDescriptor, mol: Molecule,
                target: Molecule | None) -> list[tuple[str, ...]]:
        """Ranked building-block combinations for one template."""
        slot = self._input_slot(descriptor, mol)
        if slot is None:
            return []
        open_slots = [s for s in range(descriptor.arity) if s != slot]
        if not open_slots:
            return [()]
        target_fp = morgan_fingerprint(target) if target is not None else None
        per_slot: list[list[Molecule]] = []
        for s in open_slots:
            pat = self._pattern(descriptor.reactant_smarts[s])
            fits = [b for b in self.blocks if has_match(b, pat)]
            fits.sort(key=lambda b: (
                b.heavy_atom_count,
                -tanimoto(morgan_fingerprint(b), target_fp)
                if target_fp is not None else 0.0,
                b.canonical_smiles,
            ))
            if not fits:
                return []
            per_slot.append(fits[: self.PER_SLOT_CAP])

        combos: list[tuple[str, ...]] = []
        if len(per_slot) == 1:
            combos = [(b.canonical_smiles,) for b in per_slot[0]]
        else:
            pool = []
            for choice in _product(per_slot):
                pool.append(choice)
            pool.sort(key=lambda ms: (
                sum(m.heavy_atom_count for m in ms),
                tuple(m.canonical_smiles for m in ms),
            ))
            combos = [tuple(m.canonical_smiles for m in ms) for ms in pool]
        return combos

    def propose(self, request: ProposerRequest) -> ProposerResponse:
        mol = mol_from_smiles(request.smiles)
        target = objective_target(request.objective)
        queues = [
            (d.id, self._combos(d, mol, target))
            for d in request.templates
        ]
        cursors = [0] * len(queues)
        kept: list[Proposal] = []
        progressed = True
        while len(kept) < self.k_max and progressed:
            progressed = False
            for qi, (tid, combos) in enumerate(queues):
                if len(kept) == self.k_max:
                    break
                if cursors[qi] >= len(combos):
                    continue
                kept.append(Proposal(tid, combos[cursors[qi]]))
                cursors[qi] += 1
                progressed = True
        return ProposerResponse(tuple(kept))


def _product(per_slot: Sequence[Sequence[Molecule]]):
    if not per_slot:
        yield ()
        return
    head, *rest = per_slot
    for item in head:
        for tail in _product(rest):
            yield (item, *tail)


class RemoteProposer:
    """HTTP JSON client for an external proposal service."""

    def __init__(self, endpoint: str, timeout: float = 60.0,
                 k_max: int = DEFAULT_K_MAX, session=None) -> None:
        self.endpoint = endpoint
        self.timeout = timeout
        self.k_max = k_max
        self._session = session if session is not None else requests.Session()

    def propose(self, request: ProposerRequest) -> ProposerResponse:
        """POST the request and validate the reply.

        Raises:
            ProposerTimeoutError: no reply within the timeout.
            ProposerUnavailableError: connection failure or non-200.
            ProposerProtocolError: reply is not a valid proposal list.
        """
        try:
            resp = self._session.post(
                self.endpoint, json=request.to_wire(), timeout=self.timeout)
        except requests.Timeout as exc:
            raise ProposerTimeoutError(
                f"proposer at {self.endpoint} timed out "
                f"after {self.timeout}s") from exc
        except requests.RequestException as exc:
            raise ProposerUnavailableError(
                f"proposer at {self.endpoint} unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ProposerUnavailableError(
                f"proposer at {self.endpoint} answered "
                f"status {resp.status_code}")
        try:
            raw = resp.json()
        except ValueError as exc:
            raise ProposerProtocolError(
                f"proposer reply is not valid JSON: {exc}") from exc
        return validate_response(request, raw, self.k_max)
