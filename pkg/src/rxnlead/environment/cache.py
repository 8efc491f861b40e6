"""SMILES-keyed action-space cache with append-only persistence.

Entries are scoped to a (task id, template-library digest) pair
recorded in the file header; loading a file written under a different
scope discards its entries so stale caches cannot leak across library
edits or tasks. Within a scope a key is written once and never
overwritten.
"""

from __future__ import annotations

import json
import logging
import os

from rxnlead.environment.actions import STOP, ActionSpace, ReactionAction
from rxnlead.errors import CacheCorruptionError

log = logging.getLogger("rxnlead.environment")


def _space_to_record(smiles: str, space: ActionSpace) -> dict:
    return {
        "smiles": smiles,
        "terminal": space.is_terminal,
        "reactions": [
            {"template_id": a.template_id, "blocks": list(a.blocks),
             "product": a.product}
            for a in space.reactions
        ],
    }


def _space_from_record(record: dict) -> tuple[str, ActionSpace]:
    try:
        smiles = record["smiles"]
        terminal = record["terminal"]
        reactions = tuple(
            ReactionAction(entry["template_id"], tuple(entry["blocks"]),
                           entry["product"])
            for entry in record["reactions"]
        )
    except (KeyError, TypeError) as exc:
        raise CacheCorruptionError(f"malformed cache record: {exc}") from exc
    if terminal:
        if reactions:
            raise CacheCorruptionError(
                f"terminal cache record for {smiles!r} lists reactions")
        return smiles, ActionSpace(())
    return smiles, ActionSpace(reactions + (STOP,))


class ReactionCache:
    """In-memory action-space map with optional on-disk journal."""

    def __init__(self, task_id: str, library_digest: str,
                 path: str | os.PathLike | None = None) -> None:
        self.task_id = task_id
        self.library_digest = library_digest
        self.hits = 0
        self.misses = 0
        self._entries: dict[str, ActionSpace] = {}
        self._path = os.fspath(path) if path is not None else None
        self._fh = None
        if self._path is not None:
            self._open_journal()

    # --- persistence ---

    def _header(self) -> dict:
        return {"task_id": self.task_id, "library_digest": self.library_digest}

    def _open_journal(self) -> None:
        if os.path.exists(self._path) and os.path.getsize(self._path) > 0:
            kept = self._load_existing()
            if not kept:
                log.warning(
                    "cache file %s was written under a different scope; "
                    "starting fresh", self._path)
                self._write_header()
        else:
            self._write_header()
        self._fh = open(self._path, "a", encoding="utf-8")

    def _write_header(self) -> None:
        with open(self._path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(self._header(), sort_keys=True) + "\n")

    def _load_existing(self) -> bool:
        with open(self._path, encoding="utf-8") as fh:
            try:
                header = json.loads(fh.readline())
            except json.JSONDecodeError as exc:
                raise CacheCorruptionError(
                    f"cache header in {self._path} is not valid JSON") from exc
            if header != self._header():
                return False
            for line in fh:
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CacheCorruptionError(
                        f"malformed cache line in {self._path}") from exc
                smiles, space = _space_from_record(record)
                self._entries.setdefault(smiles, space)
        return True

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self) -> "ReactionCache":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # --- lookup and store ---

    def lookup(self, smiles: str) -> ActionSpace | None:
        """Fetch the stored space for a canonical SMILES, counting the
        hit or miss."""
        space = self._entries.get(smiles)
        if space is None:
            self.misses += 1
        else:
            self.hits += 1
        return space

    def store(self, smiles: str, space: ActionSpace) -> ActionSpace:
        """First write wins; returns the stored space either way."""
        existing = self._entries.get(smiles)
        if existing is not None:
            return existing
        self._entries[smiles] = space
        if self._fh is not None:
            self._fh.write(
                json.dumps(_space_to_record(smiles, space), sort_keys=True)
                + "\n")
            self._fh.flush()
        return space

    def __len__(self) -> int:
        return len(self._entries)

    def stats(self) -> dict:
        return {
            "task_id": self.task_id,
            "library_digest": self.library_digest,
            "entries": len(self._entries),
            "hits": self.hits,
            "misses": self.misses,
            "path": self._path,
        }
