"""Input validation helpers shared by the CLI and the estimator."""

from __future__ import annotations

from pathlib import Path

from rxnlead.errors import ConfigError, RxnleadError
from rxnlead.molgraph import Molecule, mol_from_smiles


def require_file(path, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"{what} file not found: {p}")
    return p


def read_smiles_lines(path, what: str = "SMILES") -> list[str]:
    """Raw SMILES strings from a line-oriented file; blanks and
    # comments skipped. Only the first whitespace-separated token of
    each line is taken, so name columns are tolerated."""
    lines = []
    for line in require_file(path, what).read_text(encoding="utf-8") \
            .splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        lines.append(stripped.split()[0])
    return lines


def read_molecules(path, what: str = "molecule") -> list[Molecule]:
    """Parse a SMILES file strictly; any bad line is a config error."""
    molecules = []
    for lineno, line in enumerate(
            require_file(path, what).read_text(encoding="utf-8")
            .splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        token = stripped.split()[0]
        try:
            molecules.append(mol_from_smiles(token))
        except RxnleadError as exc:
            raise ConfigError(
                f"{path}:{lineno}: bad {what} SMILES {token!r}: {exc}"
            ) from exc
    if not molecules:
        raise ConfigError(f"{what} file {path} holds no molecules")
    return molecules


def parse_molecules(smiles_list, what: str = "molecule") -> list[Molecule]:
    """Parse an in-memory list of SMILES strings strictly."""
    molecules = []
    for i, text in enumerate(smiles_list):
        try:
            molecules.append(mol_from_smiles(text))
        except RxnleadError as exc:
            raise ConfigError(
                f"{what} {i} ({text!r}) does not parse: {exc}") from exc
    if not molecules:
        raise ConfigError(f"no {what}s given")
    return molecules
