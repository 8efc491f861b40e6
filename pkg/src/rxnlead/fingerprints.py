"""Circular substructure fingerprints and Tanimoto similarity.

Atom environments are hashed with a fixed 64-bit mixer so bit sets are
identical across processes and platforms (no dependence on Python's
per-process string hashing).
"""

from __future__ import annotations

from dataclasses import dataclass

from rxnlead.errors import ParameterMismatchError
from rxnlead.molgraph import Molecule

_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def _mix(*values: int) -> int:
    h = 0x6A09E667F3BCC908
    for v in values:
        h = _splitmix64(h ^ _splitmix64(v & _MASK))
    return h


@dataclass(frozen=True, slots=True)
class Fingerprint:
    """Folded bit set plus the parameters that produced it."""

    bits: frozenset[int]
    width: int
    radius: int

    def __len__(self) -> int:
        return len(self.bits)


def morgan_fingerprint(mol: Molecule, radius: int = 2,
                       width: int = 2048) -> Fingerprint:
    """Circular fingerprint over atom environments of radius 0..radius.

    Args:
        mol: perceived molecule.
        radius: maximum environment radius (2 matches the defaults used
            by the diversity metrics).
        width: folded bit width.
    """
    if radius < 0 or width <= 0:
        raise ParameterMismatchError(
            f"radius {radius} and width {width} must be non-negative/positive")
    ids = [
        _mix(
            a.atomic_number,
            a.charge + 16,
            len(mol.adjacency[i]),
            a.hydrogens,
            int(a.aromatic),
            int(a.in_ring),
        )
        for i, a in enumerate(mol.atoms)
    ]
    bits: set[int] = {v % width for v in ids}
    for r in range(1, radius + 1):
        nxt: list[int] = []
        for i in range(len(mol.atoms)):
            env = sorted(
                (mol.bonds[bidx].order, ids[j]) for j, bidx in mol.adjacency[i]
            )
            flat: list[int] = [r, ids[i]]
            for order, nid in env:
                flat.append(order)
                flat.append(nid)
            nxt.append(_mix(*flat))
        ids = nxt
        bits.update(v % width for v in ids)
    return Fingerprint(frozenset(bits), width, radius)


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """Tanimoto similarity |a & b| / |a | b|; 1.0 when both are empty.

    Raises:
        ParameterMismatchError: fingerprints built with different
            width or radius.
    """
    if a.width != b.width or a.radius != b.radius:
        raise ParameterMismatchError(
            f"fingerprint parameters differ: ({a.width},{a.radius}) vs "
            f"({b.width},{b.radius})")
    if not a.bits and not b.bits:
        return 1.0
    inter = len(a.bits & b.bits)
    union = len(a.bits | b.bits)
    return inter / union
