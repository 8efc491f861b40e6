"""SMILES reader producing an unperceived raw graph.

The reader covers the dialect used throughout this package: organic
subset atoms, bracket atoms with charge and explicit hydrogens,
branches, ring closures (including %nn), dot-separated components and
aromatic lowercase symbols.  Stereo markers (/ \\ @) and isotopes are
accepted and discarded.  Atom maps are accepted only when the caller
asks for them (reaction product templates).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from rxnlead.errors import RingClosureError, SmilesSyntaxError

# Bond codes used before perception.  None marks an unannotated bond.
B_SINGLE = 1
B_DOUBLE = 2
B_TRIPLE = 3
B_AROM = 4

_BOND_CODE = {"-": B_SINGLE, "=": B_DOUBLE, "#": B_TRIPLE, ":": B_AROM,
              "/": B_SINGLE, "\\": B_SINGLE}

_TWO_LETTER_BARE = ("Cl", "Br")
_ONE_LETTER_BARE = frozenset("BCNOPSFI")
_AROMATIC_BARE = frozenset("bcnops")

_BRACKET_RE = re.compile(
    r"""^(?P<isotope>\d+)?
        (?P<symbol>se|as|[A-Z][a-z]?|[bcnops])
        (?P<chiral>@{1,2})?
        (?P<hcount>H\d*)?
        (?P<charge>\+{1,3}|-{1,3}|\+\d|-\d)?
        (?::(?P<map>\d+))?$""",
    re.VERBOSE,
)


@dataclass
class RawAtom:
    """Atom as read from the text, before perception.

    ``charge`` and ``explicit_h`` stay None when the text did not spell
    them out; molecule perception treats a bracket atom's missing H
    count as zero, while reaction product templates treat it as
    "recompute".
    """

    symbol: str
    aromatic: bool
    charge: int | None = None
    explicit_h: int | None = None
    map_label: int | None = None
    bracket: bool = False


@dataclass
class RawGraph:
    atoms: list[RawAtom] = field(default_factory=list)
    bonds: list[tuple[int, int, int | None]] = field(default_factory=list)


def _parse_bracket(body: str, text: str, allow_maps: bool) -> RawAtom:
    m = _BRACKET_RE.match(body)
    if m is None:
        raise SmilesSyntaxError(f"bad bracket atom [{body}] in {text!r}")
    sym = m.group("symbol")
    aromatic = sym[0].islower()
    symbol = sym.capitalize() if aromatic else sym
    hcount = m.group("hcount")
    if hcount is None:
        h = None
    elif hcount == "H":
        h = 1
    else:
        h = int(hcount[1:])
    charge_tok = m.group("charge")
    if charge_tok is None:
        charge = None
    elif charge_tok[-1].isdigit():
        charge = int(charge_tok[1:]) * (1 if charge_tok[0] == "+" else -1)
    else:
        charge = len(charge_tok) * (1 if charge_tok[0] == "+" else -1)
    map_label: int | None = None
    if m.group("map") is not None:
        if not allow_maps:
            raise SmilesSyntaxError(f"atom map not allowed here: [{body}]")
        map_label = int(m.group("map"))
    return RawAtom(symbol, aromatic, charge, h, map_label, bracket=True)


def parse_raw(text: str, allow_maps: bool = False) -> RawGraph:
    """Tokenize SMILES text into a raw graph.

    Raises:
        SmilesSyntaxError: on malformed text.
        RingClosureError: on unmatched or inconsistent ring digits.
    """
    if not text or text != text.strip():
        raise SmilesSyntaxError(f"empty or padded SMILES: {text!r}")
    g = RawGraph()
    prev: int | None = None
    pending_bond: int | None = None
    bond_written = False
    stack: list[int | None] = []
    branch_marks: list[int] = []
    # ring digit -> (atom index, bond code written at the opening)
    open_rings: dict[int, tuple[int, int | None]] = {}

    def add_atom(atom: RawAtom) -> None:
        nonlocal prev, pending_bond, bond_written
        g.atoms.append(atom)
        idx = len(g.atoms) - 1
        if prev is not None:
            g.bonds.append((prev, idx, pending_bond))
        elif bond_written:
            raise SmilesSyntaxError(f"bond with no preceding atom in {text!r}")
        prev = idx
        pending_bond = None
        bond_written = False

    def close_ring(digit: int) -> None:
        nonlocal pending_bond, bond_written
        if prev is None:
            raise RingClosureError(f"ring digit before any atom in {text!r}")
        if digit in open_rings:
            other, other_code = open_rings.pop(digit)
            if other == prev:
                raise RingClosureError(f"ring bond to self in {text!r}")
            code = pending_bond
            if code is not None and other_code is not None and code != other_code:
                raise RingClosureError(
                    f"ring closure {digit} bond mismatch in {text!r}")
            final = code if code is not None else other_code
            if any((a, b) == (other, prev) or (a, b) == (prev, other)
                   for a, b, _ in g.bonds):
                raise RingClosureError(f"duplicate ring bond in {text!r}")
            g.bonds.append((other, prev, final))
        else:
            open_rings[digit] = (prev, pending_bond)
        pending_bond = None
        bond_written = False

    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "[":
            j = text.find("]", i)
            if j < 0:
                raise SmilesSyntaxError(f"unclosed bracket in {text!r}")
            add_atom(_parse_bracket(text[i + 1 : j], text, allow_maps))
            i = j + 1
        elif text.startswith(_TWO_LETTER_BARE[0], i) or text.startswith(
                _TWO_LETTER_BARE[1], i):
            add_atom(RawAtom(text[i : i + 2], False))
            i += 2
        elif ch in _ONE_LETTER_BARE:
            add_atom(RawAtom(ch, False))
            i += 1
        elif ch in _AROMATIC_BARE:
            add_atom(RawAtom(ch.upper(), True))
            i += 1
        elif ch in _BOND_CODE:
            if pending_bond is not None:
                raise SmilesSyntaxError(f"two bond symbols in a row in {text!r}")
            pending_bond = _BOND_CODE[ch]
            bond_written = True
            i += 1
        elif ch.isdigit():
            close_ring(int(ch))
            i += 1
        elif ch == "%":
            if i + 2 >= n or not text[i + 1 : i + 3].isdigit():
                raise SmilesSyntaxError(f"bad %nn ring closure in {text!r}")
            close_ring(int(text[i + 1 : i + 3]))
            i += 3
        elif ch == "(":
            if prev is None:
                raise SmilesSyntaxError(f"branch before any atom in {text!r}")
            stack.append(prev)
            branch_marks.append(len(g.atoms))
            i += 1
        elif ch == ")":
            if not stack:
                raise SmilesSyntaxError(f"unbalanced ')' in {text!r}")
            if pending_bond is not None or bond_written:
                raise SmilesSyntaxError(f"dangling bond before ')' in {text!r}")
            if branch_marks.pop() == len(g.atoms):
                raise SmilesSyntaxError(f"empty branch in {text!r}")
            prev = stack.pop()
            i += 1
        elif ch == ".":
            if pending_bond is not None:
                raise SmilesSyntaxError(f"bond before '.' in {text!r}")
            if prev is None:
                raise SmilesSyntaxError(f"empty component in {text!r}")
            prev = None
            i += 1
        else:
            raise SmilesSyntaxError(f"unexpected character {ch!r} in {text!r}")

    if stack:
        raise SmilesSyntaxError(f"unbalanced '(' in {text!r}")
    if pending_bond is not None or bond_written:
        raise SmilesSyntaxError(f"dangling bond at end of {text!r}")
    if open_rings:
        raise RingClosureError(
            f"unmatched ring digits {sorted(open_rings)} in {text!r}")
    if not g.atoms:
        raise SmilesSyntaxError(f"no atoms in {text!r}")
    if prev is None:
        raise SmilesSyntaxError(f"empty component in {text!r}")
    return g
