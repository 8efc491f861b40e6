"""SMARTS subset compiler.

Supported: element symbols (case encodes aromaticity), #n, *, a/A,
X<n>, H<n>, charge, R / R0 / !R, logical ! & ; , with standard
precedence, one level of $(...) recursion, atom maps, bond queries
- = # : ~ plus the single-or-aromatic default, branches and ring
closures.  Anything else raises UnsupportedFeatureError so callers
never get silently wrong matches.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from rxnlead.errors import SmartsSyntaxError, UnsupportedFeatureError
from rxnlead.molgraph import elements

# Bond query kinds.
B_SINGLE = "single"
B_DOUBLE = "double"
B_TRIPLE = "triple"
B_AROM = "aromatic"
B_ANY = "any"
B_DEFAULT = "default"

_BOND_KIND = {"-": B_SINGLE, "=": B_DOUBLE, "#": B_TRIPLE, ":": B_AROM,
              "~": B_ANY}

_UNSUPPORTED_CHARS = set("@/\\")


# --- query expression nodes ---


@dataclass(frozen=True, slots=True)
class Prim:
    kind: str
    value: object = None


@dataclass(frozen=True, slots=True)
class Not:
    child: object


@dataclass(frozen=True, slots=True)
class And:
    children: tuple


@dataclass(frozen=True, slots=True)
class Or:
    children: tuple


@dataclass(frozen=True, slots=True)
class AtomQuery:
    expr: object
    map_label: int | None = None


@dataclass(frozen=True, slots=True)
class PatternBond:
    i: int
    j: int
    kind: str


@dataclass
class Pattern:
    """Compiled pattern: atom queries plus bond constraints."""

    smarts: str
    atoms: tuple[AtomQuery, ...]
    bonds: tuple[PatternBond, ...]
    adjacency: tuple[tuple[tuple[int, str], ...], ...] = field(repr=False, default=())

    def __len__(self) -> int:
        return len(self.atoms)


_AROMATIC_BARE = {"b": "B", "c": "C", "n": "N", "o": "O", "p": "P", "s": "S"}
_ALIPHATIC_BARE = frozenset("BCNOPSFI")


class _Scanner:
    def __init__(self, text: str, full: str) -> None:
        self.text = text
        self.full = full
        self.pos = 0

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        ch = self.peek()
        self.pos += 1
        return ch

    def take_digits(self) -> str:
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        return self.text[start : self.pos]

    def error(self, msg: str) -> SmartsSyntaxError:
        return SmartsSyntaxError(f"{msg} at offset {self.pos} in {self.full!r}")


def _parse_bracket_expr(sc: _Scanner, allow_recursive: bool):
    """Precedence: '!' > '&'/juxtaposition > ',' > ';'."""

    def parse_low():
        terms = [parse_or()]
        while sc.peek() == ";":
            sc.take()
            terms.append(parse_or())
        return terms[0] if len(terms) == 1 else And(tuple(terms))

    def parse_or():
        terms = [parse_high()]
        while sc.peek() == ",":
            sc.take()
            terms.append(parse_high())
        return terms[0] if len(terms) == 1 else Or(tuple(terms))

    def parse_high():
        terms = [parse_unary()]
        while True:
            if sc.peek() == "&":
                sc.take()
                terms.append(parse_unary())
            elif sc.peek() not in ("", ";", ",", ":"):
                terms.append(parse_unary())
            else:
                break
        return terms[0] if len(terms) == 1 else And(tuple(terms))

    def parse_unary():
        if sc.peek() == "!":
            sc.take()
            return Not(parse_unary())
        return parse_prim()

    def parse_prim():
        ch = sc.peek()
        if ch == "":
            raise sc.error("expected a primitive")
        if ch in _UNSUPPORTED_CHARS:
            raise UnsupportedFeatureError(
                f"unsupported SMARTS feature {ch!r} in {sc.full!r}")
        if ch == "$":
            sc.take()
            if sc.peek() != "(":
                raise sc.error("expected '(' after '$'")
            if not allow_recursive:
                raise UnsupportedFeatureError(
                    f"nested recursive SMARTS in {sc.full!r}")
            sc.take()
            depth = 1
            start = sc.pos
            while depth > 0:
                c = sc.take()
                if c == "":
                    raise sc.error("unclosed '$('")
                if c == "(":
                    depth += 1
                elif c == ")":
                    depth -= 1
            inner = sc.text[start : sc.pos - 1]
            sub = _parse(inner, sc.full, allow_recursive=False)
            return Prim("recursive", sub)
        if ch == "#":
            sc.take()
            digits = sc.take_digits()
            if not digits:
                raise sc.error("expected digits after '#'")
            num = int(digits)
            sym = elements.SYMBOL_BY_NUMBER.get(num)
            if sym is None:
                raise UnsupportedFeatureError(
                    f"unsupported atomic number {num} in {sc.full!r}")
            return Prim("element", (sym, None))
        if ch == "*":
            sc.take()
            return Prim("wildcard")
        if ch == "a":
            sc.take()
            return Prim("aromatic", True)
        if ch == "A":
            sc.take()
            return Prim("aromatic", False)
        if ch == "X":
            sc.take()
            digits = sc.take_digits()
            if not digits:
                raise sc.error("expected digits after 'X'")
            return Prim("connections", int(digits))
        if ch == "H":
            sc.take()
            digits = sc.take_digits()
            return Prim("hydrogens", int(digits) if digits else 1)
        if ch in "+-":
            sign = 1 if ch == "+" else -1
            sc.take()
            digits = sc.take_digits()
            if digits:
                return Prim("charge", sign * int(digits))
            count = 1
            while sc.peek() == ch:
                sc.take()
                count += 1
            return Prim("charge", sign * count)
        if ch == "R":
            sc.take()
            digits = sc.take_digits()
            if digits == "":
                return Prim("ring", True)
            if digits == "0":
                return Prim("ring", False)
            raise UnsupportedFeatureError(
                f"ring-count primitive 'R{digits}' unsupported in {sc.full!r}")
        if ch.isdigit():
            raise UnsupportedFeatureError(
                f"isotope specification unsupported in SMARTS {sc.full!r}")
        if ch in ("D", "v") and sc.text[sc.pos + 1 : sc.pos + 2].isdigit():
            raise UnsupportedFeatureError(
                f"primitive {ch!r} unsupported in {sc.full!r}")
        # element symbol: two-letter first, then one-letter, then aromatic
        two = sc.text[sc.pos : sc.pos + 2]
        if two in ("Cl", "Br", "Se", "Si", "Na", "Mg", "Ca", "Zn", "Li"):
            sc.pos += 2
            return Prim("element", (two, False))
        if two == "se":
            sc.pos += 2
            return Prim("element", ("Se", True))
        if ch.isupper():
            sc.take()
            if not elements.is_element(ch) or ch == "H":
                raise sc.error(f"unknown element {ch!r}")
            return Prim("element", (ch, False))
        if ch in _AROMATIC_BARE:
            sc.take()
            return Prim("element", (_AROMATIC_BARE[ch], True))
        raise UnsupportedFeatureError(
            f"unsupported SMARTS primitive {ch!r} in {sc.full!r}")

    return parse_low()


def _parse_bracket_body(body: str, full: str, allow_recursive: bool) -> AtomQuery:
    # split a trailing top-level map label first
    map_label: int | None = None
    depth = 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == ":" and depth == 0:
            tail = body[i + 1 :]
            if not tail.isdigit():
                raise SmartsSyntaxError(f"bad atom map in [{body}] of {full!r}")
            map_label = int(tail)
            body = body[:i]
            break
    sc = _Scanner(body, full)
    expr = _parse_bracket_expr(sc, allow_recursive)
    if sc.pos != len(sc.text):
        raise sc.error("trailing characters in bracket")
    return AtomQuery(expr, map_label)


def _parse(text: str, full: str, allow_recursive: bool) -> Pattern:
    atoms: list[AtomQuery] = []
    bonds: list[PatternBond] = []
    prev: int | None = None
    pending: str | None = None
    stack: list[int] = []
    open_rings: dict[int, tuple[int, str | None]] = {}

    def add_atom(query: AtomQuery) -> None:
        nonlocal prev, pending
        atoms.append(query)
        idx = len(atoms) - 1
        if prev is not None:
            bonds.append(PatternBond(prev, idx, pending or B_DEFAULT))
        prev = idx
        pending = None

    def close_ring(digit: int) -> None:
        nonlocal pending
        if prev is None:
            raise SmartsSyntaxError(f"ring digit before any atom in {full!r}")
        if digit in open_rings:
            other, other_kind = open_rings.pop(digit)
            kind = pending or other_kind or B_DEFAULT
            if pending and other_kind and pending != other_kind:
                raise SmartsSyntaxError(f"ring bond mismatch in {full!r}")
            bonds.append(PatternBond(other, prev, kind))
        else:
            open_rings[digit] = (prev, pending)
        pending = None

    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in _UNSUPPORTED_CHARS or ch == ".":
            raise UnsupportedFeatureError(
                f"unsupported SMARTS feature {ch!r} in {full!r}")
        if ch == "[":
            depth = 1
            j = i + 1
            while j < n and depth:
                if text[j] == "[":
                    depth += 1
                elif text[j] == "]":
                    depth -= 1
                j += 1
            if depth:
                raise SmartsSyntaxError(f"unclosed bracket in {full!r}")
            add_atom(_parse_bracket_body(text[i + 1 : j - 1], full,
                                         allow_recursive))
            i = j
        elif text.startswith("Cl", i) or text.startswith("Br", i):
            add_atom(AtomQuery(Prim("element", (text[i : i + 2], False))))
            i += 2
        elif ch in _ALIPHATIC_BARE:
            add_atom(AtomQuery(Prim("element", (ch, False))))
            i += 1
        elif ch in _AROMATIC_BARE:
            add_atom(AtomQuery(Prim("element", (_AROMATIC_BARE[ch], True))))
            i += 1
        elif ch == "a":
            add_atom(AtomQuery(Prim("aromatic", True)))
            i += 1
        elif ch == "A":
            add_atom(AtomQuery(Prim("aromatic", False)))
            i += 1
        elif ch == "*":
            add_atom(AtomQuery(Prim("wildcard")))
            i += 1
        elif ch in _BOND_KIND:
            if pending is not None:
                raise SmartsSyntaxError(f"two bond symbols in a row in {full!r}")
            pending = _BOND_KIND[ch]
            i += 1
        elif ch.isdigit():
            close_ring(int(ch))
            i += 1
        elif ch == "%":
            if i + 2 >= n or not text[i + 1 : i + 3].isdigit():
                raise SmartsSyntaxError(f"bad %nn ring closure in {full!r}")
            close_ring(int(text[i + 1 : i + 3]))
            i += 3
        elif ch == "(":
            if prev is None:
                raise SmartsSyntaxError(f"branch before any atom in {full!r}")
            stack.append(prev)
            i += 1
        elif ch == ")":
            if not stack:
                raise SmartsSyntaxError(f"unbalanced ')' in {full!r}")
            prev = stack.pop()
            i += 1
        else:
            raise UnsupportedFeatureError(
                f"unsupported SMARTS character {ch!r} in {full!r}")

    if stack:
        raise SmartsSyntaxError(f"unbalanced '(' in {full!r}")
    if open_rings:
        raise SmartsSyntaxError(
            f"unmatched ring digits {sorted(open_rings)} in {full!r}")
    if pending is not None:
        raise SmartsSyntaxError(f"dangling bond at end of {full!r}")
    if not atoms:
        raise SmartsSyntaxError(f"no atoms in SMARTS {full!r}")

    adjacency: list[list[tuple[int, str]]] = [[] for _ in atoms]
    for b in bonds:
        adjacency[b.i].append((b.j, b.kind))
        adjacency[b.j].append((b.i, b.kind))
    return Pattern(full, tuple(atoms), tuple(bonds),
                   tuple(tuple(x) for x in adjacency))


def parse_smarts(text: str) -> Pattern:
    """Compile SMARTS text.

    Raises:
        SmartsSyntaxError: malformed text.
        UnsupportedFeatureError: syntax outside the supported subset.
    """
    if not text or text != text.strip():
        raise SmartsSyntaxError(f"empty or padded SMARTS: {text!r}")
    return _parse(text, text, allow_recursive=True)
