"""Element data: masses, valence rules, implicit-hydrogen assignment."""

from __future__ import annotations

# Standard atomic weights, rounded to published 3-4 significant decimals.
ATOMIC_MASS: dict[str, float] = {
    "H": 1.008,
    "Li": 6.94,
    "B": 10.811,
    "C": 12.011,
    "N": 14.007,
    "O": 15.999,
    "F": 18.998,
    "Na": 22.990,
    "Mg": 24.305,
    "Si": 28.085,
    "P": 30.974,
    "S": 32.06,
    "Cl": 35.45,
    "K": 39.098,
    "Ca": 40.078,
    "Zn": 65.38,
    "Se": 78.971,
    "Br": 79.904,
    "I": 126.904,
}

ATOMIC_NUMBER: dict[str, int] = {
    "H": 1,
    "Li": 3,
    "B": 5,
    "C": 6,
    "N": 7,
    "O": 8,
    "F": 9,
    "Na": 11,
    "Mg": 12,
    "Si": 14,
    "P": 15,
    "S": 16,
    "Cl": 17,
    "K": 19,
    "Ca": 20,
    "Zn": 30,
    "Se": 34,
    "Br": 35,
    "I": 53,
}

SYMBOL_BY_NUMBER: dict[int, str] = {v: k for k, v in ATOMIC_NUMBER.items()}

# Elements writable without brackets.  Aromatic bare symbols are the
# lowercase of AROMATIC_SUBSET below.
ORGANIC_SUBSET = frozenset({"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"})

# Elements allowed to carry the aromatic flag.
AROMATIC_ELEMENTS = frozenset({"B", "C", "N", "O", "P", "S", "Se"})

# Base valence alternatives for the neutral element.
_BASE_VALENCES: dict[str, tuple[int, ...]] = {
    "H": (1,),
    "Li": (1,),
    "B": (3,),
    "C": (4,),
    "N": (3,),
    "O": (2,),
    "F": (1,),
    "Na": (1,),
    "Mg": (2,),
    "Si": (4,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "Cl": (1,),
    "K": (1,),
    "Ca": (2,),
    "Zn": (2,),
    "Se": (2, 4, 6),
    "Br": (1,),
    "I": (1,),
}

# How formal charge shifts the valence alternatives.  "plus" means the
# allowed valence grows with positive charge (N+ binds four), "minus"
# means it shrinks (Na+ binds zero), "abs" shrinks either way (C+ and
# C- both bind three).
_CHARGE_MODE: dict[str, str] = {
    "B": "minus",
    "C": "abs",
    "Si": "abs",
    "N": "plus",
    "P": "plus",
    "O": "plus",
    "S": "plus",
    "Se": "plus",
    "F": "plus",
    "Cl": "plus",
    "Br": "plus",
    "I": "plus",
    "H": "minus",
    "Li": "minus",
    "Na": "minus",
    "Mg": "minus",
    "K": "minus",
    "Ca": "minus",
    "Zn": "minus",
}


def is_element(symbol: str) -> bool:
    return symbol in ATOMIC_MASS


def allowed_valences(symbol: str, charge: int) -> tuple[int, ...]:
    """Valence alternatives for an element at a given formal charge.

    Returns an ascending tuple; empty means no bonding state is valid.
    """
    bases = _BASE_VALENCES[symbol]
    mode = _CHARGE_MODE[symbol]
    if mode == "plus":
        shift = charge
    elif mode == "minus":
        shift = -charge
    else:
        shift = -abs(charge)
    vals = sorted(v + shift for v in bases if v + shift >= 0)
    return tuple(vals)


def implicit_hydrogens(
    symbol: str,
    charge: int,
    aromatic: bool,
    bond_sum: int,
    has_multiple_bond: bool,
) -> int:
    """Hydrogen count a bare (bracket-free) atom receives.

    ``bond_sum`` counts single bonds as 1, double 2, triple 3 and
    aromatic bonds as 1.  Aromatic C, N and P reserve one valence unit
    for the ring pi bond unless the atom already spends it on an
    explicit double or triple bond; O, S and Se contribute a lone pair
    instead and reserve nothing.  Aromatic nitrogen therefore defaults
    to the pyridine form; pyrrole-type nitrogen requires an explicit
    [nH].
    """
    vals = allowed_valences(symbol, charge)
    if not vals:
        return 0
    used = bond_sum
    if aromatic and symbol in ("C", "N", "P") and not has_multiple_bond:
        used += 1
    for v in vals:
        if v >= used:
            return v - used
    return 0
