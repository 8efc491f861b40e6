import pytest

from rxnlead.errors import SmartsSyntaxError, UnsupportedFeatureError
from rxnlead.molgraph import parse_smiles
from rxnlead.pattern import (
    enumerate_matches,
    find_embeddings,
    has_match,
    parse_smarts,
)


def _matches(mol_text: str, smarts: str) -> bool:
    return has_match(parse_smiles(mol_text), parse_smarts(smarts))


def _count(mol_text: str, smarts: str) -> int:
    return len(enumerate_matches(parse_smiles(mol_text), parse_smarts(smarts)))


def test_hydroxyl_query():
    assert _matches("Oc1ccccc1", "[OX2H]")
    assert not _matches("c1ccccc1", "[OX2H]")
    assert _matches("CCO", "[OX2H]")
    # water has two hydrogens, the query demands exactly one
    assert not _matches("O", "[OX2H]")
    # ester oxygen has no hydrogen
    assert not _matches("COC(C)=O", "[OX2H]")


def test_amine_query():
    q = "[N&X3;H1,H2]"
    assert _matches("CCN", q)
    assert _matches("CNC", q)
    assert not _matches("CN(C)C", q)
    assert not _matches("N#CC", q)


def test_halide_on_carbon():
    q = "[Cl,Br,I][#6]"
    assert _matches("Clc1ccccc1", q)
    assert _matches("CCBr", q)
    assert not _matches("Fc1ccccc1", q)
    assert not _matches("[Na+].[Cl-]", q)
    assert _count("ClC(Cl)(Cl)Cl", q) == 4


def test_ethylenediamine_two_matches():
    mol = parse_smiles("NCCN")
    pattern = parse_smarts("[N&X3;H1,H2]")
    found = enumerate_matches(mol, pattern)
    assert len(found) == 2
    assert found == enumerate_matches(mol, pattern)
    assert all(len(m) == 1 for m in found)
    assert {m[0] for m in found} == {0, 3}


def test_no_match_empty_list():
    assert enumerate_matches(parse_smiles("CC"), parse_smarts("[OX2H]")) == []


def test_aromatic_vs_aliphatic_atoms():
    assert _matches("c1ccccc1", "c")
    assert not _matches("C1CCCCC1", "c")
    assert _matches("C1CCCCC1", "C")
    assert not _matches("c1ccccc1", "C")
    assert _matches("c1ccccc1", "a")
    assert not _matches("c1ccccc1", "A")
    assert _count("Cc1ccccc1", "*") == 7


def test_connection_and_hydrogen_counts():
    assert _matches("C", "[CX4]")
    assert _matches("C=C", "[CX3]")
    assert not _matches("C=C", "[CX4]")
    assert _matches("CC", "[CH3]")
    assert not _matches("CC", "[CH2]")


def test_charge_queries():
    assert _matches("[NH4+]", "[N+]")
    assert not _matches("N", "[N+]")
    assert _matches("[O-]C(C)=O", "[O-]")
    assert _matches("N", "[N+0]")
    assert _matches("O=[N+]([O-])C", "[N+1]")


def test_ring_membership_queries():
    assert _count("C1CCCCC1", "[R]") == 6
    assert _count("Cc1ccccc1", "[R0]") == 1
    assert _count("Cc1ccccc1", "[!R]") == 1
    assert not _matches("CCCC", "[R]")


def test_recursive_environment():
    # amide nitrogen is excluded, plain amine nitrogen kept
    q = "[NX3;!$(NC=O)]"
    assert _matches("CN", q)
    assert not _matches("CNC(C)=O", q)
    assert _matches("CC(=O)N.CN", q)
    anchored = "[$(NC=O)]"
    assert _matches("CNC(C)=O", anchored)
    assert not _matches("CN", anchored)


def test_bond_queries():
    assert _count("CC=C", "C=C") == 2
    assert _count("CC=C", "C~C") == 4
    assert _matches("CC#N", "C#N")
    assert not _matches("CC=N", "C#N")
    assert _matches("c1ccccc1", "c:c")
    assert not _matches("C1CCCCC1", "C:C")
    # explicit single bond does not match the aromatic ring bond
    assert _matches("c1ccccc1-c1ccccc1", "c-c")
    assert not _matches("c1ccccc1", "c-c")


def test_element_number_primitive():
    assert _matches("c1ccccc1", "[#6]")
    assert _matches("CC", "[#6]")
    assert _matches("CN", "[#7]")
    assert not _matches("CC", "[#7]")


def test_negation_and_conjunction():
    assert _count("CCO", "[!O]") == 2
    assert _matches("CCO", "[C&X4]")
    assert not _matches("CCO", "[C;a]")


def test_wildcard_bond_default():
    # the default bond is single-or-aromatic
    assert _matches("c1ccccc1", "cc")
    assert _matches("CC", "CC")
    assert not _matches("C=C", "CC")


def test_match_is_injective():
    # a two-carbon query cannot map both atoms onto one molecule atom
    assert not _matches("C", "CC")
    found = find_embeddings(parse_smiles("CC"), parse_smarts("CC"))
    assert sorted(tuple(sorted(m)) for m in found) == [(0, 1), (0, 1)]


def test_monotone_under_added_fragment():
    assert _matches("Oc1ccccc1", "[OX2H]")
    assert _matches("Oc1ccccc1.CC", "[OX2H]")


def test_determinism_across_atom_orderings():
    q = parse_smarts("[N&X3;H1,H2]")
    a = parse_smiles("NCCN")
    b = parse_smiles("C(N)CN")
    assert len(enumerate_matches(a, q)) == len(enumerate_matches(b, q))


def test_anchor_restriction():
    mol = parse_smiles("NCCN")
    pattern = parse_smarts("[N&X3;H1,H2]")
    assert find_embeddings(mol, pattern, anchor=0) == [(0,)]
    assert find_embeddings(mol, pattern, anchor=1) == []


def test_unsupported_features_fail_loudly():
    for text in ["[C@@H]", "C/C=C/C", "[13C]", "C.C", "[R2]", "[x2]",
                 "[$(C$(CC))]", "[v4]", "[D2]"]:
        with pytest.raises(UnsupportedFeatureError):
            parse_smarts(text)


def test_smarts_syntax_errors():
    for text in ["", "[", "C(", "[C", "C1CC", "()"]:
        with pytest.raises((SmartsSyntaxError, UnsupportedFeatureError)):
            parse_smarts(text)


def test_map_labels_parsed():
    p = parse_smarts("[C:1](=[O:2])[OX2H]")
    labels = [a.map_label for a in p.atoms]
    assert labels == [1, 2, None]
