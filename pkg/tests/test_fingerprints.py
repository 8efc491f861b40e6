import subprocess
import sys

import pytest

from rxnlead.errors import ParameterMismatchError
from rxnlead.fingerprints import Fingerprint, morgan_fingerprint, tanimoto
from rxnlead.molgraph import from_graph, parse_smiles


def test_frozen_tanimoto_ratio():
    a = Fingerprint(frozenset(range(10)), width=2048, radius=2)
    b = Fingerprint(frozenset(range(7, 12)), width=2048, radius=2)
    # intersection {7,8,9} = 3, union 0..11 = 12
    assert tanimoto(a, b) == pytest.approx(0.25)


def test_identical_fingerprints():
    fp = morgan_fingerprint(parse_smiles("CCO"))
    assert tanimoto(fp, fp) == 1.0


def test_disjoint_fingerprints():
    a = Fingerprint(frozenset({1, 2}), width=2048, radius=2)
    b = Fingerprint(frozenset({3, 4}), width=2048, radius=2)
    assert tanimoto(a, b) == 0.0


def test_both_empty_defined_as_one():
    a = Fingerprint(frozenset(), width=2048, radius=2)
    b = Fingerprint(frozenset(), width=2048, radius=2)
    assert tanimoto(a, b) == 1.0


def test_parameter_mismatch():
    a = Fingerprint(frozenset({1}), width=2048, radius=2)
    with pytest.raises(ParameterMismatchError):
        tanimoto(a, Fingerprint(frozenset({1}), width=1024, radius=2))
    with pytest.raises(ParameterMismatchError):
        tanimoto(a, Fingerprint(frozenset({1}), width=2048, radius=3))


def test_symmetry_and_bounds():
    mols = ["CCO", "CCN", "c1ccccc1", "CC(=O)O", "c1ccc2ncccc2c1"]
    fps = [morgan_fingerprint(parse_smiles(s)) for s in mols]
    for a in fps:
        for b in fps:
            s = tanimoto(a, b)
            assert 0.0 <= s <= 1.0
            assert s == tanimoto(b, a)
            if a.bits == b.bits:
                assert s == 1.0
            else:
                assert s < 1.0


def test_order_invariance():
    a = morgan_fingerprint(parse_smiles("CCO"))
    b = morgan_fingerprint(parse_smiles("OCC"))
    assert a.bits == b.bits


def test_permuted_graph_same_bits():
    m = parse_smiles("CC(=O)Nc1ccc(O)cc1")
    n = len(m.atoms)
    order = list(reversed(range(n)))
    back = {old: new for new, old in enumerate(order)}
    atoms = tuple(
        (m.atoms[o].symbol, m.atoms[o].charge, m.atoms[o].hydrogens,
         m.atoms[o].aromatic)
        for o in order
    )
    bonds = tuple((back[b.a], back[b.b], b.order) for b in m.bonds)
    permuted = from_graph(atoms, bonds, "permuted")
    assert morgan_fingerprint(permuted).bits == morgan_fingerprint(m).bits


def test_canonical_reparse_same_bits():
    m = parse_smiles("O=[N+]([O-])c1ccc(C(=O)O)cc1")
    again = parse_smiles(m.canonical_smiles)
    assert morgan_fingerprint(m).bits == morgan_fingerprint(again).bits


def test_radius_zero_base_case():
    fp = morgan_fingerprint(parse_smiles("CO"), radius=0)
    # two distinct atom environments, one bit each
    assert len(fp.bits) == 2
    assert fp.bits < morgan_fingerprint(parse_smiles("CO"), radius=2).bits


def test_similarity_is_graded():
    ethanol = morgan_fingerprint(parse_smiles("CCO"))
    propanol = morgan_fingerprint(parse_smiles("CCCO"))
    benzene = morgan_fingerprint(parse_smiles("c1ccccc1"))
    close = tanimoto(ethanol, propanol)
    far = tanimoto(ethanol, benzene)
    assert 0.0 < close < 1.0
    assert far < close


def test_bits_stable_across_processes():
    code = (
        "from rxnlead.fingerprints import morgan_fingerprint\n"
        "from rxnlead.molgraph import parse_smiles\n"
        "fp = morgan_fingerprint(parse_smiles('CC(=O)Nc1ccc(O)cc1'))\n"
        "print(sorted(fp.bits))\n"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, check=True)
    here = sorted(morgan_fingerprint(parse_smiles("CC(=O)Nc1ccc(O)cc1")).bits)
    assert out.stdout.strip() == str(here)
