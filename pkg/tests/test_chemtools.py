from rxnlead.chemtools import (
    all_tool_reports,
    brics_fragments,
    murcko_scaffold,
    site_counts,
    tool_brics,
    tool_funcgroups,
    tool_rings,
    tool_scaffold,
    tool_sites,
    tool_weight,
)
from rxnlead.molgraph import parse_smiles


def test_weight_two_decimals():
    assert tool_weight(parse_smiles("CCO")).text == "46.07"
    assert tool_weight(parse_smiles("C")).text == "16.04"


def test_funcgroups_rendering():
    r = tool_funcgroups(parse_smiles("NCC(=O)O"))
    assert "carboxylic acid (1)" in r.text
    assert "primary amine (1)" in r.text
    assert tool_funcgroups(parse_smiles("CC")).text == "none"


def test_funcgroup_counts():
    r = tool_funcgroups(parse_smiles("OC(=O)CCC(=O)O"))
    assert r.payload["groups"]["carboxylic acid"] == 2
    r = tool_funcgroups(parse_smiles("CC(=O)Nc1ccc(O)cc1"))
    assert r.payload["groups"]["amide"] == 1
    assert r.payload["groups"]["phenol"] == 1


def test_scaffold_quinoline_fixed_point():
    m = parse_smiles("c1ccc2ncccc2c1")
    r = tool_scaffold(m)
    assert r.text.startswith("[Scaffold] ")
    assert r.text.endswith("; rings=2; hetero=1")
    assert parse_smiles(r.payload["scaffold"]) == m


def test_scaffold_toluene_prunes_methyl():
    r = tool_scaffold(parse_smiles("Cc1ccccc1"))
    assert parse_smiles(r.payload["scaffold"]) == parse_smiles("c1ccccc1")
    assert r.payload["rings"] == 1
    assert r.payload["hetero"] == 0


def test_scaffold_acyclic_is_none():
    assert tool_scaffold(parse_smiles("CCO")).text == "[Scaffold] none; rings=0; hetero=0"


def test_scaffold_keeps_linkers():
    r = tool_scaffold(parse_smiles("c1ccccc1CCc1ccncc1"))
    assert parse_smiles(r.payload["scaffold"]) == parse_smiles("c1ccccc1CCc1ccncc1")
    assert r.payload["rings"] == 2
    assert r.payload["hetero"] == 1


def test_scaffold_idempotent():
    for smi in ["CC(=O)Nc1ccc(O)cc1", "Cn1ccccc1=O", "O=C(c1ccccc1)c1ccccc1",
                "CCOC(=O)c1ccccc1", "Cc1ccc2ncccc2c1"]:
        first = murcko_scaffold(parse_smiles(smi))
        assert first is not None
        again = murcko_scaffold(first)
        assert again is not None
        assert again.canonical_smiles == first.canonical_smiles


def test_brics_frozen_case():
    r = tool_brics(parse_smiles("CCN(c1ccncc1)C(=O)O"))
    assert r.text == "frag_count=3; frags=[CCN, c1ccncc1, C(=O)O]"


def test_brics_leaves_plain_molecules_whole():
    assert tool_brics(parse_smiles("Cc1ccccc1")).payload["fragments"] == ["Cc1ccccc1"]
    # a free carboxylic acid is not an ester; no cut
    assert len(brics_fragments(parse_smiles("NCC(=O)O"))) == 1


def test_brics_heavy_atoms_conserved():
    for smi in ["CCN(c1ccncc1)C(=O)O", "CC(=O)Nc1ccc(O)cc1", "CCOC(=O)c1ccccc1",
                "c1ccccc1-c1ccncc1", "CCOc1ccccc1"]:
        parent = parse_smiles(smi)
        frags = [parse_smiles(f) for f in brics_fragments(parent)]
        parent_atoms = sorted(a.symbol for a in parent.atoms)
        frag_atoms = sorted(a.symbol for m in frags for a in m.atoms)
        assert frag_atoms == parent_atoms


def test_rings_frozen_quinoline():
    assert tool_rings(parse_smiles("c1ccc2ncccc2c1")).text == \
        "total=2; arom=2; hetero=1; [6A,6AH]"


def test_rings_pyridine_token():
    assert tool_rings(parse_smiles("c1ccncc1")).text == "total=1; arom=1; hetero=1; [6AH]"


def test_rings_acyclic():
    assert tool_rings(parse_smiles("CCO")).text == "total=0; arom=0; hetero=0; []"


def test_sites_frozen_cases():
    assert tool_sites(parse_smiles("CC(C)=O")).text == "count=1; sites=[carbonyl]"
    assert tool_sites(parse_smiles("CCN")).text == "count=1; sites=[nucl_amine]"


def test_sites_combined_and_empty():
    r = tool_sites(parse_smiles("NCC(=O)O"))
    assert r.payload["sites"] == ["carbonyl", "nucl_amine", "hydroxyl"]
    assert tool_sites(parse_smiles("CC")).text == "count=0; sites=[]"
    # amide nitrogen is not a nucleophilic amine
    assert "nucl_amine" not in tool_sites(parse_smiles("CC(=O)NC")).payload["sites"]


def test_michael_acceptor_site():
    assert "michael_acceptor" in tool_sites(parse_smiles("C=CC(C)=O")).payload["sites"]
    assert "michael_acceptor" not in tool_sites(parse_smiles("CCC(C)=O")).payload["sites"]


def test_site_counts_vector():
    counts = site_counts(parse_smiles("NCC(=O)O"))
    assert counts == (1, 1, 1, 0, 0)


def test_reports_deterministic():
    m = parse_smiles("CC(=O)Nc1ccc(O)cc1")
    assert all_tool_reports(m) == all_tool_reports(parse_smiles("CC(=O)Nc1ccc(O)cc1"))
    assert set(all_tool_reports(m)) == {
        "weight", "funcgroups", "scaffold", "brics", "rings", "sites"}
