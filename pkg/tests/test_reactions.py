import json

import pytest

from rxnlead.errors import (
    NoEmbeddingError,
    NoValidProductError,
    ParameterMismatchError,
    TemplateFormatError,
)
from rxnlead.molgraph import parse_smiles
from rxnlead.reactions import (
    TemplateLibrary,
    apply_template,
    assemble_reactants,
    compile_template,
    default_library,
    match_templates,
    resolve_input_slot,
)

# One worked example per shipped template: slot-ordered reactants and the
# expected product, both checked by molecule equality.
TEMPLATE_CASES = [
    ("n_alkylation", ["CN", "CCBr"], "CCNC"),
    ("amide_coupling_acid", ["CC(=O)O", "CN"], "CNC(C)=O"),
    ("amide_coupling_amine", ["CC(=O)O", "CN"], "CNC(C)=O"),
    ("esterification", ["CC(=O)O", "OCC"], "CCOC(C)=O"),
    ("ester_hydrolysis", ["CC(=O)OCC"], "CC(=O)O"),
    ("nitrile_to_tetrazole", ["CC#N"], "Cc1nnn[nH]1"),
    ("aryl_cyanation", ["Brc1ccccc1"], "N#Cc1ccccc1"),
    ("cn_coupling_aryl", ["Brc1ccccc1", "CN"], "CNc1ccccc1"),
    ("cn_coupling_amine", ["Brc1ccccc1", "CN"], "CNc1ccccc1"),
    ("reductive_amination_carbonyl", ["CC(C)=O", "CN"], "CC(C)NC"),
    ("reductive_amination_amine", ["CC(C)=O", "CN"], "CC(C)NC"),
    ("williamson_ether", ["Oc1ccccc1", "CCBr"], "CCOc1ccccc1"),
    ("suzuki_biaryl", ["Brc1ccccc1", "OB(O)c1ccc(C)cc1"], "Cc1ccc(cc1)-c1ccccc1"),
    ("sulfonamide_formation", ["Cc1ccc(cc1)S(=O)(=O)Cl", "CN"], "CNS(=O)(=O)c1ccc(C)cc1"),
    ("urea_from_isocyanate", ["CN", "O=C=Nc1ccccc1"], "CNC(=O)Nc1ccccc1"),
    ("aromatic_bromination", ["c1ccccc1"], "Brc1ccccc1"),
    ("nitro_reduction", ["O=[N+]([O-])c1ccccc1"], "Nc1ccccc1"),
    ("fc_acylation", ["c1ccccc1", "CC(=O)Cl"], "CC(=O)c1ccccc1"),
    ("lactamization", ["NCCCC(=O)O"], "O=C1CCCN1"),
]


def test_default_library_shape():
    lib = default_library()
    assert len(lib.templates) == len(TEMPLATE_CASES)
    assert set(lib.by_id) == {tid for tid, _, _ in TEMPLATE_CASES}
    for t in lib.templates:
        assert t.arity in (1, 2)
        assert len(t.patterns) == t.arity


def test_every_template_has_a_working_example():
    lib = default_library()
    for tid, reactant_smiles, product_smiles in TEMPLATE_CASES:
        template = lib.by_id[tid]
        reactants = tuple(parse_smiles(s) for s in reactant_smiles)
        product = apply_template(template, reactants)
        assert product == parse_smiles(product_smiles), tid


def test_apply_is_deterministic():
    lib = default_library()
    template = lib.by_id["amide_coupling_acid"]
    reactants = (parse_smiles("CC(=O)O"), parse_smiles("CN"))
    first = apply_template(template, reactants)
    second = apply_template(template, reactants)
    assert first.canonical_smiles == second.canonical_smiles


def test_symmetric_diamine_single_product():
    # both diamine ends match; the tie-break must pick one product and
    # stick with it
    lib = default_library()
    template = lib.by_id["n_alkylation"]
    reactants = (parse_smiles("NCCN"), parse_smiles("CCBr"))
    expected = apply_template(template, reactants)
    assert expected == parse_smiles("CCNCCN")
    for _ in range(100):
        assert apply_template(template, reactants) == expected


def test_reactant_count_mismatch():
    lib = default_library()
    template = lib.by_id["amide_coupling_acid"]
    with pytest.raises(ParameterMismatchError):
        apply_template(template, (parse_smiles("CC(=O)O"),))


def test_no_embedding():
    lib = default_library()
    template = lib.by_id["amide_coupling_acid"]
    with pytest.raises(NoEmbeddingError):
        apply_template(template, (parse_smiles("CCO"), parse_smiles("CN")))


def test_fully_substituted_ring_has_no_embedding():
    lib = default_library()
    template = lib.by_id["aromatic_bromination"]
    with pytest.raises(NoEmbeddingError):
        apply_template(template, (parse_smiles("Brc1c(Br)c(Br)c(Br)c(Br)c1Br"),))


def test_no_valid_product():
    # the embedding exists but every instantiated product fails the
    # valence check: the product side pins four hydrogens on a carbon
    # that also gains a double bond
    template = compile_template({
        "id": "impossible",
        "name": "impossible",
        "arity": 1,
        "reactant_smarts": ["[C&H4:1]"],
        "product_smarts": "[CH4:1]=O",
    })
    with pytest.raises(NoValidProductError):
        apply_template(template, (parse_smiles("C"),))


def test_match_templates_input_slot_aware():
    lib = default_library()
    acid = parse_smiles("CC(=O)O")
    ids = [t.id for t in match_templates(acid, lib)]
    assert "amide_coupling_acid" in ids
    assert "esterification" in ids
    # the amine-slot variant requires an amine as the input molecule
    assert "amide_coupling_amine" not in ids

    amine = parse_smiles("CN")
    ids = [t.id for t in match_templates(amine, lib)]
    assert "amide_coupling_amine" in ids
    assert "amide_coupling_acid" not in ids
    assert "n_alkylation" in ids


def test_resolve_input_slot():
    lib = default_library()
    assert resolve_input_slot(lib.by_id["amide_coupling_acid"],
                              parse_smiles("CC(=O)O")) == 0
    assert resolve_input_slot(lib.by_id["amide_coupling_amine"],
                              parse_smiles("CN")) == 1
    assert resolve_input_slot(lib.by_id["ester_hydrolysis"],
                              parse_smiles("CC(=O)OCC")) == 0


def test_assemble_reactants_places_input_at_slot():
    lib = default_library()
    template = lib.by_id["amide_coupling_amine"]
    amine = parse_smiles("CN")
    acid = parse_smiles("CC(=O)O")
    assembled = assemble_reactants(template, amine, [acid])
    assert assembled is not None
    assert [m.canonical_smiles for m in assembled] == [
        acid.canonical_smiles, amine.canonical_smiles]


def test_assemble_reactants_rejects_nonmatching_input():
    lib = default_library()
    template = lib.by_id["amide_coupling_acid"]
    assert assemble_reactants(template, parse_smiles("CCO"),
                              [parse_smiles("CN")]) is None


def test_unimolecular_case_preserves_rest_of_molecule():
    lib = default_library()
    template = lib.by_id["nitro_reduction"]
    product = apply_template(
        template, (parse_smiles("O=[N+]([O-])c1ccc(C(=O)O)cc1"),))
    assert product == parse_smiles("NC1=CC=C(C(=O)O)C=C1")


def test_library_digest_stable_and_sensitive():
    a = default_library()
    b = default_library()
    assert a.digest == b.digest
    records = [t.to_record() for t in a.templates]
    shrunk = TemplateLibrary.from_records(records[:-1])
    assert shrunk.digest != a.digest


def test_library_rejects_duplicate_ids():
    record = default_library().templates[0].to_record()
    with pytest.raises(TemplateFormatError):
        TemplateLibrary.from_records([record, record])


def test_compile_template_validation():
    good = {
        "id": "demo",
        "name": "demo",
        "arity": 1,
        "reactant_smarts": ["[C&X3:1](=[O:2])[O&X2&H1]"],
        "product_smarts": "[C:1](=[O:2])N",
    }
    compile_template(dict(good))

    for mutation in [
        {"arity": 0},
        {"arity": 2},
        {"reactant_smarts": []},
        {"reactant_smarts": ["[C:1]("]},
        {"product_smarts": "[C:1][C:1]"},
        {"product_smarts": "[C:1][N:9]"},
        {"input_slot": 5},
        {"id": ""},
    ]:
        bad = dict(good)
        bad.update(mutation)
        with pytest.raises(TemplateFormatError):
            compile_template(bad)
    # the name field defaults to the id; everything else is required
    for dropped in ["id", "arity", "reactant_smarts", "product_smarts"]:
        bad = dict(good)
        del bad[dropped]
        with pytest.raises(TemplateFormatError):
            compile_template(bad)


def test_records_round_trip(tmp_path):
    lib = default_library()
    path = tmp_path / "lib.jsonl"
    with open(path, "w") as fh:
        fh.write("# comment line\n\n")
        for t in lib.templates:
            fh.write(json.dumps(t.to_record()) + "\n")
    again = TemplateLibrary.load(path)
    assert again.digest == lib.digest
    assert [t.id for t in again.templates] == [t.id for t in lib.templates]
