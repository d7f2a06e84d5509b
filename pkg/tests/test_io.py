import json

import pytest
from hypothesis import given, strategies as st

from infralog import io
from infralog.errors import NotAFilter, SourceError
from infralog.exemplars import make_fraction_system, random_system, set_signature, two_element_field
from infralog.filters import principal_ultrafilter
from infralog.formulas import Var
from infralog.core_types import ZERO, bracket
from infralog.harness.generators import constant_signature, constant_system_pool, set_system_pool
from infralog.infraproduct import IndexedFamily, infraproduct

SET = bracket(ZERO)


def same_system(U, V):
    assert U.labels == V.labels and U.sig == V.sig and U.constants == V.constants
    for t in U.sig.types:
        assert all(U.eq(t, a, b) == V.eq(t, a, b) for a in range(U.size(t)) for b in range(U.size(t)))
    for t in U.sig.belonging_types:
        assert all(U.bel(t, c, m) == V.bel(t, c, m) for c in range(U.width(t)) for m in range(U.size(t)))


def test_round_trip_pool_and_exemplars():
    for U in set_system_pool() + constant_system_pool(True) + [two_element_field(), make_fraction_system(1)]:
        text = io.dumps_system(U)
        V = io.loads_system(text)
        same_system(U, V)
        assert io.dumps_system(V) == text


@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.sampled_from([0.0, 0.5, 1.0]), st.sampled_from([0.0, 0.4]))
def test_round_trip_random(seed, n, c, perturb):
    U = random_system(seed, constant_signature(), n, c, perturb=perturb)
    text = io.dumps_system(U)
    assert io.dumps_system(io.loads_system(text)) == text
    same_system(U, io.loads_system(text))


def test_product_round_trip_and_labels():
    labels = ("f1", "f2")
    pool = set_system_pool()
    P = infraproduct(IndexedFamily(labels, (pool[1], pool[3])), principal_ultrafilter(labels, "f2"))
    data = io.system_to_json(P)
    assert data["carrier"][0] == "⟨a@f1,a@f2⟩"
    same_system(P, io.system_from_json(data))


def test_canonical_relations_omitted():
    data = io.system_to_json(set_system_pool()[2])
    assert "equalities" not in data and "belongings" not in data


def test_generator_stanzas():
    assert io.loads_system('{"generators": {"kind": "fractions", "N": 1}}').n == 6
    assert io.loads_system('{"generators": {"kind": "mod2"}}').name == "mod2"
    assert io.loads_system('{"generators": {"kind": "random", "seed": 3, "size": 2}}').n == 2
    with pytest.raises(SourceError, match="unknown generator"):
        io.loads_system('{"generators": {"kind": "reals"}}')


def test_errors_name_file_line_rule():
    text = '{\n  "carrier": ["a", "b"],\n  "types": ["0"],\n  "equalities": {"0": [["a", "zz"]]}\n}'
    with pytest.raises(SourceError) as e:
        io.loads_system(text, "sys.json")
    assert (e.value.source, e.value.line, e.value.rule) == ("sys.json", 4, "equalities")
    with pytest.raises(SourceError) as e:
        io.loads_system('{\n "carrier": [\n', "broken.json")
    assert e.value.rule == "json" and e.value.line >= 2
    with pytest.raises(SourceError, match="identity pair"):
        io.loads_system('{"carrier": ["a", "b"], "types": ["0"], "equalities": {"0": [["a", "b"]]}}')


def test_filter_json(tmp_path):
    p = tmp_path / "d.json"
    p.write_text(json.dumps({"index_set": ["f1", "f2"], "principal_at": "f2"}))
    assert io.load_filter(str(p)) == principal_ultrafilter(("f1", "f2"), "f2")
    p.write_text(json.dumps({"index_set": ["f1", "f2"], "members": [["f1"], ["f2"]]}))
    with pytest.raises(NotAFilter):
        io.load_filter(str(p))
    with pytest.raises(SourceError):
        io.load_filter(str(p), index_set=("g1", "g2"))


def test_family_and_evaluation(tmp_path):
    pool = set_system_pool()
    io.save_system(pool[2], str(tmp_path / "a.json"))
    fam_path = tmp_path / "fam.json"
    fam_path.write_text(json.dumps({"index_set": ["f1", "f2"], "systems": ["a.json", io.system_to_json(pool[3])]}))
    fam = io.load_family(str(fam_path))
    assert fam.index_set == ("f1", "f2") and [U.n for U in fam.systems] == [2, 2]
    U = pool[2]
    ev = io.evaluation_from_json({"x:0": "b", "u:[0]": ["a", "b"]}, U, io._Source("", "ev"))
    assert ev == {Var("x", ZERO): 1, Var("u", SET): 3}
    assert io.evaluation_to_json(U, ev) == {"u:[0]": ["a", "b"], "x:0": "b"}


def test_formula_file(tmp_path):
    p = tmp_path / "f.txt"
    p.write_text("# two formulas\nA x:0 . x =0 x\nE u:[0] . A x:0 . x in[0] u  # full set\n")
    assert len(io.load_formulas(str(p), set_signature())) == 2
    p.write_text("A x:0 . x =0 x\nA x:0 . x =[0] x\n")
    with pytest.raises(Exception, match=r"f\.txt:2:"):
        io.load_formulas(str(p), set_signature())


def test_workspace_integrity(tmp_path):
    ws = io.Workspace()
    io.save_system(set_system_pool()[2], str(tmp_path / "s.json"))
    (tmp_path / "f.txt").write_text("A x:0 . x =0 x\n")
    with pytest.raises(KeyError):
        ws.load_formulas(str(tmp_path / "f.txt"), "s")
    ws.load_system(str(tmp_path / "s.json"), key="s")
    assert len(ws.load_formulas(str(tmp_path / "f.txt"), "s")) == 1
    assert ws.signatures["s"] == set_signature()
