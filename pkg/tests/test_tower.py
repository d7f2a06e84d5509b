import pytest

from infralog.axioms import named_equality_axioms
from infralog.errors import InvalidSystem
from infralog.exemplars import two_element_field
from infralog.filters import principal_ultrafilter
from infralog.harness.generators import set_system_pool
from infralog.parser import parse
from infralog.semantics import holds_equality_axioms
from infralog.tower import (
    binary_partition_witness, build_limit, build_tower, check_submodel, embedding_checks, limit_checks,
)

F = ("f0", "f1")
D = principal_ultrafilter(F, "f0")


@pytest.fixture(scope="module")
def field_tower():
    return build_tower(two_element_field(), F, D, 2)


def test_sizes_and_diagonal(field_tower):
    assert field_tower.sizes() == [2, 4, 16]
    for row in embedding_checks(field_tower):
        assert row["diagonal"] and row["homomorphism"] and row["approx_injective"]


def test_depth_zero():
    t = build_tower(two_element_field(), F, D, 0)
    assert t.levels == [t.base] and t.embeddings == []
    L = build_limit(t, principal_ultrafilter(("0",), "0"), "f0")
    assert L.system.n == 2 and L.maps == [[0, 1]]
    assert limit_checks(L)[0]["homomorphism"]


def test_limit_maps(field_tower):
    L = build_limit(field_tower, principal_ultrafilter(("0", "1", "2"), "2"), "f0")
    assert L.system.n == 2 * 4 * 16
    rows = limit_checks(L)
    assert all(r["homomorphism"] and r["approx_injective"] for r in rows)
    assert [r.get("composition") for r in rows] == [True, True, None]


def test_levels_hold_equality_axioms_over_set_base():
    U = set_system_pool()[3]
    t = build_tower(U, F, D, 1)
    assert holds_equality_axioms(U) and holds_equality_axioms(t.levels[1])


def test_check_submodel(field_tower):
    U0, U1 = field_tower.levels[0], field_tower.levels[1]
    assert check_submodel(U0, U1, field_tower.embeddings[0], []) == {"formulas": []}
    phi = parse("E x:0 . x =0 zero & !(x =0 one)", U0.sig)
    rep = check_submodel(U0, U1, field_tower.embeddings[0], [("phi", phi)] + named_equality_axioms(U0.sig)[:3])
    assert rep["formulas"][0] == {"formula": "phi", "source": True, "ambient": True, "induced": True,
                                  "preserved": True}
    assert rep["constants_in_image"] and rep["equality_reflected"] and rep["constant_belonging_reflected"]
    assert all(r["preserved"] for r in rep["formulas"])


def test_partition_witnesses(field_tower):
    a3 = binary_partition_witness(field_tower, 1, "A3")
    assert a3["all_consistent"] and len(a3["rows"]) == 4
    for r in a3["rows"]:
        if r["selected"] == "coz":
            assert r["inverse"] is not None and r["witness_holds"]
        else:
            assert r["is_zero"]
    a19 = binary_partition_witness(field_tower, 2, "A19")
    assert len(a19["rows"]) == 256 and a19["all_consistent"]
    assert all(r["selected"] in ("G", "H'") for r in a19["rows"])


def test_witness_needs_constants():
    t = build_tower(set_system_pool()[2], F, D, 1)
    with pytest.raises(InvalidSystem):
        binary_partition_witness(t, 1, "A3")
