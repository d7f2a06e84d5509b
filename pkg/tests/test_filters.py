import itertools

import pytest

from infralog.errors import NoProperFilter
from infralog.filters import (
    FilterClass, FilterSpec, all_ensembles, all_filters, all_ultrafilters, extend_to_ultrafilter, generated_filter,
    power_set_ensemble, principal_ultrafilter,
)

F2 = ("f0", "f1")
F3 = ("a", "b", "c")


def test_classify_examples():
    assert power_set_ensemble(F2).classify() is FilterClass.FILTER
    assert principal_ultrafilter(F2, "f0").classify() is FilterClass.ULTRAFILTER
    top = FilterSpec(F2, frozenset({0b11}))
    assert top.classify() is FilterClass.PROPER_FILTER
    assert FilterSpec(F2, frozenset({0b01, 0b10})).classify() is FilterClass.NOT_FILTER


def test_principal_members():
    assert principal_ultrafilter(("a",), "a").members == {0b1}
    D = principal_ultrafilter(F3, "b")
    assert len(D.members) == 4
    assert all((G in D) == bool(G & 0b010) for G in range(8))


def test_generated_filter():
    D = generated_filter(F3, [0b011, 0b110])
    assert D == principal_ultrafilter(F3, "b")
    with pytest.raises(NoProperFilter):
        generated_filter(F3, [0])


def test_generated_is_intersection_of_filters():
    for ens in ([0b011], [0b011, 0b110], [0b111], [0b101, 0b100]):
        D = generated_filter(F3, ens)
        containing = [E for E in all_filters(F3) if all(m in E for m in ens)]
        inter = frozenset.intersection(*(E.members for E in containing))
        assert D.members == inter


def test_extend_to_ultrafilter():
    U = principal_ultrafilter(F2, "f1")
    assert extend_to_ultrafilter(U) is U
    assert extend_to_ultrafilter(FilterSpec(F2, frozenset({0b11}))) == principal_ultrafilter(F2, "f0")
    for D in all_filters(F3):
        if D.is_proper():
            E = extend_to_ultrafilter(D)
            assert E.is_ultrafilter() and D.members <= E.members


def test_all_ultrafilters_are_principal():
    for k in (1, 2, 3):
        labels = F3[:k]
        ultras = [E for E in all_ensembles(labels) if E.classify() is FilterClass.ULTRAFILTER]
        assert len(ultras) == k
        assert {E.members for E in ultras} == {U.members for U in all_ultrafilters(labels)}


def test_json_round_trip():
    for D in itertools.chain(all_filters(F3)):
        assert FilterSpec.from_json(D.to_json()) == D
    assert FilterSpec.from_json({"principal_at": "f0"}, F2) == principal_ultrafilter(F2, "f0")
