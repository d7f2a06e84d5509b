import itertools
import random

import pytest
from hypothesis import given, strategies as st

from infralog.core_types import ZERO, bracket
from infralog.errors import NotAFilter
from infralog.exemplars import canonical_system, set_signature
from infralog.filters import FilterSpec, all_filters, principal_ultrafilter
from infralog.formulas import Signature, Var
from infralog.harness.generators import (
    FormulaGenerator, constant_system_pool, default_pool, random_models, set_system_pool,
)
from infralog.infraproduct import IndexedFamily, crossing, decompose_evaluation, diagonal, infraproduct, infrapower
from infralog.semantics import bits, holds_equality_axioms, satisfies, tuple_code, tuple_of

SET, PAIRS = bracket(ZERO), bracket(ZERO, ZERO)
POOL = set_system_pool()


def pair_product(i=2, j=3, D=None):
    labels = ("f1", "f2")
    fam = IndexedFamily(labels, (POOL[i], POOL[j]))
    return infraproduct(fam, D or principal_ultrafilter(labels, "f1"))


def test_labels_and_size():
    P = pair_product()
    assert P.n == 4
    assert P.labels[0] == "⟨a@f1,a@f2⟩" and P.labels[1] == "⟨a@f1,b@f2⟩"


def test_project_tuple():
    sig = Signature.of([PAIRS])
    A = canonical_system(sig, ["a1", "a2"])
    B = canonical_system(sig, ["b1", "b2"])
    P = infraproduct(IndexedFamily(("1", "2"), (A, B)), principal_ultrafilter(("1", "2"), "1"), validate=False)
    p = P.element_of([0, 0])
    q = P.element_of([1, 1])
    code = tuple_code([p, q], P.n)
    assert tuple_of(P.project_code(PAIRS, code, 0), A.n, 2) == (0, 1)
    swapped = tuple_code([q, p], P.n)
    assert tuple_of(P.project_code(PAIRS, swapped, 1), B.n, 2) == (1, 0)


def test_project_set():
    P = pair_product()
    assert P.project_set(SET, 0, 0) == 0
    e = P.element_of([1, 0])
    assert P.project_set(SET, 1 << e, 0) == 1 << 1
    assert P.project_set(SET, (1 << P.n) - 1, 1) == (1 << POOL[3].n) - 1


def test_singleton_family_matches_factor():
    gen = FormulaGenerator(set_signature(), default_pool(set_signature()))
    forms = list(gen.canonical(2))
    for U in POOL:
        P = infraproduct(IndexedFamily(("f",), (U,)), principal_ultrafilter(("f",), "f"))
        rng = random.Random(U.n)
        for phi in forms:
            g = {v: rng.randrange(U.size(v.type)) for v in default_pool(U.sig)}
            assert satisfies(P, phi, crossing(P, [g])) == satisfies(U, phi, g)


def test_constant_projection_nonempty():
    pool = [U for U in constant_system_pool() if U.constants["s"]]
    labels = ("f1", "f2")
    for A, B in itertools.product(pool, repeat=2):
        P = infraproduct(IndexedFamily(labels, (A, B)), principal_ultrafilter(labels, "f2"))
        assert P.project_set(SET, P.constants["s"], 0) == A.constants["s"]
        assert P.project_set(SET, P.constants["s"], 1) == B.constants["s"]


def test_empty_factor_constant_flagged():
    pool = constant_system_pool(include_empty=True)
    A, E = pool[0], pool[-1]
    labels = ("f1", "f2")
    P = infraproduct(IndexedFamily(labels, (A, E)), principal_ultrafilter(labels, "f1"))
    assert P.empty_factor_constants == ["s"]
    assert P.constants["s"] == 0 and P.project_set(SET, 0, 0) != A.constants["s"]


def test_infrapower_preserves_axioms():
    for U in random_models(set_signature(), 6, seed=5, max_size=2):
        for k in (1, 2):
            labels = tuple(f"f{i}" for i in range(k))
            P, _ = infrapower(U, None, labels, principal_ultrafilter(labels, labels[-1]))
            assert P.n == U.n ** k
            assert holds_equality_axioms(P)


def test_crossing_rules():
    U = POOL[2]
    labels = ("f1", "f2")
    P, gamma = infrapower(U, {Var("x", ZERO): 1, Var("u", SET): 0b01}, labels, principal_ultrafilter(labels, "f1"))
    assert gamma[Var("x", ZERO)] == diagonal(U, P)[1]
    assert list(bits(gamma[Var("u", SET)])) == [P.element_of([0, 0])]
    P2 = infraproduct(IndexedFamily(labels, (U, U)), principal_ultrafilter(labels, "f1"))
    u = Var("u", SET)
    assert crossing(P2, [{u: 0b11}, {u: 0}])[u] == 0


def test_decompose_evaluation():
    P = pair_product(2, 4)
    u, x = Var("u", SET), Var("x", ZERO)
    for mask in range(1 << P.n):
        beta = {u: mask, x: mask % P.n}
        parts, delta = decompose_evaluation(P, beta)
        assert delta[x] == beta[x]
        assert P.eq(SET, delta[u], beta[u])
        assert parts[0][x] == P.component(beta[x], 0)


def test_not_a_filter():
    labels = ("f1", "f2")
    with pytest.raises(NotAFilter):
        infraproduct(IndexedFamily(labels, (POOL[0], POOL[2])), FilterSpec(labels, frozenset({0b01, 0b10})))


def test_minimal_members_equivalent_to_all_members():
    labels = ("f1", "f2")
    for D in all_filters(labels):
        fam = IndexedFamily(labels, (POOL[3], POOL[4]))
        a = infraproduct(fam, D, iterate="minimal")
        b = infraproduct(fam, D, iterate="all")
        for t in a.sig.types:
            for p, q in itertools.product(range(a.size(t)), repeat=2):
                assert a.eq(t, p, q) == b.eq(t, p, q)
        for c, m in itertools.product(range(a.n), range(a.size(SET))):
            assert a.bel(SET, c, m) == b.bel(SET, c, m)


@given(st.integers(0, 4), st.integers(0, 4), st.data())
def test_monotone_in_filter(i, j, data):
    labels = ("f1", "f2")
    fs = all_filters(labels)
    D = data.draw(st.sampled_from(fs))
    bigger = [E for E in fs if D.members <= E.members]
    E = data.draw(st.sampled_from(bigger))
    fam = IndexedFamily(labels, (POOL[i], POOL[j]))
    a, b = infraproduct(fam, D), infraproduct(fam, E)
    for t in a.sig.types:
        for p, q in itertools.product(range(a.size(t)), repeat=2):
            assert not a.eq(t, p, q) or b.eq(t, p, q)
    for c, m in itertools.product(range(a.n), range(a.size(SET))):
        assert not a.bel(SET, c, m) or b.bel(SET, c, m)
