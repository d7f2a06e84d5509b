import itertools
import random

import pytest
from hypothesis import given, strategies as st

from infralog.core_types import ZERO, bracket
from infralog.errors import BudgetExceeded, InvalidSystem
from infralog.exemplars import canonical_system, make_fraction_system, random_system, saturated_system, set_signature
from infralog.formulas import Eq, Exists, Signature, Var, is_closed, normalize
from infralog.harness.generators import (
    FormulaGenerator, constant_signature, default_pool, random_evaluation, related_evaluation, set_system_pool,
)
from infralog.parser import parse
from infralog.semantics import (
    Evaluator, PairSet, System, approx_injective, holds_equality_axioms, identity_map, is_balanced,
    is_extensional, is_homomorphism, is_regular, satisfies,
)
from infralog.tables import TableEvaluator

SET = bracket(ZERO)
x, y = Var("x", ZERO), Var("y", ZERO)


def coarse_bare():
    """a and b identified at first order while belonging stays set-theoretic."""
    return System(set_signature(), ["a", "b"], equalities={ZERO: PairSet([(0, 0), (0, 1), (1, 0), (1, 1)])})


def test_reflexive_atom():
    for U in set_system_pool():
        for a in range(U.n):
            assert satisfies(U, Eq(ZERO, x, x), {x: a})


def test_fraction_cross_multiplication():
    U = make_fraction_system(16)
    assert satisfies(U, Eq(ZERO, x, y), {x: U.index("3/8"), y: U.index("6/16")})
    assert not satisfies(U, Eq(ZERO, x, y), {x: U.index("3/8"), y: U.index("2/3")})


def test_exists_witness_matches_enumeration():
    phi = Exists(y, Eq(ZERO, x, y))
    for U in set_system_pool():
        for a in range(U.n):
            assert satisfies(U, phi, {x: a})
            assert any(U.eq(ZERO, a, b) for b in range(U.n))


def test_equality_axioms_examples():
    assert holds_equality_axioms(make_fraction_system(1))
    assert holds_equality_axioms(canonical_system(set_signature(), ["a", "b"]))
    assert not holds_equality_axioms(coarse_bare())


def test_structural_predicates():
    C = canonical_system(set_signature(), ["a", "b"])
    assert (is_regular(C), is_balanced(C), is_extensional(C)) == (True, True, True)
    assert not is_regular(coarse_bare())
    F = make_fraction_system(1)
    assert (is_regular(F), is_balanced(F), is_extensional(F)) == (True, True, True)


def test_containment_rejected():
    with pytest.raises(InvalidSystem, match="identity pair"):
        System(set_signature(), ["a", "b"], equalities={ZERO: PairSet([(0, 0)])})
    with pytest.raises(InvalidSystem, match="membership pair"):
        System(set_signature(), ["a"], belongings={SET: PairSet([])})


def test_budget():
    U = System(Signature.of([bracket(ZERO, ZERO)]), [f"a{i}" for i in range(5)], max_terminal=1 << 10, validate=False)
    with pytest.raises(BudgetExceeded):
        satisfies(U, parse("E u:[0,0] . u =[0,0] u", U.sig))


def test_homomorphisms():
    sig = Signature.of([ZERO], [("c", ZERO)])
    U = canonical_system(sig, ["a", "b"], {"c": 0})
    V = canonical_system(sig, ["a", "b"], {"c": 0})
    assert is_homomorphism(identity_map(U), U, V)
    assert not is_homomorphism([1, 0], U, V)
    assert approx_injective(identity_map(U), U, U)
    D = canonical_system(set_signature(), ["a", "b"])
    assert not approx_injective([0, 0], D, D)


def test_saturation_pattern_is_extensional():
    sig = set_signature()
    for keys in ([0, 0, 1], [0, 1, 0], [0, 0, 0]):
        U = saturated_system(sig, ["a", "b", "c"], keys)
        assert is_extensional(U) and is_regular(U) and is_balanced(U) and holds_equality_axioms(U)


SIG = constant_signature()
POOL = default_pool(SIG)
GEN = FormulaGenerator(SIG, POOL)


@st.composite
def triples(draw, axioms=False):
    seed = draw(st.integers(0, 2 ** 30))
    U = random_system(seed, SIG, draw(st.integers(1, 2)), draw(st.sampled_from([0.0, 0.5, 1.0])),
                      perturb=draw(st.sampled_from([0.0, 0.3])), perturb_mode=draw(st.sampled_from(["block", "pair"])))
    rng = random.Random(seed)
    return U, GEN.random(draw(st.integers(0, 4)), rng), random_evaluation(U, POOL, rng), rng


@given(triples())
def test_normalization_sound(t):
    U, phi, gamma, _ = t
    assert satisfies(U, phi, gamma) == satisfies(U, normalize(phi), gamma)


@given(triples())
def test_evaluation_equivalence(t):
    U, phi, gamma, rng = t
    if not U.meta["holds_axioms"]:
        return
    delta = related_evaluation(U, gamma, rng)
    assert satisfies(U, phi, gamma) == satisfies(U, phi, delta)


@given(triples())
def test_closed_formula_independent_of_evaluation(t):
    U, phi, gamma, rng = t
    if not is_closed(phi):
        return
    assert satisfies(U, phi, gamma) == satisfies(U, phi, random_evaluation(U, POOL, rng))


@given(triples())
def test_standard_mode_on_canonical(t):
    U, phi, gamma, _ = t
    if U.is_canonical():
        assert satisfies(U, phi, gamma) == satisfies(U, phi, gamma, standard=True)


@given(triples())
def test_table_route_matches_recursive_route(t):
    U, phi, gamma, _ = t
    te = TableEvaluator(U, POOL)
    assert te.holds(phi, gamma) == Evaluator(U, memo=False).holds(phi, gamma)


def test_random_system_determinism():
    a, b = random_system(7, SIG, 2, 0.5), random_system(7, SIG, 2, 0.5)
    assert a.constants == b.constants
    for t in SIG.types:
        assert all(a.eq(t, p, q) == b.eq(t, p, q) for p, q in itertools.product(range(a.size(t)), repeat=2))
    assert random_system(3, SIG, 2, 0.0).is_canonical()
