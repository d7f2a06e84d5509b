import pytest

from infralog.core_types import ZERO, bracket
from infralog.errors import BudgetExceeded
from infralog.exemplars import (
    fraction_label, make_fraction_system, make_segment_system, random_system, segment_label, set_signature,
    two_element_field,
)
from infralog.harness.checks import structural_report, worked_example_facts
from infralog.semantics import holds_equality_axioms

SET = bracket(ZERO)


def test_worked_fraction_facts():
    facts = worked_example_facts(16)["facts"]
    assert facts == {k: True for k in facts} and len(facts) == 6


def test_fraction_reflexive():
    U = make_fraction_system(1)
    assert U.eq(ZERO, U.index(fraction_label(1, 1)), U.index("1/1"))
    assert U.n == 6


def test_segment_examples():
    U = make_segment_system(2)
    a = U.index(segment_label(((0, 0), (1, 0))))
    b = U.index(segment_label(((1, 1), (2, 1))))
    c = U.index(segment_label(((0, 0), (0, 1))))
    assert U.eq(ZERO, a, b)
    assert not U.eq(ZERO, a, c)


def test_segment_witness_belonging():
    U = make_segment_system(1)
    a = U.index(segment_label(((0, 0), (1, 0))))
    b = U.index(segment_label(((0, 1), (1, 1))))
    P = 1 << b
    assert U.bel(SET, a, P) and not (P >> a) & 1


def test_exemplars_smallest_truncation_structural():
    for U in (make_fraction_system(1), make_segment_system(1)):
        rep = structural_report(U)
        assert rep["passed"], rep


def test_budget_guard():
    U = make_fraction_system(3)
    assert U.n == 42
    with pytest.raises(BudgetExceeded):
        U.size(SET)
    assert structural_report(make_fraction_system(3))["equality_axioms"] is None


def test_random_system_pattern_holds_axioms():
    sig = set_signature()
    for seed in range(40):
        U = random_system(seed, sig, 3, 0.5)
        assert U.meta["holds_axioms"] is True
        assert holds_equality_axioms(U)


def test_two_element_field_constants():
    U = two_element_field()
    assert U.n == 2 and U.constants["zero"] == 0 and U.constants["one"] == 1
