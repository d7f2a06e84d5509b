import random

import pytest
from hypothesis import given, strategies as st

from infralog.axioms import equality_axioms, named_equality_axioms, real_axis_axiom, real_axis_library, real_axis_signature
from infralog.core_types import ZERO, bracket
from infralog.errors import FormulaSyntaxError, FormulaTypeError
from infralog.exemplars import set_signature
from infralog.formulas import (
    ATOMS, And, Const, Eq, Exists, Forall, In, Not, Or, Var, check_well_typed, free_variables, is_primitive, normalize,
    to_text,
)
from infralog.harness.generators import FormulaGenerator, constant_signature, default_pool
from infralog.parser import parse, parse_lines

RHO = bracket(ZERO, ZERO)
x, y = Var("x", ZERO), Var("y", ZERO)


def test_parse_examples():
    sig = real_axis_signature()
    assert parse("A x:0 . x =0 x", sig) == Forall(x, Eq(ZERO, x, x))
    assert parse("(x, y) in[0,0] leq", sig) == In(RHO, (x, y), Const("leq", RHO))
    phi = parse("A x:0 . E y:0 . (x,y) in[0,0] neg", sig)
    assert phi == Forall(x, Exists(y, In(RHO, (x, y), Const("neg", RHO))))


def test_parse_errors_carry_position():
    sig = set_signature()
    with pytest.raises(FormulaSyntaxError) as e:
        parse("A x:0 . x =0 ", sig)
    assert e.value.position == 13 and e.value.expected == "a term"
    with pytest.raises(FormulaTypeError):
        parse("A x:0 . x =[0] x", sig)
    with pytest.raises(FormulaTypeError):
        parse("x in[0,0] y", sig)


def test_parse_lines_names_line():
    sig = set_signature()
    text = "# comment\nA x:0 . x =0 x\n\nx =0 (\n"
    with pytest.raises(FormulaSyntaxError, match=r"f\.txt:4:"):
        parse_lines(text, sig, "f.txt")
    assert len(parse_lines(text.rsplit("\n", 2)[0], sig)) == 1


def test_precedence_and_associativity():
    sig = set_signature()
    p = parse("x =0 y -> y =0 x -> x =0 x", sig)
    assert to_text(p) == "x =0 y -> y =0 x -> x =0 x"
    q = parse("!x =0 y & y =0 x | x =0 x", sig)
    assert isinstance(q, Or) and isinstance(q.left, And) and isinstance(q.left.left, Not)
    r = parse("E x:0 . x =0 y & y =0 y", sig)
    assert isinstance(r, Exists) and isinstance(r.body, And)


def test_normalize_clauses():
    a, b = Eq(ZERO, x, y), Eq(ZERO, y, x)
    assert normalize(a) is a
    assert normalize(Or(a, b)) == Not(And(Not(a), Not(b)))
    assert normalize(Forall(x, a)) == Not(Exists(x, Not(a)))


def test_free_variables():
    assert free_variables(Eq(ZERO, x, y)) == {x, y}
    assert free_variables(Exists(x, Eq(ZERO, x, y))) == {y}
    assert free_variables(real_axis_axiom("A5")) == frozenset()


def test_equality_axiom_library():
    sig = set_signature()
    assert len(equality_axioms(sig)) == 7
    e1 = equality_axioms(sig)[0]
    assert e1 == Forall(x, Eq(ZERO, x, x))
    e4 = equality_axioms(sig)[-1]
    # the biconditional unfolds into two implications, so each belonging atom occurs twice
    assert sum(isinstance(f, In) for f in _atoms(e4)) == 4
    assert [n for n, _ in named_equality_axioms(sig)] == ["E10", "E20", "E30", "E1[0]", "E2[0]", "E3[0]", "E4[0]"]


def _atoms(phi):
    from infralog.formulas import subformulas
    return [f for f in subformulas(phi) if isinstance(f, ATOMS)]


def test_real_axis_library():
    sig, lib = real_axis_library()
    names = [n for n, _ in lib]
    assert len(lib) == 29
    assert names[:4] == ["E1", "E2", "E3", "E4"] and names[4] == "A1" and names[-1] == "PE3"
    assert all(free_variables(f) == frozenset() for _, f in lib)
    one, zero = Const("one", ZERO), Const("zero", ZERO)
    assert real_axis_axiom("A5") == Not(Eq(ZERO, one, zero))
    assert real_axis_axiom("A16") == Forall(x, In(RHO, (x, x), Const("leq", RHO)))
    for _, f in lib:
        check_well_typed(f, sig)


SIGS = [set_signature(), constant_signature(), real_axis_signature()]


@st.composite
def formulas(draw):
    sig = draw(st.sampled_from(SIGS))
    gen = FormulaGenerator(sig, default_pool(sig)[:4])
    rng = random.Random(draw(st.integers(0, 2 ** 32)))
    return sig, gen.random(draw(st.integers(0, 4)), rng)


@given(formulas())
def test_print_parse_round_trip(sf):
    sig, phi = sf
    assert parse(to_text(phi), sig) == phi


@given(formulas())
def test_normalize_properties(sf):
    sig, phi = sf
    n = normalize(phi)
    assert is_primitive(n)
    assert normalize(n) == n
    assert free_variables(n) == free_variables(phi)
    check_well_typed(n, sig)
