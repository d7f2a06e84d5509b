import json
import random

import pytest

from hypothesis import given, strategies as st

from infralog.core_types import ZERO, bracket
from infralog.errors import ProviderFailure
from infralog.exemplars import set_signature, two_element_field
from infralog.filters import FilterSpec
from infralog.formulas import And, Eq, Exists, In, Not, Var, check_well_typed, free_variables, subformulas
from infralog.harness.batch import ClosedBatch
from infralog.harness.checks import (
    check_infrafiltration, compactness_build, formula_class, infrafiltration_sweep, search_provider,
    sweep_formulas,
)
from infralog.harness.generators import (
    FormulaGenerator, all_set_systems, constant_signature, default_pool, factor_evaluations, set_system_pool,
)
from infralog.harness.suite import SuiteConfig, run_suite
from infralog.infraproduct import IndexedFamily
from infralog.parser import parse
from infralog.semantics import holds_equality_axioms, satisfies

SIG = set_signature()
POOL = default_pool(SIG)
SET = bracket(ZERO)


def naive_levels(k_max):
    """Independent enumeration of the canonical fragment, with conjunctions as unordered pairs."""
    x, y, u = POOL
    atoms = {Eq(ZERO, a, b) for a in (x, y) for b in (x, y)} | {Eq(SET, u, u), In(SET, (x,), u), In(SET, (y,), u)}

    def bound(phi):
        return {f.var for f in subformulas(phi) if isinstance(f, Exists)}

    levels = [atoms]
    for k in range(1, k_max + 1):
        cur = {Not(p) for p in levels[k - 1]}
        for i in range(k):
            j = k - 1 - i
            for a in levels[i]:
                for b in levels[j]:
                    if a != b:
                        cur.add(frozenset((a, b)))
        for body in levels[k - 1]:
            for v in POOL:
                if v in _free(body) and v not in bound(body):
                    cur.add(Exists(v, body))
        levels.append(cur)
    return levels


def _free(phi):
    return free_variables(_ands(phi))


def _ands(phi):
    if isinstance(phi, frozenset):
        a, b = sorted(phi, key=repr)
        return And(_ands(a), _ands(b))
    if isinstance(phi, Not):
        return Not(_ands(phi.body))
    if isinstance(phi, Exists):
        return Exists(phi.var, _ands(phi.body))
    return phi


def test_canonical_counts_match_independent_enumeration():
    gen = FormulaGenerator(SIG, POOL)
    naive = naive_levels(2)
    assert [len(gen.level(k)) for k in range(3)] == [len(s) for s in naive] == [7, 39, 382]
    assert len(gen.level(3)) == 4571
    csig = constant_signature()
    assert [len(FormulaGenerator(csig, default_pool(csig)).level(k)) for k in range(3)] == [19, 210, 4531]


def test_canonical_well_typed_and_deterministic():
    a = list(FormulaGenerator(SIG, POOL).canonical(2))
    b = list(FormulaGenerator(SIG, POOL).canonical(2))
    assert a == b and len(set(a)) == len(a)
    for phi in a:
        check_well_typed(phi, SIG)


@given(st.integers(0, 10 ** 6))
def test_random_tail_deterministic_and_typed(seed):
    g = FormulaGenerator(SIG, POOL, seed=seed)
    tail = g.random_tail(5, 4, 5)
    assert tail == FormulaGenerator(SIG, POOL, seed=seed).random_tail(5, 4, 5)
    for phi in tail:
        check_well_typed(phi, SIG)


def test_all_small_set_systems():
    systems = all_set_systems()
    assert len(systems) == 86
    assert all(U.n <= 2 and holds_equality_axioms(U) for U in systems)


def test_closed_batch_order_and_values():
    base = two_element_field()
    pool = [Var("x", ZERO), Var("y", ZERO)]
    gen = FormulaGenerator(base.sig, pool)
    forms, vals = ClosedBatch(gen, [base], prune=True).closed(2)
    assert forms == list(gen.canonical_closed(2, prune=True))
    rng = random.Random(1)
    for i in rng.sample(range(len(forms)), 300):
        assert bool(vals[0][i]) == satisfies(base, forms[i])


def test_check_infrafiltration_report():
    U, V = set_system_pool()[2], set_system_pool()[3]
    labels = ("f1", "f2")
    x = Var("x", ZERO)
    fam = IndexedFamily(labels, (U, V), ({x: 0}, {x: 1}))
    D = FilterSpec(labels, frozenset({0b11}))
    rep = check_infrafiltration(fam, D, parse("x =0 x", SIG))
    assert rep.passed and rep.lhs and rep.rhs
    out = rep.to_json()
    assert "runtime" not in out and out["instance"]["truth_set"] == ["f1", "f2"]
    json.dumps(out)


def test_sweep_routes_agree_on_small_pool():
    forms = sweep_formulas(SIG, POOL, 2, 20, seed=3)
    rep = infrafiltration_sweep(set_system_pool()[:3], POOL, forms, 2, seed=3, reference_samples=20)
    assert rep["passed"] and rep["reference_checks"] == 20 * rep["instances"]


def test_formula_class():
    assert formula_class(parse("x =0 y", SIG)) == "atomic"
    assert formula_class(parse("x =0 y & x in[0] u", SIG)) == "conjunctive"
    assert formula_class(parse("E x:0 . x in[0] u", SIG)) == "positive-existential"
    assert formula_class(parse("!x in[0] u", SIG)) == "with-negation"


def test_compactness_singleton():
    phi = parse("E x:0 . E y:0 . !(x =0 y)", SIG)
    provider = search_provider(set_system_pool())
    U, gamma, rep = compactness_build([phi], provider)
    assert rep["index_set"] == ["f{0}"] and rep["passed"]
    assert satisfies(U, phi, gamma) and holds_equality_axioms(U)
    M, _ = provider([phi])
    for psi in FormulaGenerator(SIG, POOL).canonical_closed(3):
        assert satisfies(U, psi) == satisfies(M, psi)


def test_compactness_provider_failure():
    phi = parse("E x:0 . E y:0 . !(x =0 y)", SIG)
    one_point = set_system_pool()[0]
    with pytest.raises(ProviderFailure):
        compactness_build([phi], lambda fs: (one_point, {}))


def test_factor_evaluations_regimes():
    U = set_system_pool()[2]
    assert len(factor_evaluations(U, POOL)) == 2 * 2 * 4
    assert len(factor_evaluations(U, POOL, nonempty=True)) == 2 * 2 * 3
    assert all(e[POOL[2]] == 0 for e in factor_evaluations(U, POOL, nonempty=False))


def test_suite_zero_and_determinism():
    empty = run_suite(SuiteConfig.zero())
    assert empty.checks == [] and empty.passed
    cfg = SuiteConfig.zero(seed=4, normalization_triples=200, equivalence_triples=50, compactness_max=2)
    a, b = run_suite(cfg), run_suite(cfg)
    assert a.report_bytes() == b.report_bytes() and a.passed
    assert [c["id"] for c in a.checks] == ["normalization", "evaluation-equivalence", "compactness"]
