"""Verification checks: each returns plain data suitable for the JSON report."""
from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from ..axioms import named_equality_axioms, real_axis_library
from ..core_types import ZERO, FirstOrder
from ..errors import BudgetExceeded, InvalidSystem, NoProperFilter, ProviderFailure
from ..exemplars import (
    SET_OF_POINTS, make_fraction_system, make_segment_system, random_system, two_element_field,
)
from ..filters import FilterClass, FilterSpec, all_filters, extend_to_ultrafilter, generated_filter, principal_ultrafilter
from ..formulas import (
    And, Eq, Exists, Formula, In, Not, Signature, Var, free_variables, normalize, sort_vars, subformulas,
    to_text,
)
from ..infraproduct import IndexedFamily, ProductSystem, crossing, decompose_evaluation, infraproduct
from ..semantics import (
    Evaluator, PairSet, System, equality_axiom_failure, extensional_failure, balanced_failure, regular_failure, satisfies,
)
from ..tables import TableEvaluator
from .batch import ClosedBatch
from .generators import (
    FormulaGenerator, constant_signature, default_pool, families,
    families_with_ultrafilters, index_labels, random_evaluation, random_models, regime_evaluations,
    related_evaluation, set_system_pool,
)


@dataclass
class CheckReport:
    theorem: str
    instance: dict[str, Any]
    lhs: bool | None
    rhs: bool | None
    passed: bool
    runtime: float = 0.0

    def to_json(self, runtime: bool = False) -> dict[str, Any]:
        out = {"theorem": self.theorem, "instance": self.instance, "lhs": self.lhs, "rhs": self.rhs,
               "passed": self.passed}
        if runtime:
            out["runtime"] = self.runtime
        return out


def describe_evaluation(U: System, gamma: dict[Var, int]) -> dict[str, str]:
    return {f"{v.name}:{v.type}": U.show(v.type, gamma[v]) for v in sort_vars(gamma)}


def describe_family(labels: Sequence[str], fam: Sequence[System]) -> list[str]:
    return [f"{lab}={U.name or repr(U)}" for lab, U in zip(labels, fam)]


# --- infrafiltration, reference route ------------------------------------------------

def check_infrafiltration(fam: IndexedFamily, D: FilterSpec, phi: Formula, *, standard: bool = False,
                          product: ProductSystem | None = None, require_axioms: bool = True) -> CheckReport:
    """Compare product satisfaction at the crossing with filter membership of the truth set.

    The right-hand side only evaluates the factors; the left-hand side only
    evaluates the product.
    """
    t0 = time.perf_counter()
    if fam.evaluations is None:
        raise ValueError("the family needs per-factor evaluations")
    if require_axioms:
        for lab, U in zip(fam.index_set, fam.systems):
            fail = equality_axiom_failure(U)
            if fail is not None:
                raise InvalidSystem(f"factor {lab} does not hold the equality axioms: {fail}")
    fv = free_variables(phi)
    evs = [{v: e[v] for v in fv} for e in fam.evaluations]
    truth = 0
    for g, (U, e) in enumerate(zip(fam.systems, evs)):
        if satisfies(U, phi, e, standard=standard):
            truth |= 1 << g
    rhs = truth in D
    P = product if product is not None else infraproduct(fam, D, validate=False)
    gamma = crossing(P, evs)
    lhs = satisfies(P, phi, gamma, standard=standard)
    instance = {
        "family": describe_family(fam.index_set, fam.systems),
        "filter": D.describe(),
        "formula": to_text(phi),
        "evaluations": [describe_evaluation(U, e) for U, e in zip(fam.systems, evs)],
        "truth_set": D.labels_of(truth),
        "semantics": "standard" if standard else "generalized",
    }
    return CheckReport("infrafiltration", instance, lhs, rhs, lhs == rhs, time.perf_counter() - t0)


# --- infrafiltration, vectorized route -----------------------------------------------

class FactorTables:
    """Table evaluators shared across instances, one per factor system."""

    def __init__(self, pool: Sequence[Var], standard: bool = False):
        self.pool = list(pool)
        self.standard = standard
        self._by_id: dict[int, tuple[System, TableEvaluator]] = {}

    def get(self, U: System) -> TableEvaluator:
        hit = self._by_id.get(id(U))
        if hit is None:
            hit = (U, TableEvaluator(U, self.pool, self.standard))
            self._by_id[id(U)] = hit
        return hit[1]


@dataclass
class InstanceColumns:
    evaluations: list[tuple[dict[Var, int], ...]]
    factor_cols: list[dict[Var, np.ndarray]]
    product_cols: dict[Var, np.ndarray]

    @property
    def count(self) -> int:
        return len(self.evaluations)


def instance_columns(P: ProductSystem, pool: Sequence[Var], evaluations=None) -> InstanceColumns:
    fam = P.factors
    evs = list(evaluations if evaluations is not None else regime_evaluations(fam, pool))
    factor_cols = [{v: np.array([ev[f][v] for ev in evs], dtype=np.int64) for v in pool} for f in range(P.k)]
    product_cols: dict[Var, np.ndarray] = {}
    for v in pool:
        if isinstance(v.type, FirstOrder):
            acc = np.zeros(len(evs), dtype=np.int64)
            for f in range(P.k):
                acc += factor_cols[f][v] * P.strides[f]
            product_cols[v] = acc
        else:
            memo: dict[tuple[int, ...], int] = {}
            vals = []
            for ev in evs:
                key = tuple(ev[f][v] for f in range(P.k))
                if key not in memo:
                    memo[key] = P.cross_sets(v.type, key)
                vals.append(memo[key])
            product_cols[v] = np.array(vals, dtype=np.int64)
    return InstanceColumns(evs, factor_cols, product_cols)


def membership_table(D: FilterSpec) -> np.ndarray:
    return np.array([m in D for m in range(D.full + 1)], dtype=bool)


def vector_verdicts(phi: Formula, P: ProductSystem, tp: TableEvaluator, tfs: Sequence[TableEvaluator],
                    cols: InstanceColumns, in_d: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    lhs = tp.holds_many(phi, cols.product_cols, cols.count)
    truth = np.zeros(cols.count, dtype=np.int64)
    for f, te in enumerate(tfs):
        truth |= te.holds_many(phi, cols.factor_cols[f], cols.count).astype(np.int64) << f
    return lhs, in_d[truth], truth


def infrafiltration_sweep(pool_systems: Sequence[System], pool: Sequence[Var], formulas: Sequence[Formula],
                          max_index: int, *, seed: int = 0, reference_samples: int = 0,
                          failure_limit: int = 5, label: str = "infrafiltration",
                          time_limit: float | None = None) -> dict[str, Any]:
    """Every family of pool systems with at most ``max_index`` factors, every
    principal ultrafilter, every formula and every regime evaluation.

    With ``time_limit`` the sweep stops after that many seconds and reports
    itself incomplete.
    """
    rng = random.Random(seed)
    start = time.perf_counter()
    total = sum(math.comb(len(pool_systems) + k - 1, k) * k for k in range(1, max_index + 1))
    complete = True
    ftabs = FactorTables(pool)
    instances = checks = fails = refs = ref_fails = 0
    failures: list[dict[str, Any]] = []
    for labels, fam, D in families_with_ultrafilters(pool_systems, max_index):
        if time_limit is not None and time.perf_counter() - start > time_limit:
            complete = False
            break
        instances += 1
        P = infraproduct(IndexedFamily(labels, fam), D, validate=False)
        tp = TableEvaluator(P, pool)
        tfs = [ftabs.get(U) for U in fam]
        cols = instance_columns(P, pool)
        in_d = membership_table(D)
        for phi in formulas:
            lhs, rhs, truth = vector_verdicts(phi, P, tp, tfs, cols, in_d)
            checks += cols.count
            bad = np.nonzero(lhs != rhs)[0]
            if len(bad):
                fails += len(bad)
                if len(failures) < failure_limit:
                    j = int(bad[0])
                    failures.append({"family": describe_family(labels, fam), "filter": D.describe(),
                                     "formula": to_text(phi), "evaluation": j,
                                     "lhs": bool(lhs[j]), "rhs": bool(rhs[j])})
        for _ in range(reference_samples):
            phi = formulas[rng.randrange(len(formulas))]
            j = rng.randrange(cols.count)
            ifam = IndexedFamily(labels, fam, cols.evaluations[j])
            rep = check_infrafiltration(ifam, D, phi, product=P, require_axioms=False)
            lhs, rhs, _ = vector_verdicts(phi, P, tp, tfs, cols, in_d)
            refs += 1
            if not rep.passed or rep.lhs != bool(lhs[j]) or rep.rhs != bool(rhs[j]):
                ref_fails += 1
                if len(failures) < failure_limit:
                    failures.append({"reference_mismatch": rep.to_json()})
    return {
        "id": label,
        "passed": fails == 0 and ref_fails == 0 and complete,
        "complete": complete,
        "instances": instances,
        "instances_total": total,
        "formulas": len(formulas),
        "checks": checks,
        "failures": fails,
        "reference_checks": refs,
        "reference_failures": ref_fails,
        "first_failures": failures,
    }


def sweep_formulas(sig: Signature, pool: Sequence[Var], max_symbols: int, random_count: int, seed: int,
                   min_random_symbols: int | None = None, random_depth: int = 5) -> list[Formula]:
    gen = FormulaGenerator(sig, pool, seed=seed)
    out = list(gen.canonical(max_symbols))
    if random_count:
        out += gen.random_tail(random_count, (min_random_symbols or max_symbols + 1), random_depth, seed=seed)
    return out


# --- filter strength -----------------------------------------------------------------

def _only(phi: Formula, kinds: tuple[type, ...]) -> bool:
    return all(isinstance(s, kinds) for s in subformulas(phi))


def formula_class(phi: Formula) -> str:
    if isinstance(phi, (Eq, In)):
        return "atomic"
    if _only(phi, (Eq, In, And)):
        return "conjunctive"
    if _only(phi, (Eq, In, And, Exists)):
        return "positive-existential"
    return "with-negation"


def filter_boundary(pool_systems: Sequence[System], pool: Sequence[Var], formulas: Sequence[Formula],
                    index_size: int = 2) -> dict[str, Any]:
    """Run the comparison under every filter on a small index set, grouped by formula class."""
    labels = index_labels(index_size)
    filters = all_filters(labels)
    ftabs = FactorTables(pool)
    stats: dict[str, dict[str, dict[str, int]]] = {}
    witness = None
    for fam in itertools.product(pool_systems, repeat=index_size):
        for D in filters:
            kind = D.classify().value
            P = infraproduct(IndexedFamily(labels, fam), D, validate=False)
            tp = TableEvaluator(P, pool)
            tfs = [ftabs.get(U) for U in fam]
            cols = instance_columns(P, pool)
            in_d = membership_table(D)
            for phi in formulas:
                lhs, rhs, truth = vector_verdicts(phi, P, tp, tfs, cols, in_d)
                cls = formula_class(phi)
                slot = stats.setdefault(kind, {}).setdefault(cls, {"checks": 0, "failures": 0})
                slot["checks"] += cols.count
                bad = np.nonzero(lhs != rhs)[0]
                slot["failures"] += len(bad)
                if len(bad) and witness is None and kind == FilterClass.PROPER_FILTER.value and isinstance(phi, Not):
                    j = int(bad[0])
                    ev = cols.evaluations[j]
                    fv = free_variables(phi)
                    witness = {
                        "family": describe_family(labels, fam),
                        "filter": D.describe(),
                        "formula": to_text(phi),
                        "evaluations": [describe_evaluation(U, {v: e[v] for v in fv}) for U, e in zip(fam, ev)],
                        "lhs": bool(lhs[j]),
                        "rhs": bool(rhs[j]),
                        "truth_set": D.labels_of(int(truth[j])),
                    }
    positive_fail = sum(
        s["failures"] for per in stats.values() for cls, s in per.items() if cls in ("atomic", "conjunctive")
    )
    return {
        "id": "filter-boundary",
        "passed": witness is not None and positive_fail == 0,
        "stats": stats,
        "negation_witness": witness,
        "atomic_or_conjunctive_failures": positive_fail,
    }


# --- projection lemmas ---------------------------------------------------------------

def projection_checks(pool_systems: Sequence[System], max_index: int) -> dict[str, Any]:
    """Constant and evaluation projections, split by the emptiness of the constituents.

    The regimes are: every constituent nonempty, every constituent empty,
    and a mix of both.
    """
    u = Var("u", SET_OF_POINTS)
    counts = {r: {"checks": 0, "failures": 0} for r in ("nonempty", "all-empty", "mixed")}
    first_order = {"checks": 0, "failures": 0}
    decomposition = {"checks": 0, "failures": 0}
    counterexample = None
    for fam in families(pool_systems, max_index):
        labels = index_labels(len(fam))
        D = principal_ultrafilter(labels, labels[0])
        P = infraproduct(IndexedFamily(labels, fam), D, validate=False)
        for name, t in P.sig.constants:
            vals = [U.constants[name] for U in fam]
            if isinstance(t, FirstOrder):
                ok = all(P.component(P.constants[name], f) == vals[f] for f in range(P.k))
                first_order["checks"] += 1
                first_order["failures"] += not ok
                continue
            regime = _regime(vals)
            for f in range(P.k):
                ok = P.project_set(t, P.constants[name], f) == vals[f]
                counts[regime]["checks"] += 1
                if not ok:
                    counts[regime]["failures"] += 1
                    if counterexample is None and regime == "mixed":
                        counterexample = {
                            "kind": "constant", "constant": name, "family": describe_family(labels, fam),
                            "index": labels[f], "factor_value": fam[f].show(t, vals[f]),
                            "projection": fam[f].show(t, P.project_set(t, P.constants[name], f)),
                        }
        for masks in itertools.product(*(range(U.size(SET_OF_POINTS)) for U in fam)):
            evs = [{u: m} for m in masks]
            gamma = crossing(P, evs)
            regime = _regime(masks)
            for f in range(P.k):
                proj = P.project_set(SET_OF_POINTS, gamma[u], f)
                counts[regime]["checks"] += 1
                if proj != masks[f]:
                    counts[regime]["failures"] += 1
                    if counterexample is None and regime == "mixed":
                        counterexample = {
                            "kind": "evaluation", "family": describe_family(labels, fam), "index": labels[f],
                            "factor_value": fam[f].show(SET_OF_POINTS, masks[f]),
                            "projection": fam[f].show(SET_OF_POINTS, proj),
                        }
        x = Var("x", ZERO)
        for beta_u in range(P.size(SET_OF_POINTS)):
            for beta_x in range(P.n):
                beta = {u: beta_u, x: beta_x}
                _, delta = decompose_evaluation(P, beta)
                ok = P.eq(SET_OF_POINTS, delta[u], beta_u) and delta[x] == beta_x
                decomposition["checks"] += 1
                decomposition["failures"] += not ok
    passed = (counts["nonempty"]["failures"] == 0 and counts["all-empty"]["failures"] == 0
              and first_order["failures"] == 0 and decomposition["failures"] == 0 and counterexample is not None)
    return {"id": "projection", "passed": passed, "regimes": counts, "first_order_constants": first_order,
            "decomposition": decomposition, "empty_counterexample": counterexample}


def _regime(values: Sequence[int]) -> str:
    if all(values):
        return "nonempty"
    return "mixed" if any(values) else "all-empty"


# --- standard-semantics contrast -------------------------------------------------------

def contrast_search(pool_systems: Sequence[System], pool: Sequence[Var], formulas: Sequence[Formula],
                    max_index: int = 2, predicate: Callable[[Formula], bool] | None = None) -> dict[str, Any]:
    """Search for an instance where standard semantics breaks the equivalence.

    Every instance is evaluated both ways.  The first witness is the least
    one in (formula, family, ultrafilter, evaluation) order.
    """
    std_tabs, gen_tabs = FactorTables(pool, True), FactorTables(pool, False)
    forms = [phi for phi in formulas if predicate is None or predicate(phi)]
    best = None
    std_fail = gen_fail = checks = 0
    for inst, (labels, fam, D) in enumerate(families_with_ultrafilters(pool_systems, max_index)):
        P = infraproduct(IndexedFamily(labels, fam), D, validate=False)
        tp_std, tp_gen = TableEvaluator(P, pool, True), TableEvaluator(P, pool, False)
        cols = instance_columns(P, pool)
        in_d = membership_table(D)
        for fi, phi in enumerate(forms):
            ls, rs, _ = vector_verdicts(phi, P, tp_std, [std_tabs.get(U) for U in fam], cols, in_d)
            lg, rg, _ = vector_verdicts(phi, P, tp_gen, [gen_tabs.get(U) for U in fam], cols, in_d)
            checks += cols.count
            bad_std = ls != rs
            std_fail += int(bad_std.sum())
            gen_fail += int((lg != rg).sum())
            hits = np.nonzero(bad_std & (lg == rg))[0]
            if len(hits):
                key = (fi, inst, int(hits[0]))
                if best is None or key < best[0]:
                    j = int(hits[0])
                    fv = free_variables(phi)
                    ev = cols.evaluations[j]
                    best = (key, {
                        "family": describe_family(labels, fam),
                        "ultrafilter": D.describe(),
                        "formula": to_text(phi),
                        "evaluations": [describe_evaluation(U, {v: e[v] for v in fv}) for U, e in zip(fam, ev)],
                        "standard": {"lhs": bool(ls[j]), "rhs": bool(rs[j])},
                        "generalized": {"lhs": bool(lg[j]), "rhs": bool(rg[j])},
                    })
    return {"checks": checks, "standard_failures": std_fail, "generalized_failures": gen_fail,
            "witness": best[1] if best else None,
            "notice": None if best else "search space exhausted without a witness"}


def los_quotient_check(pool_systems: Sequence[System], pool: Sequence[Var], formulas: Sequence[Formula],
                       max_index: int = 2) -> dict[str, Any]:
    """Standard satisfaction in the quotient of the product by agreement on a filter set.

    Defined for first-order formulas over factors with set-theoretic
    equality; this is the classical construction, used as a sanity oracle.
    """
    checks = fails = 0
    sig0 = Signature.of([ZERO])
    for labels, fam, D in families_with_ultrafilters(pool_systems, max_index):
        if not all(U.is_canonical() for U in fam):
            raise InvalidSystem("the quotient oracle needs factors with set-theoretic relations")
        P = infraproduct(IndexedFamily(labels, fam), D, validate=False)
        rep: dict[int, int] = {}
        classes: list[int] = []
        for e in range(P.n):
            r = next((c for c in classes if P.eq(ZERO, c, e)), None)
            if r is None:
                classes.append(e)
                r = e
            rep[e] = classes.index(r)
        Q = System(sig0, [P.labels[c] for c in classes], name="quotient")
        for phi in formulas:
            fv = sort_vars(free_variables(phi))
            evq = Evaluator(Q, standard=True)
            evf = [Evaluator(U, standard=True) for U in fam]
            points = list(itertools.product(*(range(U.n) for U in fam)))
            for vals in itertools.product(points, repeat=len(fv)):
                per = [{v: vals[i][f] for i, v in enumerate(fv)} for f in range(P.k)]
                truth = sum(1 << f for f in range(P.k) if evf[f].holds(phi, per[f]))
                gamma = {v: rep[P.element_of([per[f][v] for f in range(P.k)])] for v in fv}
                checks += 1
                if evq.holds(phi, gamma) != (truth in D):
                    fails += 1
    return {"checks": checks, "failures": fails}


def first_order_fragment(phi: Formula) -> bool:
    return all(isinstance(s.type, FirstOrder) for s in subformulas(phi) if isinstance(s, Eq)) and not any(
        isinstance(s, In) or (isinstance(s, Exists) and not isinstance(s.var.type, FirstOrder))
        for s in subformulas(phi)
    )


def second_order_equality(phi: Formula) -> bool:
    return any(isinstance(s, Eq) and not isinstance(s.type, FirstOrder) for s in subformulas(phi))


def standard_counterexample(max_index: int = 2, max_symbols: int = 1, seed: int = 0) -> dict[str, Any]:
    """Contrast search over canonical factors with two variables of each of the types 0 and [0]."""
    sig = Signature.of([ZERO, SET_OF_POINTS])
    systems = [U for U in set_system_pool() if U.is_canonical()]
    pool = [Var("x", ZERO), Var("y", ZERO), Var("u", SET_OF_POINTS), Var("v", SET_OF_POINTS)]
    forms = list(FormulaGenerator(sig, pool, seed=seed).canonical(max_symbols))
    main = contrast_search(systems, pool, forms, max_index)
    second = contrast_search(systems, pool, forms, max_index, predicate=second_order_equality)
    fo_pool = pool[:2]
    fo_forms = [phi for phi in FormulaGenerator(sig, fo_pool, seed=seed).canonical(max_symbols + 1)
                if first_order_fragment(phi)]
    fo = contrast_search(systems, fo_pool, fo_forms, max_index)
    quotient = los_quotient_check(systems, fo_pool, fo_forms, max_index)
    passed = (main["witness"] is not None and main["generalized_failures"] == 0
              and second["witness"] is not None and fo["standard_failures"] > 0 and quotient["failures"] == 0)
    return {"id": "counterexample-standard", "passed": passed, "search": main,
            "second_order_equality": second, "first_order_fragment": fo, "quotient_oracle": quotient}


# --- compactness -------------------------------------------------------------------------

Provider = Callable[[Sequence[Formula]], tuple[System, dict[Var, int]]]


def search_provider(candidates: Sequence[System], variables: Sequence[Var] | None = None) -> Provider:
    """A provider that scans candidate systems and evaluations in order.

    Second-order variables only take nonempty values, so crossings of the
    provided evaluations stay in the regime where projections are faithful.
    """

    def provide(formulas: Sequence[Formula]) -> tuple[System, dict[Var, int]]:
        fv = set(variables or ())
        for phi in formulas:
            fv |= free_variables(phi)
        vs = sort_vars(fv)
        for U in candidates:
            if equality_axiom_failure(U) is not None:
                continue
            doms = [range(U.n) if isinstance(v.type, FirstOrder) else range(1, U.size(v.type)) for v in vs]
            ev = Evaluator(U)
            for vals in itertools.product(*doms):
                gamma = dict(zip(vs, vals))
                if all(ev.holds(phi, gamma) for phi in formulas):
                    return U, gamma
        raise ProviderFailure("no candidate satisfies " + "; ".join(to_text(p) for p in formulas))

    return provide


def compactness_build(phis: Sequence[Formula], provider: Provider) -> tuple[System, dict[Var, int], dict[str, Any]]:
    t0 = time.perf_counter()
    phis = list(phis)
    if not phis:
        raise ValueError("compactness needs at least one formula")
    if len(phis) > 3:
        raise BudgetExceeded("compactness construction is limited to three formulas")
    m = len(phis)
    subsets = [s for r in range(1, m + 1) for s in itertools.combinations(range(m), r)]
    labels = tuple("f{" + ",".join(str(i) for i in s) + "}" for s in subsets)
    models: list[System] = []
    evs: list[dict[Var, int]] = []
    allvars: set[Var] = set()
    for phi in phis:
        allvars |= free_variables(phi)
    for s in subsets:
        U, gamma = provider([phis[i] for i in s])
        fail = equality_axiom_failure(U)
        if fail is not None:
            raise ProviderFailure(f"the model for {set(s)} fails the equality axioms: {fail}")
        for i in s:
            if not satisfies(U, phis[i], gamma):
                raise ProviderFailure(f"the model for {set(s)} does not satisfy {to_text(phis[i])}")
        missing = allvars - set(gamma)
        for v in sort_vars(missing):
            gamma[v] = 0 if isinstance(v.type, FirstOrder) else (1 << U.width(v.type)) - 1
        models.append(U)
        evs.append({v: gamma[v] for v in sort_vars(allvars)})
    # F_f: the subsets containing f
    def upset(s: tuple[int, ...]) -> int:
        return sum(1 << j for j, g in enumerate(subsets) if set(s) <= set(g))

    ensemble = [upset(s) for s in subsets]
    try:
        d = generated_filter(labels, ensemble)
    except NoProperFilter:
        raise
    E = extend_to_ultrafilter(d)
    fam = IndexedFamily(labels, tuple(models), tuple(evs))
    P = infraproduct(fam, E, validate=False)
    gamma = crossing(P)
    verdicts = [{"formula": to_text(phi), "holds": satisfies(P, phi, gamma)} for phi in phis]
    membership = []
    for i, phi in enumerate(phis):
        F_phi = upset((i,))
        good = all(satisfies(models[j], phi, evs[j]) for j in range(len(subsets)) if (F_phi >> j) & 1)
        membership.append({"formula": to_text(phi), "upset_models_satisfy": good})
    axioms = equality_axiom_failure(P)
    report = {
        "id": "compactness",
        "index_set": list(labels),
        "ultrafilter": E.describe(),
        "carrier_size": P.n,
        "verdicts": verdicts,
        "upset_membership": membership,
        "equality_axioms": axioms is None,
        "equality_axiom_failure": axioms,
        "passed": all(v["holds"] for v in verdicts) and axioms is None and all(m["upset_models_satisfy"] for m in membership),
    }
    report["runtime"] = time.perf_counter() - t0
    return P, gamma, report


def compactness_cases() -> list[tuple[str, Signature, list[str]]]:
    return [
        ("single", Signature.of([ZERO, SET_OF_POINTS]), ["E x:0 . E y:0 . !(x =0 y)"]),
        ("two-closed", Signature.of([ZERO, SET_OF_POINTS]),
         ["E u:[0] . A x:0 . x in[0] u", "E x:0 . E u:[0] . !(x in[0] u)"]),
        # each formula has a one-element model; the last two together need two elements
        ("three-open", Signature.of([ZERO, SET_OF_POINTS]),
         ["E u:[0] . A y:0 . y in[0] u", "A v:[0] . x in[0] v", "E v:[0] . !(v =[0] w)"]),
    ]


def compactness_candidates() -> list[System]:
    """The small pool plus a two-element system where the first point belongs to every set."""
    sig = Signature.of([ZERO, SET_OF_POINTS])
    pairs = [(p, P) for P in range(4) for p in range(2) if (P >> p) & 1] + [(0, P) for P in range(4)]
    absorbing = System(sig, ["a", "b"], {}, {}, {SET_OF_POINTS: PairSet(set(pairs))}, name="absorbing2")
    return set_system_pool() + [absorbing]


def compactness_checks(max_formulas: int = 3) -> dict[str, Any]:
    from ..parser import parse

    results = []
    candidates = compactness_candidates()
    for name, sig, texts in compactness_cases():
        if len(texts) > max_formulas:
            continue
        phis = [parse(t, sig) for t in texts]
        _, _, rep = compactness_build(phis, search_provider(candidates))
        rep.pop("runtime", None)
        rep["case"] = name
        results.append(rep)
    return {"id": "compactness", "passed": all(r["passed"] for r in results), "cases": results}


# --- normalization and evaluation equivalence -----------------------------------------

def normalization_check(count: int, seed: int = 0, max_depth: int = 4) -> dict[str, Any]:
    rng = random.Random(seed)
    sig = constant_signature()
    pool = default_pool(sig)
    gen = FormulaGenerator(sig, pool, seed=seed, max_depth=max_depth)
    systems = [random_system(rng.randrange(1 << 30), sig, rng.randint(1, 2), 0.5,
                             perturb=rng.choice((0.0, 0.3)), perturb_mode=rng.choice(("block", "pair")))
               for _ in range(64)]
    fails = 0
    first = None
    for _ in range(count):
        U = systems[rng.randrange(len(systems))]
        phi = gen.random(max_depth, rng)
        gamma = random_evaluation(U, pool, rng)
        a = Evaluator(U).holds(phi, gamma)
        b = Evaluator(U).holds(normalize(phi), gamma)
        if a != b:
            fails += 1
            if first is None:
                first = {"system": U.name, "formula": to_text(phi), "normal_form": to_text(normalize(phi))}
    return {"id": "normalization", "passed": fails == 0, "triples": count, "failures": fails, "first_failure": first}


def evaluation_equivalence_check(count: int, seed: int = 0, max_depth: int = 4) -> dict[str, Any]:
    rng = random.Random(seed)
    sig = constant_signature()
    pool = default_pool(sig)
    gen = FormulaGenerator(sig, pool, seed=seed, max_depth=max_depth)
    systems = [U for U in random_models(sig, 48, seed, max_size=2, coarsening=0.8) if not U.is_canonical()]
    fails = moved = 0
    first = None
    for _ in range(count):
        U = systems[rng.randrange(len(systems))]
        phi = gen.random(max_depth, rng)
        gamma = random_evaluation(U, pool, rng)
        delta = related_evaluation(U, gamma, rng)
        moved += delta != gamma
        if Evaluator(U).holds(phi, gamma) != Evaluator(U).holds(phi, delta):
            fails += 1
            if first is None:
                first = {"system": U.name, "formula": to_text(phi)}
    return {"id": "evaluation-equivalence", "passed": fails == 0, "triples": count, "distinct_pairs": moved,
            "failures": fails, "first_failure": first}


# --- exemplars ------------------------------------------------------------------------

def worked_example_facts(N: int = 16) -> dict[str, Any]:
    U = make_fraction_system(N)
    t = SET_OF_POINTS
    P0 = U.encode(t, ["3/8", "2/3"])
    Q0 = U.encode(t, ["6/16", "2/3", "4/6"])
    facts = {
        "P0 approx Q0": U.eq(t, P0, Q0),
        "P0 != Q0": P0 != Q0,
        "6/16 gen-in P0": U.bel(t, U.index("6/16"), P0),
        "6/9 gen-in P0": U.bel(t, U.index("6/9"), P0),
        "6/16 not in P0": not (P0 >> U.index("6/16")) & 1,
        "6/9 not in P0": not (P0 >> U.index("6/9")) & 1,
    }
    return {"N": N, "facts": facts, "passed": all(facts.values())}


def structural_report(U: System) -> dict[str, Any]:
    out: dict[str, Any] = {"system": U.name, "size": U.n}
    for key, fn in (("equality_axioms", equality_axiom_failure), ("regular", regular_failure),
                    ("balanced", balanced_failure), ("extensional", extensional_failure)):
        try:
            fail = fn(U)
            out[key] = fail is None
            if fail:
                out[key + "_failure"] = fail
        except BudgetExceeded as e:
            out[key] = None
            out[key + "_budget"] = str(e)
    out["passed"] = all(out[k] is True for k in ("equality_axioms", "regular", "balanced", "extensional"))
    return out


def exemplar_checks(worked_N: int = 16, fraction_N: Iterable[int] = (1,), segment_G: Iterable[int] = (1,),
                    max_terminal: int | None = None) -> dict[str, Any]:
    kw = {} if max_terminal is None else {"max_terminal": max_terminal}
    systems = []
    for N in fraction_N:
        systems.append(structural_report(make_fraction_system(N, **kw)))
    for G in segment_G:
        systems.append(structural_report(make_segment_system(G, **kw)))
    worked = worked_example_facts(worked_N) if worked_N else None
    passed = all(s["passed"] for s in systems) and (worked is None or worked["passed"])
    return {"id": "exemplars", "passed": passed, "worked_example": worked, "systems": systems}


# --- tower ----------------------------------------------------------------------------

def tower_checks(depth: int = 2, exponent: int = 2, max_symbols: int = 3, base: System | None = None) -> dict[str, Any]:
    """Tower, limit, preservation and witness checks.  Without a base the mod-2 field is used."""
    from ..axioms import real_axis_signature
    from ..tower import (
        binary_partition_witness, build_limit, build_tower, check_submodel, embedding_checks, limit_checks,
    )

    if base is None:
        base = two_element_field()
    arithmetic = base.sig == real_axis_signature()
    F = tuple(f"f{i}" for i in range(exponent))
    D = principal_ultrafilter(F, F[0])
    T = build_tower(base, F, D, depth)
    sizes = T.sizes()
    expected = [base.n ** (exponent ** i) for i in range(depth + 1)]
    E = principal_ultrafilter(tuple(str(i) for i in range(depth + 1)), str(depth))
    L = build_limit(T, E, F[0])
    emb = embedding_checks(T)
    lim = limit_checks(L)
    axioms = []
    for i, U in enumerate(T.levels):
        try:
            fail = equality_axiom_failure(U)
            axioms.append({"level": i, "holds": fail is None, "failure": fail})
        except BudgetExceeded as e:
            axioms.append({"level": i, "holds": None, "skipped": str(e)})
    pool = [Var("x", ZERO), Var("y", ZERO)]
    gen = FormulaGenerator(base.sig, pool)
    forms, vals = ClosedBatch(gen, T.levels, prune=True).closed(max_symbols)
    base_true = vals[0]
    per_level = []
    mismatch_example = None
    for i in range(1, len(T.levels)):
        lost = np.nonzero(base_true & ~vals[i])[0]
        gained = np.nonzero(~base_true & vals[i])[0]
        per_level.append({"level": i, "preserved": int((base_true & vals[i]).sum()),
                          "lost": len(lost), "gained": len(gained)})
        if mismatch_example is None and (len(lost) or len(gained)):
            mismatch_example = to_text(forms[int((list(lost) + list(gained))[0])])
    _, lib = real_axis_library()
    named = [(n, f) for n, f in lib if n.startswith("A") and arithmetic] + named_equality_axioms(base.sig)
    submodels = []
    for i, u in enumerate(T.embeddings):
        rep = check_submodel(T.levels[i], T.levels[i + 1], u, named)
        rep["embedding"] = f"u{i}"
        submodels.append(rep)
    witnesses = []
    for lvl in range(1, depth + 1 if arithmetic else 1):
        for ax in ("A3", "A19"):
            witnesses.append(binary_partition_witness(T, lvl, ax))
    ok_sub = all(r["preserved"] in (True, None) for rep in submodels for r in rep["formulas"]) and all(
        rep["constants_in_image"] and rep["equality_reflected"] and rep["constant_belonging_reflected"]
        for rep in submodels
    )
    passed = (
        sizes == expected
        and all(e["diagonal"] and e["homomorphism"] and e["approx_injective"] for e in emb)
        and all(r["homomorphism"] and r["approx_injective"] and r.get("composition", True) for r in lim)
        and all(a["holds"] in (True, None) for a in axioms)
        and all(p["lost"] == 0 and p["gained"] == 0 for p in per_level)
        and ok_sub
        and all(w["all_consistent"] for w in witnesses)
    )
    return {
        "id": "tower",
        "passed": passed,
        "base": base.name,
        "exponent": list(F),
        "ultrafilter": D.describe(),
        "depth": depth,
        "sizes": sizes,
        "expected_sizes": expected,
        "embeddings": emb,
        "limit": {"index_set": list(L.index_set), "ultrafilter": E.describe(), "anchor": L.anchor,
                  "size": L.system.n, "maps": lim, "notes": L.notes},
        "equality_axioms": axioms,
        "closed_formulas": {"count": len(forms), "base_true": int(base_true.sum()), "levels": per_level,
                            "first_mismatch": mismatch_example},
        "submodels": submodels,
        "partition_witnesses": witnesses,
    }


__all__ = [
    "CheckReport", "check_infrafiltration", "infrafiltration_sweep", "sweep_formulas", "filter_boundary",
    "formula_class", "projection_checks", "contrast_search", "standard_counterexample", "los_quotient_check",
    "search_provider", "compactness_build", "compactness_checks", "normalization_check",
    "evaluation_equivalence_check", "worked_example_facts", "exemplar_checks", "structural_report", "tower_checks",
    "FactorTables", "instance_columns", "vector_verdicts", "membership_table",
]
