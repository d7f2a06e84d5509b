"""Unquotiented products of systems over a filter, and crossings of evaluations.

A product element is stored as a mixed-radix index over the factor
carriers, the first factor most significant.  A relation instance holds in
the product when it holds componentwise (or on projections) at every index
of some member of the filter.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core_types import DEFAULT_MAX_TERMINAL, Bracket, FirstOrder, Type
from .errors import InvalidSystem, NotAFilter, SignatureMismatch
from .filters import FilterSpec, principal_ultrafilter
from .formulas import Var
from .semantics import Predicate, System, bits, tuple_code, tuple_of

Evaluation = Mapping[Var, int]


@dataclass
class IndexedFamily:
    index_set: tuple[str, ...]
    systems: tuple[System, ...]
    evaluations: tuple[dict[Var, int], ...] | None = None

    def __post_init__(self) -> None:
        self.index_set = tuple(self.index_set)
        self.systems = tuple(self.systems)
        if not self.index_set:
            raise ValueError("a family needs a nonempty index set")
        if len(self.index_set) != len(self.systems):
            raise ValueError("one system per index is required")
        if len(set(self.index_set)) != len(self.index_set):
            raise ValueError("index labels must be unique")
        sig = self.systems[0].sig
        for U in self.systems[1:]:
            if U.sig != sig:
                raise SignatureMismatch("all factors must share one signature")
        if self.evaluations is not None:
            self.evaluations = tuple(dict(e) for e in self.evaluations)
            if len(self.evaluations) != len(self.systems):
                raise ValueError("one evaluation per index is required")

    @property
    def sig(self):
        return self.systems[0].sig

    def __len__(self) -> int:
        return len(self.systems)

    def truth_set(self, holds: Sequence[bool]) -> int:
        return sum(1 << i for i, h in enumerate(holds) if h)


class ProductSystem(System):
    """The infraproduct of a family over a filter."""

    def __init__(self, fam: IndexedFamily, D: FilterSpec, *, max_terminal: int = DEFAULT_MAX_TERMINAL,
                 iterate: str = "minimal", validate: bool = True):
        if tuple(D.index_set) != fam.index_set:
            raise ValueError("filter and family use different index sets")
        if not D.is_filter():
            raise NotAFilter(f"the ensemble {D.describe()} is not a filter")
        if iterate not in ("minimal", "all"):
            raise ValueError("iterate must be 'minimal' or 'all'")
        self.family = fam
        self.D = D
        self.factors = fam.systems
        self.k = len(fam.systems)
        sizes = [U.n for U in self.factors]
        self.factor_sizes = sizes
        n = math.prod(sizes)
        # stride of factor f in the mixed-radix index
        self.strides = [math.prod(sizes[f + 1:]) for f in range(self.k)]
        self.comps = [tuple((e // self.strides[f]) % sizes[f] for f in range(self.k)) for e in range(n)]
        labels = [
            "⟨" + ",".join(f"{self.factors[f].labels[c[f]]}@{fam.index_set[f]}" for f in range(self.k)) + "⟩"
            for c in self.comps
        ]
        self._witness_sets = D.minimal_members() if iterate == "minimal" else sorted(D.members)
        self._witness_lists = [list(bits(G)) for G in self._witness_sets]
        self._proj_cache: dict[tuple[int, int, int], int] = {}
        self._code_proj: dict[int, list[list[int]] | None] = {}
        sig = fam.sig
        self.n = n
        constants: dict[str, int] = {}
        empty: list[str] = []
        for name, t in sig.constants:
            vals = [U.constants[name] for U in self.factors]
            if isinstance(t, FirstOrder):
                constants[name] = self.element_of(vals)
            else:
                constants[name] = self.cross_sets(t, vals)
                if any(v == 0 for v in vals):
                    empty.append(name)
        eqs = {t: Predicate(self._make_eq(t), cache=True) for t in sig.types}
        bels = {t: Predicate(self._make_bel(t), cache=True) for t in sig.belonging_types}
        super().__init__(sig, labels, constants, eqs, bels, max_terminal=max_terminal, validate=validate,
                         name=f"infraproduct[{','.join(fam.index_set)}]",
                         meta={"filter": D.describe(), "empty_factor_constants": empty})
        self.empty_factor_constants = empty

    # coordinates
    def element_of(self, components: Sequence[int]) -> int:
        return sum(c * s for c, s in zip(components, self.strides))

    def component(self, e: int, f: int) -> int:
        return self.comps[e][f]

    def _code_table(self, arity: int) -> list[list[int]] | None:
        if arity not in self._code_proj:
            W = self.n ** arity
            if W > 1 << 16:
                self._code_proj[arity] = None
            else:
                self._code_proj[arity] = [
                    [self._project_code_raw(code, f, arity) for code in range(W)] for f in range(self.k)
                ]
        return self._code_proj[arity]

    def _project_code_raw(self, code: int, f: int, arity: int) -> int:
        parts = tuple_of(code, self.n, arity)
        return tuple_code([self.comps[p][f] for p in parts], self.factor_sizes[f])

    def project_code(self, t: Bracket, code: int, f: int) -> int:
        """The tuple ``p(f)`` for a tuple code ``p`` over the product."""
        table = self._code_table(t.arity)
        if table is not None:
            return table[f][code]
        return self._project_code_raw(code, f, t.arity)

    def project_set(self, t: Bracket, P: int, f: int) -> int:
        """The projection ``P<f>`` as a mask over the factor's tuple codes."""
        key = (t.arity, P, f)
        hit = self._proj_cache.get(key)
        if hit is not None:
            return hit
        out = 0
        for code in bits(P):
            out |= 1 << self.project_code(t, code, f)
        self._proj_cache[key] = out
        return out

    def code_from_factors(self, t: Bracket, factor_codes: Sequence[int]) -> int:
        """Inverse of projection on single tuples."""
        m = t.arity
        parts = [tuple_of(c, self.factor_sizes[f], m) for f, c in enumerate(factor_codes)]
        elems = [self.element_of([parts[f][i] for f in range(self.k)]) for i in range(m)]
        return tuple_code(elems, self.n)

    def cross_sets(self, t: Bracket, masks: Sequence[int]) -> int:
        """``{p : p(f) in masks[f] for every f}``."""
        out = 0
        for choice in itertools.product(*(list(bits(m)) for m in masks)):
            out |= 1 << self.code_from_factors(t, choice)
        return out

    # relations
    def _large(self, per_index) -> bool:
        for G in self._witness_lists:
            if all(per_index(g) for g in G):
                return True
        return False

    def _make_eq(self, t: Type):
        if isinstance(t, FirstOrder):
            comps, fac = self.comps, self.factors

            def eq(a: int, b: int) -> bool:
                ca, cb = comps[a], comps[b]
                return self._large(lambda g: fac[g].eq(t, ca[g], cb[g]))
        else:
            def eq(P: int, Q: int) -> bool:
                return self._large(
                    lambda g: self.factors[g].eq(t, self.project_set(t, P, g), self.project_set(t, Q, g))
                )
        return eq

    def _make_bel(self, t: Bracket):
        def bel(code: int, P: int) -> bool:
            return self._large(
                lambda g: self.factors[g].bel(t, self.project_code(t, code, g), self.project_set(t, P, g))
            )
        return bel

    def truth_set_eq(self, t: Type, a: int, b: int) -> int:
        """Indices where the factor relation holds on the components."""
        out = 0
        for g in range(self.k):
            if isinstance(t, FirstOrder):
                ok = self.factors[g].eq(t, self.comps[a][g], self.comps[b][g])
            else:
                ok = self.factors[g].eq(t, self.project_set(t, a, g), self.project_set(t, b, g))
            if ok:
                out |= 1 << g
        return out


def infraproduct(fam: IndexedFamily, D: FilterSpec, *, max_terminal: int = DEFAULT_MAX_TERMINAL,
                 iterate: str = "minimal", validate: bool = True) -> ProductSystem:
    return ProductSystem(fam, D, max_terminal=max_terminal, iterate=iterate, validate=validate)


def crossing(product: ProductSystem, evaluations: Sequence[Evaluation] | None = None) -> dict[Var, int]:
    """Combine per-factor evaluations into one evaluation on the product."""
    evs = evaluations if evaluations is not None else product.family.evaluations
    if evs is None:
        raise ValueError("the family carries no evaluations")
    if len(evs) != product.k:
        raise ValueError("one evaluation per factor is required")
    keys = set(evs[0])
    for e in evs[1:]:
        if set(e) != keys:
            raise ValueError("factor evaluations must cover the same variables")
    out: dict[Var, int] = {}
    for v in keys:
        vals = [e[v] for e in evs]
        if isinstance(v.type, FirstOrder):
            out[v] = product.element_of(vals)
        else:
            out[v] = product.cross_sets(v.type, vals)
    return out


def decompose_evaluation(product: ProductSystem, beta: Evaluation) -> tuple[list[dict[Var, int]], dict[Var, int]]:
    """Per-factor components (or projections) of ``beta`` and their crossing."""
    parts: list[dict[Var, int]] = [{} for _ in range(product.k)]
    for v, val in beta.items():
        for f in range(product.k):
            if isinstance(v.type, FirstOrder):
                parts[f][v] = product.component(val, f)
            else:
                parts[f][v] = product.project_set(v.type, val, f)
    return parts, crossing(product, parts)


def infrapower(U0: System, gamma0: Evaluation | None, index_set: Sequence[str], D: FilterSpec, *,
               max_terminal: int = DEFAULT_MAX_TERMINAL, validate: bool = True) -> tuple[ProductSystem, dict[Var, int]]:
    labels = tuple(index_set)
    evs = tuple(dict(gamma0) for _ in labels) if gamma0 is not None else None
    fam = IndexedFamily(labels, tuple(U0 for _ in labels), evs)
    P = infraproduct(fam, D, max_terminal=max_terminal, validate=validate)
    gamma = crossing(P) if evs is not None else {}
    return P, gamma


def diagonal(U0: System, product: ProductSystem) -> list[int]:
    """The map sending ``a`` to the constant choice function at ``a``."""
    if any(U is not U0 and U.n != U0.n for U in product.factors):
        raise InvalidSystem("diagonal map needs identical factor carriers")
    return [product.element_of([a] * product.k) for a in range(U0.n)]


__all__ = [
    "IndexedFamily", "ProductSystem", "infraproduct", "crossing", "decompose_evaluation", "infrapower",
    "diagonal", "principal_ultrafilter",
]
