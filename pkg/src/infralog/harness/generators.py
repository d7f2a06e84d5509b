"""Formula, system, family and evaluation generators for the verification sweeps."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from ..core_types import ZERO, FirstOrder, Type
from ..exemplars import SET_OF_POINTS, canonical_system, random_system, saturated_system
from ..filters import all_ultrafilters
from ..formulas import (
    And, Const, Eq, Exists, Forall, Formula, Implies, In, Not, Or, Signature, Term, Var, free_variables,
)
from ..semantics import PairSet, System, bits, related_rows


@dataclass
class _Entry:
    phi: Formula
    free: frozenset
    bound: frozenset


@dataclass
class FormulaGenerator:
    """Well-typed formulas over a signature and a fixed variable pool.

    ``canonical`` enumerates the negation/conjunction/existential fragment
    stratified by the number of logical symbols: conjunctions are taken with
    the left operand strictly earlier in the enumeration, quantifiers bind a
    free variable of the body that is not bound inside it.  ``random`` draws
    from the full connective set and is fixed by the seed.
    """

    sig: Signature
    pool: Sequence[Var]
    seed: int = 0
    max_depth: int = 4
    max_quantifier_nesting: int | None = None
    _levels: list[list[_Entry]] = field(default_factory=list, init=False, repr=False)

    def __post_init__(self) -> None:
        self.pool = list(self.pool)
        for v in self.pool:
            if v.type not in self.sig.domain:
                raise ValueError(f"variable {v.name} has type {v.type} outside the signature")
        self.rng = random.Random(self.seed)

    # atoms
    def terms(self, t: Type, allowed: Sequence[Var] | None = None) -> list[Term]:
        vs = self.pool if allowed is None else allowed
        out: list[Term] = [v for v in vs if v.type == t]
        out += [Const(c, t) for c in self.sig.constants_of(t)]
        return out

    def atoms(self, allowed: Sequence[Var] | None = None) -> list[Formula]:
        out: list[Formula] = []
        for t in self.sig.types:
            ts = self.terms(t, allowed)
            out += [Eq(t, a, b) for a in ts for b in ts]
        for t in self.sig.belonging_types:
            rights = self.terms(t, allowed)
            comps = [self.terms(c, allowed) for c in t.components]
            for args in itertools.product(*comps):
                out += [In(t, tuple(args), r) for r in rights]
        return out

    # canonical enumeration
    def _entry(self, phi: Formula, free: frozenset, bound: frozenset) -> _Entry:
        return _Entry(phi, free, bound)

    def _build_level(self, k: int) -> list[_Entry]:
        if k == 0:
            return [_Entry(a, free_variables(a), frozenset()) for a in self.atoms()]
        out: list[_Entry] = []
        for e in self._levels[k - 1]:
            out.append(_Entry(Not(e.phi), e.free, e.bound))
        for i in range(k):
            j = k - 1 - i
            if i > j:
                break
            left, right = self._levels[i], self._levels[j]
            for a_idx, a in enumerate(left):
                start = a_idx + 1 if i == j else 0
                for b in right[start:]:
                    out.append(_Entry(And(a.phi, b.phi), a.free | b.free, a.bound | b.bound))
        for e in self._levels[k - 1]:
            for v in self.pool:
                if v in e.free and v not in e.bound:
                    if self.max_quantifier_nesting is not None and self._nesting(e.phi) >= self.max_quantifier_nesting:
                        continue
                    out.append(_Entry(Exists(v, e.phi), e.free - {v}, e.bound | {v}))
        return out

    @staticmethod
    def _nesting(phi: Formula) -> int:
        if isinstance(phi, (Exists, Forall)):
            return 1 + FormulaGenerator._nesting(phi.body)
        if isinstance(phi, Not):
            return FormulaGenerator._nesting(phi.body)
        if isinstance(phi, (And, Or, Implies)):
            return max(FormulaGenerator._nesting(phi.left), FormulaGenerator._nesting(phi.right))
        return 0

    def level(self, k: int) -> list[Formula]:
        while len(self._levels) <= k:
            self._levels.append(self._build_level(len(self._levels)))
        return [e.phi for e in self._levels[k]]

    def canonical(self, max_symbols: int) -> Iterator[Formula]:
        for k in range(max_symbols + 1):
            yield from self.level(k)

    def canonical_closed(self, max_symbols: int, prune: bool = False) -> Iterator[Formula]:
        """Closed canonical formulas up to ``max_symbols`` logical symbols.

        Subformulas may only mention pool variables bound above them.  With
        ``prune``, double negations and conjunctions of two closed formulas
        are skipped: their truth value is a boolean function of formulas
        that remain in the enumeration.
        """
        for k in range(max_symbols + 1):
            yield from self._closed(k, frozenset(), prune)

    def _closed(self, k: int, scope: frozenset, prune: bool) -> list[Formula]:
        key = (k, scope, prune)
        cache = self.__dict__.setdefault("_closed_cache", {})
        if key in cache:
            return cache[key]
        allowed = [v for v in self.pool if v in scope]
        out: list[Formula]
        if k == 0:
            out = self.atoms(allowed)
        else:
            out = [Not(a) for a in self._closed(k - 1, scope, prune) if not (prune and isinstance(a, Not))]
            for i in range(k):
                j = k - 1 - i
                if i > j:
                    break
                left, right = self._closed(i, scope, prune), self._closed(j, scope, prune)
                if prune and not scope:
                    continue
                for a_idx, a in enumerate(left):
                    start = a_idx + 1 if i == j else 0
                    out += [And(a, b) for b in right[start:]]
            for v in self.pool:
                if v not in scope:
                    out += [Exists(v, b) for b in self._closed(k - 1, scope | {v}, prune) if v in free_variables(b)]
        cache[key] = out
        return out

    # random formulas
    def random(self, depth: int | None = None, rng: random.Random | None = None,
               bound: frozenset = frozenset()) -> Formula:
        rng = rng or self.rng
        d = self.max_depth if depth is None else depth
        if d == 0 or rng.random() < 0.2:
            return self._random_atom(rng)
        r = rng.random()
        free_vars = [v for v in self.pool if v not in bound]
        if r < 0.2:
            return Not(self.random(d - 1, rng, bound))
        if r < 0.6:
            op = rng.choice((And, Or, Implies))
            return op(self.random(d - 1, rng, bound), self.random(d - 1, rng, bound))
        if not free_vars:
            return Not(self.random(d - 1, rng, bound))
        v = rng.choice(free_vars)
        q = rng.choice((Exists, Forall))
        return q(v, self.random(d - 1, rng, bound | {v}))

    def _random_atom(self, rng: random.Random) -> Formula:
        choices = [t for t in self.sig.types if self.terms(t)]
        kinds = [("eq", t) for t in choices] + [
            ("in", t) for t in self.sig.belonging_types
            if self.terms(t) and all(self.terms(c) for c in t.components)
        ]
        kind, t = rng.choice(kinds)
        if kind == "eq":
            ts = self.terms(t)
            return Eq(t, rng.choice(ts), rng.choice(ts))
        args = tuple(rng.choice(self.terms(c)) for c in t.components)
        return In(t, args, rng.choice(self.terms(t)))

    def random_tail(self, count: int, min_symbols: int, max_depth: int, seed: int | None = None) -> list[Formula]:
        """``count`` seeded random formulas with at least ``min_symbols`` logical symbols."""
        from ..formulas import symbol_count

        rng = random.Random(self.seed if seed is None else seed)
        out: list[Formula] = []
        while len(out) < count:
            phi = self.random(max_depth, rng)
            if symbol_count(phi) >= min_symbols:
                out.append(phi)
        return out


# --- systems ------------------------------------------------------------------------

def default_pool(sig: Signature) -> list[Var]:
    """Two first-order variables and one variable per bracket type."""
    pool = [Var("x", ZERO), Var("y", ZERO)]
    names = iter(["u", "v", "w"])
    for t in sig.belonging_types:
        pool.append(Var(next(names), t))
    return pool


def set_system_pool() -> list[System]:
    """Small systems of types 0 and [0], each a model of the equality axioms.

    One canonical and one collapsed one-element system, a canonical and a
    coarsened two-element system, and a two-element system whose belonging
    is enlarged beyond membership, which makes it irregular.
    """
    sig = Signature.of([ZERO, SET_OF_POINTS])
    one = canonical_system(sig, ["a"], name="canonical1")
    collapsed = System(sig, ["a"], {}, {SET_OF_POINTS: PairSet([(0, 1), (1, 0), (0, 0), (1, 1)])},
                       {SET_OF_POINTS: PairSet([(0, 0), (0, 1)])}, name="collapsed1")
    two = canonical_system(sig, ["a", "b"], name="canonical2")
    coarse = saturated_system(sig, ["a", "b"], [0, 0], name="coarse2")
    wide = System(sig, ["a", "b"], {}, {}, {SET_OF_POINTS: PairSet([(0, 1), (1, 2), (0, 3), (1, 3), (0, 2)])},
                  name="irregular2")
    return [one, collapsed, two, coarse, wide]


def _partitions(xs: list[int]) -> Iterator[list[list[int]]]:
    if not xs:
        yield []
        return
    first, rest = xs[0], xs[1:]
    for p in _partitions(rest):
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]
        yield [[first]] + p


def all_set_systems(max_size: int = 2) -> list[System]:
    """Every system of types 0 and [0] with at most ``max_size`` elements that
    holds the equality axioms, with relations given as explicit pairs."""
    if max_size > 2:
        raise ValueError("exhaustive system enumeration is limited to two elements")
    from ..semantics import holds_equality_axioms

    sig = Signature.of([ZERO, SET_OF_POINTS])
    out: list[System] = []
    for n in range(1, max_size + 1):
        T = 1 << n
        firsts = [None]
        if n == 2:
            firsts.append(PairSet([(a, b) for a in range(n) for b in range(n)]))
        members = [(p, P) for P in range(T) for p in range(n) if (P >> p) & 1]
        extras = [(p, P) for P in range(T) for p in range(n) if not (P >> p) & 1]
        for e0 in firsts:
            for part in _partitions(list(range(T))):
                eq = PairSet([(a, b) for blk in part for a in blk for b in blk])
                for r in range(len(extras) + 1):
                    for ex in itertools.combinations(extras, r):
                        eqs = {SET_OF_POINTS: eq}
                        if e0 is not None:
                            eqs[ZERO] = e0
                        U = System(sig, ["a", "b"][:n], {}, eqs, {SET_OF_POINTS: PairSet(members + list(ex))},
                                   name=f"s{len(out)}")
                        if holds_equality_axioms(U):
                            out.append(U)
    return out


def constant_signature() -> Signature:
    return Signature.of([ZERO, SET_OF_POINTS], [("c", ZERO), ("s", SET_OF_POINTS)])


def constant_system_pool(include_empty: bool = False) -> list[System]:
    """Small models of the equality axioms interpreting ``c:0`` and ``s:[0]``."""
    sig = constant_signature()
    out = [
        canonical_system(sig, ["a"], {"c": 0, "s": 1}, name="c1"),
        canonical_system(sig, ["a", "b"], {"c": 0, "s": 0b01}, name="c2a"),
        canonical_system(sig, ["a", "b"], {"c": 1, "s": 0b11}, name="c2b"),
        saturated_system(sig, ["a", "b"], [0, 0], {"c": 0, "s": 0b10}, name="c2coarse"),
        System(sig, ["a", "b"], {"c": 1, "s": 0b10}, {}, {SET_OF_POINTS: PairSet([(0, 2), (1, 2), (0, 1), (1, 3), (0, 3)])},
               name="c2irregular"),
    ]
    if include_empty:
        out.append(canonical_system(sig, ["a", "b"], {"c": 0, "s": 0}, name="c2empty"))
    return out


def random_models(sig: Signature, count: int, seed: int, max_size: int = 2, coarsening: float = 0.5,
                  perturb: float = 0.3) -> list[System]:
    """Seeded random systems that hold the equality axioms."""
    rng = random.Random(seed)
    out: list[System] = []
    while len(out) < count:
        U = random_system(rng.randrange(1 << 30), sig, rng.randint(1, max_size), coarsening,
                          perturb=perturb if rng.random() < 0.5 else 0.0, perturb_mode="block")
        if U.meta.get("holds_axioms"):
            out.append(U)
    return out


# --- families and evaluations -------------------------------------------------------

def families(pool: Sequence[System], max_index: int) -> Iterator[tuple[System, ...]]:
    """Multisets of pool systems of size 1..max_index, in canonical order."""
    for k in range(1, max_index + 1):
        for combo in itertools.combinations_with_replacement(range(len(pool)), k):
            yield tuple(pool[i] for i in combo)


def index_labels(k: int) -> tuple[str, ...]:
    return tuple(f"f{i + 1}" for i in range(k))


def families_with_ultrafilters(pool: Sequence[System], max_index: int):
    for fam in families(pool, max_index):
        labels = index_labels(len(fam))
        for D in all_ultrafilters(labels):
            yield labels, fam, D


def factor_evaluations(U: System, pool: Sequence[Var], nonempty: bool | None = None) -> list[dict[Var, int]]:
    """All evaluations of the pool; ``nonempty`` restricts second-order values."""
    doms = []
    for v in pool:
        if isinstance(v.type, FirstOrder):
            doms.append(range(U.n))
        else:
            T = U.size(v.type)
            if nonempty is True:
                doms.append(range(1, T))
            elif nonempty is False:
                doms.append(range(0, 1))
            else:
                doms.append(range(T))
    return [dict(zip(pool, vals)) for vals in itertools.product(*doms)]


def regime_evaluations(fam: Sequence[System], pool: Sequence[Var]) -> Iterator[tuple[dict[Var, int], ...]]:
    """Per-factor evaluation tuples where every second-order variable is either
    nonempty in all factors or empty in all factors."""
    second = [v for v in pool if not isinstance(v.type, FirstOrder)]
    for pattern in itertools.product((True, False), repeat=len(second)):
        per_factor = []
        for U in fam:
            doms = []
            for v in pool:
                if isinstance(v.type, FirstOrder):
                    doms.append(range(U.n))
                else:
                    ne = pattern[second.index(v)]
                    doms.append(range(1, U.size(v.type)) if ne else range(0, 1))
            per_factor.append([dict(zip(pool, vals)) for vals in itertools.product(*doms)])
        yield from itertools.product(*per_factor)


def random_evaluation(U: System, variables: Sequence[Var], rng: random.Random) -> dict[Var, int]:
    return {v: rng.randrange(U.size(v.type)) for v in variables}


def related_evaluation(U: System, gamma: dict[Var, int], rng: random.Random) -> dict[Var, int]:
    """A random evaluation whose values are related to ``gamma``'s by generalized equality."""
    out = {}
    for v, a in gamma.items():
        rows = _rows_cached(U, v.type)
        out[v] = rng.choice(list(bits(rows[a])))
    return out


def _rows_cached(U: System, t: Type) -> list[int]:
    cache = U.__dict__.setdefault("_rows_cache", {})
    if t not in cache:
        cache[t] = related_rows(U, t)
    return cache[t]


__all__ = [
    "FormulaGenerator", "default_pool", "set_system_pool", "all_set_systems", "constant_signature", "constant_system_pool",
    "random_models", "families", "families_with_ultrafilters", "index_labels", "factor_evaluations",
    "regime_evaluations", "random_evaluation", "related_evaluation",
]
