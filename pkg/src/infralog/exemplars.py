"""Worked systems (fractions, plane segments) and seeded random systems."""
from __future__ import annotations

import math
import random
from typing import Hashable, Sequence

from .core_types import DEFAULT_MAX_TERMINAL, ZERO, Bracket, FirstOrder, bracket
from .formulas import Signature
from .semantics import PairSet, Predicate, Relation, System, bits, holds_equality_axioms, tuple_code, tuple_of
from .errors import BudgetExceeded

SET_OF_POINTS = bracket(ZERO)


def set_signature() -> Signature:
    """Types 0 and [0], no constants."""
    return Signature.of([ZERO, SET_OF_POINTS])


# --- relations saturated from a first-order equivalence ----------------------------

class Saturation:
    """Second-order relations induced by a partition of the carrier.

    For a bracket type the tuple classes are products of element classes.
    Sets are equal when they approximate each other member by member, and a
    tuple belongs to a set when some equivalent tuple lies in it.
    """

    def __init__(self, n: int, class_of: Sequence[int]):
        self.n = n
        self.class_of = list(class_of)
        self.masks: dict[int, int] = {}
        for i, c in enumerate(self.class_of):
            self.masks[c] = self.masks.get(c, 0) | (1 << i)
        self._tuple_cls: dict[int, list[int]] = {}

    def element_mask(self, a: int) -> int:
        return self.masks[self.class_of[a]]

    def tuple_classes(self, arity: int) -> list[int]:
        """Per tuple code, the mask of componentwise equivalent codes."""
        got = self._tuple_cls.get(arity)
        if got is None:
            W = self.n ** arity
            got = []
            for code in range(W):
                comps = tuple_of(code, self.n, arity)
                # codes are mixed radix, so the class is a product of element classes
                acc = [0]
                for c in comps:
                    acc = [x * self.n + j for x in acc for j in bits(self.element_mask(c))]
                m = 0
                for x in acc:
                    m |= 1 << x
                got.append(m)
            self._tuple_cls[arity] = got
        return got

    def first_order(self) -> Relation:
        cls = self.class_of
        return Predicate(lambda a, b: cls[a] == cls[b], cache=False)

    def hull(self, arity: int, mask: int) -> int:
        tc = self.tuple_classes(arity)
        out = 0
        for z in bits(mask):
            out |= tc[z]
        return out

    def equality(self, t: Bracket) -> Relation:
        k = t.arity

        def eq(P: int, Q: int) -> bool:
            return (P & ~self.hull(k, Q)) == 0 and (Q & ~self.hull(k, P)) == 0

        return Predicate(eq, cache=False)

    def belonging(self, t: Bracket) -> Relation:
        tc = self.tuple_classes(t.arity)
        return Predicate(lambda p, P: (tc[p] & P) != 0, cache=False)


def saturated_system(
    sig: Signature,
    labels: Sequence[str],
    keys: Sequence[Hashable],
    constants: dict[str, int] | None = None,
    *,
    name: str = "",
    max_terminal: int = DEFAULT_MAX_TERMINAL,
    meta: dict | None = None,
) -> System:
    """A system whose first-order equality is the kernel of ``keys``."""
    ids: dict[Hashable, int] = {}
    class_of = [ids.setdefault(k, len(ids)) for k in keys]
    sat = Saturation(len(labels), class_of)
    if len(ids) == len(labels):
        eqs, bels = {}, {}
    else:
        eqs = {ZERO: sat.first_order()}
        bels = {}
        for t in sig.belonging_types:
            eqs[t] = sat.equality(t)
            bels[t] = sat.belonging(t)
    U = System(sig, labels, constants or {}, eqs, bels, name=name, max_terminal=max_terminal, meta=meta)
    U.saturation = sat
    return U


# --- fractions ------------------------------------------------------------------------

def fraction_elements(N: int) -> list[tuple[int, int]]:
    if N < 1:
        raise ValueError("N must be positive")
    dens = [s for s in range(-N, N + 1) if s != 0]
    return [(m, s) for m in range(-N, N + 1) for s in dens]


def fraction_label(m: int, s: int) -> str:
    return f"{m}/{s}"


def make_fraction_system(N: int, max_terminal: int = DEFAULT_MAX_TERMINAL) -> System:
    """Formal fractions m/s with |m| <= N and 0 < |s| <= N.

    Two fractions are equal when they cross-multiply to the same integer.
    """
    elems = fraction_elements(N)
    labels = [fraction_label(m, s) for m, s in elems]
    # m/s ~ n/t iff m*t == n*s; the reduced form with positive denominator is a complete key
    keys = []
    for m, s in elems:
        g = _gcd(m, s)
        a, b = m // g, s // g
        if b < 0:
            a, b = -a, -b
        keys.append((a, b))
    return saturated_system(set_signature(), labels, keys, name=f"fractions(N={N})",
                            max_terminal=max_terminal, meta={"kind": "fractions", "N": N})


def _gcd(a: int, b: int) -> int:
    return math.gcd(a, b) or 1


def fraction_cross_equal(p: tuple[int, int], q: tuple[int, int]) -> bool:
    (m, s), (n, t) = p, q
    return m * t == n * s


# --- segments -------------------------------------------------------------------------

Point = tuple[int, int]


def segment_elements(G: int) -> list[tuple[Point, Point]]:
    if G < 1:
        raise ValueError("G must be positive")
    pts = [(x, y) for x in range(G + 1) for y in range(G + 1)]
    return [(a, b) for i, a in enumerate(pts) for b in pts[i + 1:]]


def segment_label(seg: tuple[Point, Point]) -> str:
    (a, b), (c, d) = seg
    return f"({a},{b})-({c},{d})"


def translation_key(seg: tuple[Point, Point]) -> Point:
    """Direction vector, oriented so the two endpoint orders agree."""
    (a, b), (c, d) = seg
    dx, dy = c - a, d - b
    if (dx, dy) < (0, 0):
        dx, dy = -dx, -dy
    return dx, dy


def translates(p: tuple[Point, Point], q: tuple[Point, Point]) -> bool:
    """Whether some translation maps segment ``p`` onto segment ``q``."""
    (p0, p1), (q0, q1) = p, q
    for a, b in ((q0, q1), (q1, q0)):
        v = (a[0] - p0[0], a[1] - p0[1])
        if (p1[0] + v[0], p1[1] + v[1]) == b:
            return True
    return False


def make_segment_system(G: int, max_terminal: int = DEFAULT_MAX_TERMINAL) -> System:
    """Nondegenerate closed segments with endpoints on the grid {0..G}^2."""
    segs = segment_elements(G)
    labels = [segment_label(s) for s in segs]
    keys = [translation_key(s) for s in segs]
    return saturated_system(set_signature(), labels, keys, name=f"segments(G={G})",
                            max_terminal=max_terminal, meta={"kind": "segments", "G": G})


# --- random systems ---------------------------------------------------------------------

def _random_partition(rng: random.Random, n: int, p: float) -> list[int]:
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if p > 0 and rng.random() < p:
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    roots: dict[int, int] = {}
    return [roots.setdefault(find(a), len(roots)) for a in range(n)]


def random_system(
    seed: int,
    sig: Signature,
    carrier_size: int,
    coarsening_probability: float = 0.3,
    *,
    perturb: float = 0.0,
    perturb_mode: str = "block",
    nonempty_constants: bool = False,
    max_terminal: int = DEFAULT_MAX_TERMINAL,
) -> System:
    """A seeded random system following the saturation pattern.

    ``perturb`` adds extra belonging pairs.  In ``block`` mode whole blocks of
    equivalent tuples and sets are switched on together, which keeps the
    change-of-equals principle intact and breaks regularity.  In ``pair``
    mode single pairs are switched on, which in general breaks it.
    """
    rng = random.Random(seed)
    n = carrier_size
    labels = [f"a{i}" for i in range(n)]
    class_of = _random_partition(rng, n, coarsening_probability)
    sat = Saturation(n, class_of)
    consts: dict[str, int] = {}
    for cname, t in sig.constants:
        if isinstance(t, FirstOrder):
            consts[cname] = rng.randrange(n)
        else:
            W = n ** t.arity
            if nonempty_constants:
                consts[cname] = rng.randrange(1, 1 << W)
            else:
                consts[cname] = rng.randrange(1 << W)
    discrete = len(set(class_of)) == n
    eqs: dict = {}
    bels: dict = {}
    if not discrete:
        eqs[ZERO] = sat.first_order()
        for t in sig.belonging_types:
            eqs[t] = sat.equality(t)
    for t in sig.belonging_types:
        base = sat.belonging(t) if not discrete else None
        if perturb > 0:
            bels[t] = _perturbed_belonging(rng, sat, t, perturb, perturb_mode, max_terminal)
        elif base is not None:
            bels[t] = base
    meta = {
        "kind": "random",
        "seed": seed,
        "coarsening_probability": coarsening_probability,
        "perturb": perturb,
        "perturb_mode": perturb_mode,
    }
    U = System(sig, labels, consts, eqs, bels, name=f"random(seed={seed})", max_terminal=max_terminal, meta=meta)
    U.saturation = sat
    try:
        U.meta["holds_axioms"] = holds_equality_axioms(U)
    except BudgetExceeded:
        U.meta["holds_axioms"] = None
    return U


def _perturbed_belonging(rng: random.Random, sat: Saturation, t: Bracket, prob: float, mode: str,
                         max_terminal: int) -> Relation:
    W = sat.n ** t.arity
    T = 1 << W
    if T > max_terminal:
        raise BudgetExceeded(f"perturbing {t} needs the full terminal of {T} sets")
    tc = sat.tuple_classes(t.arity)
    pairs = set()
    if mode == "block":
        # decide blocks in canonical order so the seed alone fixes the outcome
        hulls = [sat.hull(t.arity, P) for P in range(T)]
        reps = [min(bits(c)) for c in tc]
        blocks = sorted({(reps[p], hulls[P]) for P in range(T) for p in range(W) if not tc[p] & P})
        chosen = {b for b in blocks if rng.random() < prob}
        for P in range(T):
            for p in range(W):
                if tc[p] & P or (reps[p], hulls[P]) in chosen:
                    pairs.add((p, P))
    elif mode == "pair":
        for P in range(T):
            for p in range(W):
                if tc[p] & P or rng.random() < prob:
                    pairs.add((p, P))
    else:
        raise ValueError(f"unknown perturbation mode {mode!r}")
    return PairSet(pairs)


def two_element_field(max_terminal: int = DEFAULT_MAX_TERMINAL) -> System:
    """Arithmetic modulo 2 with the order 0 <= 1, interpreting the real-axis constants.

    Relations are set-theoretic.  Negation is the identity and 1 is its own
    inverse.
    """
    from .axioms import real_axis_signature

    sig = real_axis_signature()
    pairs = lambda ps: sum(1 << tuple_code(p, 2) for p in ps)  # noqa: E731
    consts = {
        "zero": 0,
        "one": 1,
        "neg": pairs([(0, 0), (1, 1)]),
        "inv": pairs([(1, 1)]),
        "leq": pairs([(0, 0), (0, 1), (1, 1)]),
        "add": pairs([(a, b, (a + b) % 2) for a in range(2) for b in range(2)]),
        "mul": pairs([(a, b, a * b) for a in range(2) for b in range(2)]),
    }
    return System(sig, ["0", "1"], consts, name="mod2", max_terminal=max_terminal, meta={"kind": "mod2"})


def canonical_system(sig: Signature, labels: Sequence[str], constants: dict[str, int] | None = None,
                     name: str = "") -> System:
    """The system whose relations are set-theoretic equality and membership."""
    return System(sig, labels, constants or {}, name=name)


__all__ = [
    "SET_OF_POINTS", "set_signature", "Saturation", "saturated_system", "make_fraction_system", "make_segment_system",
    "random_system", "canonical_system", "two_element_field", "fraction_elements", "fraction_label", "segment_elements",
    "segment_label", "translation_key", "translates", "fraction_cross_equal",
]
