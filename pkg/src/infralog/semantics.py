"""Finite systems, evaluations and satisfaction.

Values are encoded compactly.  A first-order value is a carrier index in
``range(n)``.  A tuple of first-order values ``(a0,...,ak)`` has the code
``a0*n**k + ... + ak`` (first component most significant), and for ``k = 0``
the code is the element itself, so 1-tuples are identified with their
component.  A value of a bracket type ``[0,...,0]`` of arity ``m`` is a
bitmask over the ``n**m`` tuple codes.
"""
from __future__ import annotations

import itertools
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

from .core_types import DEFAULT_MAX_TERMINAL, ZERO, Bracket, FirstOrder, Type, type_sort_key
from .errors import BudgetExceeded, EvaluationError, InvalidSystem, SignatureMismatch
from .formulas import (
    And,
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    In,
    Not,
    Or,
    Signature,
    Term,
    Var,
    free_variables,
    sort_vars,
)

# cap on pairwise relation checks in structural predicates
WORK_BUDGET = 2 ** 26


# --- relations -----------------------------------------------------------------

class Relation:
    """A binary relation on encoded values."""

    canonical = False

    def __call__(self, a: int, b: int) -> bool:
        raise NotImplementedError


class Identity(Relation):
    canonical = True

    def __call__(self, a: int, b: int) -> bool:
        return a == b

    def __repr__(self) -> str:
        return "Identity()"


class Membership(Relation):
    canonical = True

    def __call__(self, code: int, mask: int) -> bool:
        return (mask >> code) & 1 == 1

    def __repr__(self) -> str:
        return "Membership()"


class PairSet(Relation):
    """Extensional relation given by its set of pairs."""

    def __init__(self, pairs: Iterable[tuple[int, int]]):
        self.pairs = frozenset((int(a), int(b)) for a, b in pairs)

    def __call__(self, a: int, b: int) -> bool:
        return (a, b) in self.pairs

    def __repr__(self) -> str:
        return f"PairSet({len(self.pairs)} pairs)"


class Predicate(Relation):
    """Intensional relation backed by a function, with memoization."""

    def __init__(self, fn: Callable[[int, int], bool], cache: bool = True):
        self.fn = fn
        self._cache: dict[tuple[int, int], bool] | None = {} if cache else None

    def __call__(self, a: int, b: int) -> bool:
        if self._cache is None:
            return bool(self.fn(a, b))
        key = (a, b)
        r = self._cache.get(key)
        if r is None:
            r = bool(self.fn(a, b))
            self._cache[key] = r
        return r

    def __repr__(self) -> str:
        return "Predicate()"


# --- bit helpers -----------------------------------------------------------------

def bits(mask: int) -> Iterator[int]:
    """Indices of set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def tuple_code(values: Sequence[int], n: int) -> int:
    c = 0
    for v in values:
        c = c * n + v
    return c


def tuple_of(code: int, n: int, m: int) -> tuple[int, ...]:
    out = [0] * m
    for i in range(m - 1, -1, -1):
        code, out[i] = divmod(code, n)
    return tuple(out)


# --- systems -----------------------------------------------------------------------

class System:
    """A finite system of a second-order generalized signature.

    ``equalities`` and ``belongings`` map types to relations; a missing entry
    means the set-theoretic relation (``=`` or ``in``).
    """

    def __init__(
        self,
        sig: Signature,
        labels: Sequence[str],
        constants: Mapping[str, int] | None = None,
        equalities: Mapping[Type, Relation] | None = None,
        belongings: Mapping[Bracket, Relation] | None = None,
        *,
        max_terminal: int = DEFAULT_MAX_TERMINAL,
        validate: bool = True,
        name: str = "",
        meta: Mapping[str, Any] | None = None,
    ):
        self.sig = sig
        self.labels = tuple(labels)
        if not self.labels:
            raise InvalidSystem("carrier must be nonempty")
        if len(set(self.labels)) != len(self.labels):
            raise InvalidSystem("carrier labels must be unique")
        self.n = len(self.labels)
        self.max_terminal = max_terminal
        self.name = name
        self.meta = dict(meta or {})
        self.constants: dict[str, int] = {}
        consts = dict(constants or {})
        for cname, t in sig.constants:
            if cname not in consts:
                raise InvalidSystem(f"constant {cname} has no interpretation")
            v = int(consts.pop(cname))
            if not 0 <= v < self.size_unchecked(t):
                raise InvalidSystem(f"constant {cname} value {v} outside the terminal of {t}")
            self.constants[cname] = v
        if consts:
            raise InvalidSystem(f"interpretations for unknown constants {sorted(consts)}")
        self._eq: dict[Type, Relation] = {}
        self._bel: dict[Bracket, Relation] = {}
        for t in sig.types:
            self._eq[t] = (equalities or {}).get(t) or Identity()
        for t in sig.belonging_types:
            self._bel[t] = (belongings or {}).get(t) or Membership()
        for t in (equalities or {}):
            if t not in sig.domain:
                raise InvalidSystem(f"equality given for type {t} outside the type domain")
        for t in (belongings or {}):
            if t not in sig.belonging_types:
                raise InvalidSystem(f"belonging given for type {t} outside the belonging subdomain")
        self.validated = self._validate() if validate else False

    # sizes and domains
    def width(self, t: Bracket) -> int:
        return self.n ** t.arity

    def size_unchecked(self, t: Type) -> int:
        if isinstance(t, FirstOrder):
            return self.n
        w = self.width(t)
        return 1 << w

    def size(self, t: Type) -> int:
        """Terminal cardinality, raising when it passes the budget."""
        if isinstance(t, Bracket) and self.width(t) > 62:
            raise BudgetExceeded(f"terminal {t} over {self.n} elements has 2^{self.width(t)} elements")
        s = self.size_unchecked(t)
        if s > self.max_terminal:
            raise BudgetExceeded(f"terminal {t} over {self.n} elements has {s} elements (budget {self.max_terminal})")
        return s

    def domain(self, t: Type) -> range:
        return range(self.size(t))

    def within_budget(self, t: Type) -> bool:
        try:
            self.size(t)
            return True
        except BudgetExceeded:
            return False

    # relations
    def eq_rel(self, t: Type) -> Relation:
        try:
            return self._eq[t]
        except KeyError:
            raise SignatureMismatch(f"type {t} not in the system's type domain") from None

    def bel_rel(self, t: Bracket) -> Relation:
        try:
            return self._bel[t]
        except KeyError:
            raise SignatureMismatch(f"type {t} not a belonging type of the system") from None

    def eq(self, t: Type, a: int, b: int) -> bool:
        return self._eq[t](a, b)

    def bel(self, t: Bracket, code: int, mask: int) -> bool:
        return self._bel[t](code, mask)

    def is_canonical(self) -> bool:
        return all(r.canonical for r in self._eq.values()) and all(r.canonical for r in self._bel.values())

    # encoding
    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise EvaluationError(f"unknown carrier element {label!r}") from None

    def encode(self, t: Type, obj: Any) -> int:
        """Encode a label, or an iterable of labels / label tuples."""
        if isinstance(t, FirstOrder):
            return self.index(obj)
        mask = 0
        for item in obj:
            if t.arity == 1:
                if isinstance(item, (tuple, list)):
                    (item,) = item
                code = self.index(item)
            else:
                code = tuple_code([self.index(x) for x in item], self.n)
            mask |= 1 << code
        return mask

    def decode(self, t: Type, value: int) -> Any:
        if isinstance(t, FirstOrder):
            return self.labels[value]
        out = []
        for code in bits(value):
            if t.arity == 1:
                out.append(self.labels[code])
            else:
                out.append(tuple(self.labels[i] for i in tuple_of(code, self.n, t.arity)))
        return out

    def show(self, t: Type, value: int) -> str:
        if isinstance(t, FirstOrder):
            return self.labels[value]
        items = self.decode(t, value)
        if t.arity == 1:
            return "{" + ", ".join(items) + "}"
        return "{" + ", ".join("(" + ", ".join(p) + ")" for p in items) + "}"

    # invariants
    def _validate(self) -> bool:
        """Check the containment invariants where enumeration is affordable."""
        complete = True
        for t in self.sig.types:
            rel = self._eq[t]
            if rel.canonical:
                continue
            if isinstance(rel, PairSet):
                size = self.size_unchecked(t)
                for a, b in rel.pairs:
                    if not (0 <= a < size and 0 <= b < size):
                        raise InvalidSystem(f"equality pair ({a}, {b}) for {t} outside the terminal")
            if not self.within_budget(t):
                complete = False
                continue
            for a in self.domain(t):
                if not rel(a, a):
                    raise InvalidSystem(
                        f"generalized equality for {t} misses the identity pair ({self.show(t, a)}, {self.show(t, a)})"
                    )
        for t in self.sig.belonging_types:
            rel = self._bel[t]
            if rel.canonical:
                continue
            if not self.within_budget(t):
                complete = False
                continue
            for mask in self.domain(t):
                for code in bits(mask):
                    if not rel(code, mask):
                        raise InvalidSystem(
                            f"generalized belonging for {t} misses the membership pair "
                            f"({self._show_code(t, code)}, {self.show(t, mask)})"
                        )
        return complete

    def _show_code(self, t: Bracket, code: int) -> str:
        if t.arity == 1:
            return self.labels[code]
        return "(" + ", ".join(self.labels[i] for i in tuple_of(code, self.n, t.arity)) + ")"

    def __repr__(self) -> str:
        nm = f" {self.name}" if self.name else ""
        return f"<System{nm} |A|={self.n} types={[str(t) for t in self.sig.types]}>"


# --- satisfaction ---------------------------------------------------------------

Evaluation = Mapping[Var, int]


class Evaluator:
    """Recursive satisfaction with memoization on the free-variable values."""

    def __init__(self, system: System, standard: bool = False, memo: bool = True):
        self.U = system
        self.standard = standard
        self.memo: dict[tuple, bool] | None = {} if memo else None
        self._fv: dict[int, tuple[Var, ...]] = {}
        self._keep: list[Formula] = []

    def _free(self, phi: Formula) -> tuple[Var, ...]:
        k = id(phi)
        fv = self._fv.get(k)
        if fv is None:
            fv = tuple(sort_vars(free_variables(phi)))
            self._fv[k] = fv
            self._keep.append(phi)
        return fv

    def value(self, term: Term, env: Evaluation) -> int:
        if isinstance(term, Const):
            try:
                return self.U.constants[term.name]
            except KeyError:
                raise EvaluationError(f"constant {term.name} is not interpreted") from None
        try:
            return env[term]
        except KeyError:
            raise EvaluationError(f"variable {term.name}:{term.type} has no value") from None

    def holds(self, phi: Formula, env: Evaluation | None = None) -> bool:
        return self._holds(phi, dict(env or {}))

    def _holds(self, phi: Formula, env: dict[Var, int]) -> bool:
        if isinstance(phi, Eq):
            a, b = self.value(phi.left, env), self.value(phi.right, env)
            return a == b if self.standard else self.U.eq(phi.type, a, b)
        if isinstance(phi, In):
            code = tuple_code([self.value(t, env) for t in phi.args], self.U.n)
            mask = self.value(phi.right, env)
            return (mask >> code) & 1 == 1 if self.standard else self.U.bel(phi.type, code, mask)
        key = None
        if self.memo is not None:
            try:
                key = (id(phi),) + tuple(env[v] for v in self._free(phi))
            except KeyError as e:
                raise EvaluationError(f"variable {e.args[0].name} has no value") from None
            hit = self.memo.get(key)
            if hit is not None:
                return hit
        r = self._compound(phi, env)
        if key is not None:
            self.memo[key] = r
        return r

    def _compound(self, phi: Formula, env: dict[Var, int]) -> bool:
        if isinstance(phi, Not):
            return not self._holds(phi.body, env)
        if isinstance(phi, And):
            return self._holds(phi.left, env) and self._holds(phi.right, env)
        if isinstance(phi, Or):
            return self._holds(phi.left, env) or self._holds(phi.right, env)
        if isinstance(phi, Implies):
            return (not self._holds(phi.left, env)) or self._holds(phi.right, env)
        if isinstance(phi, (Exists, Forall)):
            x = phi.var
            dom = self.U.domain(x.type)
            had = x in env
            old = env.get(x)
            want = isinstance(phi, Exists)
            result = not want
            try:
                for v in dom:
                    env[x] = v
                    if self._holds(phi.body, env) == want:
                        result = want
                        break
            finally:
                if had:
                    env[x] = old
                else:
                    env.pop(x, None)
            return result
        raise TypeError(f"not a formula: {phi!r}")


def satisfies(U: System, phi: Formula, gamma: Evaluation | None = None, standard: bool = False) -> bool:
    """Whether ``U`` satisfies ``phi`` under ``gamma``."""
    return Evaluator(U, standard=standard).holds(phi, gamma)


def models(U: System, phi: Formula, standard: bool = False) -> bool:
    """Satisfaction under every evaluation of the free variables."""
    fv = sort_vars(free_variables(phi))
    ev = Evaluator(U, standard=standard)
    for vals in itertools.product(*(U.domain(v.type) for v in fv)):
        if not ev.holds(phi, dict(zip(fv, vals))):
            return False
    return True


# --- equality axioms -------------------------------------------------------------

def _check_work(count: int, what: str) -> None:
    if count > WORK_BUDGET:
        raise BudgetExceeded(f"{what} needs {count} relation checks (budget {WORK_BUDGET})")


def related_rows(U: System, t: Type) -> list[int]:
    """For each value ``a``, the bitmask of values ``b`` with ``a ~ b``."""
    T = U.size(t)
    rel = U.eq_rel(t)
    if rel.canonical:
        return [1 << a for a in range(T)]
    _check_work(T * T, f"relation table for {t}")
    rows = []
    for a in range(T):
        r = 0
        for b in range(T):
            if rel(a, b):
                r |= 1 << b
        rows.append(r)
    return rows


def equality_axiom_failure(U: System) -> str | None:
    """Describe the first relativized equality axiom that fails, or None."""
    rows_by_type: dict[Type, list[int]] = {}
    for t in U.sig.types:
        rows = related_rows(U, t)
        rows_by_type[t] = rows
        for a, r in enumerate(rows):
            if not (r >> a) & 1:
                return f"E1 fails for {t} at {U.show(t, a)}"
            for b in bits(r):
                if not (rows[b] >> a) & 1:
                    return f"E2 fails for {t} at ({U.show(t, a)}, {U.show(t, b)})"
                extra = rows[b] & ~r
                if extra:
                    c = next(bits(extra))
                    return f"E3 fails for {t} at ({U.show(t, a)}, {U.show(t, b)}, {U.show(t, c)})"
    for t in U.sig.belonging_types:
        reps = {c: _representatives(rows_by_type[c]) for c in set(t.components)}
        rep_t = _representatives(rows_by_type[t])
        W = U.width(t)
        T = U.size(t)
        _check_work(W * T, f"change-of-equals check for {t}")
        bel = U.bel_rel(t)
        code_rep = []
        for code in range(W):
            comps = tuple_of(code, U.n, t.arity)
            code_rep.append(tuple_code([reps[ZERO][c] for c in comps], U.n))
        for P in range(T):
            rP = rep_t[P]
            for code in range(W):
                rc = code_rep[code]
                if (rc, rP) != (code, P) and bel(code, P) != bel(rc, rP):
                    return (
                        f"E4 fails for {t}: ({U._show_code(t, code)} in {U.show(t, P)}) differs from "
                        f"({U._show_code(t, rc)} in {U.show(t, rP)})"
                    )
    return None


def _representatives(rows: list[int]) -> list[int]:
    # least element of each class, valid once the rows form an equivalence
    return [(r & -r).bit_length() - 1 for r in rows]


def holds_equality_axioms(U: System) -> bool:
    return equality_axiom_failure(U) is None


# --- structural predicates ----------------------------------------------------------

def _tuple_rows(U: System, t: Bracket) -> list[int]:
    """Row ``z`` holds the tuple codes ``w`` with ``z`` componentwise equal to ``w``."""
    W = U.width(t)
    rel0 = U.eq_rel(ZERO)
    base = [[rel0(a, b) for b in range(U.n)] for a in range(U.n)]
    _check_work(W * W, f"tuple relation for {t}")
    out = []
    comps = [tuple_of(c, U.n, t.arity) for c in range(W)]
    for z in range(W):
        cz = comps[z]
        r = 0
        for w in range(W):
            cw = comps[w]
            if all(base[a][b] for a, b in zip(cz, cw)):
                r |= 1 << w
        out.append(r)
    return out


def _approx_hull(rows: list[int], mask: int) -> int:
    out = 0
    for z in bits(mask):
        out |= rows[z]
    return out


def regular_failure(U: System) -> str | None:
    for t in U.sig.belonging_types:
        rows = _tuple_rows(U, t)
        T, W = U.size(t), U.width(t)
        _check_work(T * W, f"regularity check for {t}")
        bel = U.bel_rel(t)
        # p ~ q is symmetric in the witness condition only through rows[p]
        for P in range(T):
            for p in range(W):
                witness = (rows[p] & P) != 0
                if bel(p, P) != witness:
                    return f"regularity fails for {t} at ({U._show_code(t, p)}, {U.show(t, P)})"
    return None


def balanced_failure(U: System) -> str | None:
    for t in U.sig.belonging_types:
        rows = _tuple_rows(U, t)
        T = U.size(t)
        _check_work(T * T, f"balance check for {t}")
        rel = U.eq_rel(t)
        hull = [_approx_hull(rows, P) for P in range(T)]
        for P in range(T):
            for Q in range(T):
                mutual = (P & ~hull[Q]) == 0 and (Q & ~hull[P]) == 0
                if rel(P, Q) != mutual:
                    return f"balance fails for {t} at ({U.show(t, P)}, {U.show(t, Q)})"
    return None


def extensional_failure(U: System) -> str | None:
    for t in U.sig.belonging_types:
        T, W = U.size(t), U.width(t)
        _check_work(T * T + T * W, f"extensionality check for {t}")
        bel = U.bel_rel(t)
        rel = U.eq_rel(t)
        members = []
        for P in range(T):
            m = 0
            for p in range(W):
                if bel(p, P):
                    m |= 1 << p
            members.append(m)
        for P in range(T):
            for Q in range(T):
                if rel(P, Q) != (members[P] == members[Q]):
                    return f"extensionality fails for {t} at ({U.show(t, P)}, {U.show(t, Q)})"
    return None


def is_regular(U: System) -> bool:
    return regular_failure(U) is None


def is_balanced(U: System) -> bool:
    return balanced_failure(U) is None


def is_extensional(U: System) -> bool:
    return extensional_failure(U) is None


# --- maps between systems -----------------------------------------------------------

Map = Callable[[int], int] | Sequence[int]


def _as_fn(u: Map) -> Callable[[int], int]:
    if callable(u):
        return u
    seq = list(u)
    return seq.__getitem__


def map_code(u: Callable[[int], int], code: int, n_a: int, n_b: int, arity: int) -> int:
    return tuple_code([u(c) for c in tuple_of(code, n_a, arity)], n_b)


def map_value(u: Map, t: Type, value: int, U: System, V: System) -> int:
    """Apply the terminal lift of ``u`` to an encoded value of type ``t``."""
    f = _as_fn(u)
    if isinstance(t, FirstOrder):
        return f(value)
    out = 0
    for code in bits(value):
        out |= 1 << map_code(f, code, U.n, V.n, t.arity)
    return out


def _same_signature(U: System, V: System) -> None:
    if U.sig != V.sig:
        raise SignatureMismatch("systems have different signatures")


def homomorphism_failure(u: Map, U: System, V: System) -> str | None:
    _same_signature(U, V)
    f = _as_fn(u)
    for a in range(U.n):
        b = f(a)
        if not 0 <= b < V.n:
            raise EvaluationError(f"map sends {U.labels[a]} outside the target carrier")
    for name, t in U.sig.constants:
        s, target = U.constants[name], V.constants[name]
        if isinstance(t, FirstOrder):
            if f(s) != target:
                return f"first-order constant {name}: image {V.labels[f(s)]} differs from {V.labels[target]}"
        else:
            W = U.width(t)
            _check_work(W, f"homomorphism check for {name}")
            bel_a, bel_b = U.bel_rel(t), V.bel_rel(t)
            for code in range(W):
                if bel_a(code, s) and not bel_b(map_code(f, code, U.n, V.n, t.arity), target):
                    return f"constant {name}: belonging of {U._show_code(t, code)} not preserved"
    return None


def is_homomorphism(u: Map, U: System, V: System) -> bool:
    return homomorphism_failure(u, U, V) is None


def approx_injective(u: Map, U: System, V: System, t: Type = ZERO) -> bool:
    """u(p) ~ u(q) in V implies p ~ q in U, over the whole terminal of ``t``."""
    _same_signature(U, V)
    T = U.size(t)
    _check_work(T * T, f"injectivity check for {t}")
    images = [map_value(u, t, p, U, V) for p in range(T)]
    ra, rb = U.eq_rel(t), V.eq_rel(t)
    for p in range(T):
        for q in range(T):
            if rb(images[p], images[q]) and not ra(p, q):
                return False
    return True


def identity_map(U: System) -> list[int]:
    return list(range(U.n))


def sorted_types(ts: Iterable[Type]) -> list[Type]:
    return sorted(ts, key=type_sort_key)


__all__ = [
    "Relation", "Identity", "Membership", "PairSet", "Predicate", "System", "Evaluator",
    "satisfies", "models", "holds_equality_axioms", "equality_axiom_failure",
    "is_regular", "is_balanced", "is_extensional", "regular_failure", "balanced_failure",
    "extensional_failure", "is_homomorphism", "homomorphism_failure", "approx_injective",
    "map_value", "map_code", "bits", "tuple_code", "tuple_of", "related_rows", "identity_map",
]
