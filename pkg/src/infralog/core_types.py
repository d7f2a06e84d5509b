"""Types, semitypes and terminals over finite sets and mappings.

A type is either the first-order type ``0`` or a bracket ``[t0,...,tk]`` of
component types.  A semitype is a type or a product ``(s0,...,sk)`` with at
least two factors.  Terminals are the concrete finite domains a semitype
denotes over a carrier.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Mapping

from .errors import BudgetExceeded, TypeSyntaxError

DEFAULT_MAX_TERMINAL = 2 ** 20


class Semitype:
    """Common base of types and products."""

    __slots__ = ()


@dataclass(frozen=True)
class FirstOrder(Semitype):
    def __str__(self) -> str:
        return "0"

    def __repr__(self) -> str:
        return "0"

    @property
    def order(self) -> int:
        return 1


ZERO = FirstOrder()


@dataclass(frozen=True)
class Bracket(Semitype):
    components: tuple[Semitype, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("a bracket type needs at least one component")
        for c in self.components:
            if not isinstance(c, (FirstOrder, Bracket)):
                raise ValueError(f"bracket components must be types, got {c!r}")

    def __str__(self) -> str:
        return "[" + ",".join(str(c) for c in self.components) + "]"

    __repr__ = __str__

    @property
    def arity(self) -> int:
        return len(self.components)

    @property
    def order(self) -> int:
        return 1 + max(c.order for c in self.components)


@dataclass(frozen=True)
class Product(Semitype):
    factors: tuple[Semitype, ...]

    def __post_init__(self) -> None:
        if len(self.factors) < 2:
            raise ValueError("a product semitype needs at least two factors")

    def __str__(self) -> str:
        return "(" + ",".join(str(f) for f in self.factors) + ")"

    __repr__ = __str__


Type = FirstOrder | Bracket


def bracket(*components: Semitype) -> Bracket:
    return Bracket(tuple(components))


def is_type(s: Semitype) -> bool:
    return isinstance(s, (FirstOrder, Bracket))


def is_second_order(t: Semitype) -> bool:
    """True for brackets whose components are all first order."""
    return isinstance(t, Bracket) and all(isinstance(c, FirstOrder) for c in t.components)


def parents(t: Type) -> frozenset[Type]:
    if isinstance(t, FirstOrder):
        return frozenset({t})
    return frozenset(t.components)


def semitype_of(t: Type) -> Semitype:
    if isinstance(t, FirstOrder):
        return t
    if len(t.components) == 1:
        return t.components[0]
    return Product(t.components)


# --- text form ------------------------------------------------------------

def parse_type(text: str) -> Type:
    s, pos = _parse_semitype(text.replace(" ", ""), 0)
    if pos != len(text.replace(" ", "")):
        raise TypeSyntaxError(f"trailing characters in type {text!r}")
    if not is_type(s):
        raise TypeSyntaxError(f"{text!r} is a semitype, not a type")
    return s


def parse_semitype(text: str) -> Semitype:
    t = text.replace(" ", "")
    s, pos = _parse_semitype(t, 0)
    if pos != len(t):
        raise TypeSyntaxError(f"trailing characters in semitype {text!r}")
    return s


def _parse_semitype(t: str, pos: int) -> tuple[Semitype, int]:
    if pos >= len(t):
        raise TypeSyntaxError("unexpected end of type")
    ch = t[pos]
    if ch == "0":
        return ZERO, pos + 1
    if ch in "[(":
        close = "]" if ch == "[" else ")"
        items: list[Semitype] = []
        pos += 1
        while True:
            item, pos = _parse_semitype(t, pos)
            items.append(item)
            if pos < len(t) and t[pos] == ",":
                pos += 1
                continue
            if pos < len(t) and t[pos] == close:
                pos += 1
                break
            raise TypeSyntaxError(f"expected ',' or {close!r} at offset {pos} in {t!r}")
        if ch == "[":
            if any(isinstance(i, Product) for i in items):
                # [(a,b)] is written [a,b]
                if len(items) == 1 and isinstance(items[0], Product):
                    items = list(items[0].factors)
                else:
                    raise TypeSyntaxError(f"products inside brackets must stand alone: {t!r}")
            return Bracket(tuple(items)), pos
        if len(items) < 2:
            raise TypeSyntaxError("a product needs at least two factors")
        return Product(tuple(items)), pos
    raise TypeSyntaxError(f"unexpected {ch!r} at offset {pos} in type {t!r}")


# --- type domains ----------------------------------------------------------

def close_under_parents(types: Iterable[Type]) -> frozenset[Type]:
    out: set[Type] = set()
    stack = list(types)
    while stack:
        t = stack.pop()
        if t in out:
            continue
        out.add(t)
        stack.extend(parents(t))
    return frozenset(out)


def type_sort_key(t: Semitype) -> tuple:
    if isinstance(t, FirstOrder):
        return (0,)
    if isinstance(t, Bracket):
        return (1, len(t.components), tuple(type_sort_key(c) for c in t.components))
    return (2, len(t.factors), tuple(type_sort_key(c) for c in t.factors))


@dataclass(frozen=True)
class TypeDomain:
    types: frozenset[Type]

    def __post_init__(self) -> None:
        if not self.types:
            raise ValueError("type domain must be nonempty")
        missing = close_under_parents(self.types) - self.types
        if missing:
            raise ValueError(f"type domain not closed under parents; missing {sorted(map(str, missing))}")

    @classmethod
    def closure(cls, types: Iterable[Type]) -> "TypeDomain":
        return cls(close_under_parents(types))

    def with_type(self, t: Type) -> "TypeDomain":
        return TypeDomain.closure(set(self.types) | {t})

    @property
    def ordered(self) -> list[Type]:
        return sorted(self.types, key=type_sort_key)

    @property
    def belonging(self) -> list[Type]:
        return [t for t in self.ordered if isinstance(t, Bracket)]

    def is_second_order(self) -> bool:
        return all(isinstance(t, FirstOrder) or is_second_order(t) for t in self.types)

    def __contains__(self, t: object) -> bool:
        return t in self.types

    def __iter__(self):
        return iter(self.ordered)


@dataclass(frozen=True)
class Carrier:
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValueError("carrier must be nonempty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("carrier labels must be unique")

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)


# --- terminals -------------------------------------------------------------

def terminal_size(s: Semitype, n: int) -> int:
    """Cardinality of the terminal of ``s`` over an ``n``-element set."""
    if isinstance(s, FirstOrder):
        return n
    if isinstance(s, Bracket):
        inner = terminal_size(semitype_of(s), n)
        if inner > 4096:
            raise OverflowError("terminal cardinality astronomically large")
        return 2 ** inner
    return math.prod(terminal_size(f, n) for f in s.factors)


def check_budget(s: Semitype, n: int, max_terminal: int) -> int:
    try:
        size = terminal_size(s, n)
    except OverflowError:
        raise BudgetExceeded(f"terminal {s} over {n} elements exceeds budget {max_terminal}")
    if size > max_terminal:
        raise BudgetExceeded(f"terminal {s} over {n} elements has {size} elements (budget {max_terminal})")
    return size


def canonical_key(value: Any, order: Mapping[Hashable, int]) -> tuple:
    """Total order on terminal elements derived from the carrier order."""
    if isinstance(value, frozenset):
        items = sorted((canonical_key(v, order) for v in value))
        return (2, len(items), tuple(items))
    if isinstance(value, tuple):
        return (1, tuple(canonical_key(v, order) for v in value))
    return (0, order[value])


def terminal(s: Semitype, carrier: Iterable[Hashable], max_terminal: int = DEFAULT_MAX_TERMINAL) -> list:
    """Enumerate the terminal of ``s`` over ``carrier`` in canonical order.

    First-order elements are the carrier atoms, products are tuples and
    bracket elements are frozensets.
    """
    atoms = list(carrier)
    check_budget(s, len(atoms), max_terminal)
    order = {a: i for i, a in enumerate(atoms)}
    out = _terminal(s, atoms)
    return sorted(out, key=lambda v: canonical_key(v, order))


def _terminal(s: Semitype, atoms: list) -> list:
    if isinstance(s, FirstOrder):
        return list(atoms)
    if isinstance(s, Product):
        return [tuple(p) for p in itertools.product(*(_terminal(f, atoms) for f in s.factors))]
    base = _terminal(semitype_of(s), atoms)
    return [frozenset(c) for r in range(len(base) + 1) for c in itertools.combinations(base, r)]


def terminal_map(s: Semitype, u: Callable[[Any], Any] | Mapping[Any, Any]) -> Callable[[Any], Any]:
    """Lift ``u: A -> B`` to the terminals of ``s``."""
    f = u.__getitem__ if isinstance(u, Mapping) else u
    if isinstance(s, FirstOrder):
        return f
    if isinstance(s, Product):
        parts = [terminal_map(c, f) for c in s.factors]
        return lambda p: tuple(g(x) for g, x in zip(parts, p))
    inner = terminal_map(semitype_of(s), f)
    return lambda P: frozenset(inner(p) for p in P)
