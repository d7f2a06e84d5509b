"""Signatures, terms and formulas of the generalized second-order language."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .core_types import (
    Bracket,
    Type,
    TypeDomain,
    type_sort_key,
)
from .errors import FormulaTypeError


@dataclass(frozen=True)
class Signature:
    """Type domain plus ordered constants.

    Every type of the domain carries a denumerable supply of variables, so
    the condition that each type has a constant or a variable is
    met automatically.
    """

    domain: TypeDomain
    constants: tuple[tuple[str, Type], ...] = ()

    def __post_init__(self) -> None:
        if not self.domain.is_second_order():
            raise FormulaTypeError("type domain must contain first- and second-order types only")
        names = [n for n, _ in self.constants]
        if len(set(names)) != len(names):
            raise FormulaTypeError("duplicate constant names")
        for name, t in self.constants:
            if t not in self.domain:
                raise FormulaTypeError(f"constant {name} has type {t} outside the type domain")

    @classmethod
    def of(cls, types: Iterable[Type], constants: Iterable[tuple[str, Type]] = ()) -> "Signature":
        consts = tuple(constants)
        return cls(TypeDomain.closure(list(types) + [t for _, t in consts]), consts)

    @property
    def types(self) -> list[Type]:
        return self.domain.ordered

    @property
    def belonging_types(self) -> list[Type]:
        return self.domain.belonging

    def constant_type(self, name: str) -> Type | None:
        for n, t in self.constants:
            if n == name:
                return t
        return None

    def constants_of(self, t: Type) -> list[str]:
        return [n for n, ct in self.constants if ct == t]


# --- terms -----------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str
    type: Type

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    name: str
    type: Type

    def __str__(self) -> str:
        return self.name


Term = Union[Var, Const]


# --- formulas --------------------------------------------------------------

class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)


@dataclass(frozen=True, repr=False)
class Eq(Formula):
    type: Type
    left: Term
    right: Term

    def __repr__(self) -> str:
        return f"Eq({self.type}, {self.left}, {self.right})"


@dataclass(frozen=True, repr=False)
class In(Formula):
    type: Bracket
    args: tuple[Term, ...]
    right: Term

    def __repr__(self) -> str:
        return f"In({self.type}, [{', '.join(map(str, self.args))}], {self.right})"


@dataclass(frozen=True, repr=False)
class Not(Formula):
    body: Formula

    def __repr__(self) -> str:
        return f"Not({self.body!r})"


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"And({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Or(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"Or({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Implies(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"Implies({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Exists(Formula):
    var: Var
    body: Formula

    def __repr__(self) -> str:
        return f"Exists({self.var.name}:{self.var.type}, {self.body!r})"


@dataclass(frozen=True, repr=False)
class Forall(Formula):
    var: Var
    body: Formula

    def __repr__(self) -> str:
        return f"Forall({self.var.name}:{self.var.type}, {self.body!r})"


ATOMS = (Eq, In)
BINARY = (And, Or, Implies)
QUANTIFIERS = (Exists, Forall)


def iff(a: Formula, b: Formula) -> Formula:
    """The biconditional, which the language expresses as two implications."""
    return And(Implies(a, b), Implies(b, a))


def conj(parts: Iterable[Formula]) -> Formula:
    items = list(parts)
    if not items:
        raise ValueError("empty conjunction")
    out = items[0]
    for p in items[1:]:
        out = And(out, p)
    return out


def forall_all(variables: Iterable[Var], body: Formula) -> Formula:
    for v in reversed(list(variables)):
        body = Forall(v, body)
    return body


def exists_all(variables: Iterable[Var], body: Formula) -> Formula:
    for v in reversed(list(variables)):
        body = Exists(v, body)
    return body


# --- structural queries -----------------------------------------------------

def terms_of(phi: Formula) -> tuple[Term, ...]:
    if isinstance(phi, Eq):
        return (phi.left, phi.right)
    if isinstance(phi, In):
        return (*phi.args, phi.right)
    return ()


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, Not):
        return (phi.body,)
    if isinstance(phi, BINARY):
        return (phi.left, phi.right)
    if isinstance(phi, QUANTIFIERS):
        return (phi.body,)
    return ()


def subformulas(phi: Formula) -> Iterator[Formula]:
    stack = [phi]
    while stack:
        f = stack.pop()
        yield f
        stack.extend(children(f))


def free_variables(phi: Formula) -> frozenset[Var]:
    if isinstance(phi, ATOMS):
        return frozenset(t for t in terms_of(phi) if isinstance(t, Var))
    if isinstance(phi, QUANTIFIERS):
        return free_variables(phi.body) - {phi.var}
    out: frozenset[Var] = frozenset()
    for c in children(phi):
        out |= free_variables(c)
    return out


def all_variables(phi: Formula) -> frozenset[Var]:
    out: set[Var] = set()
    for f in subformulas(phi):
        out.update(t for t in terms_of(f) if isinstance(t, Var))
        if isinstance(f, QUANTIFIERS):
            out.add(f.var)
    return frozenset(out)


def is_closed(phi: Formula) -> bool:
    return not free_variables(phi)


def symbol_count(phi: Formula) -> int:
    """Number of logical symbols (connectives and quantifiers)."""
    return sum(1 for f in subformulas(phi) if not isinstance(f, ATOMS))


def depth(phi: Formula) -> int:
    cs = children(phi)
    return 0 if not cs else 1 + max(depth(c) for c in cs)


def is_primitive(phi: Formula) -> bool:
    """True when only atoms, negation, conjunction and existentials occur."""
    return all(isinstance(f, (Eq, In, Not, And, Exists)) for f in subformulas(phi))


def sort_vars(vs: Iterable[Var]) -> list[Var]:
    return sorted(vs, key=lambda v: (type_sort_key(v.type), v.name))


# --- normalization -----------------------------------------------------------

def normalize(phi: Formula) -> Formula:
    """Rewrite into the fragment built from atoms with negation, conjunction and existentials."""
    if isinstance(phi, ATOMS):
        return phi
    if isinstance(phi, And):
        return And(normalize(phi.left), normalize(phi.right))
    if isinstance(phi, Not):
        return Not(normalize(phi.body))
    if isinstance(phi, Exists):
        return Exists(phi.var, normalize(phi.body))
    if isinstance(phi, Or):
        return Not(And(Not(normalize(phi.left)), Not(normalize(phi.right))))
    if isinstance(phi, Implies):
        return Not(And(normalize(phi.left), Not(normalize(phi.right))))
    if isinstance(phi, Forall):
        return Not(Exists(phi.var, Not(normalize(phi.body))))
    raise TypeError(f"not a formula: {phi!r}")


# --- well-typedness ------------------------------------------------------------

def check_well_typed(phi: Formula, sig: Signature) -> None:
    for f in subformulas(phi):
        if isinstance(f, Eq):
            _check_term(f.left, f.type, sig)
            _check_term(f.right, f.type, sig)
            if f.type not in sig.domain:
                raise FormulaTypeError(f"equality type {f.type} not in the type domain")
        elif isinstance(f, In):
            if not isinstance(f.type, Bracket) or f.type not in sig.domain:
                raise FormulaTypeError(f"belonging type {f.type} not a bracket type of the domain")
            if len(f.args) != f.type.arity:
                raise FormulaTypeError(f"{f.type} takes {f.type.arity} arguments, got {len(f.args)}")
            for a, t in zip(f.args, f.type.components):
                _check_term(a, t, sig)
            _check_term(f.right, f.type, sig)
        elif isinstance(f, QUANTIFIERS):
            if f.var.type not in sig.domain:
                raise FormulaTypeError(f"quantified variable {f.var.name} has type {f.var.type} outside the domain")


def _check_term(t: Term, expected: Type, sig: Signature) -> None:
    if t.type != expected:
        raise FormulaTypeError(f"term {t} has type {t.type}, expected {expected}")
    if isinstance(t, Const) and sig.constant_type(t.name) != t.type:
        raise FormulaTypeError(f"unknown constant {t.name}:{t.type}")


# --- printing ------------------------------------------------------------------

_PREC = {Implies: 1, Or: 2, And: 3, Not: 4}


def _prec(phi: Formula) -> int:
    if isinstance(phi, QUANTIFIERS):
        return 0
    if isinstance(phi, ATOMS):
        return 5
    return _PREC[type(phi)]


def to_text(phi: Formula) -> str:
    return _show(phi, 0)


def _show(phi: Formula, ctx: int) -> str:
    p = _prec(phi)
    if isinstance(phi, Eq):
        s = f"{phi.left} ={phi.type} {phi.right}"
    elif isinstance(phi, In):
        if len(phi.args) == 1:
            s = f"{phi.args[0]} in{phi.type} {phi.right}"
        else:
            s = f"({', '.join(map(str, phi.args))}) in{phi.type} {phi.right}"
    elif isinstance(phi, Not):
        s = "!" + _show(phi.body, 4)
    elif isinstance(phi, Implies):
        s = f"{_show(phi.left, 2)} -> {_show(phi.right, 1)}"
    elif isinstance(phi, Or):
        s = f"{_show(phi.left, 2)} | {_show(phi.right, 3)}"
    elif isinstance(phi, And):
        s = f"{_show(phi.left, 3)} & {_show(phi.right, 4)}"
    elif isinstance(phi, QUANTIFIERS):
        q = "A" if isinstance(phi, Forall) else "E"
        s = f"{q} {phi.var.name}:{phi.var.type} . {_show(phi.body, 0)}"
    else:
        raise TypeError(f"not a formula: {phi!r}")
    return f"({s})" if p < ctx else s


__all__ = [
    "Signature", "Var", "Const", "Term", "Formula", "Eq", "In", "Not", "And", "Or",
    "Implies", "Exists", "Forall", "iff", "conj", "forall_all", "exists_all",
    "free_variables", "all_variables", "is_closed", "normalize", "symbol_count", "depth",
    "is_primitive", "subformulas", "children", "terms_of", "to_text", "check_well_typed",
    "sort_vars",
]
