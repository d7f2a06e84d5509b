"""Stock formula libraries: equality axioms and the real-axis axioms."""
from __future__ import annotations

from .core_types import ZERO, Bracket, Type, bracket
from .formulas import Eq, Formula, Implies, In, Signature, Var, And, conj, forall_all, iff
from .parser import parse


def _v(name: str, t: Type) -> Var:
    return Var(name, t)


def reflexivity(t: Type) -> Formula:
    x = _v("x", t)
    return forall_all([x], Eq(t, x, x))


def symmetry(t: Type) -> Formula:
    x, y = _v("x", t), _v("y", t)
    return forall_all([x, y], Implies(Eq(t, x, y), Eq(t, y, x)))


def transitivity(t: Type) -> Formula:
    x, y, z = _v("x", t), _v("y", t), _v("z", t)
    return forall_all([x, y, z], Implies(And(Eq(t, x, y), Eq(t, y, z)), Eq(t, x, z)))


def change_of_equals(t: Bracket) -> Formula:
    """Equal arguments and equal sets give the same belonging verdict."""
    xs = [_v(f"x{i}", c) for i, c in enumerate(t.components)]
    ys = [_v(f"y{i}", c) for i, c in enumerate(t.components)]
    u, v = _v("u", t), _v("v", t)
    hyp = conj([Eq(c, x, y) for c, x, y in zip(t.components, xs, ys)] + [Eq(t, u, v)])
    body = Implies(hyp, iff(In(t, tuple(xs), u), In(t, tuple(ys), v)))
    bound = [w for pair in zip(xs, ys) for w in pair] + [u, v]
    return forall_all(bound, body)


def equality_axioms(sig: Signature) -> list[Formula]:
    """E1, E2, E3 for every type followed by E4 for every bracket type."""
    out: list[Formula] = []
    for t in sig.types:
        out += [reflexivity(t), symmetry(t), transitivity(t)]
    for t in sig.belonging_types:
        out.append(change_of_equals(t))
    return out


def named_equality_axioms(sig: Signature) -> list[tuple[str, Formula]]:
    out: list[tuple[str, Formula]] = []
    for t in sig.types:
        out += [(f"E1{t}", reflexivity(t)), (f"E2{t}", symmetry(t)), (f"E3{t}", transitivity(t))]
    for t in sig.belonging_types:
        out.append((f"E4{t}", change_of_equals(t)))
    return out


# --- the ordered-field signature with relational operations ------------------

PI = ZERO
KAPPA = bracket(ZERO)
RHO = bracket(ZERO, ZERO)
LAMBDA = bracket(ZERO, ZERO, ZERO)

REAL_AXIS_CONSTANTS = (
    ("zero", PI),
    ("one", PI),
    ("neg", RHO),
    ("inv", RHO),
    ("leq", RHO),
    ("add", LAMBDA),
    ("mul", LAMBDA),
)


def real_axis_signature() -> Signature:
    return Signature.of([PI, KAPPA, RHO, LAMBDA], REAL_AXIS_CONSTANTS)


# Quantified variables are first order unless annotated otherwise.
_REAL_AXIS_TEXT: list[tuple[str, str]] = [
    ("A1", "(A x:0 . E y:0 . (x, y) in[0,0] neg)"
           " & (A x:0, y:0, y':0 . (x, y) in[0,0] neg & (x, y') in[0,0] neg -> y =0 y')"),
    ("A2", "(A x:0, y:0 . E z:0 . (x, y, z) in[0,0,0] add)"
           " & (A x:0, y:0, z:0, z':0 . (x, y, z) in[0,0,0] add & (x, y, z') in[0,0,0] add -> z =0 z')"),
    ("A3", "(A x:0 . !(x =0 zero) -> E y:0 . (x, y) in[0,0] inv)"
           " & (A x:0, y:0 . (x, y) in[0,0] inv -> !(x =0 zero))"
           " & (A x:0, y:0, y':0 . (x, y) in[0,0] inv & (x, y') in[0,0] inv -> y =0 y')"),
    ("A4", "(A x:0, y:0 . E z:0 . (x, y, z) in[0,0,0] mul)"
           " & (A x:0, y:0, z:0, z':0 . (x, y, z) in[0,0,0] mul & (x, y, z') in[0,0,0] mul -> z =0 z')"),
    ("A5", "!(one =0 zero)"),
    ("A6", "A x:0, y:0, z:0, u1:0, u2:0, v1:0, v2:0 . (x, y, u1) in[0,0,0] add & (u1, z, u2) in[0,0,0] add"
           " & (y, z, v1) in[0,0,0] add & (x, v1, v2) in[0,0,0] add -> u2 =0 v2"),
    ("A7", "A x:0, u:0, v:0 . ((x, zero, u) in[0,0,0] add -> u =0 x) & ((zero, x, v) in[0,0,0] add -> v =0 x)"),
    ("A8", "A x:0, u1:0, u2:0, v1:0, v2:0 . ((x, u1) in[0,0] neg & (x, u1, u2) in[0,0,0] add -> u2 =0 zero)"
           " & ((x, v1) in[0,0] neg & (v1, x, v2) in[0,0,0] add -> v2 =0 zero)"),
    ("A9", "A x:0, y:0, u:0, v:0 . (x, y, u) in[0,0,0] add & (y, x, v) in[0,0,0] add -> u =0 v"),
    ("A10", "A x:0, y:0, z:0, u1:0, u2:0, v1:0, v2:0, v3:0 . (y, z, u1) in[0,0,0] add"
            " & (x, u1, u2) in[0,0,0] mul & (x, y, v1) in[0,0,0] mul & (x, z, v2) in[0,0,0] mul"
            " & (v1, v2, v3) in[0,0,0] add -> u2 =0 v3"),
    ("A11", "A x:0, y:0, z:0, u1:0, u2:0, v1:0, v2:0, v3:0 . (x, y, u1) in[0,0,0] add"
            " & (u1, z, u2) in[0,0,0] mul & (x, z, v1) in[0,0,0] mul & (y, z, v2) in[0,0,0] mul"
            " & (v1, v2, v3) in[0,0,0] add -> u2 =0 v3"),
    ("A12", "A x:0, y:0, z:0, u1:0, u2:0, v1:0, v2:0 . (x, y, u1) in[0,0,0] mul & (u1, z, u2) in[0,0,0] mul"
            " & (y, z, v1) in[0,0,0] mul & (x, v1, v2) in[0,0,0] mul -> u2 =0 v2"),
    ("A13", "A x:0, u:0, v:0 . ((x, one, u) in[0,0,0] mul -> u =0 x) & ((one, x, v) in[0,0,0] mul -> v =0 x)"),
    ("A14", "A x:0, u1:0, u2:0, v1:0, v2:0 . !(x =0 zero) ->"
            " ((x, u1) in[0,0] inv & (x, u1, u2) in[0,0,0] mul -> u2 =0 one)"
            " & ((x, v1) in[0,0] inv & (v1, x, v2) in[0,0,0] mul -> v2 =0 one)"),
    ("A15", "A x:0, y:0, u:0, v:0 . (x, y, u) in[0,0,0] mul & (y, x, v) in[0,0,0] mul -> u =0 v"),
    ("A16", "A x:0 . (x, x) in[0,0] leq"),
    ("A17", "A x:0, y:0 . (x, y) in[0,0] leq & (y, x) in[0,0] leq -> x =0 y"),
    ("A18", "A x:0, y:0, z:0 . (x, y) in[0,0] leq & (y, z) in[0,0] leq -> (x, z) in[0,0] leq"),
    ("A19", "A x:0, y:0 . (x, y) in[0,0] leq | (y, x) in[0,0] leq"),
    ("A20", "A x:0, y:0, z:0, u:0, v:0 . (x, y) in[0,0] leq ->"
            " ((x, z, u) in[0,0,0] add & (y, z, v) in[0,0,0] add -> (u, v) in[0,0] leq)"),
    ("A21", "A x:0, y:0, u:0 . (zero, x) in[0,0] leq & (zero, y) in[0,0] leq ->"
            " ((x, y, u) in[0,0,0] mul -> (zero, u) in[0,0] leq)"),
    ("A22", "A u:[0], v:[0] . (E x:0 . x in[0] u) & (E y:0 . y in[0] v)"
            " & (A z:0 . z in[0] u | z in[0] v)"
            " & (A x:0, y:0 . x in[0] u & y in[0] v -> (x, y) in[0,0] leq)"
            " -> E z:0 . A x:0, y:0 . x in[0] u & y in[0] v -> (x, z) in[0,0] leq & (z, y) in[0,0] leq"),
    ("PE1", "A u:[0], v:[0] . u =[0] v <-> (A x:0 . x in[0] u <-> x in[0] v)"),
    ("PE2", "A u:[0,0], v:[0,0] . u =[0,0] v <-> (A x:0, y:0 . (x, y) in[0,0] u <-> (x, y) in[0,0] v)"),
    ("PE3", "A u:[0,0,0], v:[0,0,0] . u =[0,0,0] v"
            " <-> (A x:0, y:0, z:0 . (x, y, z) in[0,0,0] u <-> (x, y, z) in[0,0,0] v)"),
]


def real_axis_library() -> tuple[Signature, list[tuple[str, Formula]]]:
    """The relational ordered-field signature and its 29 named axioms.

    E1 to E4 each appear once, as the conjunction of their per-type
    instances; the key instances are available from ``named_equality_axioms``.
    """
    sig = real_axis_signature()
    eq = {1: [], 2: [], 3: [], 4: []}
    for t in sig.types:
        eq[1].append(reflexivity(t))
        eq[2].append(symmetry(t))
        eq[3].append(transitivity(t))
    for t in sig.belonging_types:
        eq[4].append(change_of_equals(t))
    named: list[tuple[str, Formula]] = [(f"E{i}", conj(eq[i])) for i in range(1, 5)]
    named += [(name, parse(text, sig)) for name, text in _REAL_AXIS_TEXT]
    return sig, named


def real_axis_axiom(name: str) -> Formula:
    sig = real_axis_signature()
    for n, text in _REAL_AXIS_TEXT:
        if n == name:
            return parse(text, sig)
    raise KeyError(name)
