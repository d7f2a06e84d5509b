"""Concrete syntax for formulas.

Grammar (``!`` binds tightest, then ``&``, ``|``, ``->``; ``->`` is right
associative; a quantifier's scope runs as far right as possible)::

    formula := quant | iff
    quant   := ('A' | 'E') binder (',' binder)* '.' formula
    binder  := ident ':' type
    iff     := impl ('<->' impl)?
    impl    := or ('->' impl)?
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '!' unary | '(' formula ')' | quant | atom
    atom    := term '=' type term
             | term 'in' type term
             | '(' term (',' term)* ')' 'in' type term

``<->`` and comma-separated binders are input conveniences: they expand to
a pair of implications and to nested quantifiers, so the printer never
emits them.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .core_types import ZERO, Bracket, Product, Semitype, Type
from .errors import FormulaSyntaxError, FormulaTypeError
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
    iff,
)

RESERVED = {"A", "E", "in"}

_TOKEN = re.compile(
    r"\s*(?:(?P<arrow2><->)|(?P<arrow>->)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<zero>0)|(?P<sym>[=!&|()\[\],:.]))"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tok = m.group(kind)
        if kind == "ident" and tok in RESERVED:
            kind = tok
        elif kind in ("arrow", "arrow2", "sym", "zero"):
            kind = tok
        out.append(Token(kind, tok, start))
        pos = m.end()
    out.append(Token("eof", "", n))
    return out


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.text = text
        self.sig = sig
        self.toks = tokenize(text)
        self.i = 0
        self.scope: list[Var] = []
        self.free: dict[str, Var] = {}

    # token helpers
    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, what: str | None = None) -> Token:
        t = self.peek()
        if t.kind != kind:
            found = t.text or "end of input"
            raise FormulaSyntaxError(f"unexpected {found!r}", t.pos, what or repr(kind))
        return self.take()

    # grammar
    def formula(self) -> Formula:
        if self.peek().kind in ("A", "E"):
            return self.quant()
        return self.iff()

    def quant(self) -> Formula:
        q = self.take().kind
        binders: list[Var] = []
        while True:
            name_tok = self.expect("ident", "a variable name")
            self.expect(":", "':'")
            t = self.type_()
            if t not in self.sig.domain:
                raise FormulaTypeError(f"quantified variable {name_tok.text} has type {t} outside the type domain")
            if self.sig.constant_type(name_tok.text) is not None:
                raise FormulaTypeError(f"cannot bind {name_tok.text!r}: it names a constant")
            if any(v.name == name_tok.text for v in self.scope) or any(v.name == name_tok.text for v in binders):
                raise FormulaTypeError(f"variable {name_tok.text!r} rebound inside its own scope at offset {name_tok.pos}")
            binders.append(Var(name_tok.text, t))
            if self.peek().kind == ",":
                self.take()
                continue
            break
        self.expect(".", "'.'")
        self.scope.extend(binders)
        body = self.formula()
        del self.scope[len(self.scope) - len(binders):]
        node = Forall if q == "A" else Exists
        for v in reversed(binders):
            body = node(v, body)
        return body

    def iff(self) -> Formula:
        left = self.impl()
        if self.peek().kind == "<->":
            self.take()
            right = self.impl_or_quant()
            return iff(left, right)
        return left

    def impl_or_quant(self) -> Formula:
        if self.peek().kind in ("A", "E"):
            return self.quant()
        return self.impl()

    def impl(self) -> Formula:
        left = self.or_()
        if self.peek().kind == "->":
            self.take()
            return Implies(left, self.impl_or_quant())
        return left

    def or_(self) -> Formula:
        left = self.and_()
        while self.peek().kind == "|":
            self.take()
            left = Or(left, self.and_())
        return left

    def and_(self) -> Formula:
        left = self.unary()
        while self.peek().kind == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        t = self.peek()
        if t.kind == "!":
            self.take()
            return Not(self.unary())
        if t.kind in ("A", "E"):
            return self.quant()
        if t.kind == "(":
            if self.peek(1).kind == "ident" and self.peek(2).kind in (",", ")") and self._is_tuple():
                return self.atom()
            self.take()
            f = self.formula()
            self.expect(")", "')'")
            return f
        if t.kind == "ident":
            return self.atom()
        found = t.text or "end of input"
        raise FormulaSyntaxError(f"unexpected {found!r}", t.pos, "a formula")

    def _is_tuple(self) -> bool:
        # '(' ident (',' ident)* ')' 'in'
        j = self.i + 1
        while True:
            if self.toks[j].kind != "ident":
                return False
            j += 1
            if self.toks[j].kind == ",":
                j += 1
                continue
            return self.toks[j].kind == ")" and self.toks[j + 1].kind == "in"

    def atom(self) -> Formula:
        start = self.peek().pos
        if self.peek().kind == "(":
            self.take()
            names = [self.expect("ident", "a term")]
            while self.peek().kind == ",":
                self.take()
                names.append(self.expect("ident", "a term"))
            self.expect(")", "')'")
            self.expect("in", "'in'")
            return self._belonging(names, start)
        left = self.expect("ident", "a term")
        op = self.peek()
        if op.kind == "=":
            self.take()
            t = self.type_()
            if t not in self.sig.domain:
                raise FormulaTypeError(f"equality type {t} not in the type domain (offset {op.pos})")
            right = self.expect("ident", "a term")
            return Eq(t, self.term(left, t), self.term(right, t))
        if op.kind == "in":
            self.take()
            return self._belonging([left], start)
        found = op.text or "end of input"
        raise FormulaSyntaxError(f"unexpected {found!r}", op.pos, "'=' or 'in'")

    def _belonging(self, names: list[Token], start: int) -> Formula:
        t = self.type_()
        if not isinstance(t, Bracket) or t not in self.sig.domain:
            raise FormulaTypeError(f"belonging type {t} is not a bracket type of the domain (offset {start})")
        if len(names) != t.arity:
            raise FormulaTypeError(f"{t} takes {t.arity} arguments, got {len(names)} (offset {start})")
        right = self.expect("ident", "a term")
        args = tuple(self.term(n, c) for n, c in zip(names, t.components))
        return In(t, args, self.term(right, t))

    def type_(self) -> Type:
        t = self._semitype()
        if isinstance(t, Product):
            raise FormulaSyntaxError("a product semitype is not a type", self.peek().pos)
        return t

    def _semitype(self) -> Semitype:
        t = self.peek()
        if t.kind == "0":
            self.take()
            return ZERO
        if t.kind == "[":
            self.take()
            comps = [self.type_()]
            while self.peek().kind == ",":
                self.take()
                comps.append(self.type_())
            self.expect("]", "']'")
            return Bracket(tuple(comps))
        found = t.text or "end of input"
        raise FormulaSyntaxError(f"unexpected {found!r}", t.pos, "a type")

    def term(self, tok: Token, expected: Type) -> Term:
        name = tok.text
        for v in reversed(self.scope):
            if v.name == name:
                if v.type != expected:
                    raise FormulaTypeError(
                        f"variable {name} has type {v.type} but is used at type {expected} (offset {tok.pos})"
                    )
                return v
        ct = self.sig.constant_type(name)
        if ct is not None:
            if ct != expected:
                raise FormulaTypeError(f"constant {name} has type {ct}, used at type {expected} (offset {tok.pos})")
            return Const(name, ct)
        prev = self.free.get(name)
        if prev is not None and prev.type != expected:
            raise FormulaTypeError(
                f"free variable {name} used at types {prev.type} and {expected} (offset {tok.pos})"
            )
        if expected not in self.sig.domain:
            raise FormulaTypeError(f"type {expected} not in the type domain")
        v = Var(name, expected)
        self.free[name] = v
        return v


def parse(text: str, sig: Signature) -> Formula:
    """Parse one formula over ``sig``."""
    p = _Parser(text, sig)
    if p.peek().kind == "eof":
        raise FormulaSyntaxError("empty formula", 0, "a formula")
    f = p.formula()
    t = p.peek()
    if t.kind != "eof":
        raise FormulaSyntaxError(f"unexpected {t.text!r}", t.pos, "end of input")
    return f


def parse_lines(text: str, sig: Signature, source: str = "<input>") -> list[Formula]:
    """Parse a file of one formula per line; ``#`` starts a comment."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(parse(line, sig))
        except FormulaSyntaxError as e:
            raise FormulaSyntaxError(f"{source}:{lineno}: {e}") from None
        except FormulaTypeError as e:
            raise FormulaTypeError(f"{source}:{lineno}: {e}") from None
    return out


__all__ = ["parse", "parse_lines", "tokenize"]
