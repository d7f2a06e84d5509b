"""Whole-table satisfaction: a formula's truth value at every evaluation at once.

The table of a formula is a boolean array with one axis per variable of a
fixed pool; axes of variables that are not free have length 1.  Built
bottom-up with array operations, this is much faster than the recursive
evaluator when many evaluations or many formulas share one system, and it
serves as a second, independently written route to the same relation.
"""
from __future__ import annotations

import itertools
from typing import Mapping, Sequence

import numpy as np

from .errors import BudgetExceeded, EvaluationError
from .formulas import And, Eq, Exists, Forall, Formula, Implies, In, Not, Or, Term, Var
from .semantics import System


class TableEvaluator:
    def __init__(self, U: System, variables: Sequence[Var], standard: bool = False, max_cells: int = 2 ** 24):
        self.U = U
        self.vars = list(variables)
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("duplicate variables in the pool")
        self.axis = {v: i for i, v in enumerate(self.vars)}
        self.shape = tuple(U.size(v.type) for v in self.vars)
        cells = int(np.prod(self.shape, dtype=object)) if self.shape else 1
        if cells > max_cells:
            raise BudgetExceeded(f"evaluation space of {cells} cells exceeds {max_cells}")
        self.standard = standard
        self.max_cells = max_cells
        self._memo: dict[Formula, np.ndarray] = {}

    def _check(self, cells: int) -> None:
        if cells > self.max_cells:
            raise BudgetExceeded(f"atom table of {cells} cells exceeds {self.max_cells}")

    # tables
    def table(self, phi: Formula) -> np.ndarray:
        hit = self._memo.get(phi)
        if hit is not None:
            return hit
        r = self._build(phi)
        self._memo[phi] = r
        return r

    def _build(self, phi: Formula) -> np.ndarray:
        if isinstance(phi, Eq):
            if self.standard:
                rel = lambda a, b: a == b  # noqa: E731
            else:
                rel = self.U.eq_rel(phi.type)
            return self._atom([phi.left, phi.right], lambda vals: rel(vals[0], vals[1]))
        if isinstance(phi, In):
            n = self.U.n
            rel = None if self.standard else self.U.bel_rel(phi.type)
            k = len(phi.args)

            def test(vals: list[int]) -> bool:
                code = 0
                for a in vals[:k]:
                    code = code * n + a
                if rel is None:
                    return (vals[k] >> code) & 1 == 1
                return rel(code, vals[k])

            return self._atom([*phi.args, phi.right], test)
        if isinstance(phi, Not):
            return ~self.table(phi.body)
        if isinstance(phi, And):
            return self.table(phi.left) & self.table(phi.right)
        if isinstance(phi, Or):
            return self.table(phi.left) | self.table(phi.right)
        if isinstance(phi, Implies):
            return ~self.table(phi.left) | self.table(phi.right)
        if isinstance(phi, (Exists, Forall)):
            if phi.var not in self.axis:
                raise EvaluationError(f"variable {phi.var.name} is not in the pool")
            body = self.table(phi.body)
            ax = self.axis[phi.var]
            if body.shape[ax] == 1:
                # vacuous binding: the body ignores the variable
                return body
            return body.any(axis=ax, keepdims=True) if isinstance(phi, Exists) else body.all(axis=ax, keepdims=True)
        raise TypeError(f"not a formula: {phi!r}")

    def _atom(self, terms: Sequence[Term], test) -> np.ndarray:
        """Evaluate an atom over the domains of its distinct variables."""
        distinct: list[Var] = []
        for t in terms:
            if isinstance(t, Var):
                if t not in self.axis:
                    raise EvaluationError(f"variable {t.name} is not in the pool")
                if t not in distinct:
                    distinct.append(t)
        distinct.sort(key=lambda v: self.axis[v])
        sizes = [self.shape[self.axis[v]] for v in distinct]
        cells = 1
        for sz in sizes:
            cells *= sz
        self._check(cells)
        pos = {v: i for i, v in enumerate(distinct)}
        consts = [None if isinstance(t, Var) else self.U.constants[t.name] for t in terms]
        slots = [pos[t] if isinstance(t, Var) else -1 for t in terms]
        flat = np.zeros(cells, dtype=bool)
        for j, combo in enumerate(itertools.product(*(range(sz) for sz in sizes))):
            vals = [combo[s] if s >= 0 else c for s, c in zip(slots, consts)]
            if test(vals):
                flat[j] = True
        out_shape = [1] * len(self.vars)
        for v, sz in zip(distinct, sizes):
            out_shape[self.axis[v]] = sz
        return flat.reshape(out_shape)

    # lookups
    def holds(self, phi: Formula, env: Mapping[Var, int] | None = None) -> bool:
        tab = self.table(phi)
        env = env or {}
        idx = []
        for i, v in enumerate(self.vars):
            if tab.shape[i] == 1:
                idx.append(0)
            else:
                try:
                    idx.append(env[v])
                except KeyError:
                    raise EvaluationError(f"variable {v.name}:{v.type} has no value") from None
        return bool(tab[tuple(idx)])

    def holds_many(self, phi: Formula, columns: Mapping[Var, np.ndarray], count: int) -> np.ndarray:
        """Vectorized lookup: ``columns[v][j]`` is the value of ``v`` in evaluation ``j``."""
        tab = self.table(phi)
        idx = []
        for i, v in enumerate(self.vars):
            if tab.shape[i] == 1:
                idx.append(np.zeros(count, dtype=np.int64))
            else:
                idx.append(columns[v])
        return tab[tuple(idx)]


__all__ = ["TableEvaluator"]
