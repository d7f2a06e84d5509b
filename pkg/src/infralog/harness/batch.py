"""Stacked truth tables for the closed canonical enumeration.

Formulas of one symbol count and one scope share a single array whose first
axis runs over the formulas, so a whole stratum is negated, conjoined or
quantified with one array operation.  The enumeration order matches
``FormulaGenerator.canonical_closed``.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..formulas import And, Exists, Formula, Not, free_variables
from ..semantics import System
from ..tables import TableEvaluator
from .generators import FormulaGenerator


class ClosedBatch:
    def __init__(self, gen: FormulaGenerator, systems: Sequence[System], prune: bool = False):
        self.gen = gen
        self.systems = list(systems)
        self.prune = prune
        self.pool = list(gen.pool)
        self.axis = {v: i + 1 for i, v in enumerate(self.pool)}
        self.te = [TableEvaluator(U, self.pool) for U in self.systems]
        self._cache: dict[tuple, tuple[list[Formula], list[np.ndarray], np.ndarray]] = {}

    def _shape(self, U: System, scope: frozenset) -> tuple[int, ...]:
        return tuple(U.n if v in scope else 1 for v in self.pool)

    def stratum(self, k: int, scope: frozenset):
        """Formulas, per-system stacked tables and per-formula free-variable flags."""
        key = (k, scope)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        allowed = [v for v in self.pool if v in scope]
        shapes = [self._shape(U, scope) for U in self.systems]
        forms: list[Formula] = []
        parts: list[list[np.ndarray]] = [[] for _ in self.systems]
        frees: list[np.ndarray] = []
        width = len(self.pool)
        if k == 0:
            atoms = self.gen.atoms(allowed)
            forms = atoms
            for s, te in enumerate(self.te):
                parts[s].append(np.stack([np.broadcast_to(te.table(a), shapes[s]) for a in atoms])
                                if atoms else np.zeros((0,) + shapes[s], dtype=bool))
            frees.append(np.array([[v in free_variables(a) for v in self.pool] for a in atoms],
                                  dtype=bool).reshape(len(atoms), width))
        else:
            f0, t0, fr0 = self.stratum(k - 1, scope)
            keep = [i for i, a in enumerate(f0) if not (self.prune and isinstance(a, Not))]
            forms += [Not(f0[i]) for i in keep]
            for s in range(len(self.systems)):
                parts[s].append(~t0[s][keep])
            frees.append(fr0[keep])
            for i in range(k):
                j = k - 1 - i
                if i > j:
                    break
                if self.prune and not scope:
                    continue
                fl, tl, frl = self.stratum(i, scope)
                fr, tr, frr = self.stratum(j, scope)
                if i == j:
                    ai, bi = np.triu_indices(len(fl), k=1)
                else:
                    ai, bi = np.meshgrid(np.arange(len(fl)), np.arange(len(fr)), indexing="ij")
                    ai, bi = ai.ravel(), bi.ravel()
                forms += [And(fl[a], fr[b]) for a, b in zip(ai.tolist(), bi.tolist())]
                for s in range(len(self.systems)):
                    parts[s].append(tl[s][ai] & tr[s][bi])
                frees.append(frl[ai] | frr[bi])
            for v in self.pool:
                if v in scope:
                    continue
                inner = scope | {v}
                fb, tb, frb = self.stratum(k - 1, inner)
                col = self.pool.index(v)
                sel = np.nonzero(frb[:, col])[0] if len(fb) else np.zeros(0, dtype=np.int64)
                forms += [Exists(v, fb[i]) for i in sel.tolist()]
                for s in range(len(self.systems)):
                    parts[s].append(tb[s][sel].any(axis=self.axis[v], keepdims=True))
                fr = frb[sel].copy()
                fr[:, col] = False
                frees.append(fr)
        tables = [np.concatenate(p) if p else np.zeros((0,) + shapes[s], dtype=bool)
                  for s, p in enumerate(parts)]
        free = np.concatenate(frees) if frees else np.zeros((0, width), dtype=bool)
        out = (forms, tables, free)
        self._cache[key] = out
        return out

    def closed(self, max_symbols: int) -> tuple[list[Formula], list[np.ndarray]]:
        """All closed formulas and, per system, their truth values."""
        forms: list[Formula] = []
        vals: list[list[np.ndarray]] = [[] for _ in self.systems]
        for k in range(max_symbols + 1):
            f, t, _ = self.stratum(k, frozenset())
            forms += f
            for s in range(len(self.systems)):
                vals[s].append(t[s].reshape(len(f)))
        return forms, [np.concatenate(v) for v in vals]


__all__ = ["ClosedBatch"]
