"""Towers of infra-powers with diagonal embeddings, and a finite limit over them.

Level ``i+1`` is the infra-power of level ``i`` with a fixed exponent and
ultrafilter.  The limit is the product of all levels over an ultrafilter on
the level indices ``0..n``; each level maps into it by pushing elements up
with the diagonals and pulling them down with evaluation at an anchor index.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Sequence

from .core_types import DEFAULT_MAX_TERMINAL, ZERO, Bracket, FirstOrder
from .errors import BudgetExceeded, InvalidSystem, SignatureMismatch
from .filters import FilterSpec
from .formulas import Exists, Forall, Formula, children, is_closed
from .infraproduct import IndexedFamily, ProductSystem, diagonal, infrapower, infraproduct
from .semantics import (
    Predicate, System, approx_injective, bits, homomorphism_failure, map_code, satisfies, tuple_code, tuple_of,
)


@dataclass
class Tower:
    base: System
    exponent: tuple[str, ...]
    D: FilterSpec
    depth: int
    levels: list[System]
    embeddings: list[list[int]]

    def sizes(self) -> list[int]:
        return [U.n for U in self.levels]


@dataclass
class TowerLimit:
    tower: Tower
    index_set: tuple[str, ...]
    E: FilterSpec
    anchor: str
    system: ProductSystem
    maps: list[list[int]]
    notes: list[str] = field(default_factory=list)


def build_tower(U0: System, exponent: Sequence[str], D: FilterSpec, n: int, *,
                max_terminal: int = DEFAULT_MAX_TERMINAL, validate: bool = True) -> Tower:
    if n < 0:
        raise ValueError("depth must be nonnegative")
    F = tuple(exponent)
    if tuple(D.index_set) != F:
        raise ValueError("the ultrafilter lives on a different index set")
    if not D.is_ultrafilter():
        raise ValueError("tower exponents need an ultrafilter")
    levels: list[System] = [U0]
    embeddings: list[list[int]] = []
    for i in range(n):
        size = levels[-1].n ** len(F)
        if size > max_terminal:
            raise BudgetExceeded(f"level {i + 1} would have {size} elements (budget {max_terminal})")
        P, _ = infrapower(levels[-1], None, F, D, max_terminal=max_terminal, validate=validate)
        P.name = f"level{i + 1}"
        embeddings.append(diagonal(levels[-1], P))
        levels.append(P)
    return Tower(U0, F, D, n, levels, embeddings)


def build_limit(t: Tower, E: FilterSpec, anchor: str, *, max_terminal: int = DEFAULT_MAX_TERMINAL) -> TowerLimit:
    labels = tuple(str(i) for i in range(t.depth + 1))
    if tuple(E.index_set) != labels:
        raise ValueError(f"the limit ultrafilter must live on the level indices {list(labels)}")
    if not E.is_ultrafilter():
        raise ValueError("the limit needs an ultrafilter")
    if anchor not in t.exponent:
        raise ValueError(f"anchor {anchor!r} is not in the exponent")
    f0 = t.exponent.index(anchor)
    fam = IndexedFamily(labels, tuple(t.levels))
    R = infraproduct(fam, E, max_terminal=max_terminal, validate=False)
    R.name = "limit"
    maps: list[list[int]] = []
    for i in range(t.depth + 1):
        w = []
        for p in range(t.levels[i].n):
            comps = [0] * (t.depth + 1)
            comps[i] = p
            for j in range(i, t.depth):
                comps[j + 1] = t.embeddings[j][comps[j]]
            for j in range(i, 0, -1):
                comps[j - 1] = t.levels[j].component(comps[j], f0)
            w.append(R.element_of(comps))
        maps.append(w)
    notes = [f"index set truncated to levels 0..{t.depth}; the limit ultrafilter is {E.describe()}"]
    return TowerLimit(t, labels, E, anchor, R, maps, notes)


# --- checks -------------------------------------------------------------------------

def embedding_checks(t: Tower) -> list[dict[str, Any]]:
    out = []
    for i, u in enumerate(t.embeddings):
        src, dst = t.levels[i], t.levels[i + 1]
        diag = all(dst.component(u[p], f) == p for p in range(src.n) for f in range(len(t.exponent)))
        fail = homomorphism_failure(u, src, dst)
        out.append({
            "embedding": f"u{i}",
            "source_size": src.n,
            "target_size": dst.n,
            "diagonal": diag,
            "homomorphism": fail is None,
            "homomorphism_failure": fail,
            "approx_injective": approx_injective(u, src, dst, ZERO),
        })
    return out


def limit_checks(L: TowerLimit) -> list[dict[str, Any]]:
    t, R = L.tower, L.system
    out = []
    for i, w in enumerate(L.maps):
        src = t.levels[i]
        row: dict[str, Any] = {"map": f"w{i}", "source_size": src.n}
        fail = homomorphism_failure(w, src, R)
        row["homomorphism"] = fail is None
        row["homomorphism_failure"] = fail
        row["approx_injective"] = approx_injective(w, src, R, ZERO)
        if i < t.depth:
            nxt, u = L.maps[i + 1], t.embeddings[i]
            row["composition"] = all(R.eq(ZERO, w[p], nxt[u[p]]) for p in range(src.n))
        out.append(row)
    return out


def quantifier_work(U: System, phi: Formula) -> int:
    """Upper bound on the evaluations needed for a formula's quantifier prefix nesting."""
    def work(f: Formula) -> int:
        if isinstance(f, (Exists, Forall)):
            return U.size_unchecked(f.var.type) * work(f.body)
        best = 1
        for g in children(f):
            best = max(best, work(g))
        return best
    return work(phi)


def induced_subsystem(ambient: System, image: Sequence[int], name: str = "") -> System | None:
    """The restriction of ``ambient`` to a subset of its carrier.

    Returns None when a first-order constant falls outside the subset.
    """
    elems = sorted(set(image))
    pos = {a: i for i, a in enumerate(elems)}
    k, n = len(elems), ambient.n
    sig = ambient.sig

    def lift_code(code: int, arity: int) -> int:
        return tuple_code([elems[c] for c in tuple_of(code, k, arity)], n)

    def lift(t, v: int) -> int:
        if isinstance(t, FirstOrder):
            return elems[v]
        out = 0
        for c in bits(v):
            out |= 1 << lift_code(c, t.arity)
        return out

    consts: dict[str, int] = {}
    for cname, t in sig.constants:
        v = ambient.constants[cname]
        if isinstance(t, FirstOrder):
            if v not in pos:
                return None
            consts[cname] = pos[v]
        else:
            m = 0
            for c in bits(v):
                comps = tuple_of(c, n, t.arity)
                if all(x in pos for x in comps):
                    m |= 1 << tuple_code([pos[x] for x in comps], k)
            consts[cname] = m
    eqs = {}
    for t in sig.types:
        rel = ambient.eq_rel(t)
        eqs[t] = Predicate(lambda a, b, t=t, rel=rel: rel(lift(t, a), lift(t, b)))
    bels = {}
    for t in sig.belonging_types:
        rel = ambient.bel_rel(t)
        bels[t] = Predicate(lambda c, P, t=t, rel=rel: rel(lift_code(c, t.arity), lift(t, P)))
    labels = [ambient.labels[a] for a in elems]
    return System(sig, labels, consts, eqs, bels, validate=False, name=name or f"induced({ambient.name})")


def check_submodel(source: System, ambient: System, u: Sequence[int], formulas: Sequence[tuple[str, Formula]], *,
                   work_limit: int = 1 << 20) -> dict[str, Any]:
    """Per-formula verdicts for the image of ``u`` inside ``ambient``.

    The image closure facts do not depend on the formulas: whether it holds
    the first-order constants, and whether the ambient relations restricted
    to the image reflect the source relations.
    """
    if source.sig != ambient.sig:
        raise SignatureMismatch("source and ambient use different signatures")
    report: dict[str, Any] = {"formulas": []}
    if not formulas:
        return report
    image = sorted(set(u))
    report["image_size"] = len(image)
    report["constants_in_image"] = all(
        ambient.constants[c] in image for c, t in source.sig.constants if isinstance(t, FirstOrder)
    )
    report["equality_reflected"] = all(
        ambient.eq(ZERO, u[a], u[b]) == source.eq(ZERO, a, b) for a in range(source.n) for b in range(source.n)
    )
    bel_ok = True
    for cname, t in source.sig.constants:
        if isinstance(t, FirstOrder):
            continue
        for code in range(source.width(t)):
            mapped = map_code(u.__getitem__, code, source.n, ambient.n, t.arity)
            if source.bel(t, code, source.constants[cname]) != ambient.bel(t, mapped, ambient.constants[cname]):
                bel_ok = False
                break
    report["constant_belonging_reflected"] = bel_ok
    induced = induced_subsystem(ambient, u)
    for name, phi in formulas:
        if not is_closed(phi):
            raise ValueError(f"formula {name} is not closed")
        row: dict[str, Any] = {"formula": name}
        for label, U in (("source", source), ("ambient", ambient), ("induced", induced)):
            if U is None:
                row[label] = None
            elif quantifier_work(U, phi) > work_limit:
                row[label] = "skipped: budget"
            else:
                try:
                    row[label] = satisfies(U, phi)
                except BudgetExceeded:
                    row[label] = "skipped: budget"
        src_v, amb_v = row["source"], row["ambient"]
        row["preserved"] = None if not isinstance(src_v, bool) or not isinstance(amb_v, bool) else (not src_v or amb_v)
        report["formulas"].append(row)
    return report


# --- binary partitions --------------------------------------------------------------

def _require(U: System, names: Sequence[str]) -> None:
    for c in names:
        if U.sig.constant_type(c) is None:
            raise InvalidSystem(f"the axiom needs the constant {c!r}")


def binary_partition_witness(t: Tower, level: int, axiom: str) -> dict[str, Any]:
    if not 1 <= level <= t.depth:
        raise ValueError(f"level must be between 1 and {t.depth}")
    P = t.levels[level]
    low = t.levels[level - 1]
    D = t.D
    k = len(t.exponent)
    full = D.full
    rho = Bracket((ZERO, ZERO))
    rows = []
    if axiom == "A3":
        _require(low, ["zero", "inv"])
        z_low, inv_low = low.constants["zero"], low.constants["inv"]
        for p in range(P.n):
            comps = P.comps[p]
            zer = sum(1 << f for f in range(k) if low.eq(ZERO, comps[f], z_low))
            coz = full & ~zer
            sel = [name for name, m in (("zer", zer), ("coz", coz)) if m in D]
            is_zero = P.eq(ZERO, p, P.constants["zero"])
            row: dict[str, Any] = {
                "element": P.labels[p],
                "zer": D.labels_of(zer),
                "coz": D.labels_of(coz),
                "selected": sel[0] if len(sel) == 1 else sel,
                "is_zero": is_zero,
                "consistent": len(sel) == 1 and (sel[0] == "zer") == is_zero,
            }
            if sel == ["coz"]:
                ys = []
                for f in range(k):
                    if (coz >> f) & 1:
                        y = next((y for y in range(low.n)
                                  if low.bel(rho, tuple_code([comps[f], y], low.n), inv_low)), None)
                        ys.append(y)
                    else:
                        ys.append(comps[f])
                if None in ys:
                    row["inverse"] = None
                    row["witness_holds"] = False
                else:
                    q = P.element_of(ys)
                    row["inverse"] = P.labels[q]
                    row["witness_holds"] = P.bel(rho, tuple_code([p, q], P.n), P.constants["inv"])
            rows.append(row)
    elif axiom == "A19":
        _require(low, ["leq"])
        leq_low = low.constants["leq"]
        for p, q in itertools.product(range(P.n), repeat=2):
            cp, cq = P.comps[p], P.comps[q]
            G = sum(1 << g for g in range(k) if low.bel(rho, tuple_code([cp[g], cq[g]], low.n), leq_low))
            H = sum(
                1 << h for h in range(k)
                if low.bel(rho, tuple_code([cq[h], cp[h]], low.n), leq_low) and not low.eq(ZERO, cq[h], cp[h])
            )
            sel = [name for name, m in (("G", G), ("H'", H)) if m in D]
            pq = P.bel(rho, tuple_code([p, q], P.n), P.constants["leq"])
            qp = P.bel(rho, tuple_code([q, p], P.n), P.constants["leq"])
            if sel == ["G"]:
                verdict, holds = "p <= q", pq
            elif sel == ["H'"]:
                verdict, holds = "q < p", qp and not P.eq(ZERO, q, p)
            else:
                verdict, holds = "undecided", False
            rows.append({
                "p": P.labels[p],
                "q": P.labels[q],
                "G": D.labels_of(G),
                "H'": D.labels_of(H),
                "partition": (G & H) == 0 and (G | H) == full,
                "selected": sel[0] if len(sel) == 1 else sel,
                "verdict": verdict,
                "verdict_holds": holds,
            })
    else:
        raise ValueError(f"unsupported axiom {axiom!r}; use A3 or A19")
    return {"level": level, "axiom": axiom, "rows": rows,
            "all_consistent": all(r.get("consistent", r.get("partition")) and
                                  r.get("witness_holds", True) and r.get("verdict_holds", True) for r in rows)}


__all__ = [
    "Tower", "TowerLimit", "build_tower", "build_limit", "embedding_checks", "limit_checks", "check_submodel",
    "induced_subsystem", "binary_partition_witness", "quantifier_work",
]
