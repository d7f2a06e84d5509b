"""Filters and ultrafilters on finite index sets.

Subsets of the index set are bitmasks: bit ``i`` stands for the ``i``-th
index label.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Sequence

from .errors import BudgetExceeded, NoProperFilter

MAX_INDEX = 16


class FilterClass(enum.Enum):
    NOT_FILTER = "NotFilter"
    FILTER = "Filter"
    PROPER_FILTER = "ProperFilter"
    ULTRAFILTER = "Ultrafilter"


def _iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class FilterSpec:
    index_set: tuple[str, ...]
    members: frozenset[int]

    def __post_init__(self) -> None:
        if len(set(self.index_set)) != len(self.index_set):
            raise ValueError("index labels must be unique")
        if len(self.index_set) > MAX_INDEX:
            raise BudgetExceeded(f"index sets above {MAX_INDEX} elements are not supported")
        full = self.full
        for m in self.members:
            if m & ~full:
                raise ValueError(f"member {m:#b} is not a subset of the index set")

    @property
    def size(self) -> int:
        return len(self.index_set)

    @property
    def full(self) -> int:
        return (1 << len(self.index_set)) - 1

    def mask_of(self, labels: Iterable[str]) -> int:
        m = 0
        for lab in labels:
            try:
                m |= 1 << self.index_set.index(lab)
            except ValueError:
                raise ValueError(f"{lab!r} is not in the index set") from None
        return m

    def labels_of(self, mask: int) -> list[str]:
        return [self.index_set[i] for i in _iter_bits(mask)]

    def __contains__(self, mask: object) -> bool:
        return mask in self.members

    def contains_labels(self, labels: Iterable[str]) -> bool:
        return self.mask_of(labels) in self.members

    # classification
    def is_filter(self) -> bool:
        ms = self.members
        if not ms or self.full not in ms:
            return False
        for a in ms:
            for b in ms:
                if a & b not in ms:
                    return False
        for a in ms:
            # every superset obtained by adding one index must be present
            for i in range(self.size):
                if a | (1 << i) not in ms:
                    return False
        return True

    def is_proper(self) -> bool:
        return 0 not in self.members

    def has_partition_property(self) -> bool:
        full = self.full
        return all(G in self.members or (full & ~G) in self.members for G in range(full + 1))

    def classify(self) -> FilterClass:
        if not self.is_filter():
            return FilterClass.NOT_FILTER
        if not self.is_proper():
            return FilterClass.FILTER
        if self.has_partition_property():
            return FilterClass.ULTRAFILTER
        return FilterClass.PROPER_FILTER

    def is_ultrafilter(self) -> bool:
        return self.classify() is FilterClass.ULTRAFILTER

    def minimal_members(self) -> list[int]:
        """Members with no proper subset in the ensemble, ascending."""
        ms = sorted(self.members)
        out = []
        for m in ms:
            if not any((s & m) == s and s != m for s in ms):
                out.append(m)
        return out

    def principal_point(self) -> int | None:
        """Index position when this is the principal ultrafilter at it."""
        mins = self.minimal_members()
        if len(mins) == 1 and mins[0] and mins[0] & (mins[0] - 1) == 0 and self == principal_ultrafilter(
            self.index_set, self.index_set[mins[0].bit_length() - 1]
        ):
            return mins[0].bit_length() - 1
        return None

    def describe(self) -> str:
        mins = self.minimal_members()
        return "generated by " + ", ".join("{" + ",".join(self.labels_of(m)) + "}" for m in mins)

    # serialization
    def to_json(self) -> dict[str, Any]:
        p = self.principal_point()
        if p is not None:
            return {"index_set": list(self.index_set), "principal_at": self.index_set[p]}
        return {
            "index_set": list(self.index_set),
            "members": [self.labels_of(m) for m in sorted(self.members, key=lambda m: (bin(m).count("1"), m))],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any], index_set: Sequence[str] | None = None) -> "FilterSpec":
        labels = tuple(data.get("index_set") or index_set or ())
        if not labels:
            raise ValueError("filter JSON needs an index_set")
        if "principal_at" in data:
            return principal_ultrafilter(labels, data["principal_at"])
        spec = cls(labels, frozenset())
        members = frozenset(spec.mask_of(m) for m in data.get("members", []))
        return cls(labels, members)


# --- constructions -----------------------------------------------------------------

def upward_closure(index_set: Sequence[str], generators: Iterable[int]) -> FilterSpec:
    labels = tuple(index_set)
    full = (1 << len(labels)) - 1
    gens = list(generators)
    members = frozenset(m for m in range(full + 1) if any((g & m) == g for g in gens))
    return FilterSpec(labels, members)


def principal_filter(index_set: Sequence[str], mask: int) -> FilterSpec:
    return upward_closure(index_set, [mask])


def principal_ultrafilter(index_set: Sequence[str], point: str) -> FilterSpec:
    labels = tuple(index_set)
    if point not in labels:
        raise ValueError(f"{point!r} is not in the index set")
    return principal_filter(labels, 1 << labels.index(point))


def power_set_ensemble(index_set: Sequence[str]) -> FilterSpec:
    labels = tuple(index_set)
    return FilterSpec(labels, frozenset(range(1 << len(labels))))


def generated_filter(index_set: Sequence[str], ensemble: Iterable[int]) -> FilterSpec:
    """Smallest filter containing the ensemble; raises when it cannot be proper."""
    labels = tuple(index_set)
    full = (1 << len(labels)) - 1
    core = full
    for m in ensemble:
        core &= m
    if core == 0:
        raise NoProperFilter("the ensemble has an empty finite intersection")
    return principal_filter(labels, core)


def extend_to_ultrafilter(d: FilterSpec) -> FilterSpec:
    """Principal ultrafilter at the least index of the least minimal member."""
    if not d.is_filter() or not d.is_proper():
        raise NoProperFilter("only proper filters extend to ultrafilters")
    if d.is_ultrafilter():
        return d
    core = min(d.minimal_members())
    first = (core & -core).bit_length() - 1
    return principal_ultrafilter(d.index_set, d.index_set[first])


def all_ultrafilters(index_set: Sequence[str]) -> list[FilterSpec]:
    labels = tuple(index_set)
    return [principal_ultrafilter(labels, f) for f in labels]


def all_filters(index_set: Sequence[str]) -> list[FilterSpec]:
    """Every filter on a small index set, found by scanning upward closures.

    On a finite set a filter is the set of supersets of the intersection of
    its members; this scan does not rely on that and instead tests every
    upward-closed ensemble generated by an antichain.
    """
    labels = tuple(index_set)
    k = len(labels)
    if k > 3:
        raise BudgetExceeded("exhaustive filter scan is limited to index sets of size 3")
    full = (1 << k) - 1
    out = []
    seen = set()
    for choice in range(1 << (full + 1)):
        gens = [m for m in range(full + 1) if (choice >> m) & 1]
        spec = upward_closure(labels, gens)
        if spec.members in seen:
            continue
        seen.add(spec.members)
        if spec.is_filter():
            out.append(spec)
    return out


def all_ensembles(index_set: Sequence[str]) -> Iterator[FilterSpec]:
    """Every set of subsets of a tiny index set."""
    labels = tuple(index_set)
    full = (1 << len(labels)) - 1
    if full + 1 > 8:
        raise BudgetExceeded("ensemble scan is limited to index sets of size 3")
    for choice in range(1 << (full + 1)):
        yield FilterSpec(labels, frozenset(m for m in range(full + 1) if (choice >> m) & 1))


__all__ = [
    "FilterClass", "FilterSpec", "principal_ultrafilter", "principal_filter", "generated_filter",
    "extend_to_ultrafilter", "all_ultrafilters", "all_filters", "all_ensembles", "upward_closure",
    "power_set_ensemble",
]
