"""JSON and text formats for systems, filters, families, evaluations and formulas.

A system file lists its carrier labels, its type domain, constant values as
nested label lists and every non-set-theoretic relation as an explicit pair
list.  Missing relations mean set-theoretic equality or membership.  A file
may instead hold a ``"generators"`` stanza naming an exemplar, which is
expanded at load time.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .core_types import DEFAULT_MAX_TERMINAL, Bracket, FirstOrder, Type, parse_type
from .errors import (
    BudgetExceeded, FormulaSyntaxError, FormulaTypeError, InfralogError, InvalidSystem, NotAFilter, SourceError,
    TypeSyntaxError,
)
from .exemplars import make_fraction_system, make_segment_system, random_system, set_signature, two_element_field
from .filters import FilterSpec
from .formulas import Formula, Signature, Var
from .infraproduct import IndexedFamily
from .parser import parse, parse_lines
from .semantics import WORK_BUDGET, PairSet, System, bits, tuple_code, tuple_of

FORMAT_VERSION = 1


def _line_of(text: str, needle: str | None) -> int:
    if not needle:
        return 1
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return 1


class _Source:
    """Raw text plus a JSON document, used to locate errors."""

    def __init__(self, text: str, name: str):
        self.text = text
        self.name = name

    def fail(self, rule: str, message: str, hint: str | None = None) -> SourceError:
        return SourceError(self.name, _line_of(self.text, hint), rule, message)

    def load(self) -> Any:
        try:
            return json.loads(self.text)
        except json.JSONDecodeError as e:
            raise SourceError(self.name, e.lineno, "json", e.msg) from None


def _read(path: str) -> _Source:
    try:
        with open(path, encoding="utf-8") as fh:
            return _Source(fh.read(), path)
    except OSError as e:
        raise SourceError(path, 0, "file", e.strerror or str(e)) from None


# --- values -------------------------------------------------------------------------

def value_to_json(U: System, t: Type, value: int) -> Any:
    if isinstance(t, FirstOrder):
        return U.labels[value]
    if t.arity == 1:
        return [U.labels[c] for c in bits(value)]
    return [[U.labels[i] for i in tuple_of(c, U.n, t.arity)] for c in bits(value)]


def code_to_json(U: System, t: Bracket, code: int) -> Any:
    if t.arity == 1:
        return U.labels[code]
    return [U.labels[i] for i in tuple_of(code, U.n, t.arity)]


def _index(U: System, label: Any, src: _Source, rule: str) -> int:
    if not isinstance(label, str) or label not in U.labels:
        raise src.fail(rule, f"unknown carrier element {label!r}", json.dumps(label) if isinstance(label, str) else None)
    return U.labels.index(label)


def code_from_json(U: System, t: Bracket, obj: Any, src: _Source, rule: str) -> int:
    if t.arity == 1:
        if isinstance(obj, list) and len(obj) == 1:
            obj = obj[0]
        return _index(U, obj, src, rule)
    if not isinstance(obj, list) or len(obj) != t.arity:
        raise src.fail(rule, f"expected a {t.arity}-tuple of labels for {t}, got {obj!r}")
    return tuple_code([_index(U, x, src, rule) for x in obj], U.n)


def value_from_json(U: System, t: Type, obj: Any, src: _Source, rule: str) -> int:
    if isinstance(t, FirstOrder):
        return _index(U, obj, src, rule)
    if not isinstance(obj, list):
        raise src.fail(rule, f"a value of type {t} is a list, got {obj!r}")
    mask = 0
    for item in obj:
        mask |= 1 << code_from_json(U, t, item, src, rule)
    return mask


# --- systems ------------------------------------------------------------------------

def _pairs(U: System, t: Type, belonging: bool) -> list[tuple[int, int]]:
    rel = U.bel_rel(t) if belonging else U.eq_rel(t)
    size = U.size(t)
    left = U.width(t) if belonging else size
    if left * size > WORK_BUDGET:
        raise BudgetExceeded(f"serializing the relation on {t} needs {left * size} tests")
    return [(a, b) for a in range(left) for b in range(size) if rel(a, b)]


def system_to_json(U: System) -> dict[str, Any]:
    """A complete description of ``U``; set-theoretic relations are omitted."""
    sig = U.sig
    out: dict[str, Any] = {"format": FORMAT_VERSION}
    if U.name:
        out["name"] = U.name
    out["carrier"] = list(U.labels)
    out["types"] = [str(t) for t in sig.types]
    out["constants"] = [{"name": n, "type": str(t), "value": value_to_json(U, t, U.constants[n])}
                        for n, t in sig.constants]
    eqs = {}
    for t in sig.types:
        if U.eq_rel(t).canonical:
            continue
        eqs[str(t)] = [[value_to_json(U, t, a), value_to_json(U, t, b)] for a, b in _pairs(U, t, False)]
    bels = {}
    for t in sig.belonging_types:
        if U.bel_rel(t).canonical:
            continue
        bels[str(t)] = [[code_to_json(U, t, c), value_to_json(U, t, m)] for c, m in _pairs(U, t, True)]
    if eqs:
        out["equalities"] = eqs
    if bels:
        out["belongings"] = bels
    return out


def _parse_type(s: Any, src: _Source, rule: str) -> Type:
    try:
        return parse_type(str(s))
    except TypeSyntaxError as e:
        raise src.fail(rule, str(e), json.dumps(s)) from None


def signature_from_json(data: Mapping[str, Any], src: _Source) -> Signature:
    types = [_parse_type(s, src, "types") for s in data.get("types", ["0"])]
    consts = []
    for c in data.get("constants", []):
        if not isinstance(c, dict) or "name" not in c or "type" not in c:
            raise src.fail("constants", "each constant needs a name and a type", '"constants"')
        consts.append((str(c["name"]), _parse_type(c["type"], src, "constants")))
    try:
        return Signature.of(types, consts)
    except FormulaTypeError as e:
        raise src.fail("types", str(e), '"types"') from None


_GENERATORS = ("fractions", "segments", "random", "mod2", "set")


def _from_generator(g: Mapping[str, Any], src: _Source, max_terminal: int) -> System:
    kind = g.get("kind")

    def count(key: str, default: int | None = None) -> int:
        v = g.get(key, default)
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise src.fail("generators", f"{kind} needs a nonnegative integer {key!r}", f'"{key}"')
        return v

    if kind == "fractions":
        return make_fraction_system(max(count("N"), 1), max_terminal=max_terminal)
    if kind == "segments":
        return make_segment_system(max(count("G"), 1), max_terminal=max_terminal)
    if kind == "mod2":
        return two_element_field(max_terminal=max_terminal)
    if kind == "random":
        return random_system(count("seed", 0), set_signature(), max(count("size", 2), 1),
                             float(g.get("coarsening", 0.3)), max_terminal=max_terminal)
    raise src.fail("generators", f"unknown generator kind {kind!r}; choose from {list(_GENERATORS[:4])}", '"kind"')


def system_from_json(data: Any, src: _Source | None = None, *, max_terminal: int = DEFAULT_MAX_TERMINAL,
                     validate: bool = True) -> System:
    src = src or _Source(json.dumps(data, indent=2), "<json>")
    if not isinstance(data, dict):
        raise src.fail("system", "a system is a JSON object")
    if "generators" in data:
        return _from_generator(data["generators"], src, max_terminal)
    sig = signature_from_json(data, src)
    labels = data.get("carrier")
    if not isinstance(labels, list) or not labels or not all(isinstance(x, str) for x in labels):
        raise src.fail("carrier", "carrier must be a nonempty list of string labels", '"carrier"')
    if len(set(labels)) != len(labels):
        raise src.fail("carrier", "carrier labels must be unique", '"carrier"')
    # a label-only shell gives access to the encoders
    shell = System(Signature.of(sig.types), labels, validate=False, max_terminal=max_terminal)
    consts = {}
    for c in data.get("constants", []):
        t = parse_type(c["type"])
        if "value" not in c:
            raise src.fail("constants", f"constant {c['name']} has no value", json.dumps(c["name"]))
        consts[c["name"]] = value_from_json(shell, t, c["value"], src, "constants")
    eqs, bels = {}, {}
    for key, pairs in (data.get("equalities") or {}).items():
        t = _parse_type(key, src, "equalities")
        if not isinstance(pairs, list):
            raise src.fail("equalities", f"relation for {t} must be a pair list", json.dumps(key))
        rows = []
        for p in pairs:
            if not isinstance(p, list) or len(p) != 2:
                raise src.fail("equalities", f"expected a pair, got {p!r}", json.dumps(key))
            rows.append((value_from_json(shell, t, p[0], src, "equalities"),
                         value_from_json(shell, t, p[1], src, "equalities")))
        eqs[t] = PairSet(rows)
    for key, pairs in (data.get("belongings") or {}).items():
        t = _parse_type(key, src, "belongings")
        if not isinstance(t, Bracket) or not isinstance(pairs, list):
            raise src.fail("belongings", f"belonging needs a bracket type and a pair list, got {key}", json.dumps(key))
        rows = []
        for p in pairs:
            if not isinstance(p, list) or len(p) != 2:
                raise src.fail("belongings", f"expected a pair, got {p!r}", json.dumps(key))
            rows.append((code_from_json(shell, t, p[0], src, "belongings"),
                         value_from_json(shell, t, p[1], src, "belongings")))
        bels[t] = PairSet(rows)
    try:
        return System(sig, labels, consts, eqs, bels, max_terminal=max_terminal, validate=validate,
                      name=str(data.get("name", "")))
    except InvalidSystem as e:
        raise src.fail("system", str(e), '"equalities"' if "equal" in str(e) else None) from None


def dumps_system(U: System) -> str:
    return json.dumps(system_to_json(U), indent=2, ensure_ascii=False) + "\n"


def loads_system(text: str, name: str = "<string>", *, max_terminal: int = DEFAULT_MAX_TERMINAL) -> System:
    src = _Source(text, name)
    return system_from_json(src.load(), src, max_terminal=max_terminal)


def load_system(path: str, *, max_terminal: int = DEFAULT_MAX_TERMINAL) -> System:
    src = _read(path)
    return system_from_json(src.load(), src, max_terminal=max_terminal)


def save_system(U: System, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_system(U))


# --- filters and families -----------------------------------------------------------

def filter_from_json(data: Any, src: _Source, index_set: Sequence[str] | None = None,
                     require_filter: bool = True) -> FilterSpec:
    if not isinstance(data, dict):
        raise src.fail("filter", "a filter is a JSON object")
    labels = data.get("index_set") or index_set
    if not labels:
        raise src.fail("filter", "filter JSON needs an index_set", None)
    if index_set is not None and list(labels) != list(index_set):
        raise src.fail("filter", f"index set {list(labels)} differs from the family's {list(index_set)}", '"index_set"')
    if "principal_at" in data and data["principal_at"] not in labels:
        raise src.fail("filter", f"principal point {data['principal_at']!r} is not an index", '"principal_at"')
    for m in data.get("members", []):
        for x in m:
            if x not in labels:
                raise src.fail("filter", f"member mentions unknown index {x!r}", json.dumps(x))
    D = FilterSpec.from_json({**data, "index_set": list(labels)})
    if require_filter and not D.is_filter():
        raise NotAFilter(f"{src.name}:{_line_of(src.text, 'members')}: [filter] the ensemble "
                         f"{[D.labels_of(m) for m in sorted(D.members)]} is not a filter")
    return D


def load_filter(path: str, index_set: Sequence[str] | None = None, require_filter: bool = True) -> FilterSpec:
    src = _read(path)
    return filter_from_json(src.load(), src, index_set, require_filter)


def filter_to_json(D: FilterSpec) -> dict[str, Any]:
    return D.to_json()


def family_from_json(data: Any, src: _Source, *, base_dir: str = ".",
                     max_terminal: int = DEFAULT_MAX_TERMINAL) -> IndexedFamily:
    """``{"index_set": [...], "systems": [<system or relative path>, ...]}``."""
    if not isinstance(data, dict) or "systems" not in data:
        raise src.fail("family", "a family is an object with index_set and systems")
    systems = []
    for entry in data["systems"]:
        if isinstance(entry, str):
            systems.append(load_system(os.path.join(base_dir, entry), max_terminal=max_terminal))
        else:
            systems.append(system_from_json(entry, src, max_terminal=max_terminal))
    labels = data.get("index_set") or [f"f{i}" for i in range(len(systems))]
    try:
        return IndexedFamily(tuple(labels), tuple(systems))
    except (ValueError, InfralogError) as e:
        raise src.fail("family", str(e), '"index_set"') from None


def load_family(path: str, *, max_terminal: int = DEFAULT_MAX_TERMINAL) -> IndexedFamily:
    src = _read(path)
    return family_from_json(src.load(), src, base_dir=os.path.dirname(path) or ".", max_terminal=max_terminal)


def family_to_json(fam: IndexedFamily) -> dict[str, Any]:
    return {"index_set": list(fam.index_set), "systems": [system_to_json(U) for U in fam.systems]}


# --- evaluations --------------------------------------------------------------------

def evaluation_from_json(data: Any, U: System, src: _Source) -> dict[Var, int]:
    """``{"x:0": "a", "u:[0]": ["a", "b"]}``; keys name a variable and its type."""
    if not isinstance(data, dict):
        raise src.fail("evaluation", "an evaluation is an object mapping name:type to a value")
    out: dict[Var, int] = {}
    for key, val in data.items():
        name, sep, tt = key.partition(":")
        if not sep or not name:
            raise src.fail("evaluation", f"key {key!r} must read name:type", json.dumps(key))
        t = _parse_type(tt, src, "evaluation")
        if t not in U.sig.domain:
            raise src.fail("evaluation", f"type {t} is not in the system's type domain", json.dumps(key))
        out[Var(name, t)] = value_from_json(U, t, val, src, "evaluation")
    return out


def load_evaluation(path: str, U: System) -> dict[Var, int]:
    src = _read(path)
    return evaluation_from_json(src.load(), U, src)


def evaluation_to_json(U: System, gamma: Mapping[Var, int]) -> dict[str, Any]:
    return {f"{v.name}:{v.type}": value_to_json(U, v.type, gamma[v])
            for v in sorted(gamma, key=lambda v: (v.name, str(v.type)))}


# --- formulas -----------------------------------------------------------------------

def load_formulas(path: str, sig: Signature) -> list[Formula]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise SourceError(path, 0, "file", e.strerror or str(e)) from None
    return parse_lines(text, sig, source=path)


def read_formulas(text_or_path: str, sig: Signature) -> tuple[list[Formula], str]:
    """A formula file when the argument names an existing file, otherwise one formula."""
    if os.path.isfile(text_or_path):
        return load_formulas(text_or_path, sig), text_or_path
    try:
        return [parse(text_or_path, sig)], "<argument>"
    except (FormulaSyntaxError, FormulaTypeError) as e:
        raise type(e)(f"<argument>:1: {e}") from None


@dataclass
class Workspace:
    """Loaded artifacts keyed by name."""

    systems: dict[str, System] = field(default_factory=dict)
    filters: dict[str, FilterSpec] = field(default_factory=dict)
    formulas: dict[str, list[Formula]] = field(default_factory=dict)
    max_terminal: int = DEFAULT_MAX_TERMINAL

    @property
    def signatures(self) -> dict[str, Signature]:
        return {k: U.sig for k, U in self.systems.items()}

    def load_system(self, path: str, key: str | None = None) -> System:
        U = load_system(path, max_terminal=self.max_terminal)
        self.systems[key or path] = U
        return U

    def load_filter(self, path: str, index_set: Sequence[str] | None = None, key: str | None = None) -> FilterSpec:
        D = load_filter(path, index_set)
        self.filters[key or path] = D
        return D

    def load_formulas(self, path: str, system_key: str) -> list[Formula]:
        """Formulas are parsed over a signature that is already loaded."""
        if system_key not in self.systems:
            raise KeyError(f"no system {system_key!r} loaded for the formulas in {path}")
        fs = load_formulas(path, self.systems[system_key].sig)
        self.formulas[path] = fs
        return fs


__all__ = [
    "system_to_json", "system_from_json", "dumps_system", "loads_system", "load_system", "save_system",
    "filter_from_json", "filter_to_json", "load_filter", "family_from_json", "family_to_json", "load_family",
    "evaluation_from_json", "evaluation_to_json", "load_evaluation", "load_formulas", "read_formulas",
    "value_to_json", "value_from_json", "Workspace",
]
