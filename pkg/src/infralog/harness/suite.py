"""Suite configuration, execution and the JSON report."""
from __future__ import annotations

import dataclasses
import json
import os
import time
from dataclasses import dataclass, field
from typing import Any, Callable

from ..exemplars import set_signature
from .checks import (
    compactness_checks, evaluation_equivalence_check, exemplar_checks, filter_boundary, infrafiltration_sweep,
    normalization_check, projection_checks, standard_counterexample, sweep_formulas, tower_checks,
)
from .generators import FormulaGenerator, all_set_systems, constant_signature, constant_system_pool, default_pool, set_system_pool

SUITES = (
    "normalization", "evaluation-equivalence", "exemplars", "projection", "infrafiltration",
    "filter-boundary", "compactness", "tower", "counterexample-standard",
)


@dataclass
class SuiteConfig:
    """Bounds for every check.  A suite whose bound is zero is skipped."""

    seed: int = 0
    suites: tuple[str, ...] = SUITES
    normalization_triples: int = 10_000
    equivalence_triples: int = 1_000
    worked_N: int = 16
    fraction_N: tuple[int, ...] = (1,)
    segment_G: tuple[int, ...] = (1,)
    max_index: int = 3
    max_symbols: int = 3
    random_formulas: int = 1_000
    constant_symbols: int = 2
    constant_random_formulas: int = 200
    exhaustive_index: int = 2
    exhaustive_symbols: int = 1
    reference_samples: int = 10
    boundary_symbols: int = 2
    compactness_max: int = 3
    tower_depth: int = 2
    tower_exponent: int = 2
    tower_symbols: int = 3
    contrast_index: int = 2
    contrast_symbols: int = 1

    @classmethod
    def zero(cls, **kw: Any) -> "SuiteConfig":
        base = dict(normalization_triples=0, equivalence_triples=0, worked_N=0, fraction_N=(), segment_G=(),
                    max_index=0, compactness_max=0, tower_exponent=0, contrast_index=0)
        base.update(kw)
        return cls(**base)

    def to_json(self) -> dict[str, Any]:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in dataclasses.asdict(self).items()}


def seed_from_env(default: int) -> int:
    raw = os.environ.get("INFRALOG_SEED")
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"INFRALOG_SEED must be an integer, got {raw!r}") from None


def _infrafiltration(cfg: SuiteConfig) -> dict[str, Any] | None:
    if cfg.max_index <= 0:
        return None
    sig = set_signature()
    pool = default_pool(sig)
    forms = sweep_formulas(sig, pool, cfg.max_symbols, cfg.random_formulas, cfg.seed)
    main = infrafiltration_sweep(set_system_pool(), pool, forms, cfg.max_index, seed=cfg.seed,
                                 reference_samples=cfg.reference_samples)
    csig = constant_signature()
    cpool = default_pool(csig)
    cforms = sweep_formulas(csig, cpool, cfg.constant_symbols, cfg.constant_random_formulas, cfg.seed)
    with_constants = infrafiltration_sweep(constant_system_pool(), cpool, cforms, cfg.max_index, seed=cfg.seed,
                                           reference_samples=cfg.reference_samples, label="infrafiltration-constants")
    parts = [main, with_constants]
    if cfg.exhaustive_index > 0:
        eforms = sweep_formulas(sig, pool, cfg.exhaustive_symbols, 0, cfg.seed)
        parts.append(infrafiltration_sweep(all_set_systems(), pool, eforms, cfg.exhaustive_index, seed=cfg.seed,
                                           reference_samples=0, label="infrafiltration-all-small-systems"))
    return {"id": "infrafiltration", "passed": all(p["passed"] for p in parts), "sweeps": parts}


def _boundary(cfg: SuiteConfig) -> dict[str, Any] | None:
    if cfg.max_index < 2:
        return None
    sig = set_signature()
    pool = default_pool(sig)
    forms = list(FormulaGenerator(sig, pool, seed=cfg.seed).canonical(cfg.boundary_symbols))
    return filter_boundary(set_system_pool(), pool, forms, 2)


RUNNERS: dict[str, Callable[[SuiteConfig], dict[str, Any] | None]] = {
    "normalization": lambda c: normalization_check(c.normalization_triples, c.seed) if c.normalization_triples else None,
    "evaluation-equivalence": lambda c: (evaluation_equivalence_check(c.equivalence_triples, c.seed)
                                         if c.equivalence_triples else None),
    "exemplars": lambda c: (exemplar_checks(c.worked_N, c.fraction_N, c.segment_G)
                            if c.worked_N or c.fraction_N or c.segment_G else None),
    "projection": lambda c: projection_checks(constant_system_pool(include_empty=True), c.max_index) if c.max_index else None,
    "infrafiltration": _infrafiltration,
    "filter-boundary": _boundary,
    "compactness": lambda c: compactness_checks(c.compactness_max) if c.compactness_max else None,
    "tower": lambda c: tower_checks(c.tower_depth, c.tower_exponent, c.tower_symbols) if c.tower_exponent else None,
    "counterexample-standard": lambda c: (standard_counterexample(c.contrast_index, c.contrast_symbols, c.seed)
                                          if c.contrast_index else None),
}


@dataclass
class SuiteResult:
    config: SuiteConfig
    checks: list[dict[str, Any]] = field(default_factory=list)
    runtimes: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def report(self) -> dict[str, Any]:
        """The report excludes runtimes so that a fixed seed gives identical bytes."""
        return {"config": self.config.to_json(), "passed": self.passed, "checks": self.checks}

    def report_bytes(self) -> bytes:
        return (json.dumps(self.report(), indent=2, sort_keys=True) + "\n").encode()

    def summary_lines(self) -> list[str]:
        lines = []
        for c in self.checks:
            status = "PASS" if c["passed"] else "FAIL"
            lines.append(f"{status} {c['id']} ({self.runtimes.get(c['id'], 0.0):.1f} s)")
        if not self.checks:
            lines.append("no checks selected")
        return lines


def run_suite(config: SuiteConfig | None = None, progress: Callable[[str], None] | None = None) -> SuiteResult:
    cfg = config or SuiteConfig()
    unknown = [s for s in cfg.suites if s not in RUNNERS]
    if unknown:
        raise ValueError(f"unknown suites {unknown}; choose from {list(SUITES)}")
    result = SuiteResult(cfg)
    for name in SUITES:
        if name not in cfg.suites:
            continue
        t0 = time.perf_counter()
        out = RUNNERS[name](cfg)
        if out is None:
            continue
        out["id"] = name
        result.checks.append(out)
        result.runtimes[name] = time.perf_counter() - t0
        if progress:
            progress(f"{'PASS' if out['passed'] else 'FAIL'} {name} ({result.runtimes[name]:.1f} s)")
    return result


__all__ = ["SuiteConfig", "SuiteResult", "SUITES", "run_suite", "seed_from_env"]
