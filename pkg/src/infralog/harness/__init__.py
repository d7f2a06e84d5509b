"""Theorem checks, bounded generators and the suite runner."""
from .checks import (
    CheckReport, check_infrafiltration, compactness_build, compactness_checks, filter_boundary, infrafiltration_sweep,
    projection_checks, standard_counterexample, tower_checks,
)
from .generators import FormulaGenerator
from .suite import SUITES, SuiteConfig, SuiteResult, run_suite

__all__ = [
    "CheckReport", "FormulaGenerator", "SUITES", "SuiteConfig", "SuiteResult", "check_infrafiltration",
    "compactness_build", "compactness_checks", "filter_boundary", "infrafiltration_sweep", "projection_checks",
    "run_suite", "standard_counterexample", "tower_checks",
]
