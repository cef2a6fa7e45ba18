# cli/modules/__init__.py
"""
Subcommand modules: verification suites, reports, dimensions and exports.
"""

from .dimension import DimensionResult, cmd_dim
from .export_complex import cmd_export_complex
from .report import render, to_csv, to_json, validate_records
from .suites import CHECKS, Selection, build_cases, resolve_suites
from .verification import Case, VerificationReport, run_case, run_cases

__all__ = [
    "Case",
    "CHECKS",
    "DimensionResult",
    "Selection",
    "VerificationReport",
    "build_cases",
    "cmd_dim",
    "cmd_export_complex",
    "render",
    "resolve_suites",
    "run_case",
    "run_cases",
    "to_csv",
    "to_json",
    "validate_records",
]
