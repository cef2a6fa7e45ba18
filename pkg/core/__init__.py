# core/__init__.py
"""
Exact computations with Steinberg modules of the finite classical groups.
Contains the algebra (groups, buildings, Steinberg modules, product maps,
group homology) and the persistence helpers used by the command layer.
"""

from .config_manager import ConfigManager, data_directory
from .database import Database
from .errors import (
    BasisExtractionError,
    CapacityError,
    DimensionMismatchError,
    InvalidInputError,
    NotACycleError,
    SteinbergError,
    TheoremViolation,
    UnknownSuiteError,
    UnsupportedRingError,
)
from .exactla import Ring
from .groups import FAMILIES, FormSpec, build_group, group_name, normalize_family
from .building import steinberg_module, tits_complex
from .utils import (
    format_homology,
    format_millis,
    make_case_id,
    parse_family_list,
    parse_int_list,
    validate_case_params,
    validate_family,
    validate_prime,
)

__all__ = [
    # Configuration and storage
    "ConfigManager",
    "Database",
    "data_directory",

    # Errors
    "SteinbergError",
    "CapacityError",
    "UnsupportedRingError",
    "DimensionMismatchError",
    "InvalidInputError",
    "NotACycleError",
    "BasisExtractionError",
    "TheoremViolation",
    "UnknownSuiteError",

    # Algebra entry points
    "Ring",
    "FAMILIES",
    "FormSpec",
    "build_group",
    "group_name",
    "normalize_family",
    "steinberg_module",
    "tits_complex",

    # Helpers
    "format_homology",
    "format_millis",
    "make_case_id",
    "parse_family_list",
    "parse_int_list",
    "validate_case_params",
    "validate_family",
    "validate_prime",
]
