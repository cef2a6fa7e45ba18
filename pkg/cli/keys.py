# cli/keys.py
"""
Command, suite and status keys of the command layer.
"""


class CommandKeys:
    """Top-level subcommands."""

    DIM = "dim"
    VERIFY = "verify"
    REPORT = "report"
    EXPORT_COMPLEX = "export-complex"
    CONFIG = "config"


class SuiteKeys:
    """Verification suites, one per checked statement family."""

    GROUPS = "groups"
    STEINBERG = "steinberg"
    COINVARIANTS = "coinvariants"
    DECOMPOSITION = "decomposition"
    SHAPIRO = "shapiro"
    ORBITS = "orbits"
    CONNECTIVITY = "connectivity"
    DIFFERENTIAL = "differential"
    FACTORIZATION = "factorization"
    RELATION = "relation"
    BASIS = "basis"
    ZETA = "zeta"
    CALCULATION = "calculation"
    ALL = "all"

    ORDERED = (
        GROUPS, STEINBERG, COINVARIANTS, DECOMPOSITION, SHAPIRO, ORBITS, CONNECTIVITY,
        DIFFERENTIAL, FACTORIZATION, RELATION, BASIS, ZETA, CALCULATION,
    )


class StatusKeys:
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped-capacity"


class FormatKeys:
    JSON = "json"
    CSV = "csv"
