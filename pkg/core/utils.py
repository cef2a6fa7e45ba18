# core/utils.py
"""
Utilities for parsing and formatting command-line values.
Helper functions for parameter lists, case identifiers and homology groups.
"""

import re
from typing import List, Optional, Sequence, Tuple

from sympy import isprime

from .errors import InvalidInputError
from .exactla import MAX_PRIME
from .groups import FAMILIES, normalize_family


def parse_int_list(text: str) -> List[int]:
    """Parses "2,3,5" or "2-4" (or a mix) into a sorted list without duplicates."""
    values = set()
    for part in re.split(r"[,\s]+", str(text).strip()):
        if not part:
            continue
        match = re.fullmatch(r"(-?\d+)-(\d+)", part)
        if match:
            lo, hi = int(match.group(1)), int(match.group(2))
            if lo > hi:
                raise ValueError(f"empty range {part!r}")
            values.update(range(lo, hi + 1))
        else:
            values.add(int(part))
    if not values:
        raise ValueError(f"no integers in {text!r}")
    return sorted(values)


def parse_family_list(text: str) -> List[str]:
    out = []
    for part in re.split(r"[,\s]+", str(text).strip()):
        if part:
            family = normalize_family(part)
            if family not in out:
                out.append(family)
    return out


def validate_prime(p: int) -> bool:
    """Primes from 2 up to the supported bound."""
    return 2 <= p <= MAX_PRIME and bool(isprime(p))


def validate_family(name: str) -> bool:
    try:
        return normalize_family(name) in FAMILIES
    except InvalidInputError:
        return False


def validate_case_params(family: str, n: int, p: int) -> Tuple[bool, str]:
    """Validates one (family, n, p) triple."""
    if not validate_family(family):
        return False, f"unknown family {family!r}"
    if n < 0:
        return False, "n must be nonnegative"
    if not validate_prime(p):
        return False, f"p = {p} is not a supported prime"
    return True, ""


def format_homology(rank: int, torsion: Sequence[int] = (), ring_label: str = "Z") -> str:
    """Formats (rank, torsion) as e.g. "Z^2 + Z/3", or "0"."""
    parts = []
    if rank == 1:
        parts.append(ring_label)
    elif rank > 1:
        parts.append(f"{ring_label}^{rank}")
    parts.extend(f"Z/{t}" for t in torsion)
    return " + ".join(parts) if parts else "0"


def format_millis(millis: Optional[float]) -> str:
    if millis is None:
        return "-"
    if millis < 1000:
        return f"{millis:.0f} ms"
    return f"{millis / 1000:.2f} s"


def make_case_id(suite: str, family: str = "", n: Optional[int] = None, p: Optional[int] = None,
                 ring: str = "", *extra) -> str:
    """Deterministic, sortable case identifier such as ``coinvariants/GL/n3/p2/Z``."""
    parts = [suite]
    if family:
        parts.append(family)
    if n is not None:
        parts.append(f"n{n:02d}")
    if p is not None:
        parts.append(f"p{p:02d}")
    if ring:
        parts.append(ring)
    parts.extend(str(e) for e in extra)
    return "/".join(parts)
