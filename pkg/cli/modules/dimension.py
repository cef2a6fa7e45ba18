# cli/modules/dimension.py
"""
The ``dim`` subcommand: rank of the Steinberg module of one group.
"""

import logging
from dataclasses import dataclass
from typing import Optional

from core.building import steinberg_module
from core.errors import CapacityError
from core.exactla import Ring
from core.groups import FormSpec, group_name, normalize_family, positive_root_count
from ..keys import StatusKeys

LOGGER = logging.getLogger(__name__)


@dataclass
class DimensionResult:
    name: str
    ring: str
    measured: Optional[int]
    expected: int
    status: str

    def line(self) -> str:
        if self.status == StatusKeys.SKIPPED:
            return f"{self.name}: {StatusKeys.SKIPPED} (q^N = {self.expected})"
        return f"{self.name}: rank {self.measured} over {self.ring} (q^N = {self.expected})"


def cmd_dim(family: str, n: int, p: int, ring: str = "Z", capacity: Optional[int] = None) -> DimensionResult:
    """Measures the top reduced homology rank and compares it with q^N."""
    family = normalize_family(family)
    coefficients = Ring.parse(ring, p)
    name = group_name(family, n, p)
    expected = p ** positive_root_count(family, n)
    try:
        St = steinberg_module(FormSpec.for_family(family, n, p), coefficients, capacity=capacity)
        measured = St.homology_rank()
    except CapacityError as e:
        LOGGER.warning("%s", e)
        return DimensionResult(name, coefficients.label, None, expected, StatusKeys.SKIPPED)
    status = StatusKeys.PASS if measured == expected == St.rank else StatusKeys.FAIL
    return DimensionResult(name, coefficients.label, measured, expected, status)
