# core/apartments.py
"""
Apartment classes of GL_n(GF(p)): the signed sum over column orderings, the
boundary relation among the n+1 deletions of an n x (n+1) matrix, and the
unitriangular basis of the Steinberg module.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from .building import SteinbergModule, apartment_chain
from .errors import BasisExtractionError, DimensionMismatchError, InvalidInputError, TheoremViolation
from .exactla import Ring, SparseColumn, column_rank, invariant_factors

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ApartmentInput:
    """An n x k matrix over GF(p) with no zero column (k = n or n + 1)."""

    B: np.ndarray
    p: int

    def __post_init__(self):
        B = np.asarray(self.B, dtype=np.int64) % self.p
        if B.ndim != 2:
            raise DimensionMismatchError("apartment input must be a matrix")
        n, k = B.shape
        if k not in (n, n + 1):
            raise DimensionMismatchError(f"apartment input must be n x n or n x (n+1), got {n}x{k}")
        if n and not B.any(axis=0).all():
            raise InvalidInputError("apartment input has a zero column")
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return int(self.B.shape[0])

    def deleted(self, i: int) -> np.ndarray:
        return np.delete(self.B, i, axis=1)


@dataclass
class ApartmentClass:
    chain: SparseColumn
    coords: List[int] = field(default_factory=list)

    @property
    def is_zero(self) -> bool:
        return not self.chain


def _require_gl(St: SteinbergModule) -> None:
    if St.form.is_formed:
        raise InvalidInputError("apartment classes are only exposed for GL/SL")


def apartment_class(St: SteinbergModule, B) -> ApartmentClass:
    """The class [[B]] together with its coordinates in the unitriangular basis."""
    _require_gl(St)
    data = B if isinstance(B, ApartmentInput) else ApartmentInput(B, St.p)
    if data.B.shape != (St.form.n, St.form.n):
        raise DimensionMismatchError(f"expected a square {St.form.n}x{St.form.n} input")
    if St.complex.top_dim < 0:
        return ApartmentClass({0: 1}, [1])
    chain = apartment_chain(St.complex, data.B)
    return ApartmentClass(chain, St.coordinates(chain))


def relation_chain(St: SteinbergModule, B) -> SparseColumn:
    """[[B_0]] - [[B_1]] + ... + (-1)^n [[B_n]] for an n x (n+1) input."""
    _require_gl(St)
    data = B if isinstance(B, ApartmentInput) else ApartmentInput(B, St.p)
    n = St.form.n
    if data.B.shape != (n, n + 1):
        raise DimensionMismatchError(f"expected an {n}x{n + 1} input")
    total: SparseColumn = {}
    for i in range(n + 1):
        sign = -1 if i % 2 else 1
        part = data.deleted(i)
        if not part.any(axis=0).all():
            continue
        for c, v in apartment_chain(St.complex, part).items():
            total[c] = total.get(c, 0) + sign * v
    return {c: v for c, v in total.items() if v}


def verify_relation(St: SteinbergModule, B) -> SparseColumn:
    """Alternating sum of the deletions; raises when it is not the zero chain."""
    chain = relation_chain(St, B)
    if chain:
        raise TheoremViolation("alternating sum of deleted-column apartments vanishes",
                               f"{len(chain)} nonzero chamber coefficients")
    return chain


@dataclass
class BasisCertificate:
    labels: List[np.ndarray]
    columns: List[SparseColumn]
    rank_rationals: int
    rank_field: int
    factors: List[int]

    @property
    def size(self) -> int:
        return len(self.columns)


def solomon_tits_basis(St: SteinbergModule) -> BasisCertificate:
    """Unitriangular apartment classes, certified as a basis over QQ, GF(p) and ZZ."""
    _require_gl(St)
    n, p = St.form.n, St.p
    expected = p ** (n * (n - 1) // 2)
    rows = max(len(St.complex.chambers), 1)
    columns = St.basis
    rank_q = column_rank(columns, rows, Ring.rationals())
    rank_p = column_rank(columns, rows, Ring.prime_field(p))
    factors = invariant_factors(columns, rows)
    cert = BasisCertificate(St.labels, columns, rank_q, rank_p, factors)
    if len(columns) != expected or rank_q != expected or rank_p != expected:
        raise BasisExtractionError(
            f"unitriangular classes: {len(columns)} columns, rank {rank_q} over QQ, "
            f"{rank_p} over F{p}; expected {expected}"
        )
    if factors != [1] * expected:
        raise BasisExtractionError(f"invariant factors {factors} are not all 1")
    return cert


def express_in_basis(St: SteinbergModule, chain: SparseColumn) -> List[int]:
    """Coordinates of a top cycle in the unitriangular basis (NotACycleError otherwise)."""
    _require_gl(St)
    return St.coordinates(chain)


def unitriangular_index(St: SteinbergModule, entries: Sequence[int]) -> int:
    """Basis position of the unitriangular matrix with the given above-diagonal entries (row-major)."""
    p = St.p
    k = 0
    for e in entries:
        k = k * p + int(e) % p
    if k >= St.rank:
        raise InvalidInputError(f"entries {list(entries)} do not name a basis apartment")
    return k
