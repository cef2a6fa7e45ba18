# core/exactla.py
"""
Exact linear algebra over prime fields, the rationals and the integers.

Dense matrices are sympy ``DomainMatrix`` objects over ``ZZ``, ``QQ`` or
``GF(p)``. Chain-level code works with sparse integer columns (a list of
``{row: value}`` dictionaries), and group elements are numpy arrays reduced
mod p, eliminated as ``galois`` GF(p) arrays.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import galois
import numpy as np
from sympy import isprime
from sympy.polys.domains import GF, QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors as _invariant_factors
from sympy.polys.matrices.normalforms import smith_normal_decomp

from .errors import DimensionMismatchError, InvalidInputError, UnsupportedRingError

LOGGER = logging.getLogger(__name__)

SparseColumn = Dict[int, int]

MAX_PRIME = 97


# ==============================================
# RINGS
# ==============================================


@dataclass(frozen=True)
class PrimeField:
    """The field GF(p) for a prime 2 <= p <= 97."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not isprime(int(self.p)):
            raise InvalidInputError(f"{self.p} is not prime")
        if not 2 <= self.p <= MAX_PRIME:
            raise InvalidInputError(f"prime {self.p} outside 2..{MAX_PRIME}")

    @property
    def domain(self):
        return GF(int(self.p), symmetric=False)

    def reduce(self, value: int) -> int:
        return int(value) % self.p

    def inverse(self, value: int) -> int:
        value = int(value) % self.p
        if value == 0:
            raise ZeroDivisionError("0 has no inverse in a field")
        return pow(value, -1, self.p)


@dataclass(frozen=True)
class Ring:
    """Coefficient ring: the integers, the rationals or a prime field."""

    kind: str
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "F"):
            raise InvalidInputError(f"unknown ring kind {self.kind!r}")
        if self.kind == "F":
            PrimeField(self.p)

    @classmethod
    def integers(cls) -> "Ring":
        return cls("Z")

    @classmethod
    def rationals(cls) -> "Ring":
        return cls("Q")

    @classmethod
    def prime_field(cls, p: int) -> "Ring":
        return cls("F", int(p))

    @classmethod
    def parse(cls, text: str, default_p: Optional[int] = None) -> "Ring":
        """Reads ``Z``, ``Q``, ``F3``, ``GF(3)`` or ``Fp`` (with ``default_p``)."""
        label = text.strip().upper().replace("GF(", "F").rstrip(")")
        if label in ("Z", "ZZ"):
            return cls.integers()
        if label in ("Q", "QQ"):
            return cls.rationals()
        if label == "FP":
            if default_p is None:
                raise InvalidInputError("ring 'Fp' needs a prime")
            return cls.prime_field(default_p)
        if label.startswith("F") and label[1:].isdigit():
            return cls.prime_field(int(label[1:]))
        raise InvalidInputError(f"cannot parse ring {text!r}")

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == "F" else 0

    @property
    def domain(self):
        if self.kind == "Z":
            return ZZ
        if self.kind == "Q":
            return QQ
        return GF(self.p, symmetric=False)

    @property
    def label(self) -> str:
        return f"F{self.p}" if self.kind == "F" else self.kind

    def __str__(self) -> str:
        return self.label


# ==============================================
# DENSE MATRICES
# ==============================================


def matrix(rows: Sequence[Sequence[int]], ring: Ring, ncols: Optional[int] = None) -> DomainMatrix:
    """Builds a DomainMatrix over ``ring`` from integer (or Fraction) rows."""
    rows = [list(row) for row in rows]
    if not rows:
        return DomainMatrix.zeros((0, ncols or 0), ring.domain)
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise DimensionMismatchError("ragged rows")
    K = ring.domain
    converted = [[_to_domain(e, ring) for e in row] for row in rows]
    return DomainMatrix(converted, (len(rows), width), K)


def _to_domain(value, ring: Ring):
    K = ring.domain
    if isinstance(value, Fraction):
        if ring.kind == "Z":
            if value.denominator != 1:
                raise UnsupportedRingError(f"{value} is not an integer")
            return K(int(value))
        if ring.kind == "Q":
            return K(value.numerator, value.denominator)
        return K(value.numerator * pow(value.denominator, -1, ring.p))
    return K(int(value))


def to_int_rows(M: DomainMatrix) -> List[List[int]]:
    """Entries as Python ints (representatives 0..p-1 over GF(p))."""
    K = M.domain
    rows = M.to_dense().to_list()
    if K.is_FiniteField:
        p = int(K.mod)
        return [[int(e) % p for e in row] for row in rows]
    if K == QQ:
        out = []
        for row in rows:
            line = []
            for e in row:
                if int(e.denominator) != 1:
                    raise UnsupportedRingError(f"non-integral entry {e}")
                line.append(int(e.numerator))
            out.append(line)
        return out
    return [[int(e) for e in row] for row in rows]


def to_fraction_rows(M: DomainMatrix) -> List[List[Fraction]]:
    rows = M.convert_to(QQ).to_dense().to_list()
    return [[Fraction(int(e.numerator), int(e.denominator)) for e in row] for row in rows]


def identity(n: int, ring: Ring) -> DomainMatrix:
    return DomainMatrix.eye(n, ring.domain)


def _require_field(M: DomainMatrix) -> None:
    if not M.domain.is_Field:
        raise UnsupportedRingError(f"operation needs a field, got {M.domain}")


def rref(M: DomainMatrix) -> Tuple[DomainMatrix, Tuple[int, ...], int]:
    """Reduced row echelon form, pivot columns and rank over a field."""
    _require_field(M)
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return M, (), 0
    R, pivots = M.rref()
    pivots = tuple(int(j) for j in pivots)
    return R, pivots, len(pivots)


def rank(M: DomainMatrix) -> int:
    if not M.domain.is_Field:
        M = M.convert_to(QQ)
    return rref(M)[2]


def kernel_basis(M: DomainMatrix) -> DomainMatrix:
    """Rows form a basis of {v : M v = 0}."""
    _require_field(M)
    rows, cols = M.shape
    if cols == 0:
        return DomainMatrix.zeros((0, 0), M.domain)
    if rows == 0:
        return DomainMatrix.eye(cols, M.domain)
    R, pivots, r = rref(M)
    if r == cols:
        return DomainMatrix.zeros((0, cols), M.domain)
    K = M.domain
    dense = R.to_dense().to_list()
    free = [j for j in range(cols) if j not in pivots]
    basis = []
    for f in free:
        vec = [K.zero] * cols
        vec[f] = K.one
        for i, pj in enumerate(pivots):
            vec[pj] = -dense[i][f]
        basis.append(vec)
    return DomainMatrix(basis, (len(basis), cols), K)


def solve(A: DomainMatrix, b: Sequence) -> Optional[List]:
    """One solution x of A x = b over a field, or None if b is not in the column space."""
    _require_field(A)
    rows, cols = A.shape
    if len(b) != rows:
        raise DimensionMismatchError(f"rhs has length {len(b)}, matrix has {rows} rows")
    K = A.domain
    if rows == 0:
        return [K.zero] * cols
    column = DomainMatrix([[K.convert(e) if not isinstance(e, int) else K(e)] for e in b], (rows, 1), K)
    R, pivots, _ = rref(A.hstack(column))
    if cols in pivots:
        return None
    dense = R.to_dense().to_list()
    x = [K.zero] * cols
    for i, pj in enumerate(pivots):
        x[pj] = dense[i][cols]
    return x


def smith_normal_form(M: DomainMatrix) -> Tuple[DomainMatrix, DomainMatrix, DomainMatrix]:
    """(D, U, V) with U·M·V = D, U and V unimodular, d1 | d2 | ... on the diagonal."""
    if M.domain != ZZ:
        raise UnsupportedRingError(f"Smith normal form needs ZZ, got {M.domain}")
    D, U, V = smith_normal_decomp(M)
    if U * M * V != D:
        raise ArithmeticError("Smith decomposition failed its own check")
    return D, U, V


def diagonal(D: DomainMatrix) -> List[int]:
    rows = to_int_rows(D)
    return [rows[i][i] for i in range(min(D.shape))]


# ==============================================
# SPARSE INTEGER COLUMNS
# ==============================================


def dense_to_columns(rows: Sequence[Sequence[int]]) -> List[SparseColumn]:
    if not rows:
        return []
    ncols = len(rows[0])
    columns: List[SparseColumn] = [dict() for _ in range(ncols)]
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            if v:
                columns[j][i] = int(v)
    return columns


def columns_to_dense(columns: Sequence[SparseColumn], nrows: int) -> List[List[int]]:
    rows = [[0] * len(columns) for _ in range(nrows)]
    for j, col in enumerate(columns):
        for i, v in col.items():
            rows[i][j] = v
    return rows


def invariant_factors(columns: Sequence[SparseColumn], nrows: int) -> List[int]:
    """Nonzero invariant factors (ascending) of a sparse integer matrix.

    Entries equal to +-1 are used as pivots first; each such pivot contributes
    a unit factor and removes one row and one column. Whatever is left goes
    through sympy's dense Smith form.
    """
    cols = {j: dict(c) for j, c in enumerate(columns) if c}
    row_index: Dict[int, set] = defaultdict(set)
    for j, col in cols.items():
        for i in col:
            row_index[i].add(j)
    units = 0
    changed = True
    while changed:
        changed = False
        for j in sorted(cols):
            col = cols.get(j)
            if col is None:
                continue
            if not col:
                del cols[j]
                continue
            pivot_row = next((i for i in sorted(col) if col[i] in (1, -1)), None)
            if pivot_row is None:
                continue
            pivot = col[pivot_row]
            for k in list(row_index[pivot_row]):
                if k == j:
                    continue
                other = cols[k]
                factor = other[pivot_row] * pivot
                for i, v in col.items():
                    new = other.get(i, 0) - factor * v
                    if new:
                        if i not in other:
                            row_index[i].add(k)
                        other[i] = new
                    elif i in other:
                        del other[i]
                        row_index[i].discard(k)
            for i in col:
                row_index[i].discard(j)
            del cols[j]
            units += 1
            changed = True
    factors = [1] * units
    residue = {j: c for j, c in cols.items() if c}
    if residue:
        live_rows = sorted({i for c in residue.values() for i in c})
        position = {i: k for k, i in enumerate(live_rows)}
        dense = [[0] * len(residue) for _ in live_rows]
        for k, col in enumerate(residue.values()):
            for i, v in col.items():
                dense[position[i]][k] = v
        LOGGER.debug("dense Smith residue %dx%d after %d unit pivots", len(live_rows), len(residue), units)
        core = _invariant_factors(matrix(dense, Ring.integers()))
        factors.extend(sorted(abs(int(f)) for f in core if int(f) != 0))
    return factors


def column_rank(columns: Sequence[SparseColumn], nrows: int, ring: Ring) -> int:
    """Rank of a sparse integer matrix after base change to ``ring``."""
    if ring.kind != "F":
        return len(invariant_factors(columns, nrows))
    p = ring.p
    K = ring.domain
    sdm: Dict[int, Dict[int, object]] = {}
    for j, col in enumerate(columns):
        for i, v in col.items():
            if v % p:
                sdm.setdefault(i, {})[j] = K(v % p)
    if not sdm:
        return 0
    M = DomainMatrix(sdm, (nrows, len(columns)), K)
    return rank(M)


def lattice_contains(
    generators: Sequence[SparseColumn],
    vectors: Sequence[SparseColumn],
    nrows: int,
    ring: Ring,
) -> bool:
    """True when every vector lies in the span of ``generators`` over ``ring``."""
    vectors = [v for v in vectors if any(v.values())]
    if not vectors:
        return True
    if ring.kind == "F":
        return column_rank(list(generators) + vectors, nrows, ring) == column_rank(generators, nrows, ring)
    before = invariant_factors(generators, nrows)
    after = invariant_factors(list(generators) + vectors, nrows)
    if len(before) != len(after):
        return False
    if ring.kind == "Q":
        return True
    return _product(before) == _product(after)


def _product(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out *= v
    return out


def cokernel(columns: Sequence[SparseColumn], nrows: int, ring: Ring) -> Tuple[int, Tuple[int, ...]]:
    """Rank and torsion of R^nrows modulo the span of ``columns``."""
    if ring.kind == "F":
        return nrows - column_rank(columns, nrows, ring), ()
    factors = invariant_factors(columns, nrows)
    torsion = tuple(f for f in factors if f > 1) if ring.kind == "Z" else ()
    return nrows - len(factors), torsion


def matmul_int(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> List[List[int]]:
    """Product of two dense integer matrices (lists of rows)."""
    if not A:
        return []
    inner = len(A[0])
    if len(B) != inner:
        raise DimensionMismatchError(f"cannot multiply {len(A)}x{inner} by {len(B)}x?")
    ncols = len(B[0]) if B else 0
    out = []
    for row in A:
        acc = [0] * ncols
        for k, a in enumerate(row):
            if a:
                brow = B[k]
                for j in range(ncols):
                    if brow[j]:
                        acc[j] += a * brow[j]
        out.append(acc)
    return out


def kron_int(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> List[List[int]]:
    """Kronecker product, row index (i, k) -> i*len(B) + k."""
    rows_b = len(B)
    cols_b = len(B[0]) if B else 0
    cols_a = len(A[0]) if A else 0
    out = [[0] * (cols_a * cols_b) for _ in range(len(A) * rows_b)]
    for i, row in enumerate(A):
        for j, a in enumerate(row):
            if not a:
                continue
            for k in range(rows_b):
                for l in range(cols_b):
                    if B[k][l]:
                        out[i * rows_b + k][j * cols_b + l] = a * B[k][l]
    return out


def identity_int(n: int) -> List[List[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


# ==============================================
# NUMPY KERNELS MOD p
# ==============================================


def field_array(A: np.ndarray, p: int) -> galois.FieldArray:
    """An integer array reduced mod p as a ``galois`` GF(p) array."""
    M = np.asarray(A, dtype=np.int64)
    if M.ndim != 2:
        raise DimensionMismatchError(f"expected a 2d array, got shape {M.shape}")
    return galois.GF(int(p))(M % p)


def rref_mod_p(A: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """Row reduced echelon form of an integer array mod p (zero rows dropped)."""
    F = field_array(A, p)
    if F.size == 0:
        return np.zeros((0, F.shape[1]), dtype=np.uint8), []
    R = F.row_reduce().view(np.ndarray)
    R = R[R.any(axis=1)]
    pivots = [int(np.flatnonzero(row)[0]) for row in R]
    return R.astype(np.uint8), pivots


def rank_mod_p(A: np.ndarray, p: int) -> int:
    if A.size == 0:
        return 0
    return int(np.linalg.matrix_rank(field_array(A, p)))


def inverse_mod_p(A: np.ndarray, p: int) -> np.ndarray:
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionMismatchError("inverse of a non-square matrix")
    if n == 0:
        return np.zeros((0, 0), dtype=np.uint8)
    try:
        inv = np.linalg.inv(field_array(A, p))
    except np.linalg.LinAlgError:
        raise ZeroDivisionError("matrix is singular mod p") from None
    return inv.view(np.ndarray).astype(np.uint8)


def det_mod_p(A: np.ndarray, p: int) -> int:
    if A.shape[0] == 0:
        return 1
    return int(np.linalg.det(field_array(A, p)))


def kernel_mod_p(A: np.ndarray, ncols: int, p: int) -> np.ndarray:
    """Rows spanning {v : A v = 0 mod p} for an array with ``ncols`` columns."""
    A = np.asarray(A, dtype=np.int64).reshape(-1, ncols)
    if A.shape[0] == 0:
        return np.eye(ncols, dtype=np.uint8)
    return field_array(A, p).null_space().view(np.ndarray).astype(np.uint8)
