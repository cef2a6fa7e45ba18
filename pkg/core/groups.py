# core/groups.py
"""
Finite classical groups over GF(p).

Families: GL_n, SL_n, Sp_2n, SO_{n,n} and SO_{n,n+1}. The ambient basis is
ordered a_1..a_n, b_1..b_n and, for SO_{n,n+1}, the extra vector e. Matrices
act on column vectors, so column j of g is the image of the j-th basis vector.

Groups are enumerated by breadth-first closure from explicit generators and
stored as a uint8 array of shape (order, m, m) together with a bytes -> id
index. The identity always has id 0.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from sympy import primitive_root

from .errors import CapacityError, DimensionMismatchError, InvalidInputError
from .exactla import PrimeField, det_mod_p, inverse_mod_p

LOGGER = logging.getLogger(__name__)

FAMILIES = ("GL", "SL", "Sp", "SOnn", "SOnn1")
FORMED_FAMILIES = ("Sp", "SOnn", "SOnn1")

DEFAULT_GROUP_CAPACITY = 1_000_000
EXHAUSTIVE_LIMIT = 2 ** 20

_ALIASES = {
    "GL": "GL",
    "SL": "SL",
    "SP": "Sp",
    "SONN": "SOnn",
    "SO_NN": "SOnn",
    "SO_N,N": "SOnn",
    "SONN1": "SOnn1",
    "SO_NN1": "SOnn1",
    "SO_N,N+1": "SOnn1",
}


def normalize_family(name: str) -> str:
    """Maps user spellings (``gl``, ``sp``, ``SO_n,n+1`` ...) to a family tag."""
    key = str(name).strip().upper().replace(" ", "")
    if key not in _ALIASES:
        raise InvalidInputError(f"unknown family {name!r}; expected one of {', '.join(FAMILIES)}")
    return _ALIASES[key]


def ambient_dimension(family: str, n: int) -> int:
    family = normalize_family(family)
    if n < 0:
        raise InvalidInputError(f"rank parameter must be nonnegative, got {n}")
    if family in ("GL", "SL"):
        return n
    if family == "SOnn1":
        return 2 * n + 1
    return 2 * n


def group_name(family: str, n: int, p: int) -> str:
    family = normalize_family(family)
    if family == "Sp":
        return f"Sp_{2 * n}(F{p})"
    if family == "SOnn":
        return f"SO_{{{n},{n}}}(F{p})"
    if family == "SOnn1":
        return f"SO_{{{n},{n + 1}}}(F{p})"
    return f"{family}_{n}(F{p})"


def positive_root_count(family: str, n: int) -> int:
    """Exponent N with |St| = q^N (and |U_Borel| = q^N)."""
    family = normalize_family(family)
    if family in ("GL", "SL"):
        return n * (n - 1) // 2
    if family == "SOnn":
        return n * (n - 1)
    return n * n


# ==============================================
# FORMS
# ==============================================


@dataclass(frozen=True, eq=False)
class FormSpec:
    """The form preserved by a family, as Gram and quadratic coefficient data mod p."""

    family: str
    n: int
    p: int
    kind: str
    gram: Optional[np.ndarray] = None
    quadratic: Optional[np.ndarray] = None

    @classmethod
    def for_family(cls, family: str, n: int, p: int) -> "FormSpec":
        family = normalize_family(family)
        PrimeField(p)
        m = ambient_dimension(family, n)
        if family in ("GL", "SL"):
            return cls(family, n, p, "none")
        if family == "Sp":
            gram = np.zeros((m, m), dtype=np.int64)
            for j in range(n):
                gram[j, n + j] = 1
                gram[n + j, j] = p - 1
            return cls(family, n, p, "symplectic", gram=gram)
        Q = np.zeros((m, m), dtype=np.int64)
        for j in range(n):
            Q[j, n + j] = 1
        if family == "SOnn1":
            Q[2 * n, 2 * n] = 1
        gram = (Q + Q.T) % p
        return cls(family, n, p, "quadratic", gram=gram, quadratic=Q)

    @property
    def m(self) -> int:
        return ambient_dimension(self.family, self.n)

    @property
    def is_formed(self) -> bool:
        return self.kind != "none"

    def bilinear(self, x: Sequence[int], y: Sequence[int]) -> int:
        if self.gram is None:
            raise InvalidInputError(f"{self.family} carries no form")
        return int(np.asarray(x, dtype=np.int64) @ self.gram @ np.asarray(y, dtype=np.int64)) % self.p

    def quadratic_value(self, x: Sequence[int]) -> int:
        if self.quadratic is None:
            raise InvalidInputError(f"{self.family} carries no quadratic form")
        v = np.asarray(x, dtype=np.int64)
        return int(v @ self.quadratic @ v) % self.p

    def preserves(self, g: np.ndarray) -> bool:
        """True when g preserves the form (always true for GL/SL)."""
        if self.gram is None:
            return True
        G = np.asarray(g, dtype=np.int64)
        if not np.array_equal((G.T @ self.gram @ G) % self.p, self.gram % self.p):
            return False
        if self.quadratic is not None:
            values = np.einsum("ji,jk,ki->i", G, self.quadratic, G) % self.p
            return bool(np.array_equal(values, np.diag(self.quadratic) % self.p))
        return True

    def is_isotropic(self, rows: np.ndarray) -> bool:
        """True when the span of ``rows`` is totally isotropic (or singular)."""
        if self.gram is None:
            return True
        R = np.asarray(rows, dtype=np.int64).reshape(-1, self.m)
        if R.shape[0] == 0:
            return True
        if np.any((R @ self.gram @ R.T) % self.p):
            return False
        if self.quadratic is not None:
            values = np.einsum("ij,jk,ik->i", R, self.quadratic, R) % self.p
            return not np.any(values)
        return True


# ==============================================
# ORDERS
# ==============================================


def order_formula(family: str, n: int, p: int) -> int:
    """Closed-form order; SO_{n,n} in characteristic 2 keeps the factor 2 of the naive group."""
    family = normalize_family(family)
    PrimeField(p)
    q = p
    if n == 0:
        return 1
    if family in ("GL", "SL"):
        order = q ** (n * (n - 1) // 2)
        for i in range(1, n + 1):
            order *= q ** i - 1
        return order if family == "GL" else order // (q - 1)
    if family in ("Sp", "SOnn1"):
        order = q ** (n * n)
        for i in range(1, n + 1):
            order *= q ** (2 * i) - 1
        return order
    order = q ** (n * (n - 1)) * (q ** n - 1)
    for i in range(1, n):
        order *= q ** (2 * i) - 1
    return 2 * order if p == 2 else order


def group_order(family: str, n: int, p: int, capacity: Optional[int] = None) -> int:
    """Order of the enumerated group, checked against the closed form."""
    G = build_group(family, n, p, capacity=capacity)
    expected = order_formula(family, n, p)
    if G.order != expected:
        raise ArithmeticError(f"{G.name}: enumerated {G.order} elements, formula gives {expected}")
    return G.order


def exhaustive_order(family: str, n: int, p: int, chunk: int = 65536) -> int:
    """Counts members by filtering every m x m matrix over GF(p)."""
    family = normalize_family(family)
    form = FormSpec.for_family(family, n, p)
    m = form.m
    total = p ** (m * m)
    if total > EXHAUSTIVE_LIMIT:
        raise CapacityError(f"exhaustive filter for {group_name(family, n, p)}", total, EXHAUSTIVE_LIMIT)
    if m == 0:
        return 1
    powers = p ** np.arange(m * m, dtype=np.int64)
    count = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        mats = ((idx[:, None] // powers) % p).reshape(-1, m, m)
        dets = np.rint(np.linalg.det(mats.astype(np.float64))).astype(np.int64) % p
        keep = dets != 0
        if family in ("SL", "SOnn", "SOnn1"):
            keep &= dets == 1
        if form.gram is not None:
            moved = np.einsum("kji,jl,klo->kio", mats, form.gram, mats) % p
            keep &= np.all(moved == form.gram % p, axis=(1, 2))
        if form.quadratic is not None:
            values = np.einsum("kji,jl,kli->ki", mats, form.quadratic, mats) % p
            keep &= np.all(values == np.diag(form.quadratic) % p, axis=1)
        count += int(np.count_nonzero(keep))
    return count


# ==============================================
# GENERATORS
# ==============================================


def elementary(m: int, i: int, j: int, p: int, t: int = 1) -> np.ndarray:
    g = np.eye(m, dtype=np.int64)
    g[i, j] = (g[i, j] + t) % p
    return g


def _gl_generators(n: int, p: int, include_torus: bool = True) -> List[np.ndarray]:
    gens = [elementary(n, i, j, p) for i in range(n) for j in range(n) if i != j]
    if include_torus and p > 2 and n > 0:
        torus = np.eye(n, dtype=np.int64)
        torus[0, 0] = int(primitive_root(p))
        gens.append(torus)
    return gens


def levi_lift(form: FormSpec, A: np.ndarray) -> np.ndarray:
    """diag(A, A^{-T}) (and 1 on e) for the formed families; A itself for GL/SL."""
    if not form.is_formed:
        return np.asarray(A, dtype=np.int64) % form.p
    n, p = form.n, form.p
    g = np.eye(form.m, dtype=np.int64)
    A = np.asarray(A, dtype=np.int64) % p
    g[:n, :n] = A
    g[n:2 * n, n:2 * n] = inverse_mod_p(A, p).astype(np.int64).T
    return g


def siegel(form: FormSpec, S: np.ndarray, opposite: bool = False) -> np.ndarray:
    """[[I, S], [0, I]] on the a/b blocks, or its lower-triangular counterpart."""
    n, p = form.n, form.p
    g = np.eye(form.m, dtype=np.int64)
    if opposite:
        g[n:2 * n, :n] = np.asarray(S) % p
    else:
        g[:n, n:2 * n] = np.asarray(S) % p
    return g


def short_root_map(form: FormSpec, w: Sequence[int], opposite: bool = False) -> np.ndarray:
    """SO_{n,n+1} element (c, d, l) -> (c - w(w.d) - 2wl, d, l + w.d); c and d swap roles when opposite."""
    if form.family != "SOnn1":
        raise InvalidInputError("short root maps only exist for SO_{n,n+1}")
    n, p = form.n, form.p
    w = np.asarray(w, dtype=np.int64)
    g = np.eye(form.m, dtype=np.int64)
    fixed, moved = (slice(n, 2 * n), slice(0, n)) if not opposite else (slice(0, n), slice(n, 2 * n))
    e = 2 * n
    g[moved, fixed] = (g[moved, fixed] - np.outer(w, w)) % p
    g[moved, e] = (-2 * w) % p
    g[e, fixed] = w % p
    return g % p


def _symmetric_basis(n: int) -> List[np.ndarray]:
    out = []
    for i in range(n):
        S = np.zeros((n, n), dtype=np.int64)
        S[i, i] = 1
        out.append(S)
    for i, j in combinations(range(n), 2):
        S = np.zeros((n, n), dtype=np.int64)
        S[i, j] = S[j, i] = 1
        out.append(S)
    return out


def _alternating_basis(n: int, p: int) -> List[np.ndarray]:
    out = []
    for i, j in combinations(range(n), 2):
        S = np.zeros((n, n), dtype=np.int64)
        S[i, j] = 1
        S[j, i] = p - 1
        out.append(S)
    return out


def generators(family: str, n: int, p: int) -> List[np.ndarray]:
    """Generating matrices for the family (Levi and root elements)."""
    form = FormSpec.for_family(family, n, p)
    family = form.family
    if family == "GL":
        return _gl_generators(n, p)
    if family == "SL":
        return _gl_generators(n, p, include_torus=False)
    gens = [levi_lift(form, A) for A in _gl_generators(n, p)]
    if family == "Sp":
        blocks = _symmetric_basis(n)
    else:
        blocks = _alternating_basis(n, p)
    for S in blocks:
        gens.append(siegel(form, S))
        gens.append(siegel(form, S, opposite=True))
    if family == "SOnn" and p == 2 and n > 0:
        swap = np.eye(form.m, dtype=np.int64)
        swap[[0, n]] = swap[[n, 0]]
        gens.append(swap)
    if family == "SOnn1":
        for i in range(n):
            w = np.zeros(n, dtype=np.int64)
            w[i] = 1
            gens.append(short_root_map(form, w))
            gens.append(short_root_map(form, w, opposite=True))
    return gens


def positive_root_generators(family: str, n: int, p: int) -> List[np.ndarray]:
    """Generators of the unipotent radical of the stabilizer of the standard chamber."""
    form = FormSpec.for_family(family, n, p)
    upper = [elementary(n, i, j, p) for i in range(n) for j in range(i + 1, n)]
    if not form.is_formed:
        return upper
    gens = [levi_lift(form, A) for A in upper]
    if form.family == "Sp":
        gens.extend(siegel(form, S) for S in _symmetric_basis(n))
    else:
        gens.extend(siegel(form, S) for S in _alternating_basis(n, p))
    if form.family == "SOnn1":
        for i in range(n):
            w = np.zeros(n, dtype=np.int64)
            w[i] = 1
            gens.append(short_root_map(form, w))
    return gens


# ==============================================
# CLOSURE
# ==============================================


def closure(
    gens: Sequence[np.ndarray], m: int, p: int, limit: int, what: str = "closure"
) -> Tuple[np.ndarray, Dict[bytes, int]]:
    """Breadth-first closure of ``gens`` under left multiplication, identity first."""
    identity = np.eye(m, dtype=np.uint8)
    found = [identity]
    index = {identity.tobytes(): 0}
    frontier = identity[None]
    gens64 = [np.asarray(g, dtype=np.int64) % p for g in gens]
    rounds = 0
    while len(frontier):
        fresh = []
        current = frontier.astype(np.int64)
        for g in gens64:
            batch = (np.matmul(g, current) % p).astype(np.uint8)
            for mat in batch:
                key = mat.tobytes()
                if key in index:
                    continue
                index[key] = len(found)
                found.append(mat)
                fresh.append(mat)
                if len(found) > limit:
                    raise CapacityError(what, len(found), limit)
        frontier = np.array(fresh, dtype=np.uint8).reshape(-1, m, m)
        rounds += 1
    LOGGER.debug("%s: %d elements after %d rounds", what, len(found), rounds)
    return np.array(found, dtype=np.uint8).reshape(-1, m, m), index


# ==============================================
# GROUPS
# ==============================================


class _GroupOps:
    """Shared operations on an indexed element list (ids are positions)."""

    p: int
    m: int

    def element(self, k: int) -> np.ndarray:
        raise NotImplementedError

    def find(self, matrix: np.ndarray) -> Optional[int]:
        raise NotImplementedError

    @property
    def order(self) -> int:
        raise NotImplementedError

    def __len__(self) -> int:
        return self.order

    def index_of(self, matrix: np.ndarray) -> int:
        k = self.find(matrix)
        if k is None:
            raise InvalidInputError(f"matrix is not a member of {self.name}")
        return k

    def __contains__(self, matrix) -> bool:
        return self.find(matrix) is not None

    def multiply(self, a: int, b: int) -> int:
        key = (a, b)
        cached = self._products.get(key)
        if cached is None:
            prod = (self.element(a).astype(np.int64) @ self.element(b).astype(np.int64)) % self.p
            cached = self.index_of(prod)
            self._products[key] = cached
        return cached

    def inverse(self, a: int) -> int:
        cached = self._inverses.get(a)
        if cached is None:
            cached = self.index_of(inverse_mod_p(self.element(a), self.p))
            self._inverses[a] = cached
            self._inverses[cached] = a
        return cached

    def conjugate(self, c: np.ndarray, a: int) -> np.ndarray:
        """Matrix c·g_a·c^{-1} (c need not belong to the group)."""
        c64 = np.asarray(c, dtype=np.int64) % self.p
        inv = inverse_mod_p(c64, self.p).astype(np.int64)
        return (c64 @ self.element(a).astype(np.int64) @ inv) % self.p

    def random_ids(self, rng: np.random.Generator, count: int) -> List[int]:
        return [int(k) for k in rng.integers(0, self.order, size=count)]

    def multiplication_table(self, limit: int = 4_000_000) -> np.ndarray:
        """Full table T[a, b] = id(a·b); refused above ``limit`` entries."""
        if self._table is not None:
            return self._table
        N = self.order
        if N * N > limit:
            raise CapacityError(f"multiplication table of {self.name}", N * N, limit)
        elems = np.array([self.element(k) for k in range(N)], dtype=np.int64).reshape(N, self.m, self.m)
        table = np.zeros((N, N), dtype=np.int64)
        for a in range(N):
            prods = (np.matmul(elems[a], elems) % self.p).astype(np.uint8)
            table[a] = [self.index_of(mat) for mat in prods]
        self._table = table
        return table


class ClassicalGroup(_GroupOps):
    """A finite classical group with its complete element list."""

    def __init__(self, family: str, n: int, p: int, elements: np.ndarray,
                 index: Dict[bytes, int], generator_ids: List[int]):
        self.family = normalize_family(family)
        self.n = n
        self.p = p
        self.field = PrimeField(p)
        self.form = FormSpec.for_family(self.family, n, p)
        self.m = self.form.m
        self.elements = elements
        self._index = index
        self.generator_ids = generator_ids
        self._products: Dict[Tuple[int, int], int] = {}
        self._inverses: Dict[int, int] = {0: 0}
        self._table: Optional[np.ndarray] = None

    def __repr__(self) -> str:
        return f"<ClassicalGroup {self.name} order={self.order}>"

    @property
    def name(self) -> str:
        return group_name(self.family, self.n, self.p)

    @property
    def order(self) -> int:
        return int(self.elements.shape[0])

    @property
    def is_formed(self) -> bool:
        return self.form.is_formed

    def element(self, k: int) -> np.ndarray:
        return self.elements[k]

    def find(self, matrix: np.ndarray) -> Optional[int]:
        mat = (np.asarray(matrix, dtype=np.int64) % self.p).astype(np.uint8)
        if mat.shape != (self.m, self.m):
            raise DimensionMismatchError(f"expected {self.m}x{self.m}, got {mat.shape}")
        return self._index.get(mat.tobytes())

    def parent_id(self, k: int) -> int:
        return k

    def generating_set(self) -> List[int]:
        return list(self.generator_ids)

    def is_member(self, matrix: np.ndarray) -> bool:
        """Predicate membership test, independent of the enumeration."""
        g = np.asarray(matrix, dtype=np.int64) % self.p
        if g.shape != (self.m, self.m):
            return False
        det = det_mod_p(g, self.p) if self.m else 1
        if det == 0:
            return False
        if self.family in ("SL", "SOnn", "SOnn1") and det != 1:
            return False
        return self.form.preserves(g)


def build_group(family: str, n: int, p: int, capacity: Optional[int] = None) -> ClassicalGroup:
    """Enumerates the family's group over GF(p).

    Raises:
        CapacityError: when the closed-form order exceeds ``capacity``.
    """
    family = normalize_family(family)
    PrimeField(p)
    if n < 0:
        raise InvalidInputError(f"rank parameter must be nonnegative, got {n}")
    limit = DEFAULT_GROUP_CAPACITY if capacity is None else int(capacity)
    estimated = order_formula(family, n, p)
    if estimated > limit:
        raise CapacityError(group_name(family, n, p), estimated, limit)
    return _build_group(family, n, p)


@lru_cache(maxsize=24)
def _build_group(family: str, n: int, p: int) -> ClassicalGroup:
    m = ambient_dimension(family, n)
    gens = generators(family, n, p)
    name = group_name(family, n, p)
    elements, index = closure(gens, m, p, limit=order_formula(family, n, p), what=name)
    gen_ids = sorted({index[(g % p).astype(np.uint8).tobytes()] for g in gens} - {0})
    LOGGER.info("built %s with %d elements from %d generators", name, len(elements), len(gens))
    return ClassicalGroup(family, n, p, elements, index, gen_ids)


# ==============================================
# SUBGROUPS
# ==============================================


class Subgroup(_GroupOps):
    """A subgroup given by member ids of a parent group; local ids are positions."""

    def __init__(self, parent: ClassicalGroup, member_ids: Sequence[int], name: str):
        ids = sorted({int(k) for k in member_ids})
        if not ids or ids[0] != 0:
            raise InvalidInputError(f"{name} does not contain the identity")
        self.parent = parent
        self.p = parent.p
        self.m = parent.m
        self.ids = ids
        self._position = {gid: k for k, gid in enumerate(ids)}
        self._name = name
        self._products: Dict[Tuple[int, int], int] = {}
        self._inverses: Dict[int, int] = {0: 0}
        self._table: Optional[np.ndarray] = None
        self._generating_set: Optional[List[int]] = None

    def __repr__(self) -> str:
        return f"<Subgroup {self.name} order={self.order}>"

    def __iter__(self) -> Iterator[int]:
        return iter(self.ids)

    @property
    def name(self) -> str:
        return self._name

    @property
    def order(self) -> int:
        return len(self.ids)

    def element(self, k: int) -> np.ndarray:
        return self.parent.element(self.ids[k])

    def parent_id(self, k: int) -> int:
        return self.ids[k]

    def local(self, gid: int) -> Optional[int]:
        return self._position.get(gid)

    def find(self, matrix: np.ndarray) -> Optional[int]:
        gid = self.parent.find(matrix)
        return None if gid is None else self._position.get(gid)

    def contains_id(self, gid: int) -> bool:
        return gid in self._position

    def multiply(self, a: int, b: int) -> int:
        return self._position[self.parent.multiply(self.ids[a], self.ids[b])]

    def inverse(self, a: int) -> int:
        return self._position[self.parent.inverse(self.ids[a])]

    def is_closed(self) -> bool:
        """Checks closure on generators: every product with a generator stays inside."""
        for g in self.generating_set():
            for k in range(self.order):
                if self.parent.multiply(self.ids[g], self.ids[k]) not in self._position:
                    return False
        return True

    def generating_set(self) -> List[int]:
        """Greedy generating set in local ids; each added generator at least doubles the span."""
        if self._generating_set is not None:
            return list(self._generating_set)
        gens: List[int] = []
        span = {0}
        for k in range(1, self.order):
            if k in span:
                continue
            gens.append(k)
            span = self._close(span, gens)
            if len(span) == self.order:
                break
        self._generating_set = gens
        return list(gens)

    def _close(self, span: set, gens: List[int]) -> set:
        seen = set(span)
        frontier = list(seen)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.multiply(g, x)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen


SUBGROUP_KINDS = ("P", "U", "L", "Stab", "Complement")


def _blocks(form: FormSpec, level: int) -> Tuple[List[int], List[int], List[int]]:
    """Index sets A = a_1..a_l, B = b_1..b_l and the rest W."""
    n, m = form.n, form.m
    A = list(range(level))
    B = list(range(n, n + level)) if form.is_formed else []
    W = [i for i in range(m) if i not in A and i not in B]
    return A, B, W


def complement_indices(family: str, n: int, level: int) -> List[int]:
    """Positions of the basis of the smaller group's ambient space inside the big one."""
    form = FormSpec.for_family(family, n, 2)
    if not form.is_formed:
        return list(range(level, n))
    out = list(range(level, n)) + list(range(n + level, 2 * n))
    if form.family == "SOnn1":
        out.append(2 * n)
    return out


def _check_level(G: ClassicalGroup, level: int) -> None:
    if not 1 <= level <= G.n:
        raise InvalidInputError(f"level {level} outside 1..{G.n} for {G.name}")


def subgroup_mask(G: ClassicalGroup, kind: str, level: int) -> np.ndarray:
    """Boolean mask over G's ids for P(l), U(l), L(l), Stab(l) or the embedded complement."""
    _check_level(G, level)
    return level_mask(G.form, G.elements, kind, level)


def level_mask(form: FormSpec, E: np.ndarray, kind: str, level: int) -> np.ndarray:
    """The same predicates evaluated on an arbitrary stack of matrices."""
    if kind not in SUBGROUP_KINDS:
        raise InvalidInputError(f"unknown subgroup kind {kind!r}")
    m = form.m
    I = np.eye(m, dtype=np.uint8)
    A, B, W = _blocks(form, level)
    notA = [i for i in range(m) if i not in A]
    notB = [i for i in range(m) if i not in B]

    def block(rows, cols):
        return E[:, rows, :][:, :, cols]

    def equals_identity(rows, cols):
        if not rows or not cols:
            return np.ones(len(E), dtype=bool)
        return np.all(block(rows, cols) == I[np.ix_(rows, cols)], axis=(1, 2))

    in_P = equals_identity(notA, A) if notA else np.ones(len(E), dtype=bool)
    stab = equals_identity(list(range(m)), A)
    if kind == "P":
        return in_P
    if kind == "Stab":
        return stab
    if kind == "U":
        if not form.is_formed:
            return in_P & equals_identity(A, A) & equals_identity(notA, notA)
        return in_P & equals_identity(A, A) & equals_identity(notA, W)
    if form.is_formed:
        levi = in_P & (np.all(block(notB, B) == 0, axis=(1, 2)) if notB else True)
    else:
        levi = in_P & (np.all(block(A, notA) == 0, axis=(1, 2)) if notA else True)
    if kind == "L":
        return levi
    return levi & stab


def subgroup_members(G: ClassicalGroup, kind: str, level: int) -> Subgroup:
    """The subgroup P(l), U(l), L(l), Stab(l) or Complement(l) = 1 x G_{n-l} as a Subgroup."""
    mask = subgroup_mask(G, kind, level)
    ids = np.nonzero(mask)[0].tolist()
    return Subgroup(G, ids, f"{kind}^{level}({G.name})")


def levi_embed(form: FormSpec, level: int, g1: np.ndarray, g2: np.ndarray) -> np.ndarray:
    """Block element of L^l: g1 on a_1..a_l, g1^{-T} on b_1..b_l, g2 on the complement."""
    p = form.p
    idx = complement_indices(form.family, form.n, level)
    g1 = np.asarray(g1, dtype=np.int64) % p
    g2 = np.asarray(g2, dtype=np.int64) % p
    if g1.shape != (level, level) or g2.shape != (len(idx), len(idx)):
        raise DimensionMismatchError("levi_embed block shapes do not fit the level")
    g = np.eye(form.m, dtype=np.int64)
    g[:level, :level] = g1
    if form.is_formed:
        n = form.n
        g[n:n + level, n:n + level] = inverse_mod_p(g1, p).astype(np.int64).T if level else g1
    if idx:
        g[np.ix_(idx, idx)] = g2
    return g % p


def embed_complement(form: FormSpec, level: int, h: np.ndarray) -> np.ndarray:
    """Element 1 x h of the embedded copy of G_{n-l}."""
    return levi_embed(form, level, np.eye(level, dtype=np.int64), h)


def borel_unipotent(G: ClassicalGroup) -> Subgroup:
    """Unipotent radical of the stabilizer of the standard chamber; order q^N."""
    gens = positive_root_generators(G.family, G.n, G.p)
    expected = G.p ** positive_root_count(G.family, G.n)
    elements, _ = closure(gens, G.m, G.p, limit=expected, what=f"unipotent radical of {G.name}")
    ids = [G.index_of(mat) for mat in elements]
    return Subgroup(G, ids, f"U({G.name})")


def unipotent_radical_elements(form: FormSpec, level: int) -> np.ndarray:
    """Elements of U^l (identity first), filtered from the Borel unipotent closure."""
    if not 1 <= level <= form.n:
        raise InvalidInputError(f"level {level} outside 1..{form.n}")
    gens = positive_root_generators(form.family, form.n, form.p)
    expected = form.p ** positive_root_count(form.family, form.n)
    borel, _ = closure(gens, form.m, form.p, limit=expected, what="Borel unipotent radical")
    return borel[level_mask(form, borel, "U", level)]


def unitriangular_matrices(n: int, p: int) -> Iterator[np.ndarray]:
    """Upper unitriangular n x n matrices, lexicographic in the entries above the diagonal (row-major)."""
    slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
    total = p ** len(slots)
    for k in range(total):
        digits = []
        rest = k
        for _ in slots:
            digits.append(rest % p)
            rest //= p
        g = np.eye(n, dtype=np.int64)
        for (i, j), v in zip(slots, reversed(digits)):
            g[i, j] = v
        yield g


# ==============================================
# SPECIAL ELEMENTS
# ==============================================


def _signed_swap(g: np.ndarray, src: int, dst: int, p: int) -> None:
    """src -> dst and dst -> -src on columns."""
    g[:, src] = 0
    g[:, dst] = 0
    g[dst, src] = 1
    g[src, dst] = p - 1


def kappa(G: ClassicalGroup, m: int) -> np.ndarray:
    """kappa_m: a_m -> a_3, a_3 -> -a_m (and the same on b's); kappa_3 = id."""
    if G.n < 3:
        raise InvalidInputError(f"kappa needs n >= 3, got n = {G.n}")
    return kappa_matrix(G.form, m)


def kappa_matrix(form: FormSpec, m: int) -> np.ndarray:
    if m not in (1, 2, 3):
        raise InvalidInputError(f"kappa index must be 1, 2 or 3, got {m}")
    if form.n < 3:
        raise InvalidInputError(f"kappa needs n >= 3, got n = {form.n}")
    g = np.eye(form.m, dtype=np.int64)
    if m == 3:
        return g
    _signed_swap(g, m - 1, 2, form.p)
    if form.is_formed:
        n = form.n
        _signed_swap(g, n + m - 1, n + 2, form.p)
    return g


def hat_kappa(m: int, p: int) -> np.ndarray:
    """The 3 x 3 version of kappa_m in SL_3(GF(p))."""
    return kappa_matrix(FormSpec.for_family("SL", 3, p), m)


def face_conjugator(form: FormSpec, degree: int, j: int, recipe: str = "exact") -> np.ndarray:
    """Element carrying the j-th face of [a_1..a_{degree+1}] to [a_1..a_degree].

    The exact recipe is a signed cycle a_{j+1} -> +-a_{degree+1}, a_i -> a_{i-1}
    for j+2 <= i <= degree+1, mirrored on the b's. The kappa recipe returns
    kappa_{j+1} and only exists for degree 2.
    """
    if not 0 <= j <= degree:
        raise InvalidInputError(f"face index {j} outside 0..{degree}")
    if recipe == "kappa":
        if degree != 2:
            raise InvalidInputError("the kappa recipe is only defined for degree 2")
        return kappa_matrix(form, j + 1)
    if recipe != "exact":
        raise InvalidInputError(f"unknown recipe {recipe!r}")
    if degree + 1 > form.n:
        raise InvalidInputError(f"degree {degree} needs n >= {degree + 1}")
    p = form.p
    sign = 1 if (degree - j) % 2 == 0 else p - 1
    g = np.eye(form.m, dtype=np.int64)
    offsets = [0, form.n] if form.is_formed else [0]
    for off in offsets:
        cols = list(range(off + j, off + degree + 1))
        g[:, cols] = 0
        g[off + degree, off + j] = sign
        for i in range(off + j + 1, off + degree + 1):
            g[i - 1, i] = 1
    return g % p

