# core/building.py
"""
Tits buildings of the classical groups as flag complexes of (isotropic)
subspaces, their reduced chain complexes, and the Steinberg module.

Vertices are proper nonzero subspaces (totally isotropic for the formed
families) stored as canonical RREF arrays. Vertex ids follow the order
(dim, RREF bytes), so a simplex is the increasing tuple of its vertex ids and
every boundary sign comes from that single global order. The empty complex
has the single (-1)-simplex ``()``.
"""

import copy
import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy.combinatorics import Permutation
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import (
    BasisExtractionError,
    CapacityError,
    DimensionMismatchError,
    InvalidInputError,
    NotACycleError,
)
from .exactla import (
    Ring,
    SparseColumn,
    column_rank,
    columns_to_dense,
    invariant_factors,
    rref,
    rref_mod_p,
    to_fraction_rows,
)
from .groups import (
    ClassicalGroup,
    FormSpec,
    closure,
    normalize_family,
    positive_root_count,
    positive_root_generators,
    unitriangular_matrices,
)

LOGGER = logging.getLogger(__name__)

DEFAULT_CELL_CAPACITY = 250_000

GroupLike = Union[ClassicalGroup, FormSpec]


def _form_of(group: GroupLike) -> FormSpec:
    return group.form if isinstance(group, ClassicalGroup) else group


def gaussian_binomial(m: int, d: int, q: int) -> int:
    if d < 0 or d > m:
        return 0
    num = den = 1
    for i in range(d):
        num *= q ** (m - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def span_key(rows: np.ndarray, p: int) -> Tuple[int, bytes, np.ndarray]:
    """(dim, bytes, rref) of the row span of ``rows`` mod p."""
    R, pivots = rref_mod_p(rows, p)
    R = np.ascontiguousarray(R, dtype=np.uint8)
    return len(pivots), R.tobytes(), R


# ==============================================
# SUBSPACES
# ==============================================


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of GF(p)^m held as its RREF basis rows."""

    basis: np.ndarray
    p: int

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def m(self) -> int:
        return int(self.basis.shape[1])

    @property
    def key(self) -> Tuple[int, bytes]:
        return self.dim, self.basis.tobytes()

    @property
    def pivots(self) -> List[int]:
        return [int(np.nonzero(row)[0][0]) for row in self.basis]

    def contains(self, other: "Subspace") -> bool:
        """True when ``other`` is a subspace of this one."""
        if other.dim > self.dim:
            return False
        if other.dim == 0:
            return True
        U = other.basis.astype(np.int64)
        residual = (U - U[:, self.pivots] @ self.basis.astype(np.int64)) % self.p
        return not residual.any()

    def vectors(self) -> np.ndarray:
        """Every vector of the subspace (p^dim rows)."""
        coeffs = np.array(list(product(range(self.p), repeat=self.dim)), dtype=np.int64).reshape(-1, self.dim)
        return (coeffs @ self.basis.astype(np.int64)) % self.p

    def __eq__(self, other) -> bool:
        return isinstance(other, Subspace) and self.key == other.key and self.p == other.p

    def __hash__(self) -> int:
        return hash((self.p, self.key))


def _schubert_cell(m: int, pivots: Tuple[int, ...], p: int) -> np.ndarray:
    """All RREF d x m matrices with the given pivot columns."""
    d = len(pivots)
    free = [(r, c) for r in range(d) for c in range(pivots[r] + 1, m) if c not in pivots]
    count = p ** len(free)
    mats = np.zeros((count, d, m), dtype=np.uint8)
    for r, c in enumerate(pivots):
        mats[:, r, c] = 1
    if free:
        idx = np.arange(count, dtype=np.int64)
        digits = (idx[:, None] // (p ** np.arange(len(free), dtype=np.int64))) % p
        rows = [r for r, _ in free]
        cols = [c for _, c in free]
        mats[:, rows, cols] = digits.astype(np.uint8)
    return mats


def _isotropic_mask(form: FormSpec, mats: np.ndarray) -> np.ndarray:
    if form.gram is None or len(mats) == 0:
        return np.ones(len(mats), dtype=bool)
    R = mats.astype(np.int64)
    pairing = np.einsum("kia,ab,kjb->kij", R, form.gram, R) % form.p
    keep = ~pairing.any(axis=(1, 2))
    if form.quadratic is not None:
        values = np.einsum("kia,ab,kib->ki", R, form.quadratic, R) % form.p
        keep &= ~values.any(axis=1)
    return keep


def enumerate_isotropic_subspaces(group: GroupLike, d: int, capacity: Optional[int] = None) -> List[Subspace]:
    """All d-dimensional subspaces (totally isotropic ones for the formed families), canonical and sorted."""
    form = _form_of(group)
    m, p = form.m, form.p
    top = form.n if form.is_formed else m - 1
    if not 1 <= d <= max(top, 0):
        raise InvalidInputError(f"dimension {d} outside 1..{top} for {form.family}")
    limit = DEFAULT_CELL_CAPACITY if capacity is None else capacity
    estimated = gaussian_binomial(m, d, p)
    if estimated > limit:
        raise CapacityError(f"{d}-dimensional subspaces of F{p}^{m}", estimated, limit)
    found = []
    for pivots in combinations(range(m), d):
        mats = _schubert_cell(m, pivots, p)
        for mat in mats[_isotropic_mask(form, mats)]:
            found.append(Subspace(np.ascontiguousarray(mat), p))
    found.sort(key=lambda s: s.key)
    return found


# ==============================================
# CHAIN COMPLEXES
# ==============================================


class ChainComplexR:
    """Free chain complex over a ring: ``sizes[k]`` generators, ``boundaries[k]`` columns of d_k."""

    def __init__(self, ring: Ring, sizes: Dict[int, int], boundaries: Dict[int, List[SparseColumn]]):
        self.ring = ring
        self.sizes = dict(sizes)
        self.boundaries = boundaries
        self._ranks: Dict[int, int] = {}
        self._factors: Dict[int, List[int]] = {}

    @property
    def degrees(self) -> List[int]:
        return sorted(self.sizes)

    def boundary(self, k: int) -> List[SparseColumn]:
        if k not in self.boundaries:
            return [dict() for _ in range(self.sizes.get(k, 0))]
        return self.boundaries[k]

    def check_squares_to_zero(self) -> bool:
        for k in self.degrees:
            if k - 1 not in self.boundaries or k not in self.boundaries:
                continue
            lower = self.boundaries[k - 1]
            for col in self.boundaries[k]:
                acc: Dict[int, int] = {}
                for i, v in col.items():
                    for r, w in lower[i].items():
                        acc[r] = acc.get(r, 0) + v * w
                if any(acc.values()):
                    return False
        return True

    def _rank(self, k: int) -> int:
        if k not in self._ranks:
            cols = self.boundary(k)
            rows = self.sizes.get(k - 1, 0)
            if not cols or rows == 0:
                self._ranks[k] = 0
            else:
                self._ranks[k] = column_rank(cols, rows, self.ring)
        return self._ranks[k]

    def _invariant_factors(self, k: int) -> List[int]:
        if k not in self._factors:
            cols = self.boundary(k)
            rows = self.sizes.get(k - 1, 0)
            self._factors[k] = invariant_factors(cols, rows) if cols and rows else []
            self._ranks.setdefault(k, len(self._factors[k]))
        return self._factors[k]

    def homology(self, k: int) -> Tuple[int, Tuple[int, ...]]:
        """(rank, torsion invariant factors) of H_k; torsion only over the integers."""
        size = self.sizes.get(k, 0)
        if self.ring.kind == "Z":
            out = self._invariant_factors(k + 1)
            torsion = tuple(f for f in out if f > 1)
            return size - len(self._invariant_factors(k)) - len(out), torsion
        return size - self._rank(k) - self._rank(k + 1), ()


# ==============================================
# FLAG COMPLEX
# ==============================================


class FlagComplex:
    """Strict chains of proper nonzero (isotropic) subspaces."""

    def __init__(self, form: FormSpec, vertices: List[Subspace], simplices: Dict[int, List[Tuple[int, ...]]]):
        self.form = form
        self.p = form.p
        self.m = form.m
        self.vertices = vertices
        self.simplices = simplices
        self._vertex_index = {v.key: i for i, v in enumerate(vertices)}
        self._simplex_index = {k: {s: i for i, s in enumerate(cells)} for k, cells in simplices.items()}
        self._boundaries: Dict[int, List[SparseColumn]] = {}
        self._complexes: Dict[str, ChainComplexR] = {}
        self._vertex_perms: Dict[bytes, np.ndarray] = {}

    def __repr__(self) -> str:
        counts = ", ".join(f"{k}:{len(v)}" for k, v in sorted(self.simplices.items()) if k >= 0)
        return f"<FlagComplex {self.form.family} n={self.form.n} p={self.p} [{counts}]>"

    @property
    def top_dim(self) -> int:
        return max(self.simplices)

    @property
    def chambers(self) -> List[Tuple[int, ...]]:
        return self.simplices[self.top_dim]

    def count(self, k: int) -> int:
        return len(self.simplices.get(k, []))

    def vertex_id(self, rows: np.ndarray) -> Optional[int]:
        d, key, _ = span_key(np.asarray(rows).reshape(-1, self.m), self.p)
        return self._vertex_index.get((d, key))

    def simplex_id(self, k: int, simplex: Sequence[int]) -> Optional[int]:
        return self._simplex_index.get(k, {}).get(tuple(simplex))

    def chamber_id(self, simplex: Sequence[int]) -> Optional[int]:
        return self.simplex_id(self.top_dim, simplex)

    def boundary(self, k: int) -> List[SparseColumn]:
        """Columns of d_k : C_k -> C_{k-1}; d_0 is the augmentation onto C_{-1} = R."""
        if k not in self._boundaries:
            lower = self._simplex_index[k - 1]
            cols = []
            for s in self.simplices[k]:
                col: SparseColumn = {}
                for i in range(len(s)):
                    face = s[:i] + s[i + 1:]
                    col[lower[face]] = -1 if i % 2 else 1
                cols.append(col)
            self._boundaries[k] = cols
        return self._boundaries[k]

    def chain_complex(self, ring: Optional[Ring] = None) -> ChainComplexR:
        ring = ring or Ring.integers()
        if ring.label not in self._complexes:
            sizes = {k: len(v) for k, v in self.simplices.items()}
            boundaries = {k: self.boundary(k) for k in self.simplices if k >= 0}
            self._complexes[ring.label] = ChainComplexR(ring, sizes, boundaries)
        return self._complexes[ring.label]

    def is_cycle(self, chain: SparseColumn) -> bool:
        if self.top_dim < 0:
            return True
        cols = self.boundary(self.top_dim)
        acc: Dict[int, int] = {}
        for c, v in chain.items():
            for r, w in cols[c].items():
                acc[r] = acc.get(r, 0) + v * w
        return not any(acc.values())

    # group action

    def vertex_permutation(self, g: np.ndarray) -> np.ndarray:
        """Vertex id -> id of its image under g (rows R map to R g^T)."""
        g = np.asarray(g, dtype=np.int64) % self.p
        key = g.astype(np.uint8).tobytes()
        cached = self._vertex_perms.get(key)
        if cached is not None:
            return cached
        perm = np.empty(len(self.vertices), dtype=np.int64)
        for vid in range(len(self.vertices)):
            perm[vid] = self._image(vid, g)
        if len(self._vertex_perms) > 4096:
            self._vertex_perms.clear()
        self._vertex_perms[key] = perm
        return perm

    def _image(self, vid: int, g: np.ndarray) -> int:
        rows = (self.vertices[vid].basis.astype(np.int64) @ g.T) % self.p
        target = self.vertex_id(rows)
        if target is None:
            raise InvalidInputError("matrix does not preserve the building")
        return target

    def push_chain(self, chain: SparseColumn, g: np.ndarray, perm: Optional[np.ndarray] = None) -> SparseColumn:
        """Image of a top-degree chain under g."""
        if self.top_dim < 0:
            return dict(chain)
        g = np.asarray(g, dtype=np.int64) % self.p
        local: Dict[int, int] = {}
        out: SparseColumn = {}
        chambers = self.chambers
        for c, v in chain.items():
            image = []
            for vid in chambers[c]:
                if perm is not None:
                    image.append(int(perm[vid]))
                    continue
                if vid not in local:
                    local[vid] = self._image(vid, g)
                image.append(local[vid])
            target = self.chamber_id(tuple(image))
            out[target] = out.get(target, 0) + v
        return {k: v for k, v in out.items() if v}

    def chamber_permutation(self, g: np.ndarray) -> List[int]:
        perm = self.vertex_permutation(g)
        return [self.chamber_id(tuple(int(perm[v]) for v in s)) for s in self.chambers]


def tits_complex(group: GroupLike, capacity: Optional[int] = None) -> FlagComplex:
    """The flag complex of the group's building; SL shares the GL complex."""
    form = _form_of(group)
    family = "GL" if form.family in ("GL", "SL") else form.family
    limit = DEFAULT_CELL_CAPACITY if capacity is None else int(capacity)
    return _tits_complex(family, form.n, form.p, limit)


@lru_cache(maxsize=16)
def _tits_complex(family: str, n: int, p: int, limit: int) -> FlagComplex:
    form = FormSpec.for_family(family, n, p)
    top = n if form.is_formed else n - 1
    vertices: List[Subspace] = []
    for d in range(1, top + 1):
        vertices.extend(enumerate_isotropic_subspaces(form, d, capacity=limit))
    if len(vertices) > limit:
        raise CapacityError(f"vertices of the {family}_{n}(F{p}) building", len(vertices), limit)
    by_dim: Dict[int, List[int]] = {}
    for vid, v in enumerate(vertices):
        by_dim.setdefault(v.dim, []).append(vid)
    up: Dict[int, List[int]] = {vid: [] for vid in range(len(vertices))}
    for d in sorted(by_dim):
        for e in sorted(by_dim):
            if e <= d:
                continue
            small = np.array([vertices[v].basis for v in by_dim[d]], dtype=np.int64)
            for w in by_dim[e]:
                big = vertices[w]
                residual = (small - small[:, :, big.pivots] @ big.basis.astype(np.int64)) % p
                inside = ~residual.any(axis=(1, 2))
                for k in np.nonzero(inside)[0]:
                    up[by_dim[d][k]].append(w)
    simplices: Dict[int, List[Tuple[int, ...]]] = {-1: [()]}
    if vertices:
        simplices[0] = [(v,) for v in range(len(vertices))]
        total = len(vertices)
        k = 0
        while True:
            grown = [s + (w,) for s in simplices[k] for w in up[s[-1]]]
            if not grown:
                break
            total += len(grown)
            if total > limit:
                raise CapacityError(f"simplices of the {family}_{n}(F{p}) building", total, limit)
            k += 1
            simplices[k] = grown
    complex_ = FlagComplex(form, vertices, simplices)
    LOGGER.info("built %r", complex_)
    return complex_


def reduced_homology(complex_: Union[FlagComplex, ChainComplexR], k: int,
                     ring: Optional[Ring] = None) -> Tuple[int, Tuple[int, ...]]:
    """Reduced homology in degree k (the augmentation is built into the complex)."""
    chains = complex_.chain_complex(ring) if isinstance(complex_, FlagComplex) else complex_
    if not chains.check_squares_to_zero():
        raise InvalidInputError("boundary maps do not square to zero")
    return chains.homology(k)


def wedge_of_spheres(complex_: FlagComplex) -> Dict[int, Tuple[int, Tuple[int, ...]]]:
    """Reduced integral homology in every degree from -1 to the top."""
    chains = complex_.chain_complex(Ring.integers())
    return {k: chains.homology(k) for k in range(-1, complex_.top_dim + 1)}


def export_complex(complex_: FlagComplex) -> str:
    """One line per simplex: dimension followed by vertex ids."""
    lines = [f"# {complex_.form.family} n={complex_.form.n} p={complex_.p} m={complex_.m}"]
    for vid, v in enumerate(complex_.vertices):
        rows = ";".join("".join(str(int(x)) for x in row) for row in v.basis)
        lines.append(f"v {vid} {v.dim} {rows}")
    for k in sorted(complex_.simplices):
        if k < 0:
            continue
        for s in complex_.simplices[k]:
            lines.append(f"{k} " + " ".join(str(v) for v in s))
    return "\n".join(lines) + "\n"


def export_boundary(complex_: FlagComplex, k: int) -> List[Tuple[int, int, int]]:
    """Coordinate triplets (row, col, value) of d_k."""
    out = []
    for j, col in enumerate(complex_.boundary(k)):
        for i, v in sorted(col.items()):
            out.append((i, j, v))
    return out


# ==============================================
# APARTMENT CHAINS
# ==============================================


def _sign(perm: Sequence[int]) -> int:
    return 1 if Permutation(list(perm)).is_even else -1


def apartment_chain(complex_: FlagComplex, B: np.ndarray) -> SparseColumn:
    """Sum over orderings w of the columns of sgn(w) times the flag of partial spans.

    Orderings whose flag repeats a subspace contribute nothing, so a singular
    B gives the zero chain.
    """
    if complex_.form.is_formed:
        raise InvalidInputError("apartment_chain is for GL/SL buildings; use frame_chain")
    n, p = complex_.m, complex_.p
    B = np.asarray(B, dtype=np.int64) % p
    if B.shape != (n, n):
        raise DimensionMismatchError(f"expected a {n}x{n} matrix, got {B.shape}")
    if n and not B.any(axis=0).all():
        raise InvalidInputError("apartment input has a zero column")
    spans: Dict[frozenset, Optional[int]] = {}

    def span(cols: frozenset) -> Optional[int]:
        if cols not in spans:
            spans[cols] = complex_.vertex_id(B[:, sorted(cols)].T)
        return spans[cols]

    chain: SparseColumn = {}
    for w in permutations(range(n)):
        flag = [span(frozenset(w[:k])) for k in range(1, n)]
        if any(a == b for a, b in zip(flag, flag[1:])):
            continue
        target = complex_.chamber_id(tuple(flag))
        if target is None:
            raise InvalidInputError("apartment flag is not a chamber")
        chain[target] = chain.get(target, 0) + _sign(w)
    return {k: v for k, v in chain.items() if v}


def frame_chain(complex_: FlagComplex, frame: np.ndarray) -> SparseColumn:
    """Apartment of a hyperbolic frame (columns a_1..a_n, b_1..b_n of ``frame``).

    Sum over orderings w and sign patterns of sgn(w)(-1)^{#b} times the flag
    spanned by the chosen frame vectors.
    """
    form = complex_.form
    if not form.is_formed:
        raise InvalidInputError("frame_chain needs a formed family")
    n, p = form.n, complex_.p
    F = np.asarray(frame, dtype=np.int64) % p
    spans: Dict[Tuple[Tuple[int, int], ...], Optional[int]] = {}

    def span(picks: Tuple[Tuple[int, int], ...]) -> Optional[int]:
        key = tuple(sorted(picks))
        if key not in spans:
            cols = [i if side == 0 else n + i for i, side in key]
            spans[key] = complex_.vertex_id(F[:, cols].T)
        return spans[key]

    chain: SparseColumn = {}
    for w in permutations(range(n)):
        sw = _sign(w)
        for sides in product((0, 1), repeat=n):
            picks = tuple(zip(w, sides))
            flag = tuple(span(picks[:k]) for k in range(1, n + 1))
            target = complex_.chamber_id(flag)
            if target is None:
                raise InvalidInputError("frame flag is not a chamber")
            chain[target] = chain.get(target, 0) + sw * (-1) ** sum(sides)
    return {k: v for k, v in chain.items() if v}


def standard_frame(form: FormSpec) -> np.ndarray:
    return np.eye(form.m, dtype=np.int64)


def standard_apartment(complex_: FlagComplex) -> SparseColumn:
    if complex_.form.is_formed:
        return frame_chain(complex_, standard_frame(complex_.form))
    return apartment_chain(complex_, np.eye(complex_.m, dtype=np.int64))


def opposite_chamber(complex_: FlagComplex) -> Tuple[Tuple[int, ...], int]:
    """Chamber of the standard apartment opposite the standard chamber, with its coefficient."""
    form = complex_.form
    n = form.n
    I = np.eye(form.m, dtype=np.int64)
    if complex_.top_dim < 0:
        return (), 1
    if form.is_formed:
        flag = tuple(complex_.vertex_id(I[n:n + k]) for k in range(1, n + 1))
        return flag, (-1) ** n
    flag = tuple(complex_.vertex_id(I[n - k:n]) for k in range(1, n))
    return flag, (-1) ** (n * (n - 1) // 2)


# ==============================================
# STEINBERG MODULE
# ==============================================


class SteinbergModule:
    """Top reduced homology of the building with the apartment basis {u . Sigma_0}.

    ``labels[j]`` is the unipotent matrix u of the j-th basis apartment; for
    GL/SL these are the upper unitriangular matrices in lexicographic order.
    """

    def __init__(self, complex_: FlagComplex, labels: List[np.ndarray], basis: List[SparseColumn],
                 ring: Ring, group: Optional[ClassicalGroup] = None):
        self.complex = complex_
        self.form = complex_.form
        self.p = complex_.p
        self.labels = labels
        self.basis = basis
        self.ring = ring
        self.group = group
        self._pivots: List[int] = []
        self._signs: Optional[List[int]] = None
        self._inverse: Optional[DomainMatrix] = None
        self._actions: Dict[bytes, List[List[int]]] = {}

    def __repr__(self) -> str:
        return f"<SteinbergModule {self.form.family} n={self.form.n} p={self.p} rank={self.rank} over {self.ring}>"

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def nrows(self) -> int:
        return max(len(self.complex.chambers), 1)

    def base_change(self, ring: Ring) -> "SteinbergModule":
        other = copy.copy(self)
        other.ring = ring
        return other

    def basis_rows(self) -> List[List[int]]:
        """Dense chambers x basis matrix."""
        return columns_to_dense(self.basis, len(self.complex.chambers))

    def chain_of(self, coords: Sequence[int]) -> SparseColumn:
        out: SparseColumn = {}
        for j, c in enumerate(coords):
            if not c:
                continue
            for i, v in self.basis[j].items():
                out[i] = out.get(i, 0) + c * v
        return {k: v for k, v in out.items() if v}

    def coordinates(self, chain: SparseColumn, verify: bool = True) -> List[int]:
        """Integer coordinates of a top cycle in the apartment basis.

        Raises:
            NotACycleError: when the chain is not in the span of the basis.
        """
        values = [chain.get(i, 0) for i in self._pivots]
        if self._signs is not None:
            coords = [s * v for s, v in zip(self._signs, values)]
        else:
            column = DomainMatrix([[QQ(v)] for v in values], (len(values), 1), QQ)
            solved = to_fraction_rows(self._inverse * column)
            if any(row[0].denominator != 1 for row in solved):
                raise NotACycleError("chain has non-integral coordinates")
            coords = [int(row[0]) for row in solved]
        if verify and self.chain_of(coords) != {k: v for k, v in chain.items() if v}:
            raise NotACycleError("chain is not a combination of the apartment basis")
        return coords

    def action(self, g: np.ndarray, verify: bool = False) -> List[List[int]]:
        """Matrix of g on the basis (column j = coordinates of g . basis_j)."""
        g = np.asarray(g, dtype=np.int64) % self.p
        key = g.astype(np.uint8).tobytes()
        cached = self._actions.get(key)
        if cached is not None:
            return cached
        if self.complex.top_dim < 0:
            result = [[1]]
        else:
            perm = self.complex.vertex_permutation(g) if self.rank > 64 else None
            columns = [self.coordinates(self.complex.push_chain(col, g, perm), verify=verify) for col in self.basis]
            result = [[columns[j][i] for j in range(self.rank)] for i in range(self.rank)]
        if len(self._actions) > 8192:
            self._actions.clear()
        self._actions[key] = result
        return result

    def action_of(self, gid: int) -> List[List[int]]:
        if self.group is None:
            raise InvalidInputError("module has no attached group")
        return self.action(self.group.element(gid))

    def homology_rank(self, ring: Optional[Ring] = None) -> int:
        """Top reduced homology rank computed directly over ``ring``."""
        return self.complex.chain_complex(ring or self.ring).homology(self.complex.top_dim)[0]


def _extract_basis(module: SteinbergModule) -> None:
    complex_ = module.complex
    if complex_.top_dim < 0:
        module._pivots = [0]
        module._signs = [1]
        return
    for j, col in enumerate(module.basis):
        if not complex_.is_cycle(col):
            raise BasisExtractionError(f"basis apartment {j} is not a cycle")
    opposite, coefficient = opposite_chamber(complex_)
    pivots = []
    for u in module.labels:
        image = tuple(complex_._image(v, u.astype(np.int64)) for v in opposite)
        pivots.append(complex_.chamber_id(image))
    signs = []
    for j, col in enumerate(module.basis):
        hits = [i for i in pivots if i in col]
        if hits != [pivots[j]] or col[pivots[j]] != coefficient:
            signs = None
            break
        signs.append(coefficient)
    expected = complex_.chain_complex(Ring.integers()).homology(complex_.top_dim)[0]
    if signs is not None and len(module.basis) == expected:
        module._pivots = pivots
        module._signs = signs
        return
    LOGGER.warning("apartment basis failed the opposite-chamber test; solving over QQ")
    _fallback_basis(module, expected)


def _fallback_basis(module: SteinbergModule, expected: int) -> None:
    rows = module.basis_rows()
    M = DomainMatrix([[QQ(v) for v in row] for row in rows], (len(rows), module.rank), QQ)
    _, pivot_rows, rank = rref(M.transpose())
    if rank != module.rank or rank != expected:
        raise BasisExtractionError(
            f"apartment classes span rank {rank}, top homology has rank {expected}"
        )
    if invariant_factors(module.basis, len(rows)) != [1] * rank:
        raise BasisExtractionError("apartment classes do not span a saturated lattice")
    module._pivots = list(pivot_rows)
    module._inverse = M.extract(list(pivot_rows), list(range(rank))).inv()


def steinberg_module(group: GroupLike, ring: Optional[Ring] = None,
                     capacity: Optional[int] = None) -> SteinbergModule:
    """St of the group over ``ring`` (computed over the integers and base-changed)."""
    form = _form_of(group)
    family = "GL" if form.family in ("GL", "SL") else form.family
    limit = DEFAULT_CELL_CAPACITY if capacity is None else int(capacity)
    module = _integral_module(family, form.n, form.p, limit)
    module = module.base_change(ring or Ring.integers())
    if isinstance(group, ClassicalGroup):
        module.group = group
    return module


@lru_cache(maxsize=16)
def _integral_module(family: str, n: int, p: int, limit: int) -> SteinbergModule:
    complex_ = _tits_complex(family, n, p, limit)
    form = complex_.form
    if form.is_formed:
        expected = p ** positive_root_count(family, n)
        labels, _ = closure(positive_root_generators(family, n, p), form.m, p, limit=max(expected, 1),
                            what=f"unipotent radical of {family}_{n}(F{p})")
        labels = [u.astype(np.int64) for u in labels]
    else:
        labels = list(unitriangular_matrices(n, p))
    if complex_.top_dim < 0:
        basis = [{0: 1}]
    elif form.is_formed:
        basis = [frame_chain(complex_, u) for u in labels]
    else:
        basis = [apartment_chain(complex_, u) for u in labels]
    module = SteinbergModule(complex_, labels, basis, Ring.integers())
    _extract_basis(module)
    LOGGER.info("Steinberg module of %s_%d(F%d): rank %d", family, n, p, module.rank)
    return module


def steinberg_rank_formula(family: str, n: int, p: int) -> int:
    return p ** positive_root_count(normalize_family(family), n)
