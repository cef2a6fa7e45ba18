# core/reeder.py
"""
Product maps St_{GL_l} (x) St_{G_{n-l}} -> St_{G_n}, the decomposition of
St_{G_n} over the unipotent radical U^l, and the maps built from them:
stabilization, the fold onto the Levi factor, pi, zeta_m and zeta.

The product is the join of flags. For GL a chamber pair (F, H) goes to the
signed sum over shuffles of the flags F_t + H_j. For the formed families the
GL_l flag is first spread over the hyperbolic space <a_1..a_l, b_1..b_l> by
pairing each prefix with the annihilator of a complementary prefix, then
joined with the chamber of the perpendicular building.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy.combinatorics import Permutation
from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from .apartments import apartment_class, relation_chain
from .building import FlagComplex, GroupLike, SteinbergModule, _form_of, steinberg_module
from .errors import InvalidInputError, TheoremViolation
from .exactla import (
    Ring,
    SparseColumn,
    column_rank,
    dense_to_columns,
    det_mod_p,
    identity_int,
    invariant_factors,
    kernel_mod_p,
    kron_int,
    matmul_int,
    to_int_rows,
)
from .groups import (
    FormSpec,
    complement_indices,
    generators,
    hat_kappa,
    kappa_matrix,
    levi_embed,
    unipotent_radical_elements,
)

LOGGER = logging.getLogger(__name__)


def _perm_sign(perm: Sequence[int]) -> int:
    return 1 if Permutation(list(perm)).is_even else -1


def _family_key(form: FormSpec) -> str:
    return "GL" if form.family in ("GL", "SL") else form.family


# ==============================================
# FLAG JOIN
# ==============================================


class _FlagJoin:
    """Chamber-level product of a GL_l chamber and a G_{n-l} chamber."""

    def __init__(self, target: FlagComplex, left: FlagComplex, right: FlagComplex, level: int):
        self.target = target
        self.left = left
        self.right = right
        self.level = level
        self.form = target.form
        self.n = self.form.n
        self.p = self.form.p
        self.formed = self.form.is_formed
        self.right_cols = complement_indices(self.form.family, self.n, level)
        self.shuffles = self._shuffles()
        self.patterns = self._patterns() if self.formed else [((), 1)]
        self._vertices: Dict[Tuple[int, int, int, int, int], int] = {}
        self._chambers: Dict[Tuple[int, int], SparseColumn] = {}

    def _shuffles(self) -> List[Tuple[Tuple[bool, ...], int]]:
        out = []
        for picks in combinations(range(self.n), self.level):
            steps = tuple(k in picks for k in range(self.n))
            crossings = 0
            seen_right = 0
            for is_left in steps:
                if is_left:
                    crossings += seen_right
                else:
                    seen_right += 1
            out.append((steps, -1 if crossings % 2 else 1))
        return out

    def _patterns(self) -> List[Tuple[Tuple[int, ...], int]]:
        out = []
        ell = self.level
        for pattern in product((0, 1), repeat=ell):
            order = []
            plus = minus = 0
            for side in pattern:
                if side == 0:
                    order.append(plus)
                    plus += 1
                else:
                    order.append(ell - 1 - minus)
                    minus += 1
            out.append((pattern, _perm_sign(order) * (-1) ** minus))
        return out

    def _left_rows(self, phi: Tuple[int, ...], t: int) -> np.ndarray:
        ell = self.level
        if t == 0:
            return np.zeros((0, ell), dtype=np.int64)
        if t == ell:
            return np.eye(ell, dtype=np.int64)
        return self.left.vertices[phi[t - 1]].basis.astype(np.int64)

    def _right_rows(self, psi: Tuple[int, ...], j: int) -> np.ndarray:
        width = len(self.right_cols)
        if j == 0:
            return np.zeros((0, width), dtype=np.int64)
        if not self.formed and j == self.n - self.level:
            return np.eye(width, dtype=np.int64)
        return self.right.vertices[psi[j - 1]].basis.astype(np.int64)

    def _embed(self, rows: np.ndarray, cols: Sequence[int]) -> np.ndarray:
        out = np.zeros((rows.shape[0], self.form.m), dtype=np.int64)
        if rows.shape[0]:
            out[:, list(cols)] = rows
        return out

    def _block_rows(self, phi: Tuple[int, ...], pattern: Tuple[int, ...], s: int) -> np.ndarray:
        ell = self.level
        if not self.formed:
            return self._embed(self._left_rows(phi, s), range(ell))
        t = sum(1 for side in pattern[:s] if side == 0)
        u = s - t
        a_part = self._embed(self._left_rows(phi, t), range(ell))
        annihilator = kernel_mod_p(self._left_rows(phi, ell - u), ell, self.p).astype(np.int64)
        b_part = self._embed(annihilator, range(self.n, self.n + ell))
        return np.vstack([a_part, b_part])

    def _vertex(self, phi_idx: int, pat_idx: int, s: int, psi_idx: int, j: int) -> int:
        key = (phi_idx, pat_idx, s, psi_idx, j)
        cached = self._vertices.get(key)
        if cached is None:
            phi = self.left.chambers[phi_idx]
            psi = self.right.chambers[psi_idx]
            rows = np.vstack([
                self._block_rows(phi, self.patterns[pat_idx][0], s),
                self._embed(self._right_rows(psi, j), self.right_cols),
            ])
            cached = self.target.vertex_id(rows)
            if cached is None:
                raise InvalidInputError("joined flag left the building")
            self._vertices[key] = cached
        return cached

    def chamber_chain(self, phi_idx: int, psi_idx: int) -> SparseColumn:
        key = (phi_idx, psi_idx)
        if key in self._chambers:
            return self._chambers[key]
        chain: SparseColumn = {}
        length = self.n if self.formed else self.n - 1
        for pat_idx, (_, eps) in enumerate(self.patterns):
            for steps, sign in self.shuffles:
                s = j = 0
                ids = []
                for k in range(length):
                    if steps[k]:
                        s += 1
                    else:
                        j += 1
                    ids.append(self._vertex(phi_idx, pat_idx, s, psi_idx, j))
                target = self.target.chamber_id(tuple(ids))
                if target is None:
                    raise InvalidInputError("joined flag is not a chamber")
                chain[target] = chain.get(target, 0) + eps * sign
        chain = {c: v for c, v in chain.items() if v}
        self._chambers[key] = chain
        return chain


# ==============================================
# PRODUCT MAP
# ==============================================


@dataclass
class ProductMapHandle:
    """Matrix of the product map; column i * rank_right + j is the image of x_i (x) y_j."""

    family: str
    n: int
    p: int
    level: int
    left: SteinbergModule
    right: SteinbergModule
    target: SteinbergModule
    matrix: List[List[int]]
    chains: List[SparseColumn]
    ring: Ring = field(default_factory=Ring.integers)

    @property
    def rank_left(self) -> int:
        return self.left.rank

    @property
    def rank_right(self) -> int:
        return self.right.rank

    @property
    def rank_target(self) -> int:
        return self.target.rank

    @property
    def ncols(self) -> int:
        return self.rank_left * self.rank_right

    def column_index(self, i: int, j: int) -> int:
        return i * self.rank_right + j

    def column_rank(self, ring: Optional[Ring] = None) -> int:
        return column_rank(dense_to_columns(self.matrix), self.rank_target, ring or self.ring)

    def is_injective(self) -> bool:
        cols = dense_to_columns(self.matrix)
        factors = invariant_factors(cols, self.rank_target)
        return len(factors) == self.ncols and all(f == 1 for f in factors)

    def apply(self, tensor: Sequence[int]) -> List[int]:
        return [sum(row[k] * tensor[k] for k in range(self.ncols) if tensor[k]) for row in self.matrix]


def reeder_product(group: GroupLike, level: int, ring: Optional[Ring] = None) -> ProductMapHandle:
    """Product map at level l for the group's family (SL uses the GL buildings)."""
    form = _form_of(group)
    if not 1 <= level <= form.n:
        raise InvalidInputError(f"level {level} outside 1..{form.n}")
    handle = _product(_family_key(form), form.n, form.p, level)
    if ring is not None:
        handle = ProductMapHandle(**{**handle.__dict__, "ring": ring})
    return handle


@lru_cache(maxsize=32)
def _product(family: str, n: int, p: int, level: int) -> ProductMapHandle:
    form = FormSpec.for_family(family, n, p)
    left = steinberg_module(FormSpec.for_family("GL", level, p))
    right = steinberg_module(FormSpec.for_family(family, n - level, p))
    target = steinberg_module(form)
    join = _FlagJoin(target.complex, left.complex, right.complex, level)
    chains: List[SparseColumn] = []
    columns: List[List[int]] = []
    for x in left.basis:
        for y in right.basis:
            chain: SparseColumn = {}
            for phi, xv in x.items():
                for psi, yv in y.items():
                    for c, v in join.chamber_chain(phi, psi).items():
                        chain[c] = chain.get(c, 0) + xv * yv * v
            chain = {c: v for c, v in chain.items() if v}
            chains.append(chain)
            columns.append(target.coordinates(chain))
    matrix = [[columns[k][i] for k in range(len(columns))] for i in range(target.rank)]
    LOGGER.info("product map %s_%d(F%d) at level %d: %dx%d", family, n, p, level, target.rank, len(columns))
    return ProductMapHandle(family, n, p, level, left, right, target, matrix, chains)


def stabilization_map(family: str, n: int, p: int, ring: Optional[Ring] = None) -> List[List[int]]:
    """St_{G_{n-1}} -> St_{G_n}: the level-1 product with St_{GL_1} = R."""
    if n < 1:
        raise InvalidInputError("stabilization needs n >= 1")
    handle = reeder_product(FormSpec.for_family(family, n, p), 1, ring)
    return handle.matrix


def levi_equivariance(group: GroupLike, level: int, samples: int = 10, seed: int = 0) -> int:
    """Checks product(g1 x (x) g2 y) = embed(g1, g2) product(x (x) y) on random Levi elements."""
    form = _form_of(group)
    handle = reeder_product(form, level)
    key = _family_key(form)
    target_form = FormSpec.for_family(key, form.n, form.p)
    right_form = FormSpec.for_family(key, form.n - level, form.p)
    right_gens = generators(key, form.n - level, form.p)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        g1 = _random_invertible(rng, level, form.p)
        g2 = _random_word(rng, right_gens, right_form.m, form.p)
        g = levi_embed(target_form, level, g1, g2)
        lhs = matmul_int(handle.matrix, kron_int(handle.left.action(g1), handle.right.action(g2)))
        rhs = matmul_int(handle.target.action(g), handle.matrix)
        if lhs != rhs:
            raise TheoremViolation("product map is Levi-equivariant", f"level {level}, failing sample")
    return samples


def _random_invertible(rng: np.random.Generator, size: int, p: int) -> np.ndarray:
    while True:
        g = rng.integers(0, p, size=(size, size))
        if size == 0 or det_mod_p(g, p):
            return g


def _random_word(rng: np.random.Generator, gens: List[np.ndarray], m: int, p: int, length: int = 12) -> np.ndarray:
    g = np.eye(m, dtype=np.int64)
    if not gens:
        return g
    for k in rng.integers(0, len(gens), size=length):
        g = (gens[int(k)] @ g) % p
    return g


# ==============================================
# DECOMPOSITION OVER U^l
# ==============================================


@dataclass
class DecompositionCertificate:
    family: str
    n: int
    p: int
    level: int
    translates: int
    combined_rank: int
    target_rank: int
    factors: List[int]
    block: List[List[int]]
    projection: List[List[int]]
    fold: List[List[int]]

    @property
    def is_direct_sum(self) -> bool:
        return (
            self.combined_rank == self.target_rank
            and len(self.factors) == self.target_rank
            and all(f == 1 for f in self.factors)
        )


def verify_decomposition(group: GroupLike, level: int) -> DecompositionCertificate:
    """Certifies St_{G_n} = sum over u in U^l of u . (St_{GL_l} (x) St_{G_{n-l}}).

    Raises:
        TheoremViolation: when the block matrix is not square or not unimodular.
    """
    form = _form_of(group)
    if not 1 <= level <= form.n:
        raise InvalidInputError(f"level {level} outside 1..{form.n}")
    return _decomposition(_family_key(form), form.n, form.p, level)


@lru_cache(maxsize=32)
def _decomposition(family: str, n: int, p: int, level: int) -> DecompositionCertificate:
    handle = _product(family, n, p, level)
    form = FormSpec.for_family(family, n, p)
    St = handle.target
    U = unipotent_radical_elements(form, level)
    columns: List[List[int]] = []
    for u in U:
        u = u.astype(np.int64)
        for chain in handle.chains:
            columns.append(St.coordinates(St.complex.push_chain(chain, u)))
    size = St.rank
    combined = len(columns)
    statement = "St decomposes over the unipotent radical"
    if combined != size:
        raise TheoremViolation(statement, f"{combined} translate columns for rank {size}")
    factors = invariant_factors([{i: c[i] for i in range(size) if c[i]} for c in columns], size)
    if len(factors) != size:
        raise TheoremViolation(statement, f"block matrix has rank {len(factors)} < {size}")
    if any(f != 1 for f in factors):
        raise TheoremViolation(statement, f"block matrix is not unimodular: {factors}")
    block = [[columns[k][i] for k in range(size)] for i in range(size)]
    inverse = DomainMatrix([[ZZ(v) for v in row] for row in block], (size, size), ZZ).convert_to(QQ).inv()
    inverse_rows = to_int_rows(inverse)
    width = handle.ncols
    projection = inverse_rows[:width]
    fold = [[sum(inverse_rows[b * width + r][c] for b in range(len(U))) for c in range(size)]
            for r in range(width)]
    LOGGER.info("decomposition of %s_%d(F%d) at level %d over %d translates", family, n, p, level, len(U))
    return DecompositionCertificate(family, n, p, level, len(U), len(factors), size, factors,
                                    block, projection, fold)


def reeder_projection(group: GroupLike, level: int, x: Sequence[int]) -> List[int]:
    """The identity-translate component of x in the decomposition over U^l."""
    cert = verify_decomposition(group, level)
    return [sum(row[c] * x[c] for c in range(len(x)) if x[c]) for row in cert.projection]


def reeder_fold(group: GroupLike, level: int, x: Sequence[int]) -> List[int]:
    """The map u . y -> y summed over all translates (lands in St_{GL_l} (x) St_{G_{n-l}})."""
    cert = verify_decomposition(group, level)
    return [sum(row[c] * x[c] for c in range(len(x)) if x[c]) for row in cert.fold]


# ==============================================
# PI AND ZETA
# ==============================================


def _reduce_rows(rows: Sequence[Sequence[int]], ring: Ring) -> List[List[int]]:
    """Integer entries read in ``ring``: unchanged over Z and Q, reduced mod the characteristic over F_q."""
    if ring.kind == "F":
        return [[v % ring.p for v in row] for row in rows]
    return [list(row) for row in rows]


def pi_map(p: int, ring: Optional[Ring] = None) -> List[List[int]]:
    """pi: St_{GL_3} -> St_{GL_2}, the fold at level 2, with coefficients in ``ring`` (Z by default)."""
    return _reduce_rows(_integral_pi(p), ring or Ring.integers())


@lru_cache(maxsize=8)
def _integral_pi(p: int) -> List[List[int]]:
    cert = _decomposition("GL", 3, p, 2)
    matrix = cert.fold
    expected = [[1 if k // (p * p) == x else 0 for k in range(p ** 3)] for x in range(p)]
    if matrix != expected:
        raise TheoremViolation("pi sends the class of (x, y, z) to the class of x")
    return matrix


@dataclass
class ZetaMap:
    p: int
    components: Dict[int, List[List[int]]]
    total: List[List[int]]
    ring: Ring = field(default_factory=Ring.integers)

    def base_change(self, ring: Ring) -> "ZetaMap":
        components = {m: _reduce_rows(c, ring) for m, c in self.components.items()}
        return ZetaMap(self.p, components, _reduce_rows(self.total, ring), ring)


def zeta_map(p: int, ring: Optional[Ring] = None) -> ZetaMap:
    """zeta_m = pi o rho(hat kappa_m) and zeta = zeta_1 - zeta_2 + zeta_3, over ``ring`` (Z by default)."""
    zeta = _integral_zeta(p)
    return zeta if ring is None or ring.kind == "Z" else zeta.base_change(ring)


@lru_cache(maxsize=8)
def _integral_zeta(p: int) -> ZetaMap:
    pi = _integral_pi(p)
    St3 = steinberg_module(FormSpec.for_family("GL", 3, p))
    components = {m: matmul_int(pi, St3.action(hat_kappa(m, p))) for m in (1, 2, 3)}
    rows, cols = len(pi), len(pi[0])
    total = [[components[1][i][j] - components[2][i][j] + components[3][i][j] for j in range(cols)]
             for i in range(rows)]
    return ZetaMap(p, components, total)


def zeta_of_class(p: int, B: np.ndarray) -> List[int]:
    """pi[[k1 B]] - pi[[k2 B]] + pi[[k3 B]] computed class by class."""
    St3 = steinberg_module(FormSpec.for_family("GL", 3, p))
    pi = pi_map(p)
    out = [0] * p
    for m, sign in ((1, 1), (2, -1), (3, 1)):
        moved = (hat_kappa(m, p) @ np.asarray(B, dtype=np.int64)) % p
        coords = apartment_class(St3, moved).coords
        for i in range(p):
            out[i] += sign * sum(pi[i][k] * coords[k] for k in range(len(coords)))
    return out


@dataclass
class ZetaSurjectivity:
    p: int
    ring: Ring
    rank: int
    expected: int
    factors: List[int]

    @property
    def surjective(self) -> bool:
        if self.ring.kind == "Z":
            return self.factors == [1] * self.expected
        return self.rank == self.expected


def verify_zeta_surjective(p: int, ring: Optional[Ring] = None) -> ZetaSurjectivity:
    ring = ring or Ring.integers()
    factors = invariant_factors(dense_to_columns(zeta_map(p).total), p)
    if ring.kind == "F":
        rank = column_rank(dense_to_columns(zeta_map(p, ring).total), p, ring)
    else:
        rank = len(factors)
    return ZetaSurjectivity(p, ring, rank, p, factors)


# ==============================================
# WORKED CALCULATION
# ==============================================


@dataclass
class CalculationRecord:
    p: int
    a: int
    steps: List[Tuple[str, bool]]
    zeta: List[int]
    expected: List[int]

    @property
    def holds(self) -> bool:
        return all(ok for _, ok in self.steps) and self.zeta == self.expected


def _unitriangular(x: int, y: int, z: int) -> np.ndarray:
    return np.array([[1, x, y], [0, 1, z], [0, 0, 1]], dtype=np.int64)


def apartment_calculation(p: int, a: int) -> CalculationRecord:
    """zeta on the class of the unitriangular matrix with x = a, term by term."""
    a %= p
    St3 = steinberg_module(FormSpec.for_family("GL", 3, p))
    k1, k2 = hat_kappa(1, p), hat_kappa(2, p)
    U_a = _unitriangular(a, 0, 0)
    steps: List[Tuple[str, bool]] = []

    def cls(B: np.ndarray) -> SparseColumn:
        return apartment_class(St3, np.asarray(B) % p).chain

    def negated(chain: SparseColumn) -> SparseColumn:
        return {c: -v for c, v in chain.items()}

    B1 = np.array([[1, 0, 0], [0, 1, 0], [0, a, 1]], dtype=np.int64)
    steps.append(("[[k1 U_a]] = -[[B1]] by reordering and rescaling columns",
                  cls(k1 @ U_a) == negated(cls(B1))))
    steps.append(("[[k2 U_a]] = -[[U(0, a, 0)]] by reordering and rescaling columns",
                  cls(k2 @ U_a) == negated(cls(_unitriangular(0, a, 0)))))
    if a:
        relation = np.array([[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, a, 1]], dtype=np.int64)
        steps.append(("deleted-column relation on [1 0 0 0; 0 1 1 0; 0 0 a 1]",
                      not relation_chain(St3, relation)))
        inv = pow(a, -1, p)
        rhs: SparseColumn = dict(cls(np.eye(3, dtype=np.int64)))
        for c, v in cls(_unitriangular(0, 0, inv)).items():
            rhs[c] = rhs.get(c, 0) - v
        steps.append(("[[B1]] = [[I]] - [[U(0, 0, 1/a)]]", cls(B1) == {c: v for c, v in rhs.items() if v}))
    zeta = zeta_map(p).total
    coords = apartment_class(St3, U_a).coords
    value = [sum(zeta[i][k] * coords[k] for k in range(len(coords))) for i in range(p)]
    expected = [0] * p
    expected[0] += 1
    if a:
        expected[a] += 1
    steps.append(("zeta agrees with the class-by-class formula", value == zeta_of_class(p, U_a)))
    return CalculationRecord(p, a, steps, value, expected)


# ==============================================
# FACTORIZATION THROUGH THE TENSOR MODULES
# ==============================================


@dataclass
class FactorizationReport:
    n: int
    p: int
    agreements: Dict[int, bool]

    @property
    def holds(self) -> bool:
        return all(self.agreements.values())


def factorization_check(n: int, p: int) -> FactorizationReport:
    """Fold_2 o rho(kappa_m) o P_3 = (id (x) stab) o (pi (x) id) o (rho(hat kappa_m) (x) id) on GL_n."""
    if n < 3:
        raise InvalidInputError("factorization check needs n >= 3")
    form = FormSpec.for_family("GL", n, p)
    P3 = _product("GL", n, p, 3)
    fold2 = _decomposition("GL", n, p, 2).fold
    St3 = steinberg_module(FormSpec.for_family("GL", 3, p))
    stab = _product("GL", n - 2, p, 1).matrix
    r2 = steinberg_module(FormSpec.for_family("GL", 2, p)).rank
    r_rest = P3.rank_right
    right = kron_int(identity_int(r2), stab)
    middle = kron_int(pi_map(p), identity_int(r_rest))
    agreements = {}
    for m in (1, 2, 3):
        lhs = matmul_int(fold2, matmul_int(P3.target.action(kappa_matrix(form, m)), P3.matrix))
        rhs = matmul_int(right, matmul_int(middle, kron_int(St3.action(hat_kappa(m, p)), identity_int(r_rest))))
        agreements[m] = lhs == rhs
    return FactorizationReport(n, p, agreements)
