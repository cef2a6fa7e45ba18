import pytest

from core.errors import InvalidInputError
from core.exactla import Ring
from core.groups import FormSpec
from core.reeder import (
    apartment_calculation,
    factorization_check,
    levi_equivariance,
    pi_map,
    reeder_fold,
    reeder_product,
    reeder_projection,
    stabilization_map,
    verify_decomposition,
    verify_zeta_surjective,
    zeta_map,
    zeta_of_class,
)

GL3_2 = FormSpec.for_family("GL", 3, 2)


def _unit(size, k):
    return [1 if i == k else 0 for i in range(size)]


class TestProduct:
    @pytest.mark.parametrize("level,left,right", [(1, 1, 2), (2, 2, 1), (3, 8, 1)])
    def test_shapes_and_injectivity(self, level, left, right):
        handle = reeder_product(GL3_2, level)
        assert (handle.rank_left, handle.rank_right, handle.rank_target) == (left, right, 8)
        assert len(handle.matrix) == 8
        assert all(len(row) == left * right for row in handle.matrix)
        assert handle.is_injective()
        assert handle.column_rank(Ring.prime_field(2)) == left * right

    def test_column_index(self):
        handle = reeder_product(GL3_2, 1)
        assert handle.column_index(0, 1) == 1
        assert handle.apply(_unit(2, 1)) == [row[1] for row in handle.matrix]

    def test_level_range(self):
        with pytest.raises(InvalidInputError):
            reeder_product(GL3_2, 0)

    def test_symplectic_product(self):
        handle = reeder_product(FormSpec.for_family("Sp", 2, 2), 1)
        assert (handle.rank_left, handle.rank_right, handle.rank_target) == (1, 2, 16)
        assert handle.is_injective()

    def test_stabilization(self):
        stab = stabilization_map("GL", 2, 3)
        assert len(stab) == 3
        assert all(len(row) == 1 for row in stab)

    def test_levi_equivariance(self):
        assert levi_equivariance(GL3_2, 1, samples=4, seed=7) == 4
        assert levi_equivariance(FormSpec.for_family("Sp", 2, 2), 1, samples=3, seed=1) == 3


class TestDecomposition:
    @pytest.mark.parametrize("family,n,p,level,translates", [
        ("GL", 3, 2, 1, 4),
        ("GL", 3, 2, 2, 4),
        ("GL", 2, 3, 1, 3),
        ("Sp", 2, 2, 1, 8),
    ])
    def test_direct_sum(self, family, n, p, level, translates):
        cert = verify_decomposition(FormSpec.for_family(family, n, p), level)
        assert cert.translates == translates
        assert cert.is_direct_sum

    def test_projection_and_fold_recover_tensors(self):
        handle = reeder_product(GL3_2, 2)
        for k in range(handle.ncols):
            column = [row[k] for row in handle.matrix]
            assert reeder_projection(GL3_2, 2, column) == _unit(handle.ncols, k)
            assert reeder_fold(GL3_2, 2, column) == _unit(handle.ncols, k)

    def test_fold_ignores_the_translate(self):
        cert = verify_decomposition(GL3_2, 1)
        width = reeder_product(GL3_2, 1).ncols
        for b in range(cert.translates):
            column = [row[b * width] for row in cert.block]
            assert reeder_fold(GL3_2, 1, column) == _unit(width, 0)


class TestZeta:
    @pytest.mark.parametrize("p", [2, 3])
    def test_pi_shape(self, p):
        pi = pi_map(p)
        assert len(pi) == p
        assert all(sum(row) == p * p for row in pi)

    @pytest.mark.parametrize("p", [2, 3])
    def test_zeta_surjective(self, p):
        result = verify_zeta_surjective(p)
        assert result.rank == p
        assert result.surjective
        assert verify_zeta_surjective(p, Ring.prime_field(p)).surjective

    def test_maps_over_other_rings(self):
        F3 = Ring.prime_field(3)
        assert pi_map(3, F3) == pi_map(3)
        integral = zeta_map(3)
        reduced = zeta_map(3, F3)
        assert reduced.ring == F3
        assert integral.ring == Ring.integers()
        assert reduced.total == [[v % 3 for v in row] for row in integral.total]
        assert all(0 <= v < 3 for c in reduced.components.values() for row in c for v in row)
        assert zeta_map(3, Ring.rationals()).total == integral.total

    def test_zeta_is_alternating_sum(self):
        zeta = zeta_map(2)
        c = zeta.components
        assert zeta.total[0][0] == c[1][0][0] - c[2][0][0] + c[3][0][0]

    @pytest.mark.parametrize("p,a,expected", [(2, 0, [1, 0]), (2, 1, [1, 1]), (3, 2, [1, 0, 1])])
    def test_calculation(self, p, a, expected):
        record = apartment_calculation(p, a)
        assert record.expected == expected
        assert record.zeta == expected
        assert record.holds

    def test_zeta_of_identity_class(self):
        assert zeta_of_class(3, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == [1, 0, 0]


class TestFactorization:
    def test_gl3(self):
        report = factorization_check(3, 2)
        assert report.agreements == {1: True, 2: True, 3: True}

    @pytest.mark.slow
    def test_gl4(self):
        assert factorization_check(4, 2).holds

    def test_needs_rank_three(self):
        with pytest.raises(InvalidInputError):
            factorization_check(2, 2)
