import numpy as np
import pytest

from core.apartments import (
    ApartmentInput,
    apartment_class,
    express_in_basis,
    relation_chain,
    solomon_tits_basis,
    unitriangular_index,
    verify_relation,
)
from core.building import steinberg_module
from core.exactla import det_mod_p
from core.errors import DimensionMismatchError, InvalidInputError, NotACycleError
from core.groups import FormSpec


@pytest.fixture(scope="module")
def st3_2():
    return steinberg_module(FormSpec.for_family("GL", 3, 2))


@pytest.fixture(scope="module")
def st2_3():
    return steinberg_module(FormSpec.for_family("GL", 2, 3))


@pytest.fixture(scope="module")
def st3_3():
    return steinberg_module(FormSpec.for_family("GL", 3, 3))


class TestInput:
    def test_zero_column(self):
        with pytest.raises(InvalidInputError):
            ApartmentInput(np.array([[1, 0], [0, 0]]), 2)

    def test_shape(self):
        with pytest.raises(DimensionMismatchError):
            ApartmentInput(np.ones((2, 4), dtype=int), 2)

    def test_entries_are_reduced(self):
        assert ApartmentInput(np.array([[4, 1], [0, 5]]), 3).B.tolist() == [[1, 1], [0, 2]]


class TestApartmentClass:
    def test_identity_is_the_first_basis_vector(self, st3_2):
        assert apartment_class(st3_2, np.eye(3, dtype=int)).coords == [1] + [0] * 7

    def test_unipotent_translate_is_a_different_class(self, st2_3):
        u = np.array([[1, 1], [0, 1]])
        cls = apartment_class(st2_3, u)
        assert cls.coords[unitriangular_index(st2_3, [1])] == 1
        assert cls.coords != apartment_class(st2_3, np.eye(2, dtype=int)).coords

    def test_singular_input_gives_zero(self, st2_3):
        assert apartment_class(st2_3, np.array([[1, 2], [1, 2]])).is_zero

    def test_scaling_a_column_keeps_the_class(self, st2_3):
        scaled = apartment_class(st2_3, np.array([[2, 0], [0, 1]]))
        assert scaled.coords == apartment_class(st2_3, np.eye(2, dtype=int)).coords

    @pytest.mark.parametrize("fixture,size", [("st2_3", 2), ("st3_3", 3)])
    def test_swapping_columns_negates_the_class(self, fixture, size, request):
        St = request.getfixturevalue(fixture)
        rng = np.random.default_rng(size)
        checked = 0
        while checked < 4:
            B = rng.integers(0, 3, size=(size, size))
            if det_mod_p(B, 3) == 0:
                continue
            i, j = sorted(rng.choice(size, 2, replace=False))
            swapped = B.copy()
            swapped[:, [i, j]] = swapped[:, [j, i]]
            coords = apartment_class(St, B).coords
            assert any(coords)
            assert apartment_class(St, swapped).coords == [-c for c in coords]
            checked += 1

    def test_not_a_cycle(self, st2_3):
        with pytest.raises(NotACycleError):
            express_in_basis(st2_3, {0: 1})

    def test_formed_families_are_refused(self):
        St = steinberg_module(FormSpec.for_family("Sp", 1, 2))
        with pytest.raises(InvalidInputError):
            apartment_class(St, np.eye(2, dtype=int))


class TestRelation:
    def test_alternating_sum_vanishes(self, st3_2):
        rng = np.random.default_rng(5)
        checked = 0
        while checked < 10:
            B = rng.integers(0, 2, size=(3, 4))
            if not B.any(axis=0).all():
                continue
            assert relation_chain(st3_2, B) == {}
            checked += 1

    def test_verify_relation_on_standard_input(self, st2_3):
        assert verify_relation(st2_3, np.array([[1, 0, 1], [0, 1, 2]])) == {}

    def test_square_input_refused(self, st2_3):
        with pytest.raises(DimensionMismatchError):
            relation_chain(st2_3, np.eye(2, dtype=int))


class TestBasis:
    @pytest.mark.parametrize("n,p,size", [(2, 2, 2), (2, 3, 3), (3, 2, 8)])
    def test_certificate(self, n, p, size):
        cert = solomon_tits_basis(steinberg_module(FormSpec.for_family("GL", n, p)))
        assert cert.size == size
        assert cert.rank_rationals == size
        assert cert.rank_field == size
        assert cert.factors == [1] * size

    def test_unitriangular_index(self, st3_2):
        assert unitriangular_index(st3_2, [0, 0, 0]) == 0
        assert unitriangular_index(st3_2, [1, 0, 1]) == 5
        with pytest.raises(InvalidInputError):
            unitriangular_index(st3_2, [1, 1, 1, 1])
