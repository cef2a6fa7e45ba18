import numpy as np
import pytest

from core.building import (
    export_boundary,
    enumerate_isotropic_subspaces,
    export_complex,
    gaussian_binomial,
    reduced_homology,
    steinberg_module,
    steinberg_rank_formula,
    tits_complex,
    wedge_of_spheres,
)
from core.errors import CapacityError, InvalidInputError
from core.exactla import Ring, matmul_int
from core.groups import FormSpec


def test_gaussian_binomial():
    assert gaussian_binomial(3, 1, 2) == 7
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(2, 1, 3) == 4


@pytest.mark.parametrize("family,n,d,count", [("GL", 3, 1, 7), ("GL", 3, 2, 7), ("Sp", 2, 1, 15), ("Sp", 2, 2, 15)])
def test_subspace_counts(family, n, d, count):
    found = enumerate_isotropic_subspaces(FormSpec.for_family(family, n, 2), d)
    assert len(found) == count
    assert [s.key for s in found] == sorted(s.key for s in found)


def test_subspace_dimension_out_of_range():
    with pytest.raises(InvalidInputError):
        enumerate_isotropic_subspaces(FormSpec.for_family("GL", 3, 2), 3)


class TestComplex:
    def test_gl2_is_a_set_of_points(self, gl2_2):
        cpx = tits_complex(gl2_2)
        assert cpx.top_dim == 0
        assert cpx.count(0) == 3
        assert reduced_homology(cpx, 0, Ring.integers()) == (2, ())
        assert reduced_homology(cpx, -1, Ring.integers()) == (0, ())

    def test_gl3_incidence_graph(self, gl3_2):
        cpx = tits_complex(gl3_2)
        assert cpx.count(0) == 14
        assert cpx.count(1) == 21
        assert cpx.chain_complex().check_squares_to_zero()
        assert reduced_homology(cpx, 1) == (8, ())
        assert reduced_homology(cpx, 0) == (0, ())

    def test_rank_one_building_is_empty(self):
        cpx = tits_complex(FormSpec.for_family("SL", 1, 5))
        assert cpx.top_dim == -1
        assert cpx.chambers == [()]
        assert reduced_homology(cpx, -1) == (1, ())

    def test_symplectic_building_is_spherical(self):
        spheres = wedge_of_spheres(tits_complex(FormSpec.for_family("Sp", 2, 2)))
        assert spheres[1] == (16, ())
        assert spheres[0] == (0, ())

    def test_sl_shares_the_gl_complex(self):
        assert tits_complex(FormSpec.for_family("SL", 2, 3)) is tits_complex(FormSpec.for_family("GL", 2, 3))

    def test_capacity(self):
        with pytest.raises(CapacityError):
            tits_complex(FormSpec.for_family("GL", 3, 3), capacity=20)

    def test_export_listing(self, gl2_2):
        text = export_complex(tits_complex(gl2_2))
        lines = text.splitlines()
        assert lines[0] == "# GL n=2 p=2 m=2"
        assert sum(1 for line in lines if line.startswith("v ")) == 3
        assert sum(1 for line in lines if line.startswith("0 ")) == 3

    def test_export_boundary_is_the_augmentation(self, gl2_2):
        assert export_boundary(tits_complex(gl2_2), 0) == [(0, 0, 1), (0, 1, 1), (0, 2, 1)]


class TestSteinbergModule:
    @pytest.mark.parametrize("family,n,p", [("GL", 2, 2), ("GL", 2, 3), ("GL", 3, 2), ("SL", 1, 5), ("Sp", 2, 2)])
    def test_rank_is_a_power_of_p(self, family, n, p):
        St = steinberg_module(FormSpec.for_family(family, n, p))
        assert St.rank == steinberg_rank_formula(family, n, p)
        assert St.homology_rank() == St.rank

    def test_rank_over_fields(self):
        St = steinberg_module(FormSpec.for_family("GL", 3, 2))
        assert St.homology_rank(Ring.prime_field(2)) == 8
        assert St.homology_rank(Ring.rationals()) == 8

    def test_identity_acts_trivially(self, gl3_2):
        St = steinberg_module(gl3_2)
        assert St.action(np.eye(3, dtype=int)) == np.eye(8, dtype=int).tolist()

    def test_action_is_a_homomorphism(self, gl3_2):
        St = steinberg_module(gl3_2)
        for a, b in ((3, 5), (17, 40), (101, 2)):
            ab = gl3_2.multiply(a, b)
            assert St.action_of(ab) == matmul_int(St.action_of(a), St.action_of(b))

    def test_coordinates_of_a_basis_apartment(self, gl2_2):
        St = steinberg_module(gl2_2)
        assert St.coordinates(St.basis[1]) == [0, 1]
        assert St.chain_of([1, -1]) == {
            k: v for k, v in ((k, St.basis[0].get(k, 0) - St.basis[1].get(k, 0)) for k in range(3)) if v
        }

    def test_base_change_keeps_the_basis(self, gl2_2):
        St = steinberg_module(gl2_2)
        St3 = St.base_change(Ring.prime_field(3))
        assert St3.basis is St.basis
        assert St3.ring.label == "F3"
