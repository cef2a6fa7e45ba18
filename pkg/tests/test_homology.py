import pytest

from core.errors import CapacityError, InvalidInputError
from core.exactla import Ring
from core.groups import FormSpec, subgroup_members
from core.homology import (
    GModule,
    ZetaConsistency,
    abelianization_order,
    bar_homology,
    base_case,
    coinvariants,
    component_count,
    connectivity_bound,
    connectivity_homology_check,
    e1_page,
    induce,
    levi_coinvariants,
    orbit_transitivity,
    partial_bases_complex,
    shapiro_check,
    zeta_consistency,
)


class TestModules:
    def test_trivial_coinvariants(self, gl2_2):
        assert coinvariants(GModule.trivial(gl2_2)).as_tuple() == (1, ())
        assert coinvariants(GModule.trivial(gl2_2, 2, Ring.prime_field(2))).as_tuple() == (2, ())

    def test_steinberg_is_a_representation(self, gl3_2):
        assert GModule.steinberg(gl3_2).check(samples=8, seed=2)

    @pytest.mark.parametrize("fixture", ["gl2_2", "gl3_2"])
    def test_steinberg_coinvariants_vanish(self, fixture, request):
        G = request.getfixturevalue(fixture)
        M = GModule.steinberg(G)
        assert coinvariants(M).vanishes
        assert coinvariants(M, use_all=True).vanishes

    def test_restriction_needs_a_subgroup(self, gl2_2, gl3_2):
        with pytest.raises(InvalidInputError):
            GModule.steinberg(gl2_2).restrict(subgroup_members(gl3_2, "U", 1))

    def test_induced_trivial_module(self, gl2_2):
        S = subgroup_members(gl2_2, "Stab", 1)
        M = induce(GModule.trivial(S), gl2_2)
        assert M.rank == 3
        assert M.check(samples=6)
        assert coinvariants(M).as_tuple() == (1, ())

    def test_levi_coinvariants(self, gl3_2):
        assert levi_coinvariants(gl3_2).vanishes

    def test_levi_needs_rank_two(self):
        with pytest.raises(InvalidInputError):
            levi_coinvariants(FormSpec.for_family("GL", 1, 3))


class TestBaseCases:
    @pytest.mark.parametrize("family,p,expected", [
        ("GL", 3, (1, ())),
        ("SL", 5, (1, ())),
        ("Sp", 2, (0, ())),
        ("Sp", 3, (0, ())),
        ("SOnn", 2, (0, (2,))),
        ("SOnn", 3, (1, ())),
        ("SOnn1", 2, (0, ())),
    ])
    def test_rank_one(self, family, p, expected):
        report = base_case(family, p)
        assert report.expected == expected
        assert report.holds


class TestBarComplex:
    def test_sl2_3_abelianization(self, sl2_3):
        assert abelianization_order(sl2_3) == 3
        assert bar_homology(GModule.trivial(sl2_3), 1) == (0, (3,))

    def test_gl2_2_low_degrees(self, gl2_2):
        M = GModule.trivial(gl2_2)
        assert bar_homology(M, 0) == (1, ())
        assert bar_homology(M, 1) == (0, (2,))

    def test_degree_zero_matches_coinvariants(self, gl2_2):
        M = GModule.steinberg(gl2_2)
        assert bar_homology(M, 0) == coinvariants(M).as_tuple()

    def test_capacity(self, sl2_3):
        with pytest.raises(CapacityError):
            bar_homology(GModule.trivial(sl2_3), 2, capacity=1000)

    def test_negative_degree(self, gl2_2):
        with pytest.raises(InvalidInputError):
            bar_homology(GModule.trivial(gl2_2), -1)


class TestShapiro:
    def test_level_one(self, gl3_2):
        report = shapiro_check(gl3_2, 1)
        assert report.complement_side == (0, ())
        assert report.holds

    def test_level_two(self, gl3_2):
        report = shapiro_check(gl3_2, 2)
        assert report.complement_side == (2, ())
        assert report.stabilizer_side == (2, ())
        assert all(report.map_checks.values())

    @pytest.mark.slow
    def test_degree_one(self, gl3_2):
        report = shapiro_check(gl3_2, 1, degree=1)
        assert report.complement_side == report.stabilizer_side


class TestPartialBases:
    def test_gl2_counts(self, gl2_2):
        cpx = partial_bases_complex(gl2_2)
        assert (cpx.count(0), cpx.count(1)) == (3, 6)
        assert cpx.top_dim == 1

    def test_gl3_counts(self, gl3_2):
        cpx = partial_bases_complex(gl3_2)
        assert [cpx.count(k) for k in range(3)] == [7, 42, 168]
        assert cpx.check_face_identities()

    def test_dim_cap_is_clipped(self, gl2_2):
        assert partial_bases_complex(gl2_2, dim_cap=5).top_dim == 1

    def test_isotropic_vectors_only(self):
        cpx = partial_bases_complex(FormSpec.for_family("SOnn", 1, 3))
        assert cpx.count(0) == 4

    def test_capacity(self):
        with pytest.raises(CapacityError):
            partial_bases_complex(FormSpec.for_family("GL", 3, 5), capacity=100)

    def test_orbits(self, gl3_2, sl2_3):
        gl = partial_bases_complex(gl3_2)
        for level in range(3):
            assert orbit_transitivity(gl3_2, gl, level).orbits == 1
        sl = partial_bases_complex(sl2_3)
        assert orbit_transitivity(sl2_3, sl, 0).orbits == 1
        assert orbit_transitivity(sl2_3, sl, 1).orbits == 2

    @pytest.mark.parametrize("size,edges,count", [(4, [(0, 1), (2, 3)], 2), (3, [], 3), (3, [(0, 1), (1, 0), (1, 2)], 1), (0, [], 0)])
    def test_component_count(self, size, edges, count):
        assert component_count(size, edges) == count

    def test_orbit_level_out_of_range(self, gl2_2):
        with pytest.raises(InvalidInputError):
            orbit_transitivity(gl2_2, partial_bases_complex(gl2_2), 3)


class TestConnectivity:
    @pytest.mark.parametrize("family,n,bound", [("GL", 3, 1), ("SL", 2, 0), ("Sp", 3, 0), ("SOnn1", 5, 1), ("Sp", 2, -1)])
    def test_bound(self, family, n, bound):
        assert connectivity_bound(family, n) == bound

    @pytest.mark.parametrize("family,n,p", [("GL", 2, 2), ("GL", 3, 2), ("GL", 2, 3)])
    def test_highly_connected(self, family, n, p):
        report = connectivity_homology_check(FormSpec.for_family(family, n, p))
        assert report.connected
        assert report.holds

    def test_below_range_is_vacuous(self):
        report = connectivity_homology_check(FormSpec.for_family("Sp", 2, 2))
        assert report.homology == {}
        assert report.connected is None


class TestFirstPage:
    def test_bottom_row(self, gl3_2):
        page = e1_page(gl3_2, q_max=0, p_max=2)
        assert page.entries[(0, 0)] == (0, ())
        assert page.descends == {(1, 0): True, (2, 0): True}
        assert page.squares_vanish == {(2, 0): True}

    @pytest.mark.slow
    def test_first_row(self, gl3_2):
        page = e1_page(gl3_2, q_max=1, p_max=2)
        assert page.holds

    def test_row_range(self, gl3_2):
        with pytest.raises(InvalidInputError):
            e1_page(gl3_2, q_max=2)

    @pytest.mark.parametrize("p", [2, 3])
    def test_zeta_is_a_differential(self, p):
        assert zeta_consistency(p).holds

    def test_zeta_with_stabilization(self):
        report = zeta_consistency(2, n=3)
        assert report.factorization == {1: True, 2: True, 3: True}
        assert report.holds
        assert not ZetaConsistency(2, True, True, {1: True, 2: False}).holds
