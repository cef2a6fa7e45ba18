import numpy as np
import pytest

from core.errors import CapacityError, InvalidInputError
from core.exactla import det_mod_p
from core.groups import (
    FormSpec,
    borel_unipotent,
    build_group,
    exhaustive_order,
    face_conjugator,
    generators,
    group_order,
    hat_kappa,
    kappa,
    kappa_matrix,
    levi_embed,
    normalize_family,
    order_formula,
    subgroup_members,
    unipotent_radical_elements,
)


@pytest.mark.parametrize("family,n,p,order", [
    ("GL", 1, 2, 1),
    ("GL", 2, 2, 6),
    ("GL", 2, 3, 48),
    ("GL", 3, 2, 168),
    ("SL", 2, 3, 24),
    ("Sp", 1, 3, 24),
    ("Sp", 2, 2, 720),
    ("SOnn", 1, 2, 2),
    ("SOnn", 1, 3, 2),
    ("SOnn", 2, 2, 72),
    ("SOnn1", 1, 3, 24),
    ("SOnn1", 2, 2, 720),
])
def test_enumerated_order(family, n, p, order):
    assert order_formula(family, n, p) == order
    assert group_order(family, n, p) == order


@pytest.mark.parametrize("family,n,p", [("GL", 2, 3), ("SL", 2, 3), ("Sp", 1, 3), ("SOnn", 2, 2)])
def test_exhaustive_filter_agrees(family, n, p):
    assert exhaustive_order(family, n, p) == order_formula(family, n, p)


def test_exhaustive_filter_refuses_large_spaces():
    with pytest.raises(CapacityError):
        exhaustive_order("Sp", 2, 3)


def test_capacity_guard():
    with pytest.raises(CapacityError) as info:
        build_group("GL", 3, 3, capacity=1000)
    assert info.value.estimated == 11232
    assert info.value.limit == 1000


@pytest.mark.parametrize("alias,family", [("gl", "GL"), ("sp", "Sp"), ("SO_n,n+1", "SOnn1"), ("sonn", "SOnn")])
def test_family_aliases(alias, family):
    assert normalize_family(alias) == family


def test_unknown_family():
    with pytest.raises(InvalidInputError):
        normalize_family("E8")


@pytest.mark.parametrize("family,n,p", [("Sp", 2, 3), ("SOnn", 2, 3), ("SOnn1", 2, 3)])
def test_generators_preserve_the_form(family, n, p):
    form = FormSpec.for_family(family, n, p)
    for g in generators(family, n, p):
        assert form.preserves(g)
        assert det_mod_p(g, p) == 1


def test_identity_has_id_zero(gl3_2):
    assert (gl3_2.element(0) == np.eye(3)).all()
    assert gl3_2.inverse(0) == 0


def test_multiplication_and_inverse(gl3_2):
    for a in (1, 17, 100):
        assert gl3_2.multiply(a, gl3_2.inverse(a)) == 0


class TestSubgroups:
    def test_level_one_orders_in_gl3(self, gl3_2):
        assert subgroup_members(gl3_2, "Stab", 1).order == 24
        assert subgroup_members(gl3_2, "P", 1).order == 24
        assert subgroup_members(gl3_2, "U", 1).order == 4
        assert subgroup_members(gl3_2, "L", 1).order == 6
        assert subgroup_members(gl3_2, "Complement", 1).order == 6

    def test_subgroups_are_closed(self, gl3_2):
        for kind in ("P", "U", "L", "Stab", "Complement"):
            assert subgroup_members(gl3_2, kind, 2).is_closed()

    def test_generating_set_generates(self, gl3_2):
        S = subgroup_members(gl3_2, "Stab", 1)
        assert S._close({0}, S.generating_set()) == set(range(S.order))

    def test_level_out_of_range(self, gl3_2):
        with pytest.raises(InvalidInputError):
            subgroup_members(gl3_2, "U", 4)

    def test_unipotent_radical_elements(self):
        U = unipotent_radical_elements(FormSpec.for_family("GL", 3, 2), 1)
        assert U.shape == (4, 3, 3)
        assert (U[0] == np.eye(3)).all()

    @pytest.mark.parametrize("family,n,p,order", [("GL", 3, 2, 8), ("Sp", 2, 2, 16), ("SOnn", 2, 2, 4)])
    def test_borel_unipotent(self, family, n, p, order):
        assert borel_unipotent(build_group(family, n, p)).order == order


class TestSpecialElements:
    def test_levi_embed_preserves_symplectic_form(self):
        form = FormSpec.for_family("Sp", 2, 3)
        g = levi_embed(form, 1, np.array([[2]]), np.array([[1, 1], [0, 1]]))
        assert form.preserves(g)

    def test_kappa_swaps_with_sign(self):
        k1 = kappa_matrix(FormSpec.for_family("GL", 3, 3), 1)
        assert list(k1[:, 0]) == [0, 0, 1]
        assert list(k1[:, 2]) == [2, 0, 0]
        assert det_mod_p(k1, 3) == 1
        assert (hat_kappa(3, 3) == np.eye(3)).all()

    def test_kappa_needs_rank_three(self):
        with pytest.raises(InvalidInputError):
            kappa_matrix(FormSpec.for_family("GL", 2, 2), 1)

    def test_kappa_on_a_group(self, gl3_2, gl2_2):
        assert (kappa(gl3_2, 3) == np.eye(3)).all()
        assert (kappa(gl3_2, 2) == kappa_matrix(gl3_2.form, 2)).all()
        with pytest.raises(InvalidInputError):
            kappa(gl2_2, 1)

    @pytest.mark.parametrize("degree", [1, 2])
    def test_face_conjugator_moves_face_to_standard_cell(self, degree):
        form = FormSpec.for_family("GL", 3, 3)
        for j in range(degree + 1):
            g = face_conjugator(form, degree, j)
            face = [i for i in range(degree + 1) if i != j]
            for target, source in enumerate(face):
                image = g[:, source] % 3
                assert image[target] in (1, 2)
                assert not np.delete(image, target).any()
            assert det_mod_p(g, 3) == 1

    def test_face_conjugator_symplectic(self):
        form = FormSpec.for_family("Sp", 3, 3)
        for j in range(3):
            assert form.preserves(face_conjugator(form, 2, j))
