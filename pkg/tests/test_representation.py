"""
Tests for representations, the S map and the tube and Siegel domains.
"""

import numpy as np
import pytest


NATURAL_CASES = [
    # (factory name, args, dim_u)
    ("real_line", (), 1),
    ("sym_real", (2,), 2),
    ("sym_real", (3,), 3),
    ("herm_complex", (2,), 4),
    ("spin_factor", (3,), 2),
    ("spin_factor", (4,), 4),
]


def _diagonal_rep(base=(2.0, 1.0)):
    from tubetheta.jordan_core import element, generic
    from tubetheta.representation import BilinearFormRho, RepresentationConfig

    descriptor = generic(2)
    psi = np.array([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    return RepresentationConfig(
        descriptor, BilinearFormRho.standard(2), psi, element(descriptor, base)
    )


@pytest.mark.parametrize("factory,args,dim_u", NATURAL_CASES)
def test_natural_representations(factory, args, dim_u):
    """Built-in representations are normalized and have the expected size."""
    import tubetheta.jordan_core as jc
    from tubetheta.representation import natural_representation

    rep = natural_representation(getattr(jc, factory)(*args))
    assert rep.dim_u == dim_u
    assert rep.is_normalized
    np.testing.assert_allclose(rep.psi(rep.base_point), np.eye(dim_u))


def test_sym_real_psi_is_matrix():
    """psi of a SymReal(2) element is its matrix."""
    from tubetheta.jordan_core import element, sym_real
    from tubetheta.representation import natural_representation, psi_apply

    rep = natural_representation(sym_real(2))
    np.testing.assert_allclose(
        psi_apply(rep, element(sym_real(2), [1.0, 3.0, 2.0])), [[1.0, 2.0], [2.0, 3.0]]
    )


def test_clifford_generators_anticommute():
    """Generators square to I and pairwise anticommute."""
    from tubetheta.representation import clifford_generators

    gammas = clifford_generators(4)
    size = gammas[0].shape[0]
    for i, a in enumerate(gammas):
        np.testing.assert_allclose(a, a.T)
        np.testing.assert_allclose(a @ a, np.eye(size))
        for b in gammas[i + 1 :]:
            np.testing.assert_allclose(a @ b + b @ a, np.zeros((size, size)))


def test_cone_membership():
    """Interior, boundary and exterior points of the half-line."""
    from tubetheta.jordan_core import cone_contains, element, real_line
    from tubetheta.representation import natural_representation

    rep = natural_representation(real_line())
    inside = rep.cone_test(element(real_line(), [1.0]))
    boundary = rep.cone_test(element(real_line(), [0.0]))
    outside = rep.cone_test(element(real_line(), [-1.0]))
    assert inside.member and not inside.boundary
    assert not boundary.member and boundary.boundary
    assert not outside.member and not outside.boundary
    assert cone_contains(element(real_line(), [2.0]), rep)
    assert not cone_contains(element(real_line(), [2.0]), rep, epsilon=2.0)


def test_cone_cushion_only_applies_by_default():
    """A point within the boundary cushion is excluded unless epsilon is given."""
    from tubetheta.jordan_core import cone_contains, element, sym_real
    from tubetheta.representation import natural_representation

    rep = natural_representation(sym_real(2))
    near = element(sym_real(2), [1.0, 1e-12, 0.0])
    assert not cone_contains(near, rep)
    assert cone_contains(near, rep, epsilon=0.0)
    assert not cone_contains(near, rep, epsilon=1e-11)
    check = rep.cone_test(near, epsilon=0.0)
    assert check.member and check.boundary
    assert not cone_contains(element(sym_real(2), [1.0, 0.0, 0.0]), rep, epsilon=0.0)


@pytest.mark.parametrize("factory,args,dim_u", NATURAL_CASES)
def test_natural_representations_use_the_unit(factory, args, dim_u):
    """Built-in representations are based at the Jordan unit."""
    import tubetheta.jordan_core as jc
    from tubetheta.representation import natural_representation

    rep = natural_representation(getattr(jc, factory)(*args))
    assert rep.has_unit_base
    assert rep.is_jordan_normalized


def test_spin_factor_cone_is_light_cone():
    """(l, v) is in the cone iff l > |v|."""
    from tubetheta.jordan_core import element, spin_factor
    from tubetheta.representation import natural_representation

    rep = natural_representation(spin_factor(4))
    assert rep.cone_test(element(spin_factor(4), [2.0, 1.0, 1.0, 1.0])).member
    assert not rep.cone_test(element(spin_factor(4), [1.0, 1.0, 1.0, 0.0])).member


def test_tube_contains():
    """Tube membership looks at the imaginary part only."""
    from tubetheta.jordan_core import element, sym_real
    from tubetheta.representation import natural_representation, tube_contains

    rep = natural_representation(sym_real(2))
    assert tube_contains(rep, element(sym_real(2), [5.0 + 1.0j, -3.0 + 1.0j, 7.0]))
    assert not tube_contains(rep, element(sym_real(2), [1.0j, 1.0j, 2.0j]))


def test_rho_must_be_positive_definite():
    """Indefinite or asymmetric Gram matrices are rejected."""
    from tubetheta.representation import BilinearFormRho

    with pytest.raises(ValueError):
        BilinearFormRho(np.diag([1.0, -1.0]))
    with pytest.raises(ValueError):
        BilinearFormRho(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_rejects_non_self_adjoint_psi():
    """psi must be rho-self-adjoint."""
    from tubetheta.jordan_core import element, generic
    from tubetheta.representation import BilinearFormRho, RepresentationConfig

    psi = np.array([np.eye(2), [[0.0, 1.0], [0.0, 0.0]]])
    with pytest.raises(ValueError, match="self-adjoint"):
        RepresentationConfig(
            generic(2), BilinearFormRho.standard(2), psi, element(generic(2), [1.0, 0.0])
        )


def test_symmetrize_psi():
    """Symmetrization averages with the rho-adjoint."""
    from tubetheta.representation import BilinearFormRho, symmetrize_psi

    raw = np.array([[[0.0, 1.0], [0.0, 0.0]]])
    result = symmetrize_psi(raw, BilinearFormRho.standard(2))
    np.testing.assert_allclose(result[0], [[0.0, 0.5], [0.5, 0.0]])


def test_reduce_domain_drops_null_coordinates():
    """Coordinates with psi = 0 disappear together with their base-point entry."""
    from tubetheta.jordan_core import AlgebraKind
    from tubetheta.representation import BilinearFormRho, RawRepresentation, reduce_domain

    psi = np.array([np.eye(2), np.zeros((2, 2))])
    raw = RawRepresentation(BilinearFormRho.standard(2), psi, np.array([1.0, 5.0]))
    rep = reduce_domain(raw)
    assert rep.dim_v == 1
    assert rep.descriptor.kind == AlgebraKind.GENERIC
    np.testing.assert_allclose(rep.base_point.coords, [1.0])


def test_reduce_domain_projects_dependent_coordinates():
    """A linear dependency among nonzero Psi_k is projected out."""
    from tubetheta.representation import BilinearFormRho, RawRepresentation, reduce_domain

    psi = np.array([np.diag([1.0, 0.0]), np.diag([2.0, 0.0]), np.diag([0.0, 1.0])])
    raw = RawRepresentation(BilinearFormRho.standard(2), psi, np.array([1.0, 0.0, 1.0]))
    rep = reduce_domain(raw)
    assert rep.dim_v == 2
    np.testing.assert_allclose(rep.psi(rep.base_point), np.eye(2), atol=1e-12)


def test_reduce_domain_keeps_injective_input():
    """Injective data comes back unchanged."""
    from tubetheta.jordan_core import sym_real
    from tubetheta.representation import (
        BilinearFormRho,
        RawRepresentation,
        natural_representation,
        reduce_domain,
    )

    rep = natural_representation(sym_real(2))
    raw = RawRepresentation(
        BilinearFormRho.standard(2), rep.psi_basis, rep.base_point.coords, sym_real(2)
    )
    reduced = reduce_domain(raw)
    assert reduced.descriptor == sym_real(2)
    np.testing.assert_allclose(reduced.psi_basis, rep.psi_basis)


def test_normalize_basepoint():
    """Base point (2, 1) normalizes and moves Z^2 to (1/2)Z x Z."""
    import sympy
    from tubetheta.lattice import integer_lattice
    from tubetheta.representation import normalize_basepoint

    rep = _diagonal_rep()
    assert not rep.is_normalized
    normalized, lattice = normalize_basepoint(rep, integer_lattice(2))
    assert normalized.is_normalized
    assert lattice.basis == sympy.Matrix([[sympy.Rational(1, 2), 0], [0, 1]])
    np.testing.assert_allclose(normalized.rho.gram, np.diag([2.0, 1.0]))


def test_normalize_basepoint_is_noop_when_normalized():
    """A normalized representation comes back as is."""
    from tubetheta.jordan_core import sym_real
    from tubetheta.lattice import integer_lattice
    from tubetheta.representation import natural_representation, normalize_basepoint

    rep = natural_representation(sym_real(2))
    lattice = integer_lattice(2)
    assert normalize_basepoint(rep, lattice) == (rep, lattice)


def test_s_form_real_line():
    """S(u, v) = u conj(v) on the real line."""
    from tubetheta.jordan_core import real_line
    from tubetheta.representation import natural_representation, s_form

    rep = natural_representation(real_line())
    np.testing.assert_allclose(s_form(rep, [2.0], [3.0]).coords, [6.0])
    np.testing.assert_allclose(s_form(rep, [1.0j], [1.0j]).coords, [1.0])


def test_s_form_sym_real_is_outer_product():
    """S(u, u) is the matrix u u^T."""
    from tubetheta.jordan_core import sym_real, to_matrix
    from tubetheta.representation import natural_representation, s_form

    rep = natural_representation(sym_real(2))
    s = s_form(rep, [1.0, 2.0], [1.0, 2.0])
    np.testing.assert_allclose(to_matrix(s), [[1.0, 2.0], [2.0, 4.0]])


def test_s_form_dimension_check():
    """Vectors of the wrong size are rejected."""
    from tubetheta.errors import DimensionMismatchError
    from tubetheta.jordan_core import sym_real
    from tubetheta.representation import natural_representation, s_form

    rep = natural_representation(sym_real(2))
    with pytest.raises(DimensionMismatchError):
        s_form(rep, [1.0], [1.0, 2.0])


def test_siegel_domain():
    """Im z - S(u, u) must lie in the cone."""
    from tubetheta.jordan_core import element, real_line
    from tubetheta.representation import natural_representation, siegel_contains

    rep = natural_representation(real_line())
    z = element(real_line(), [1.0j])
    assert siegel_contains(rep, z, [0.5])
    assert not siegel_contains(rep, z, [2.0])


def test_siegel_translation_preserves_height():
    """Translations keep Im z - S(u, u) fixed."""
    from tubetheta.jordan_core import element, sym_real
    from tubetheta.representation import natural_representation, s_form, siegel_translation

    rep = natural_representation(sym_real(2))
    z = element(sym_real(2), [0.3 + 2.0j, -0.1 + 3.0j, 0.2 + 0.5j])
    u = np.array([0.4, -0.3])
    d = np.array([0.2, 0.1])
    moved_z, moved_u = siegel_translation(rep, z, u, d)
    before = z.imag.coords - s_form(rep, u, u).coords.real
    after = moved_z.imag.coords - s_form(rep, moved_u, moved_u).coords.real
    np.testing.assert_allclose(after, before, atol=1e-14)


def test_siegel_needs_jordan_structure():
    """The Siegel domain is only defined for self-dual cones."""
    from tubetheta.errors import UnsupportedConfigurationError
    from tubetheta.jordan_core import element, generic
    from tubetheta.representation import siegel_contains

    rep = _diagonal_rep((1.0, 1.0))
    with pytest.raises(UnsupportedConfigurationError):
        siegel_contains(rep, element(generic(2), [1.0j, 1.0j]), [0.0, 0.0])


def test_generic_sigma_is_trace_of_products():
    """Without Jordan structure sigma(x, y) = tr(psi(x) psi(y))."""
    rep = _diagonal_rep((1.0, 1.0))
    np.testing.assert_allclose(rep.sigma_gram, np.eye(2))


def test_psi_inverse_of_singular_point():
    """psi(0) cannot be inverted."""
    from tubetheta.errors import NotInvertibleError
    from tubetheta.jordan_core import element, real_line
    from tubetheta.representation import natural_representation, psi_inverse

    rep = natural_representation(real_line())
    with pytest.raises(NotInvertibleError):
        psi_inverse(rep, element(real_line(), [0.0]))
