"""
Tests for Jordan algebra descriptors and element arithmetic.
"""

import numpy as np
import pytest


DESCRIPTOR_CASES = [
    # (factory name, args, dim, rank)
    ("real_line", (), 1, 1),
    ("sym_real", (2,), 3, 2),
    ("sym_real", (3,), 6, 3),
    ("herm_complex", (2,), 4, 2),
    ("spin_factor", (3,), 3, 2),
    ("spin_factor", (5,), 5, 2),
    ("generic", (4,), 4, 0),
]


@pytest.mark.parametrize("factory,args,dim,rank", DESCRIPTOR_CASES)
def test_descriptor_dimensions(factory, args, dim, rank):
    """Dimension and rank of each built-in kind."""
    import tubetheta.jordan_core as jc

    descriptor = getattr(jc, factory)(*args)
    assert descriptor.dim == dim
    assert descriptor.rank == rank
    assert len(descriptor.labels) == dim


def test_direct_sum_descriptor():
    """Direct sums add dimensions and ranks and offset their summands."""
    from tubetheta.jordan_core import direct_sum, real_line, sym_real

    descriptor = direct_sum(real_line(), sym_real(2))
    assert descriptor.dim == 4
    assert descriptor.rank == 3
    assert descriptor.offsets() == [(0, 1), (1, 4)]
    assert descriptor.name == "DirectSum(RealLine, SymReal(2))"
    assert descriptor.labels[0] == "s0.x"


def test_invalid_descriptors():
    """Bad parameters are rejected at construction."""
    from tubetheta.jordan_core import AlgebraDescriptor, AlgebraKind, direct_sum, spin_factor

    with pytest.raises(ValueError):
        spin_factor(1)
    with pytest.raises(ValueError):
        AlgebraDescriptor(AlgebraKind.SYM_REAL, 0)
    with pytest.raises(ValueError):
        direct_sum()


def test_descriptor_from_spec():
    """Scenario-file descriptors round through to_spec."""
    from tubetheta.errors import ScenarioError
    from tubetheta.jordan_core import descriptor_from_spec, direct_sum, real_line, sym_real

    descriptor = direct_sum(real_line(), sym_real(2))
    assert descriptor_from_spec(descriptor.to_spec()) == descriptor

    with pytest.raises(ScenarioError) as info:
        descriptor_from_spec({"kind": "Octonion"})
    assert "allowed" in str(info.value)
    with pytest.raises(ScenarioError):
        descriptor_from_spec({"kind": "SymReal"})


def test_element_validation():
    """Coordinates must match the descriptor."""
    from tubetheta.errors import DescriptorMismatchError, DimensionMismatchError
    from tubetheta.jordan_core import element, real_line, sym_real

    with pytest.raises(DimensionMismatchError):
        element(sym_real(2), [1.0, 2.0])
    with pytest.raises(DescriptorMismatchError):
        element(real_line(), [1.0]) + element(sym_real(1), [1.0])

    z = element(real_line(), [1.0 + 0.0j])
    assert z.is_real
    w = element(real_line(), [1.0 + 2.0j])
    assert not w.is_real
    assert w.imag.coords[0] == 2.0


def test_unit_is_identity():
    """e o x = x for every Jordan kind."""
    from tubetheta.jordan_core import (
        direct_sum,
        herm_complex,
        jordan_product,
        real_line,
        spin_factor,
        sym_real,
        unit,
    )
    from tubetheta.sample_points import random_element

    rng = np.random.default_rng(3)
    for descriptor in (
        real_line(),
        sym_real(3),
        herm_complex(2),
        spin_factor(4),
        direct_sum(real_line(), spin_factor(3)),
    ):
        x = random_element(descriptor, rng)
        product = jordan_product(unit(descriptor), x)
        np.testing.assert_allclose(product.coords, x.coords, atol=1e-14)


def test_sym_real_inverse_and_determinant():
    """Inverse and determinant of [[2, 1], [1, 4]]."""
    from tubetheta.jordan_core import element, inverse, jordan_determinant, sym_real

    x = element(sym_real(2), [2.0, 4.0, 1.0])
    assert jordan_determinant(x) == pytest.approx(7.0)
    np.testing.assert_allclose(inverse(x).coords, [4 / 7, 2 / 7, -1 / 7], atol=1e-14)


def test_spin_factor_inverse_and_product():
    """Spin factor inverse is the conjugate over the norm."""
    from tubetheta.jordan_core import (
        element,
        inverse,
        jordan_determinant,
        jordan_product,
        spin_factor,
        unit,
    )

    descriptor = spin_factor(3)
    x = element(descriptor, [2.0, 1.0, 0.0])
    assert jordan_determinant(x) == pytest.approx(3.0)
    np.testing.assert_allclose(inverse(x).coords, [2 / 3, -1 / 3, 0.0])
    np.testing.assert_allclose(
        jordan_product(x, inverse(x)).coords, unit(descriptor).coords, atol=1e-14
    )


def test_hermitian_product_is_commutative():
    """The Jordan product is symmetric even for complex matrices."""
    from tubetheta.jordan_core import herm_complex, jordan_product
    from tubetheta.sample_points import random_element

    rng = np.random.default_rng(11)
    a = random_element(herm_complex(3), rng)
    b = random_element(herm_complex(3), rng)
    np.testing.assert_allclose(
        jordan_product(a, b).coords, jordan_product(b, a).coords, atol=1e-13
    )


def test_complex_inverse():
    """Inverses extend to the complexification."""
    from tubetheta.jordan_core import element, inverse, jordan_product, sym_real, unit

    z = element(sym_real(2), [0.5 + 1.0j, -0.2 + 2.0j, 0.1 + 0.3j])
    product = jordan_product(z, inverse(z))
    np.testing.assert_allclose(product.coords, unit(sym_real(2)).coords, atol=1e-13)


def test_singular_element_raises():
    """[[1, 1], [1, 1]] has no inverse."""
    from tubetheta.errors import NotInvertibleError
    from tubetheta.jordan_core import element, inverse, sym_real

    with pytest.raises(NotInvertibleError) as info:
        inverse(element(sym_real(2), [1.0, 1.0, 1.0]))
    assert info.value.determinant == pytest.approx(0.0)


def test_generic_kind_has_no_jordan_structure():
    """Generic descriptors refuse Jordan operations."""
    from tubetheta.errors import UnsupportedOperationError
    from tubetheta.jordan_core import element, generic, jordan_product, unit

    x = element(generic(2), [1.0, 2.0])
    with pytest.raises(UnsupportedOperationError):
        jordan_product(x, x)
    with pytest.raises(UnsupportedOperationError):
        unit(generic(2))


def test_trace_form_of_unit():
    """sigma(e, e) equals the rank."""
    from tubetheta.jordan_core import herm_complex, spin_factor, sym_real, trace_form, unit

    for descriptor in (sym_real(3), herm_complex(2), spin_factor(4)):
        e = unit(descriptor)
        assert trace_form(e, e) == pytest.approx(descriptor.rank)


def test_matrix_roundtrip():
    """to_matrix and from_matrix invert each other on Hermitian matrices."""
    from tubetheta.jordan_core import from_matrix, herm_complex, to_matrix
    from tubetheta.sample_points import random_element

    x = random_element(herm_complex(3), np.random.default_rng(5))
    m = to_matrix(x)
    np.testing.assert_allclose(m, m.conj().T)
    np.testing.assert_allclose(from_matrix(herm_complex(3), m).coords, x.coords, atol=1e-14)


JORDAN_KINDS = [
    # (factory name, args)
    ("real_line", ()),
    ("sym_real", (3,)),
    ("herm_complex", (2,)),
    ("spin_factor", (4,)),
    ("direct_sum", None),
]


def _descriptor(factory, args):
    import tubetheta.jordan_core as jc

    if factory == "direct_sum":
        return jc.direct_sum(jc.real_line(), jc.sym_real(2), jc.spin_factor(3))
    return getattr(jc, factory)(*args)


@pytest.mark.parametrize("factory,args", JORDAN_KINDS)
def test_jordan_identity(factory, args):
    """(a o b) o a^2 = a o (b o a^2) on random elements."""
    from tubetheta.jordan_core import jordan_product
    from tubetheta.sample_points import random_element

    descriptor = _descriptor(factory, args)
    rng = np.random.default_rng(21)
    for _ in range(25):
        a = random_element(descriptor, rng)
        b = random_element(descriptor, rng)
        a2 = jordan_product(a, a)
        left = jordan_product(jordan_product(a, b), a2)
        right = jordan_product(a, jordan_product(b, a2))
        scale = max(1.0, float(np.max(np.abs(left.coords))))
        np.testing.assert_allclose(left.coords, right.coords, atol=1e-12 * scale)


@pytest.mark.parametrize("factory,args", JORDAN_KINDS)
def test_trace_form_is_associative(factory, args):
    """sigma(a o b, c) = sigma(b, a o c) on random elements."""
    from tubetheta.jordan_core import jordan_product, trace_form
    from tubetheta.sample_points import random_element

    descriptor = _descriptor(factory, args)
    rng = np.random.default_rng(22)
    for _ in range(25):
        a, b, c = (random_element(descriptor, rng) for _ in range(3))
        left = trace_form(jordan_product(a, b), c)
        right = trace_form(b, jordan_product(a, c))
        assert left == pytest.approx(right, rel=1e-11, abs=1e-11)


@pytest.mark.parametrize("factory,args", JORDAN_KINDS)
def test_inverse_is_an_involution(factory, args):
    """inverse(inverse(a)) = a and a o a^{-1} = e."""
    from tubetheta.jordan_core import inverse, jordan_product, unit
    from tubetheta.sample_points import random_invertible_element

    descriptor = _descriptor(factory, args)
    e = unit(descriptor)
    rng = np.random.default_rng(23)
    for _ in range(25):
        a = random_invertible_element(descriptor, rng)
        a_inv = inverse(a)
        assert a_inv.is_real
        np.testing.assert_allclose(inverse(a_inv).coords, a.coords, rtol=1e-8, atol=1e-9)
        np.testing.assert_allclose(jordan_product(a, a_inv).coords, e.coords, atol=1e-8)


@pytest.mark.parametrize("factory,args", JORDAN_KINDS)
@pytest.mark.parametrize("t", [0.5, 2.0, 10.0])
def test_cone_is_closed_under_scaling(factory, args, t):
    """t y stays in the cone for t > 0 while -y leaves it."""
    from tubetheta.jordan_core import cone_contains
    from tubetheta.representation import natural_representation
    from tubetheta.sample_points import random_cone_element

    rep = natural_representation(_descriptor(factory, args))
    rng = np.random.default_rng(24)
    for _ in range(20):
        y = random_cone_element(rep, rng)
        assert cone_contains(y, rep)
        assert cone_contains(y * t, rep)
        assert not cone_contains(-y, rep)


@pytest.mark.parametrize("factory,args", JORDAN_KINDS)
def test_cone_is_closed_under_inverse(factory, args):
    """y^{-1} is real and stays in the cone."""
    from tubetheta.jordan_core import cone_contains, inverse
    from tubetheta.representation import natural_representation
    from tubetheta.sample_points import random_cone_element

    rep = natural_representation(_descriptor(factory, args))
    rng = np.random.default_rng(25)
    for _ in range(20):
        y = random_cone_element(rep, rng)
        y_inv = inverse(y)
        assert y_inv.is_real
        assert cone_contains(y_inv, rep)


def test_hermitian_operations_keep_real_coordinates():
    """Products and inverses of real HermComplex elements have real coordinates."""
    from tubetheta.jordan_core import (
        AlgebraElement,
        cone_contains,
        herm_complex,
        inverse,
        jordan_product,
    )
    from tubetheta.representation import natural_representation

    descriptor = herm_complex(2)
    rep = natural_representation(descriptor)
    y = AlgebraElement(descriptor, [2.0, 3.0, 0.5, 0.7])
    y_inv = inverse(y)
    assert y_inv.is_real
    assert y_inv.coords.dtype.kind == "f"
    assert jordan_product(y, y).coords.dtype.kind == "f"
    assert cone_contains(y, rep)
    assert cone_contains(y_inv, rep)
    np.testing.assert_allclose(inverse(y_inv).coords, y.coords, atol=1e-13)
