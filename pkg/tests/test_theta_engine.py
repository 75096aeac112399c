"""
Tests for certified theta evaluation.
"""

import math

import numpy as np
import pytest

# theta_3(exp(-pi)) = pi^(1/4) / Gamma(3/4)
THETA_AT_I = 1.0864348112133080


def _rep(factory="real_line", *args):
    import tubetheta.jordan_core as jc
    from tubetheta.representation import natural_representation

    return natural_representation(getattr(jc, factory)(*args))


def test_jacobi_theta_at_i():
    """sum exp(-pi l^2) to ten digits."""
    from tubetheta.jordan_core import element, real_line
    from tubetheta.lattice import integer_lattice
    from tubetheta.theta_engine import theta_eval

    result = theta_eval(_rep(), integer_lattice(1), element(real_line(), [1j]), [0.0], 1e-12)
    assert abs(result.value - THETA_AT_I) < 1e-10
    assert result.tail_bound <= 1e-12
    assert result.points_summed >= 3


def test_jacobi_theta_half_period():
    """theta(i, 1/2) = 2^(-1/4) theta(i, 0)."""
    from tubetheta.jordan_core import element, real_line
    from tubetheta.lattice import integer_lattice
    from tubetheta.theta_engine import theta_eval

    result = theta_eval(_rep(), integer_lattice(1), element(real_line(), [1j]), [0.5], 1e-12)
    assert abs(result.value - THETA_AT_I * 2**-0.25) < 1e-10


def test_siegel_theta_factorizes():
    """At z = i I the genus-2 series is the square of the classical one."""
    from tubetheta.jordan_core import sym_real, unit
    from tubetheta.lattice import integer_lattice
    from tubetheta.theta_engine import nullwert

    z = 1j * unit(sym_real(2))
    result = nullwert(_rep("sym_real", 2), integer_lattice(2), z, 1e-12)
    assert abs(result.value - THETA_AT_I**2) < 1e-10
    assert abs(result.value - 1.1803405990) < 1e-9


def test_direct_sum_theta_factorizes():
    """Blockwise representations give products of theta values."""
    from tubetheta.jordan_core import AlgebraElement, direct_sum, real_line, spin_factor
    from tubetheta.lattice import integer_lattice
    from tubetheta.representation import natural_representation
    from tubetheta.theta_engine import theta_eval

    descriptor = direct_sum(real_line(), spin_factor(3))
    rep = natural_representation(descriptor)
    z_line = np.array([0.2 + 1.1j])
    z_spin = np.array([0.1 + 1.5j, 0.3 + 0.2j, -0.2 + 0.1j])
    u = np.array([0.1, 0.3, -0.2])
    whole = theta_eval(
        rep, integer_lattice(3), AlgebraElement(descriptor, np.concatenate([z_line, z_spin])), u, 1e-13
    )
    line = theta_eval(
        _rep(), integer_lattice(1), AlgebraElement(real_line(), z_line), u[:1], 1e-13
    )
    spin = theta_eval(
        _rep("spin_factor", 3),
        integer_lattice(2),
        AlgebraElement(spin_factor(3), z_spin),
        u[1:],
        1e-13,
    )
    assert abs(whole.value - line.value * spin.value) < 1e-11


def test_strategies_agree():
    """Ellipsoid and box summation agree within their bounds."""
    from tubetheta.jordan_core import element, herm_complex
    from tubetheta.lattice import integer_lattice
    from tubetheta.theta_engine import theta_eval

    rep = _rep("herm_complex", 2)
    z = element(herm_complex(2), [0.2 + 1.2j, -0.1 + 0.9j, 0.3 + 0.1j, 0.1 - 0.2j])
    u = np.array([0.1, -0.2, 0.3, 0.05])
    ellipsoid = theta_eval(rep, integer_lattice(4), z, u, 1e-10, strategy="ellipsoid")
    box = theta_eval(rep, integer_lattice(4), z, u, 1e-10, strategy="box")
    assert box.points_summed >= ellipsoid.points_summed
    assert abs(ellipsoid.value - box.value) <= ellipsoid.tail_bound + box.tail_bound + 1e-14


def test_unknown_strategy():
    """Only the listed strategies are accepted."""
    from tubetheta.jordan_core import element, real_line
    from tubetheta.lattice import integer_lattice
    from tubetheta.theta_engine import theta_eval

    with pytest.raises(ValueError, match="strategy"):
        theta_eval(_rep(), integer_lattice(1), element(real_line(), [1j]), [0.0], 1e-8, "grid")


def test_certification_is_honest():
    """A loose evaluation lies within its bound of a tight one."""
    from tubetheta.jordan_core import element, sym_real
    from tubetheta.lattice import integer_lattice
    from tubetheta.theta_engine import theta_eval

    rep = _rep("sym_real", 2)
    z = element(sym_real(2), [0.3 + 0.8j, -0.4 + 1.1j, 0.2 + 0.3j])
    u = np.array([0.2 + 0.1j, -0.3])
    for tol in (1e-2, 1e-4, 1e-6):
        loose = theta_eval(rep, integer_lattice(2), z, u, tol)
        tight = theta_eval(rep, integer_lattice(2), z, u, 1e-14)
        assert loose.tail_bound <= tol
        assert abs(loose.value - tight.value) <= tol + 1e-14


def test_infinite_tolerance_keeps_origin():
    """tol = inf sums only the zero vector."""
    from tubetheta.jordan_core import element, real_line
    from tubetheta.lattice import integer_lattice
    from tubetheta.theta_engine import theta_eval

    result = theta_eval(_rep(), integer_lattice(1), element(real_line(), [1j]), [0.0], math.inf)
    assert result.points_summed == 1
    assert result.value == 1.0


def test_outside_tube_raises():
    """Real z is outside the tube domain."""
    from tubetheta.errors import DomainError
    from tubetheta.jordan_core import element, real_line
    from tubetheta.lattice import integer_lattice
    from tubetheta.theta_engine import theta_eval

    with pytest.raises(DomainError):
        theta_eval(_rep(), integer_lattice(1), element(real_line(), [0.5]), [0.0])
    with pytest.raises(DomainError):
        theta_eval(_rep(), integer_lattice(1), element(real_line(), [-1j]), [0.0])


def test_dimension_mismatch():
    """Lattice and u must match dim U."""
    from tubetheta.errors import DimensionMismatchError
    from tubetheta.jordan_core import element, real_line
    from tubetheta.lattice import integer_lattice
    from tubetheta.theta_engine import theta_eval

    z = element(real_line(), [1j])
    with pytest.raises(DimensionMismatchError):
        theta_eval(_rep(), integer_lattice(2), z, [0.0, 0.0])
    with pytest.raises(DimensionMismatchError):
        theta_eval(_rep(), integer_lattice(1), z, [0.0, 0.0])


def test_point_budget():
    """A tiny budget cannot reach a tight tolerance."""
    from tubetheta.config import Settings
    from tubetheta.errors import BudgetError
    from tubetheta.jordan_core import element, real_line
    from tubetheta.lattice import integer_lattice
    from tubetheta.theta_engine import theta_eval

    rep = _rep().with_settings(Settings(point_budget=3))
    with pytest.raises(BudgetError) as info:
        theta_eval(rep, integer_lattice(1), element(real_line(), [0.01j]), [0.0], 1e-12)
    assert info.value.points == 3
    assert info.value.achieved_bound > 1e-12


def test_tail_radius_monotone():
    """Tighter tolerances and larger Im u need larger radii."""
    from tubetheta.jordan_core import element, real_line
    from tubetheta.theta_engine import tail_radius

    rep = _rep()
    z = element(real_line(), [0.5j])
    radii = [tail_radius(rep, z, [0.0], tol) for tol in (1e-4, 1e-8, 1e-12)]
    assert radii == sorted(radii)
    assert tail_radius(rep, z, [0.5j], 1e-8) >= radii[1]


def test_theta_grid_matches_single_evaluations():
    """Vectorized evaluation agrees with theta_eval."""
    from tubetheta.jordan_core import element, sym_real
    from tubetheta.lattice import integer_lattice
    from tubetheta.theta_engine import theta_eval, theta_grid

    rep = _rep("sym_real", 2)
    lattice = integer_lattice(2)
    z = element(sym_real(2), [0.1 + 1.0j, 0.2 + 1.3j, -0.1 + 0.2j])
    us = np.array([[0.0, 0.0], [0.3, -0.1], [0.5, 0.5]])
    grid = theta_grid(rep, lattice, z, us, 1e-12)
    for row, value in zip(us, grid.values):
        assert abs(value - theta_eval(rep, lattice, z, row, 1e-12).value) < 1e-11


def test_lattice_gaussian_sum_direct():
    """The engine sums exp(pi i rho(M l + 2u, l)) for arbitrary M."""
    from tubetheta.theta_engine import lattice_gaussian_sum

    result = lattice_gaussian_sum(np.eye(1), np.eye(1), np.array([[2j]]), [0.0], 1e-13)
    expected = sum(math.exp(-2 * math.pi * l * l) for l in range(-10, 11))
    assert abs(result.value - expected) < 1e-12


FOURIER_CASES = [
    # (lattice scale, dual index)
    (1, 0),
    (1, 1),
    (1, -2),
    (2, 1),
]


@pytest.mark.parametrize("scale,index", FOURIER_CASES)
def test_fourier_coefficient_real_line(scale, index):
    """Coefficients equal exp(pi i z l^2) for l in the dual lattice."""
    from fractions import Fraction

    from tubetheta.jordan_core import element, real_line
    from tubetheta.lattice import scaled_integer_lattice
    from tubetheta.theta_engine import expected_fourier_coefficient, fourier_coefficient

    rep = _rep()
    z = element(real_line(), [0.3 + 0.7j])
    l = str(Fraction(index, scale))
    value = fourier_coefficient(rep, scaled_integer_lattice(1, scale), z, [l], 1e-12)
    expected = expected_fourier_coefficient(rep, z, [float(Fraction(l))])
    assert abs(value - expected) < 1e-8


def test_fourier_coefficient_genus_two():
    """Coefficient at a nonzero dual vector in dimension 2."""
    from tubetheta.jordan_core import element, sym_real
    from tubetheta.lattice import integer_lattice
    from tubetheta.theta_engine import expected_fourier_coefficient, fourier_coefficient

    rep = _rep("sym_real", 2)
    z = element(sym_real(2), [0.2 + 0.9j, 0.1 + 1.1j, 0.05 + 0.2j])
    value = fourier_coefficient(rep, integer_lattice(2), z, [1, 1], 1e-12)
    assert abs(value - expected_fourier_coefficient(rep, z, [1.0, 1.0])) < 1e-8


def test_fourier_coefficient_restrictions():
    """Non-dual vectors and large dimensions are rejected."""
    from tubetheta.errors import LatticeMembershipError, UnsupportedOperationError
    from tubetheta.jordan_core import element, real_line, sym_real, unit
    from tubetheta.lattice import integer_lattice
    from tubetheta.theta_engine import fourier_coefficient

    with pytest.raises(LatticeMembershipError):
        fourier_coefficient(_rep(), integer_lattice(1), element(real_line(), [1j]), ["1/2"])
    with pytest.raises(UnsupportedOperationError):
        fourier_coefficient(
            _rep("sym_real", 3), integer_lattice(3), 1j * unit(sym_real(3)), [0, 0, 0]
        )
