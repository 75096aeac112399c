"""
Certified evaluation of theta series on the tube domain.

The central routine is :func:`lattice_gaussian_sum`, which sums
``exp(pi i rho(M l + 2u, l))`` over a lattice given by its basis. The theta
series ``theta_Lambda(z, u)`` is the case ``M = psi(z)`` over the dual
lattice; the Poisson side of the transformation formula uses the same code
with ``M = -psi(z)^{-1}`` over Lambda itself.

Truncation is certified: with ``lam`` the smallest eigenvalue of
``Im M`` and ``m = |Im u|_rho`` every term with ``|l|_rho = r`` has modulus at
most ``exp(-pi lam r^2 + 2 pi m r)``. Counting lattice points per unit shell
with a packing bound gives a series that is summed until its terms shrink
geometrically, and closed with the geometric remainder.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import scipy.special

from .config import DEFAULT_SETTINGS, Settings
from .errors import BudgetError, DimensionMismatchError, DomainError, UnsupportedOperationError
from .jordan_core import AlgebraElement
from .lattice import (
    Lattice,
    dual_lattice,
    enumerate_box,
    fincke_pohst,
    integer_lattice,
    require_member,
)
from .representation import RepresentationConfig, _as_vector

logger = logging.getLogger(__name__)

STRATEGIES = ("ellipsoid", "box")

# Largest number of complex entries in one phase matrix of a grid evaluation.
_GRID_CHUNK = 2**22


@dataclass(frozen=True)
class ThetaEvaluation:
    """Value of a truncated lattice sum with its certified tail bound."""

    value: complex
    tail_bound: float
    points_summed: int
    radius_used: float


@dataclass(frozen=True)
class GridEvaluation:
    """Values of one lattice sum at many ``u``; the bound covers every value."""

    values: np.ndarray
    tail_bound: float
    points_summed: int
    radius_used: float


@dataclass(frozen=True)
class _DecayData:
    lam: float
    m: float
    delta: float
    dim: int


def _smallest_eigenvalue(sym: np.ndarray, gram: np.ndarray) -> float:
    sym = (sym + sym.T) / 2
    return float(scipy.linalg.eigh(sym, gram, eigvals_only=True)[0])


def _decay_data(
    basis: np.ndarray, gram: np.ndarray, m_matrix: np.ndarray, imag_u: np.ndarray
) -> _DecayData:
    lam = _smallest_eigenvalue(gram @ np.imag(m_matrix), gram)
    if lam <= 0:
        raise DomainError("Im M is not positive definite; the series diverges", lam)
    imag_u = np.atleast_2d(imag_u)
    m = float(np.sqrt(np.max(np.einsum("pi,ij,pj->p", imag_u, gram, imag_u))))
    lattice_gram = basis.T @ gram @ basis
    delta = math.sqrt(max(_smallest_eigenvalue(lattice_gram, np.eye(len(gram))), 0.0))
    return _DecayData(lam, m, delta, gram.shape[0])


def _log_shell(t: float, data: _DecayData) -> float:
    """Log of (points with |l| <= t + 1) times the largest term on [t, t + 1]."""
    peak = min(max(data.m / data.lam, t), t + 1.0)
    log_count = data.dim * math.log1p(2.0 * (t + 1.0) / data.delta)
    return log_count - math.pi * data.lam * peak**2 + 2.0 * math.pi * data.m * peak


def tail_bound(radius: float, data: _DecayData) -> float:
    """Upper bound for the sum of term moduli over ``|l|_rho > radius``."""
    total = 0.0
    t = radius
    for _ in range(10**6):
        current = _log_shell(t, data)
        following = _log_shell(t + 1.0, data)
        if current > 700:
            return math.inf
        term = math.exp(current)
        total += term
        if t >= data.m / data.lam and following - current <= -math.log(2.0):
            ratio = math.exp(following - current)
            return total + term * ratio / (1.0 - ratio)
        t += 1.0
    return math.inf


def _certified_radius(data: _DecayData, tol: float, step: float) -> float:
    """Smallest radius on the grid ``step * Z`` past ``m / lam`` with tail <= tol.

    The tail bound grows pointwise with ``m`` and shrinks with ``lam``, so the
    first passing grid radius is monotone in both and in ``tol``.
    """
    start = math.ceil(data.m / data.lam / step)
    if math.isinf(tol):
        return start * step
    for index in range(start, start + 2**20):
        if tail_bound(index * step, data) <= tol:
            return index * step
    raise BudgetError(
        "No truncation radius reaches the tolerance",
        tail_bound((start + 2**20) * step, data),
        0,
    )


def _ball_volume(dim: int, radius: float) -> float:
    return math.pi ** (dim / 2) / scipy.special.gamma(dim / 2 + 1) * radius**dim


def _enumerate(
    basis: np.ndarray,
    gram: np.ndarray,
    radius: float,
    data: _DecayData,
    settings: Settings,
    strategy: str,
) -> np.ndarray:
    lattice_gram = basis.T @ gram @ basis
    covol = math.sqrt(np.linalg.det(lattice_gram))
    estimate = _ball_volume(data.dim, radius) / covol
    if estimate > settings.point_budget:
        reachable = (settings.point_budget * covol / _ball_volume(data.dim, 1.0)) ** (
            1.0 / data.dim
        )
        raise BudgetError(
            f"Radius {radius:.4g} needs about {estimate:.3g} points",
            tail_bound(reachable, data),
            settings.point_budget,
        )
    if strategy == "box":
        coefficients = enumerate_box(lattice_gram, radius**2, keep_outside=True)
        if len(coefficients) > settings.point_budget:
            raise BudgetError("Box enumeration exceeded the point budget", math.inf, settings.point_budget)
        return coefficients
    if strategy != "ellipsoid":
        raise ValueError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    coefficients = fincke_pohst(lattice_gram, radius**2, limit=settings.point_budget)
    norms = np.round(np.einsum("pi,ij,pj->p", coefficients, lattice_gram, coefficients), 9)
    return coefficients[np.argsort(norms, kind="stable")]


def _prepare(
    basis: np.ndarray,
    gram: np.ndarray,
    m_matrix: np.ndarray,
    imag_u: np.ndarray,
    tol: Optional[float],
    settings: Settings,
    strategy: str,
) -> Tuple[np.ndarray, float, float]:
    tol = settings.default_tolerance if tol is None else tol
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol!r}")
    data = _decay_data(basis, gram, m_matrix, imag_u)
    radius = _certified_radius(data, tol, settings.radius_grid)
    points = _enumerate(basis, gram, radius, data, settings, strategy) @ basis.T
    bound = tail_bound(radius, data)
    logger.debug(
        "lattice sum: lam=%.4g m=%.4g radius=%.4g points=%d tail=%.3e",
        data.lam,
        data.m,
        radius,
        len(points),
        bound,
    )
    return points, radius, bound


def lattice_gaussian_sum(
    basis: np.ndarray,
    gram: np.ndarray,
    m_matrix: np.ndarray,
    u: Sequence[complex],
    tol: Optional[float] = None,
    settings: Optional[Settings] = None,
    strategy: str = "ellipsoid",
) -> ThetaEvaluation:
    """Certified ``sum_l exp(pi i rho(M l + 2u, l))`` over the lattice ``basis Z^N``.

    Parameters
    ----------
    basis
        Real ``N x N`` matrix whose columns span the lattice.
    gram
        Gram matrix ``R`` of rho.
    m_matrix
        Complex ``N x N`` matrix, rho-symmetric with positive definite
        imaginary part.
    u
        Complex vector of length ``N``.
    tol
        Absolute truncation tolerance; ``inf`` keeps only ``l = 0``.
    strategy
        ``"ellipsoid"`` (Fincke-Pohst) or ``"box"`` (whole bounding box).

    Raises
    ------
    DomainError
        If ``Im M`` is not positive definite.
    BudgetError
        If the tolerance needs more than ``settings.point_budget`` points.
    """
    settings = settings or DEFAULT_SETTINGS
    basis = np.asarray(basis, dtype=float)
    gram = np.asarray(gram, dtype=float)
    m_matrix = np.asarray(m_matrix, dtype=complex)
    u = _as_vector(u, gram.shape[0]).astype(complex)
    points, radius, bound = _prepare(
        basis, gram, m_matrix, np.imag(u), tol, settings, strategy
    )
    rl = points @ gram
    quadratic = np.sum((points @ m_matrix.T) * rl, axis=1)
    terms = np.exp(1j * np.pi * (quadratic + 2.0 * (rl @ u)))
    value = complex(math.fsum(terms.real), math.fsum(terms.imag))
    return ThetaEvaluation(value, bound, len(points), radius)


def _check_point(rep: RepresentationConfig, z: AlgebraElement) -> None:
    test = rep.cone_test(z.imag)
    if not test.member:
        raise DomainError("Im z is not in the cone; the series diverges", test.min_eigenvalue)


def tail_radius(
    rep: RepresentationConfig,
    z: AlgebraElement,
    u: Sequence[complex],
    tol: float,
    lattice: Optional[Lattice] = None,
) -> float:
    """Truncation radius certifying ``tol`` for ``theta_Lambda(z, u)``.

    ``lattice`` defaults to the standard lattice ``Z^N``.
    """
    _check_point(rep, z)
    lattice = lattice or integer_lattice(rep.dim_u)
    dual = dual_lattice(lattice, rep.rho)
    u = _as_vector(u, rep.dim_u)
    data = _decay_data(dual.float_basis, rep.rho.gram, rep.psi(z), np.imag(u))
    return _certified_radius(data, tol, rep.settings.radius_grid)


def theta_eval(
    rep: RepresentationConfig,
    lattice: Lattice,
    z: AlgebraElement,
    u: Sequence[complex],
    tol: Optional[float] = None,
    strategy: str = "ellipsoid",
) -> ThetaEvaluation:
    """``theta_Lambda(z, u) = sum over Lambda^rho of exp(pi i rho(psi(z) l + 2u, l))``.

    Raises
    ------
    DomainError
        If ``Im z`` is not in the cone.
    BudgetError
        If the tolerance is out of reach within the point budget.
    """
    _check_point(rep, z)
    if lattice.dim != rep.dim_u:
        raise DimensionMismatchError(
            f"Lattice dimension {lattice.dim} does not match dim U = {rep.dim_u}"
        )
    dual = dual_lattice(lattice, rep.rho)
    return lattice_gaussian_sum(
        dual.float_basis, rep.rho.gram, rep.psi(z), u, tol, rep.settings, strategy
    )


def nullwert(
    rep: RepresentationConfig, lattice: Lattice, z: AlgebraElement, tol: Optional[float] = None
) -> ThetaEvaluation:
    """``theta_Lambda(z, 0)``."""
    return theta_eval(rep, lattice, z, np.zeros(rep.dim_u), tol)


def theta_grid(
    rep: RepresentationConfig,
    lattice: Lattice,
    z: AlgebraElement,
    us: np.ndarray,
    tol: Optional[float] = None,
) -> GridEvaluation:
    """Vectorized ``theta_Lambda(z, u)`` for the rows of ``us``.

    Uses plain numpy summation, so values may differ from
    :func:`theta_eval` in the last bits.
    """
    _check_point(rep, z)
    us = np.atleast_2d(np.asarray(us))
    if us.shape[1] != rep.dim_u:
        raise DimensionMismatchError(f"us must have {rep.dim_u} columns, got {us.shape[1]}")
    dual = dual_lattice(lattice, rep.rho)
    gram = rep.rho.gram
    m_matrix = rep.psi(z).astype(complex)
    points, radius, bound = _prepare(
        dual.float_basis, gram, m_matrix, np.imag(us), tol, rep.settings, "ellipsoid"
    )
    rl = points @ gram
    weights = np.exp(1j * np.pi * np.sum((points @ m_matrix.T) * rl, axis=1))
    values = np.empty(len(us), dtype=complex)
    chunk = max(1, _GRID_CHUNK // max(1, len(points)))
    for start in range(0, len(us), chunk):
        block = us[start : start + chunk]
        values[start : start + chunk] = np.exp(2j * np.pi * (block @ rl.T)) @ weights
    return GridEvaluation(values, bound, len(points), radius)


def expected_fourier_coefficient(
    rep: RepresentationConfig, z: AlgebraElement, l: Sequence[float]
) -> complex:
    """``exp(pi i rho(psi(z) l, l))``, the coefficient predicted for theta-hat_0 = 1."""
    l = np.asarray(l, dtype=float)
    return complex(np.exp(1j * np.pi * (rep.psi(z) @ l) @ rep.rho.gram @ l))


def _fourier_by_quadrature(
    rep: RepresentationConfig,
    lattice: Lattice,
    z: AlgebraElement,
    index: Tuple[int, ...],
    n: int,
    tol: float,
) -> complex:
    dim = rep.dim_u
    axes = [np.arange(n) / n] * dim
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    us = grid @ lattice.float_basis.T
    values = theta_grid(rep, lattice, z, us, tol).values.reshape((n,) * dim)
    spectrum = np.fft.fftn(values) / n**dim
    return complex(spectrum[tuple(k % n for k in index)])


def fourier_coefficient(
    rep: RepresentationConfig,
    lattice: Lattice,
    z: AlgebraElement,
    l: Sequence,
    tol: Optional[float] = None,
) -> complex:
    """Fourier coefficient of ``u -> theta(z, u)`` at ``l`` in the dual lattice.

    Trapezoidal quadrature over a fundamental domain of ``U / Lambda`` with
    ``settings.quadrature_points`` nodes per axis, cross-checked against twice
    as many nodes.

    Raises
    ------
    UnsupportedOperationError
        If ``dim U > 2``.
    LatticeMembershipError
        If ``l`` is not in the dual lattice.
    """
    if rep.dim_u > 2:
        raise UnsupportedOperationError(
            f"Fourier coefficients need dim U <= 2, got {rep.dim_u}"
        )
    dual = dual_lattice(lattice, rep.rho)
    vector = require_member(dual, l, "dual lattice")
    index = tuple(int(k) for k in dual.coefficients(vector))
    tol = rep.settings.default_tolerance if tol is None else tol
    n = rep.settings.quadrature_points
    coarse = _fourier_by_quadrature(rep, lattice, z, index, n, tol)
    fine = _fourier_by_quadrature(rep, lattice, z, index, 2 * n, tol)
    if abs(fine - coarse) > 1e-8:
        logger.warning(
            "Fourier coefficient at %s: %d and %d nodes differ by %.3e",
            index,
            n,
            2 * n,
            abs(fine - coarse),
        )
    else:
        logger.debug("Fourier coefficient at %s: refinement difference %.3e", index, abs(fine - coarse))
    return fine
