"""
Exact lattices, dual lattices and lattice point enumeration.

Lattice bases are exact ``sympy`` matrices whose columns are basis vectors in
ambient coordinates. Dual lattices, basis comparisons and the period lattice
are computed in rational arithmetic; only ellipsoid enumeration works in
floating point.
"""

import functools
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import TYPE_CHECKING, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
import sympy

from .errors import (
    BudgetError,
    DimensionMismatchError,
    LatticeMembershipError,
    NotInvertibleError,
    TubeThetaError,
    UnsupportedConfigurationError,
)

if TYPE_CHECKING:
    from .representation import BilinearFormRho, RepresentationConfig

logger = logging.getLogger(__name__)

RationalLike = Union[str, int, Fraction, sympy.Rational, float]

# Relative slack on ellipsoid bounds, absorbs rounding in the Cholesky factor.
_ENUMERATION_SLACK = 1e-10


# ---------------------------------------------------------------------------
# Rational conversions


def parse_rational(value: RationalLike) -> sympy.Rational:
    """Exact rational from ``"3/2"``, ``"0.25"``, ``1``, a Fraction or a float."""
    if isinstance(value, sympy.Rational):
        return value
    if isinstance(value, bool):
        raise ValueError(f"Not a rational number: {value!r}")
    if isinstance(value, int):
        return sympy.Integer(value)
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    if isinstance(value, float):
        return rationalize(value)
    if isinstance(value, str):
        try:
            fraction = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"Not a rational number: {value!r}")
        return sympy.Rational(fraction.numerator, fraction.denominator)
    raise ValueError(f"Not a rational number: {value!r}")


def rationalize(value: float, what: str = "value") -> sympy.Rational:
    """Recover a small-denominator rational from a float.

    Raises
    ------
    UnsupportedConfigurationError
        If no rational with denominator up to 10**6 reproduces ``value``.
    """
    value = float(value)
    fraction = Fraction(value).limit_denominator(10**6)
    if abs(float(fraction) - value) > 1e-14 * max(1.0, abs(value)):
        raise UnsupportedConfigurationError(f"{what} has irrational entry {value!r}")
    return sympy.Rational(fraction.numerator, fraction.denominator)


def rationalize_matrix(values: np.ndarray, what: str = "matrix") -> sympy.Matrix:
    values = np.atleast_2d(np.asarray(values, dtype=float))
    return sympy.Matrix(
        [[rationalize(v, what) for v in row] for row in values.tolist()]
    )


def rational_vector(values: Sequence[RationalLike]) -> sympy.Matrix:
    return sympy.Matrix([parse_rational(v) for v in values])


def _is_integral(m: sympy.Matrix) -> bool:
    return all(entry.is_integer for entry in m)


# ---------------------------------------------------------------------------
# Lattices


@dataclass(frozen=True, eq=False)
class Lattice:
    """Full-rank lattice spanned by the columns of an exact basis matrix."""

    basis: sympy.Matrix

    def __post_init__(self):
        basis = sympy.Matrix(self.basis).applyfunc(sympy.nsimplify)
        if not basis.is_square or basis.rows == 0:
            raise DimensionMismatchError(
                f"Lattice basis must be square, got {basis.rows}x{basis.cols}"
            )
        if any(not entry.is_rational for entry in basis):
            raise UnsupportedConfigurationError("Lattice basis must be rational")
        det = basis.det()
        if det == 0:
            raise NotInvertibleError("Lattice basis is singular", 0.0)
        object.__setattr__(self, "basis", sympy.ImmutableMatrix(basis))

    @property
    def dim(self) -> int:
        return self.basis.rows

    @cached_property
    def float_basis(self) -> np.ndarray:
        return np.array(self.basis.tolist(), dtype=float)

    @cached_property
    def inverse_basis(self) -> sympy.Matrix:
        return self.basis.inv()

    def gram(self, rho: "BilinearFormRho") -> np.ndarray:
        """rho-Gram of the basis, ``B^T R B``."""
        b = self.float_basis
        return b.T @ rho.gram @ b

    def coefficients(self, m: Sequence[RationalLike]) -> sympy.Matrix:
        """Coordinates of ``m`` with respect to the basis."""
        vector = m if isinstance(m, sympy.MatrixBase) else rational_vector(m)
        if vector.shape != (self.dim, 1):
            raise DimensionMismatchError(
                f"Expected a vector with {self.dim} entries, got shape {vector.shape}"
            )
        return self.inverse_basis * vector

    def transformed(self, matrix: sympy.Matrix) -> "Lattice":
        """The lattice ``matrix * Lambda``."""
        return Lattice(sympy.Matrix(matrix) * self.basis)

    def scaled(self, t: RationalLike) -> "Lattice":
        return Lattice(parse_rational(t) * self.basis)

    def vector(self, index: int) -> sympy.Matrix:
        return self.basis[:, index]

    def basis_strings(self) -> List[List[str]]:
        """Basis vectors as lists of rational strings."""
        return [[str(entry) for entry in self.basis[:, j]] for j in range(self.dim)]

    def __repr__(self) -> str:
        return f"Lattice({self.basis_strings()})"


def lattice_from_vectors(vectors: Sequence[Sequence[RationalLike]]) -> Lattice:
    """Lattice spanned by ``vectors`` (each in ambient coordinates)."""
    columns = [[parse_rational(v) for v in vector] for vector in vectors]
    return Lattice(sympy.Matrix(columns).T)


def integer_lattice(n: int) -> Lattice:
    return Lattice(sympy.eye(n))


def scaled_integer_lattice(n: int, t: RationalLike) -> Lattice:
    return integer_lattice(n).scaled(t)


def sheared_integer_lattice(n: int = 2, shear: int = 1) -> Lattice:
    """Z^n with basis ``e_1, shear * e_1 + e_2, .., shear * e_{n-1} + e_n``."""
    basis = sympy.eye(n)
    for j in range(1, n):
        basis[j - 1, j] = shear
    return Lattice(basis)


@lru_cache(maxsize=256)
def dual_lattice(lattice: Lattice, rho: "BilinearFormRho") -> Lattice:
    """``Lambda^rho = {m : rho(m, l) in Z for all l in Lambda}``, basis ``R^{-1} B^{-T}``."""
    r = rho_exact(rho)
    return Lattice(r.inv() * lattice.basis.T.inv())


@lru_cache(maxsize=64)
def rho_exact(rho: "BilinearFormRho") -> sympy.Matrix:
    return rationalize_matrix(rho.gram, "rho Gram")


def same_lattice(a: Lattice, b: Lattice) -> bool:
    """Equality of lattices through a unimodular change of basis."""
    if a.dim != b.dim:
        return False
    change = a.inverse_basis * b.basis
    return _is_integral(change) and abs(change.det()) == 1


def lattice_contains(lattice: Lattice, m: Sequence[RationalLike]) -> bool:
    return _is_integral(lattice.coefficients(m))


def require_member(lattice: Lattice, m: Sequence[RationalLike], name: str = "lattice") -> sympy.Matrix:
    """Exact vector ``m``; raises LatticeMembershipError if ``m`` is not in ``lattice``."""
    vector = m if isinstance(m, sympy.MatrixBase) else rational_vector(m)
    if not lattice_contains(lattice, vector):
        raise LatticeMembershipError(f"{list(vector)} is not in the {name}")
    return vector


class LatticeTransform(NamedTuple):
    """Image of a lattice under ``B_hat`` and both constructions of its dual."""

    lattice: Lattice
    dual: Lattice
    expected_dual: Lattice
    consistent: bool


def transform_lattice(
    lattice: Lattice, b_hat: sympy.Matrix, rho: "BilinearFormRho"
) -> LatticeTransform:
    """Apply ``B_hat`` and compare ``(B_hat Lambda)^rho`` with ``(B_hat^rho)^{-1} Lambda^rho``."""
    b_hat = sympy.Matrix(b_hat).applyfunc(sympy.nsimplify)
    if b_hat.shape != (lattice.dim, lattice.dim):
        raise DimensionMismatchError(f"B_hat must be {lattice.dim}x{lattice.dim}")
    if b_hat.det() == 0:
        raise NotInvertibleError("B_hat is singular", 0.0)
    r = rho_exact(rho)
    image = lattice.transformed(b_hat)
    dual = dual_lattice(image, rho)
    adjoint = r.inv() * b_hat.T * r
    expected = dual_lattice(lattice, rho).transformed(adjoint.inv())
    return LatticeTransform(image, dual, expected, same_lattice(dual, expected))


def covolume(lattice: Lattice, rho: "BilinearFormRho") -> float:
    """Volume of a fundamental domain in rho-orthonormal coordinates."""
    return float(np.sqrt(np.linalg.det(lattice.gram(rho))))


# ---------------------------------------------------------------------------
# Enumeration


def _ellipsoid_blocks(gram: np.ndarray, bound: float) -> Iterator[np.ndarray]:
    """Integer vectors ``k`` with ``k^T G k <= bound`` (up to slack), in blocks.

    Fincke-Pohst recursion on ``G = U^T U``: the last coordinate is fixed
    first and each block holds one run of the first coordinate.
    """
    n = gram.shape[0]
    u = scipy.linalg.cholesky(gram, lower=False)
    diag = np.diag(u)
    q = diag**2
    mu = u / diag[:, None]
    k = np.zeros(n, dtype=np.int64)

    def recurse(level: int, remaining: float) -> Iterator[np.ndarray]:
        center = -float(mu[level, level + 1 :] @ k[level + 1 :])
        half = math.sqrt(max(remaining, 0.0) / q[level])
        low, high = math.ceil(center - half), math.floor(center + half)
        if level == 0:
            if low <= high:
                block = np.tile(k, (high - low + 1, 1))
                block[:, 0] = np.arange(low, high + 1)
                yield block
            return
        for value in range(low, high + 1):
            k[level] = value
            yield from recurse(level - 1, remaining - q[level] * (value - center) ** 2)
        k[level] = 0

    yield from recurse(n - 1, bound * (1 + _ENUMERATION_SLACK) + 1e-12)


def _within(points: np.ndarray, gram: np.ndarray, bound: float) -> np.ndarray:
    norms = np.einsum("pi,ij,pj->p", points, gram, points)
    return points[norms <= bound * (1 + _ENUMERATION_SLACK) + 1e-12]


def _lexicographic(points: np.ndarray) -> np.ndarray:
    if len(points) == 0:
        return points
    order = np.lexsort(points.T[::-1])
    return points[order]


def iter_ellipsoid(gram: np.ndarray, bound: float) -> Iterator[Tuple[int, ...]]:
    """Stream integer vectors ``k`` with ``k^T G k <= bound``.

    Traversal order: last coordinate outermost, each coordinate ascending.
    """
    gram = np.asarray(gram, dtype=float)
    if bound < 0:
        return
    for block in _ellipsoid_blocks(gram, bound):
        for point in _within(block, gram, bound):
            yield tuple(int(x) for x in point)


def fincke_pohst(
    gram: np.ndarray, bound: float, limit: Optional[int] = None
) -> np.ndarray:
    """All integer vectors with ``k^T G k <= bound``, sorted lexicographically.

    Parameters
    ----------
    gram
        Positive definite Gram matrix.
    bound
        Ellipsoid bound; negative bounds give an empty result.
    limit
        Maximal number of candidate points before :class:`BudgetError`.
    """
    gram = np.asarray(gram, dtype=float)
    n = gram.shape[0]
    if bound < 0:
        return np.zeros((0, n), dtype=np.int64)
    blocks, count = [], 0
    for block in _ellipsoid_blocks(gram, bound):
        count += len(block)
        if limit is not None and count > limit:
            raise BudgetError("Ellipsoid enumeration exceeded the point budget", math.inf, limit)
        blocks.append(_within(block, gram, bound))
    if not blocks:
        return np.zeros((0, n), dtype=np.int64)
    return _lexicographic(np.concatenate(blocks))


def box_extent(gram: np.ndarray, bound: float) -> np.ndarray:
    """Per-coordinate bounds of the ellipsoid, ``sqrt(bound * (G^{-1})_ii)``."""
    gram = np.asarray(gram, dtype=float)
    return np.floor(np.sqrt(max(bound, 0.0) * np.diag(scipy.linalg.inv(gram))) + 1e-9).astype(
        np.int64
    )


def enumerate_box(gram: np.ndarray, bound: float, keep_outside: bool = False) -> np.ndarray:
    """Naive enumeration over the bounding box of the ellipsoid.

    With ``keep_outside`` the whole box is returned (the naive summation
    strategy); otherwise only points inside the ellipsoid.
    """
    gram = np.asarray(gram, dtype=float)
    n = gram.shape[0]
    if bound < 0:
        return np.zeros((0, n), dtype=np.int64)
    extent = box_extent(gram, bound)
    axes = [range(-e, e + 1) for e in extent]
    points = np.array(list(itertools.product(*axes)), dtype=np.int64).reshape(-1, n)
    if not keep_outside:
        points = _within(points, gram, bound)
    return _lexicographic(points)


def enumerate_ellipsoid(
    lattice: Lattice, form: np.ndarray, bound: float
) -> np.ndarray:
    """Lattice points ``l`` with ``l^T Q l <= bound``.

    Returns an array of ambient coordinates, one row per point, ordered
    lexicographically in the basis coefficients.
    """
    b = lattice.float_basis
    form = np.asarray(form, dtype=float)
    if form.shape != (lattice.dim, lattice.dim):
        raise DimensionMismatchError(
            f"Quadratic form must be {lattice.dim}x{lattice.dim}, got {form.shape}"
        )
    coefficients = fincke_pohst(b.T @ form @ b, bound)
    return coefficients @ b.T


# ---------------------------------------------------------------------------
# Hermite normal form and the period lattice


def hermite_normal_form(rows: sympy.Matrix) -> sympy.Matrix:
    """Row Hermite normal form of an integer matrix, zero rows removed.

    The rows of the result form a basis of the Z-span of the input rows;
    pivots are positive and entries above a pivot are reduced modulo it.
    """
    a = sympy.Matrix(rows)
    m, n = a.shape
    pivot_row = 0
    for col in range(n):
        if pivot_row >= m:
            break
        while True:
            nonzero = [r for r in range(pivot_row, m) if a[r, col] != 0]
            if not nonzero:
                break
            smallest = min(nonzero, key=lambda r: abs(a[r, col]))
            if smallest != pivot_row:
                a.row_swap(smallest, pivot_row)
            done = True
            for r in range(pivot_row + 1, m):
                if a[r, col] != 0:
                    quotient = a[r, col] // a[pivot_row, col]
                    a[r, :] = a.row(r) - quotient * a.row(pivot_row)
                    if a[r, col] != 0:
                        done = False
            if done:
                break
        if all(a[r, col] == 0 for r in range(pivot_row, m)):
            continue
        if a[pivot_row, col] < 0:
            a[pivot_row, :] = -a.row(pivot_row)
        pivot = a[pivot_row, col]
        for r in range(pivot_row):
            quotient = a[r, col] // pivot
            a[r, :] = a.row(r) - quotient * a.row(pivot_row)
        pivot_row += 1
    return a[:pivot_row, :]


@dataclass(frozen=True)
class PeriodLattice:
    """Lattice of z-periods ``{x in V : rho(psi(x) l, l) in 2Z for l in Lambda^rho}``.

    Attributes
    ----------
    basis
        Exact matrix whose columns are basis vectors in V coordinates.
    rank
        Rank of the Z-module of generating functionals.
    functionals
        Rows ``f_ii / 2`` and ``f_ij`` (i < j) whose integrality defines the
        lattice.
    """

    basis: sympy.ImmutableMatrix
    rank: int
    functionals: sympy.ImmutableMatrix

    @property
    def dim(self) -> int:
        return self.basis.rows

    @property
    def is_full_rank(self) -> bool:
        return self.rank == self.dim

    def vector(self, index: int) -> sympy.Matrix:
        return self.basis[:, index]

    def contains(self, x: Sequence[RationalLike]) -> bool:
        vector = x if isinstance(x, sympy.MatrixBase) else rational_vector(x)
        return _is_integral(self.functionals * vector)

    def basis_strings(self) -> List[List[str]]:
        return [[str(entry) for entry in self.basis[:, j]] for j in range(self.basis.cols)]


def _pairing_matrices(rep: "RepresentationConfig", lattice: Lattice) -> List[sympy.Matrix]:
    """``D^T R Psi_k D`` for the dual basis D, one matrix per V basis vector."""
    r = rho_exact(rep.rho)
    d = dual_lattice(lattice, rep.rho).basis
    return [
        d.T * r * rationalize_matrix(psi, "psi") * d for psi in rep.psi_basis
    ]


def _verify_period_basis(
    basis: sympy.Matrix, pairings: List[sympy.Matrix]
) -> None:
    n = pairings[0].rows
    radius = 1 if n <= 6 else 0
    samples = list(itertools.product(range(-radius, radius + 1), repeat=n))
    if radius == 0:
        samples = [tuple(int(i == j) for i in range(n)) for j in range(n)]
        samples += [
            tuple(int(i in (a, b)) for i in range(n)) for a in range(n) for b in range(a + 1, n)
        ]
    for column in range(basis.cols):
        x = basis[:, column]
        form = sum((x[k] * pairings[k] for k in range(len(pairings))), sympy.zeros(n, n))
        entries = [[Fraction(int(v.p), int(v.q)) for v in row] for row in form.tolist()]
        for sample in samples:
            value = sum(
                sample[i] * entries[i][j] * sample[j] for i in range(n) for j in range(n)
            )
            if value.denominator != 1 or value.numerator % 2:
                raise TubeThetaError(
                    f"Period basis vector {list(x)} fails at l-coefficients {sample}"
                )


@lru_cache(maxsize=64)
def period_lattice(rep: "RepresentationConfig", lattice: Lattice) -> PeriodLattice:
    """Period lattice of theta in the z variable.

    Writing ``l = sum n_i b_i`` over the dual basis, ``rho(psi(x) l, l)`` is
    even for all ``n`` iff ``f_ii(x) / 2`` and ``f_ij(x)`` are integers,
    where ``f_ij(x) = rho(psi(x) b_i, b_j)``. The Z-span of these functionals
    is reduced to a basis by Hermite normal form and the lattice is its dual.

    Raises
    ------
    UnsupportedConfigurationError
        For irrational rho or psi entries.
    """
    pairings = _pairing_matrices(rep, lattice)
    n = lattice.dim
    rows = []
    for i in range(n):
        rows.append([p[i, i] / 2 for p in pairings])
    for i in range(n):
        for j in range(i + 1, n):
            rows.append([p[i, j] for p in pairings])
    functionals = sympy.Matrix(rows)
    denominator = functools.reduce(sympy.ilcm, [entry.q for entry in functionals], 1)
    reduced = hermite_normal_form(functionals * denominator) / denominator
    rank = reduced.rows
    dim_v = rep.dim_v
    if rank == dim_v:
        basis = reduced.inv()
    else:
        logger.warning(
            "period lattice has rank %d < dim V = %d; returning a partial basis", rank, dim_v
        )
        basis = reduced.T * (reduced * reduced.T).inv()
    _verify_period_basis(basis, pairings)
    logger.debug("period lattice basis %s", basis.tolist())
    return PeriodLattice(
        sympy.ImmutableMatrix(basis), rank, sympy.ImmutableMatrix(functionals)
    )
