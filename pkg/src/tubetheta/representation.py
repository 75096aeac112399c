"""
Representations (rho, psi, e) of a Jordan algebra on a real space U.

A :class:`RepresentationConfig` holds a positive definite bilinear form
``rho`` on ``U = R^N`` (given by its Gram matrix ``R``), one ``N x N`` matrix
``Psi_k`` per V basis element and a base point ``e``. The map
``psi(x) = sum_k x_k Psi_k`` is rho-self-adjoint (``R Psi_k`` symmetric) and
injective. The configuration is *normalized* when ``psi(e) = I``.

Raw data that may violate self-adjointness or injectivity is carried by
:class:`RawRepresentation` and cleaned up with :func:`symmetrize_psi`,
:func:`reduce_domain` and :func:`normalize_basepoint`.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .config import DEFAULT_SETTINGS, Settings
from .errors import (
    DimensionMismatchError,
    DomainError,
    NotInvertibleError,
    UnsupportedConfigurationError,
)
from .jordan_core import (
    AlgebraDescriptor,
    AlgebraElement,
    AlgebraKind,
    basis_matrices,
    generic,
    unit,
)

if TYPE_CHECKING:
    from .lattice import Lattice

logger = logging.getLogger(__name__)

SValue = AlgebraElement
"""Coordinates of ``S(u, v)`` in the V basis (complex in general)."""


def _as_vector(u: Sequence[complex], n: int, name: str = "u") -> np.ndarray:
    u = np.asarray(u)
    if u.ndim != 1 or u.shape[0] != n:
        raise DimensionMismatchError(f"{name} must have {n} coordinates, got shape {u.shape}")
    if np.iscomplexobj(u):
        return u.astype(complex)
    return u.astype(float)


@dataclass(frozen=True, eq=False)
class BilinearFormRho:
    """Positive definite symmetric bilinear form on U given by its Gram matrix."""

    gram: np.ndarray

    def __post_init__(self):
        gram = np.array(self.gram, dtype=float)
        if gram.ndim != 2 or gram.shape[0] != gram.shape[1] or gram.shape[0] < 1:
            raise DimensionMismatchError(f"rho Gram must be square, got shape {gram.shape}")
        scale = max(1.0, float(np.max(np.abs(gram))))
        if np.max(np.abs(gram - gram.T)) > 1e-12 * scale:
            raise ValueError("rho Gram matrix must be symmetric")
        gram = (gram + gram.T) / 2
        try:
            scipy.linalg.cholesky(gram, lower=True)
        except np.linalg.LinAlgError:
            raise ValueError(f"rho Gram matrix is not positive definite: {gram.tolist()}")
        gram.setflags(write=False)
        object.__setattr__(self, "gram", gram)

    @classmethod
    def standard(cls, dim: int) -> "BilinearFormRho":
        return cls(np.eye(dim))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @cached_property
    def inverse_gram(self) -> np.ndarray:
        return scipy.linalg.inv(self.gram)

    @cached_property
    def cholesky_lower(self) -> np.ndarray:
        """``L`` with ``R = L L^T``; ``s = L^T v`` are rho-orthonormal coordinates."""
        return scipy.linalg.cholesky(self.gram, lower=True)

    def __call__(self, u: np.ndarray, v: np.ndarray) -> complex:
        """``rho(u, v)`` extended bilinearly (no conjugation)."""
        return u @ self.gram @ v


class ConeTest(NamedTuple):
    """Outcome of a cone membership test.

    ``member`` excludes the boundary cushion unless an explicit threshold was
    given; ``boundary`` flags points whose smallest eigenvalue lies within the
    cushion of zero.
    """

    member: bool
    boundary: bool
    min_eigenvalue: float

    def __bool__(self) -> bool:
        return bool(self.member)


@dataclass(frozen=True, eq=False)
class RawRepresentation:
    """Unvalidated representation data, before symmetrization and reduction."""

    rho: BilinearFormRho
    psi_basis: np.ndarray
    base_point: np.ndarray
    descriptor: Optional[AlgebraDescriptor] = None

    def __post_init__(self):
        psi = np.array(self.psi_basis, dtype=float)
        n = self.rho.dim
        if psi.ndim != 3 or psi.shape[1:] != (n, n) or psi.shape[0] < 1:
            raise DimensionMismatchError(
                f"psi_basis must have shape (dim_v, {n}, {n}), got {psi.shape}"
            )
        base = np.array(self.base_point, dtype=float)
        if base.shape != (psi.shape[0],):
            raise DimensionMismatchError(
                f"base_point must have {psi.shape[0]} coordinates, got shape {base.shape}"
            )
        if self.descriptor is not None and self.descriptor.dim != psi.shape[0]:
            raise DimensionMismatchError(
                f"{self.descriptor.name} has dimension {self.descriptor.dim}, "
                f"psi_basis has {psi.shape[0]} matrices"
            )
        object.__setattr__(self, "psi_basis", psi)
        object.__setattr__(self, "base_point", base)

    @property
    def dim_v(self) -> int:
        return self.psi_basis.shape[0]


@dataclass(frozen=True, eq=False)
class RepresentationConfig:
    """Validated representation of V on U.

    Parameters
    ----------
    descriptor
        Algebra acting on U.
    rho
        Bilinear form on U.
    psi_basis
        Array of shape ``(dim_v, dim_u, dim_u)``; entry ``k`` is ``psi`` of
        the ``k``-th basis vector of V.
    base_point
        Element ``e`` with ``psi(e)`` positive definite (``= I`` once
        normalized).
    settings
        Numerical thresholds for cone tests and inversions.
    """

    descriptor: AlgebraDescriptor
    rho: BilinearFormRho
    psi_basis: np.ndarray
    base_point: AlgebraElement
    settings: Settings = DEFAULT_SETTINGS

    def __post_init__(self):
        psi = np.array(self.psi_basis, dtype=float)
        n = self.rho.dim
        if psi.shape != (self.descriptor.dim, n, n):
            raise DimensionMismatchError(
                f"psi_basis must have shape ({self.descriptor.dim}, {n}, {n}), "
                f"got {psi.shape}"
            )
        if self.base_point.descriptor != self.descriptor or not self.base_point.is_real:
            raise ValueError("base_point must be a real element of the descriptor's algebra")

        products = self.rho.gram @ psi
        scale = max(1.0, float(np.max(np.abs(products))))
        asymmetry = float(np.max(np.abs(products - np.transpose(products, (0, 2, 1)))))
        if asymmetry > 1e-12 * scale:
            raise ValueError(
                f"psi is not rho-self-adjoint (asymmetry {asymmetry:.3e}); "
                "apply symmetrize_psi first"
            )
        flat = psi.reshape(psi.shape[0], -1)
        if np.linalg.matrix_rank(flat) < psi.shape[0]:
            raise ValueError("psi is not injective on V; apply reduce_domain first")
        psi.setflags(write=False)
        object.__setattr__(self, "psi_basis", psi)

        test = self.cone_test(self.base_point)
        if not test.member:
            raise DomainError("psi(e) is not positive definite", test.min_eigenvalue)

    @property
    def dim_u(self) -> int:
        return self.rho.dim

    @property
    def dim_v(self) -> int:
        return self.descriptor.dim

    @cached_property
    def psi_base(self) -> np.ndarray:
        return self.psi(self.base_point)

    @cached_property
    def is_normalized(self) -> bool:
        return bool(np.allclose(self.psi_base, np.eye(self.dim_u), rtol=0, atol=1e-12))

    @cached_property
    def has_unit_base(self) -> bool:
        """Whether the base point is the unit of the Jordan algebra."""
        if not self.descriptor.is_jordan:
            return False
        e = unit(self.descriptor).coords
        return bool(np.allclose(self.base_point.coords, e, rtol=0, atol=1e-12))

    @property
    def is_jordan_normalized(self) -> bool:
        """``psi(e) = I`` with ``e`` the Jordan unit.

        Inversion identities (``j(z) = -z^{-1}``, ``psi(x^{-1}) = psi(x)^{-1}``)
        are stated for this setting only.
        """
        return self.is_normalized and self.has_unit_base

    @cached_property
    def sigma_gram(self) -> np.ndarray:
        """Gram of sigma: the algebra's trace form, or ``tr(psi(x) psi(y))`` if generic."""
        if self.descriptor.is_jordan:
            return self.descriptor.sigma_gram
        return np.einsum("aij,bji->ab", self.psi_basis, self.psi_basis)

    @cached_property
    def _sigma_factor(self):
        return scipy.linalg.cho_factor(self.sigma_gram)

    def psi(self, z: AlgebraElement) -> np.ndarray:
        """``psi(z)`` as an ``N x N`` (complex if ``z`` is complex) matrix."""
        if z.descriptor != self.descriptor:
            raise DimensionMismatchError(
                f"Element of {z.descriptor.name} given to a {self.descriptor.name} representation"
            )
        return np.tensordot(z.coords, self.psi_basis, axes=1)

    def eigenvalues(self, x: AlgebraElement) -> np.ndarray:
        """Eigenvalues of the rho-self-adjoint operator ``psi(x)`` (x real)."""
        if not x.is_real:
            raise ValueError("eigenvalues need a real element")
        sym = self.rho.gram @ self.psi(x)
        sym = (sym + sym.T) / 2
        return scipy.linalg.eigh(sym, self.rho.gram, eigvals_only=True)

    def cone_test(self, x: AlgebraElement, epsilon: Optional[float] = None) -> ConeTest:
        """Membership of a real element in Y with a boundary flag.

        ``epsilon`` is the relative strictness threshold for membership. When
        it is None the boundary cushion ``settings.cone_epsilon`` applies and
        points within the cushion are never members; an explicit ``epsilon``
        replaces the cushion for membership (the boundary flag still uses it).
        """
        ev = self.eigenvalues(x)
        lowest = float(ev[0])
        scale = float(np.max(np.abs(ev)))
        cushion = self.settings.cone_epsilon * scale
        threshold = cushion if epsilon is None else epsilon * scale
        member = scale > 0 and lowest > threshold
        boundary = abs(lowest) <= cushion
        if epsilon is None:
            member = member and not boundary
        return ConeTest(bool(member), bool(boundary), lowest)

    def element(self, coords: Sequence[complex]) -> AlgebraElement:
        return AlgebraElement(self.descriptor, np.asarray(coords))

    def with_settings(self, settings: Settings) -> "RepresentationConfig":
        return RepresentationConfig(
            self.descriptor, self.rho, self.psi_basis, self.base_point, settings
        )


# ---------------------------------------------------------------------------
# Built-in representations


def clifford_generators(count: int) -> List[np.ndarray]:
    """Real symmetric pairwise anticommuting involutions.

    Built recursively from ``sigma_x`` and ``sigma_z``: a set ``g_1..g_k`` in
    dimension ``M`` grows to ``sigma_x (x) g_i`` plus ``sigma_z (x) I_M``.
    """
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    sz = np.array([[1.0, 0.0], [0.0, -1.0]])
    if count < 1:
        return []
    if count <= 2:
        return [sx, sz][:count]
    previous = clifford_generators(count - 1)
    size = previous[0].shape[0]
    return [np.kron(sx, g) for g in previous] + [np.kron(sz, np.eye(size))]


def realify(m: np.ndarray) -> np.ndarray:
    """Real ``2n x 2n`` matrix ``[[A, -B], [B, A]]`` of ``m = A + iB``."""
    a, b = np.real(m), np.imag(m)
    return np.block([[a, -b], [b, a]])


def _natural_psi(descriptor: AlgebraDescriptor) -> np.ndarray:
    kind = descriptor.kind
    if kind == AlgebraKind.REAL_LINE:
        return np.ones((1, 1, 1))
    if kind == AlgebraKind.SYM_REAL:
        return np.array(basis_matrices(descriptor))
    if kind == AlgebraKind.HERM_COMPLEX:
        return np.array([realify(m) for m in basis_matrices(descriptor)])
    if kind == AlgebraKind.SPIN_FACTOR:
        gammas = clifford_generators(descriptor.n - 1)
        size = gammas[0].shape[0]
        return np.array([np.eye(size)] + gammas)
    if kind == AlgebraKind.DIRECT_SUM:
        blocks = [_natural_psi(s) for s in descriptor.summands]
        sizes = [b.shape[1] for b in blocks]
        total = sum(sizes)
        result = np.zeros((descriptor.dim, total, total))
        row, col = 0, 0
        for block, size in zip(blocks, sizes):
            result[row : row + block.shape[0], col : col + size, col : col + size] = block
            row += block.shape[0]
            col += size
        return result
    raise UnsupportedConfigurationError(
        f"{descriptor.name} has no built-in representation; give psi arrays explicitly"
    )


def natural_representation(
    descriptor: AlgebraDescriptor, settings: Optional[Settings] = None
) -> RepresentationConfig:
    """Standard normalized representation of a built-in kind.

    RealLine acts on R by multiplication, SymReal(n) on R^n by matrix action,
    HermComplex(n) on the realification R^2n, SpinFactor(d) through Clifford
    generators, and direct sums blockwise. rho is the standard form.
    """
    psi = _natural_psi(descriptor)
    return RepresentationConfig(
        descriptor,
        BilinearFormRho.standard(psi.shape[1]),
        psi,
        unit(descriptor),
        settings or DEFAULT_SETTINGS,
    )


def psi_apply(rep: RepresentationConfig, z: AlgebraElement) -> np.ndarray:
    return rep.psi(z)


def rho_adjoint(rep: RepresentationConfig, a: np.ndarray) -> np.ndarray:
    """``A^rho = R^{-1} A^T R``."""
    return rep.rho.inverse_gram @ np.asarray(a).T @ rep.rho.gram


def sigma_adjoint(rep: RepresentationConfig, w: np.ndarray) -> np.ndarray:
    """``W^sigma = G^{-1} W^T G`` with G the sigma Gram."""
    g = rep.sigma_gram
    return scipy.linalg.solve(g, np.asarray(w).T @ g, assume_a="pos")


# ---------------------------------------------------------------------------
# Normalizations


def symmetrize_psi(raw_psi: np.ndarray, rho: BilinearFormRho) -> np.ndarray:
    """Replace each ``Psi_k`` by the average with its rho-adjoint."""
    raw_psi = np.asarray(raw_psi, dtype=float)
    adjoints = np.einsum("ij,akj,kl->ail", rho.inverse_gram, raw_psi, rho.gram)
    return (raw_psi + adjoints) / 2


def reduce_domain(
    raw: RawRepresentation, settings: Optional[Settings] = None
) -> RepresentationConfig:
    """Quotient V by the kernel of psi.

    Basis vectors with ``Psi_k = 0`` are dropped exactly. Any remaining kernel
    is removed through an orthonormal complement, which yields a generic
    descriptor. An injective input comes back unchanged.

    Raises
    ------
    DomainError
        If nothing of V survives, or psi(e) is not positive definite.
    """
    settings = settings or DEFAULT_SETTINGS
    psi = raw.psi_basis
    adjoint_gap = psi - symmetrize_psi(psi, raw.rho)
    if np.max(np.abs(adjoint_gap)) > 1e-12 * max(1.0, float(np.max(np.abs(psi)))):
        raise ValueError("reduce_domain needs symmetrized psi; apply symmetrize_psi first")

    base = raw.base_point
    flat = psi.reshape(psi.shape[0], -1)
    rank = np.linalg.matrix_rank(flat)
    if rank == psi.shape[0]:
        descriptor = raw.descriptor or generic(psi.shape[0])
        base_point = AlgebraElement(descriptor, base)
        return RepresentationConfig(descriptor, raw.rho, psi, base_point, settings)
    if rank == 0:
        raise DomainError("psi vanishes identically; the reduced space is trivial")

    keep = [k for k in range(psi.shape[0]) if np.any(psi[k])]
    if np.linalg.matrix_rank(flat[keep]) == len(keep):
        new_psi = psi[keep]
        new_base = base[keep]
        logger.debug("reduce_domain: dropped null coordinates, %d -> %d", psi.shape[0], len(keep))
    else:
        q = scipy.linalg.orth(flat)
        if q.shape[1] != rank:
            q = q[:, :rank]
        for column in range(q.shape[1]):
            pivot = np.argmax(np.abs(q[:, column]))
            if q[pivot, column] < 0:
                q[:, column] = -q[:, column]
        new_psi = np.tensordot(q.T, psi, axes=1)
        new_base = q.T @ base
        logger.debug("reduce_domain: projected onto %d-dimensional complement", rank)

    descriptor = generic(new_psi.shape[0])
    return RepresentationConfig(
        descriptor, raw.rho, new_psi, AlgebraElement(descriptor, new_base), settings
    )


def basepoint_transform(rep: RepresentationConfig) -> Tuple[np.ndarray, np.ndarray]:
    """``(T, psi(e)^{-1})`` with T the rho-self-adjoint square root of psi(e)."""
    p = rep.psi_base
    r = rep.rho.gram
    ev, vectors = scipy.linalg.eigh((r @ p + (r @ p).T) / 2, r)
    if ev[0] <= 0:
        raise DomainError("psi(e) is not positive definite", float(ev[0]))
    # vectors are rho-orthonormal: vectors^T R vectors = I
    t = vectors @ np.diag(np.sqrt(ev)) @ vectors.T @ r
    return t, scipy.linalg.inv(p)


def normalize_basepoint(
    rep: RepresentationConfig, lattice: "Lattice"
) -> Tuple[RepresentationConfig, "Lattice"]:
    """Rescale so that psi(e) = I.

    The new form is ``rho'(u, v) = rho(psi(e) u, v)``, the new map
    ``psi'(x) = psi(e)^{-1} psi(x)`` and the lattice becomes
    ``psi(e)^{-1} Lambda``, so that ``theta'(z, psi(e)^{-1} u) = theta(z, u)``.

    Raises
    ------
    UnsupportedConfigurationError
        If psi(e) has irrational entries, since lattices are kept exact.
    """
    from .lattice import rationalize_matrix

    if rep.is_normalized:
        return rep, lattice
    p = rep.psi_base
    _, p_inv = basepoint_transform(rep)
    gram = rep.rho.gram @ p
    new_rho = BilinearFormRho((gram + gram.T) / 2)
    new_psi = np.einsum("ij,ajk->aik", p_inv, rep.psi_basis)
    new_rep = RepresentationConfig(
        rep.descriptor, new_rho, new_psi, rep.base_point, rep.settings
    )
    p_exact = rationalize_matrix(p, "psi(e)")
    new_lattice = lattice.transformed(p_exact.inv())
    logger.debug("normalize_basepoint: psi(e) = %s", p.tolist())
    return new_rep, new_lattice


# ---------------------------------------------------------------------------
# S map and domains


def s_form(rep: RepresentationConfig, u: Sequence[complex], v: Sequence[complex]) -> SValue:
    """``S(u, v)`` defined by ``sigma(S(u,v), x) = rho(psi(x) u, conj(v))``."""
    u = _as_vector(u, rep.dim_u, "u")
    v = _as_vector(v, rep.dim_u, "v")
    rhs = np.einsum("aij,j,ik,k->a", rep.psi_basis, u, rep.rho.gram, np.conj(v))
    coords = scipy.linalg.cho_solve(rep._sigma_factor, rhs)
    return AlgebraElement(rep.descriptor, coords)


def tube_contains(rep: RepresentationConfig, z: AlgebraElement) -> ConeTest:
    """Whether ``Im z`` lies in Y (boundary excluded)."""
    return rep.cone_test(z.imag)


def _require_self_dual(rep: RepresentationConfig, operation: str) -> None:
    if not rep.descriptor.is_jordan or not rep.is_normalized:
        raise UnsupportedConfigurationError(
            f"{operation} needs a normalized Jordan representation (self-dual cone)"
        )


def siegel_contains(
    rep: RepresentationConfig, z: AlgebraElement, u: Sequence[complex]
) -> ConeTest:
    """Whether ``Im z - S(u, u)`` lies in the cone (boundary excluded)."""
    _require_self_dual(rep, "siegel_contains")
    s = s_form(rep, u, u)
    return rep.cone_test(z.imag - s.real)


def siegel_translation(
    rep: RepresentationConfig,
    z: AlgebraElement,
    u: Sequence[complex],
    d: Sequence[complex],
) -> Tuple[AlgebraElement, np.ndarray]:
    """``(z + 2i S(u,d) + i S(d,d), u + d)``, an automorphism of the Siegel domain."""
    u = _as_vector(u, rep.dim_u, "u")
    d = _as_vector(d, rep.dim_u, "d")
    shift = 2j * s_form(rep, u, d).coords + 1j * s_form(rep, d, d).coords
    return AlgebraElement(rep.descriptor, z.coords + shift), u + d


def psi_inverse(rep: RepresentationConfig, z: AlgebraElement) -> np.ndarray:
    """``psi(z)^{-1}``; raises NotInvertibleError for singular psi(z)."""
    p = rep.psi(z)
    try:
        return scipy.linalg.inv(p)
    except (np.linalg.LinAlgError, ValueError):
        raise NotInvertibleError("psi(z) is singular", complex(np.linalg.det(p)))
