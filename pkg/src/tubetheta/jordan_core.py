"""
Euclidean Jordan algebras in coordinates.

An algebra is described by an :class:`AlgebraDescriptor` and its elements are
coordinate vectors with respect to a fixed real basis. The same layout carries
complex coordinates for the complexified algebra, so one arithmetic path
serves both ``V`` and ``V^C``.

Coordinate layouts
------------------
RealLine
    ``(x,)``.
SymReal(n)
    diagonal entries ``x_11 .. x_nn`` followed by ``x_ij`` for ``i < j`` in
    row-major order; the basis element for ``x_ij`` is ``E_ij + E_ji``.
HermComplex(n)
    diagonal entries, then the real parts ``a_ij`` and finally the imaginary
    parts ``b_ij`` of the entries above the diagonal, ``X_ij = a_ij + i b_ij``.
SpinFactor(d)
    ``(lambda, v_1, .., v_{d-1})`` with ``(l, v) o (m, w) = (lm + <v,w>, lw + mv)``.
DirectSum
    concatenation of the summands' coordinates.
Generic
    a bare vector space without Jordan product, produced by domain reduction
    or by custom representation arrays.
"""

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .config import DEFAULT_SETTINGS, Settings
from .errors import (
    DescriptorMismatchError,
    DimensionMismatchError,
    NotInvertibleError,
    ScenarioError,
    UnsupportedOperationError,
)


class AlgebraKind(str, Enum):
    REAL_LINE = "RealLine"
    SYM_REAL = "SymReal"
    HERM_COMPLEX = "HermComplex"
    SPIN_FACTOR = "SpinFactor"
    DIRECT_SUM = "DirectSum"
    GENERIC = "Generic"


@dataclass(frozen=True)
class AlgebraDescriptor:
    """Kind and parameters of a Jordan algebra.

    Use the factory functions :func:`real_line`, :func:`sym_real`,
    :func:`herm_complex`, :func:`spin_factor`, :func:`direct_sum` and
    :func:`generic` rather than calling the constructor directly.
    """

    kind: AlgebraKind
    n: int = 1
    summands: Tuple["AlgebraDescriptor", ...] = ()

    def __post_init__(self):
        if self.kind == AlgebraKind.DIRECT_SUM:
            if len(self.summands) < 1:
                raise ValueError("DirectSum needs at least one summand")
            return
        if self.summands:
            raise ValueError(f"{self.kind.value} does not take summands")
        if self.kind == AlgebraKind.REAL_LINE and self.n != 1:
            raise ValueError(f"RealLine has no parameter, got n={self.n}")
        if self.kind == AlgebraKind.SPIN_FACTOR and self.n < 2:
            raise ValueError(f"SpinFactor dimension must be at least 2, got {self.n}")
        if self.n < 1:
            raise ValueError(f"{self.kind.value} parameter must be positive, got {self.n}")

    @cached_property
    def dim(self) -> int:
        """Real dimension of V."""
        if self.kind == AlgebraKind.SYM_REAL:
            return self.n * (self.n + 1) // 2
        if self.kind == AlgebraKind.HERM_COMPLEX:
            return self.n * self.n
        if self.kind == AlgebraKind.DIRECT_SUM:
            return sum(s.dim for s in self.summands)
        return self.n

    @cached_property
    def rank(self) -> int:
        """Jordan rank (0 for the generic kind, which has no Jordan structure)."""
        if self.kind in (AlgebraKind.SYM_REAL, AlgebraKind.HERM_COMPLEX):
            return self.n
        if self.kind == AlgebraKind.SPIN_FACTOR:
            return 2
        if self.kind == AlgebraKind.DIRECT_SUM:
            return sum(s.rank for s in self.summands)
        if self.kind == AlgebraKind.GENERIC:
            return 0
        return 1

    @cached_property
    def labels(self) -> Tuple[str, ...]:
        """Basis labels for the V coordinates."""
        if self.kind == AlgebraKind.REAL_LINE:
            return ("x",)
        if self.kind == AlgebraKind.GENERIC:
            return tuple(f"x{k + 1}" for k in range(self.n))
        if self.kind == AlgebraKind.SPIN_FACTOR:
            return ("l",) + tuple(f"v{k}" for k in range(1, self.n))
        if self.kind == AlgebraKind.DIRECT_SUM:
            return tuple(
                f"s{index}.{label}"
                for index, summand in enumerate(self.summands)
                for label in summand.labels
            )
        n = self.n
        diagonal = [f"x{i + 1}{i + 1}" for i in range(n)]
        upper = [(i, j) for i in range(n) for j in range(i + 1, n)]
        if self.kind == AlgebraKind.SYM_REAL:
            return tuple(diagonal + [f"x{i + 1}{j + 1}" for i, j in upper])
        return tuple(
            diagonal
            + [f"re{i + 1}{j + 1}" for i, j in upper]
            + [f"im{i + 1}{j + 1}" for i, j in upper]
        )

    @property
    def is_jordan(self) -> bool:
        """True unless the descriptor (or one of its summands) is generic."""
        if self.kind == AlgebraKind.DIRECT_SUM:
            return all(s.is_jordan for s in self.summands)
        return self.kind != AlgebraKind.GENERIC

    @property
    def name(self) -> str:
        if self.kind == AlgebraKind.REAL_LINE:
            return "RealLine"
        if self.kind == AlgebraKind.DIRECT_SUM:
            return "DirectSum(" + ", ".join(s.name for s in self.summands) + ")"
        return f"{self.kind.value}({self.n})"

    def offsets(self) -> List[Tuple[int, int]]:
        """Coordinate slices ``(start, stop)`` of the direct summands."""
        result, start = [], 0
        for summand in self.summands:
            result.append((start, start + summand.dim))
            start += summand.dim
        return result

    @cached_property
    def sigma_gram(self) -> np.ndarray:
        """Gram matrix of the trace form in V coordinates."""
        if self.kind == AlgebraKind.GENERIC:
            raise UnsupportedOperationError(
                "Generic algebras have no intrinsic trace form; "
                "use the representation's sigma_gram"
            )
        if self.kind == AlgebraKind.REAL_LINE:
            return np.ones((1, 1))
        if self.kind == AlgebraKind.SPIN_FACTOR:
            return 2.0 * np.eye(self.n)
        if self.kind == AlgebraKind.DIRECT_SUM:
            return scipy.linalg.block_diag(*(s.sigma_gram for s in self.summands))
        weights = np.full(self.dim, 2.0)
        weights[: self.n] = 1.0
        return np.diag(weights)

    def to_spec(self) -> Dict[str, Any]:
        """Scenario-file representation of the descriptor."""
        if self.kind == AlgebraKind.DIRECT_SUM:
            return {
                "kind": self.kind.value,
                "summands": [s.to_spec() for s in self.summands],
            }
        if self.kind == AlgebraKind.REAL_LINE:
            return {"kind": self.kind.value}
        return {"kind": self.kind.value, "n": self.n}


def real_line() -> AlgebraDescriptor:
    return AlgebraDescriptor(AlgebraKind.REAL_LINE)


def sym_real(n: int) -> AlgebraDescriptor:
    return AlgebraDescriptor(AlgebraKind.SYM_REAL, n)


def herm_complex(n: int) -> AlgebraDescriptor:
    return AlgebraDescriptor(AlgebraKind.HERM_COMPLEX, n)


def spin_factor(d: int) -> AlgebraDescriptor:
    return AlgebraDescriptor(AlgebraKind.SPIN_FACTOR, d)


def direct_sum(*summands: AlgebraDescriptor) -> AlgebraDescriptor:
    return AlgebraDescriptor(AlgebraKind.DIRECT_SUM, summands=tuple(summands))


def generic(dim: int) -> AlgebraDescriptor:
    return AlgebraDescriptor(AlgebraKind.GENERIC, dim)


def descriptor_from_spec(spec: Dict[str, Any], field: str = "kind") -> AlgebraDescriptor:
    """Build a descriptor from its scenario-file form.

    Parameters
    ----------
    spec
        Mapping with ``kind`` and, depending on the kind, ``n`` or
        ``summands``.
    field
        Field path used in error messages.
    """
    kind_name = spec.get("kind")
    try:
        kind = AlgebraKind(kind_name)
    except ValueError:
        allowed = ", ".join(k.value for k in AlgebraKind)
        raise ScenarioError(f"Unknown algebra kind {kind_name!r} (allowed: {allowed})", field)

    try:
        if kind == AlgebraKind.DIRECT_SUM:
            summands = spec.get("summands")
            if not isinstance(summands, list) or not summands:
                raise ScenarioError(
                    "DirectSum needs a non-empty 'summands' list", f"{field}.summands"
                )
            return direct_sum(
                *(
                    descriptor_from_spec(s, f"{field}.summands[{k}]")
                    for k, s in enumerate(summands)
                )
            )
        if kind == AlgebraKind.REAL_LINE:
            return real_line()
        n = spec.get("n")
        if not isinstance(n, int):
            raise ScenarioError(f"{kind.value} needs an integer 'n'", f"{field}.n")
        return AlgebraDescriptor(kind, n)
    except ScenarioError:
        raise
    except ValueError as e:
        raise ScenarioError(str(e), field)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """An element of V (real coordinates) or of V^C (complex coordinates)."""

    descriptor: AlgebraDescriptor
    coords: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords)
        if coords.ndim != 1 or coords.shape[0] != self.descriptor.dim:
            raise DimensionMismatchError(
                f"{self.descriptor.name} needs {self.descriptor.dim} coordinates, "
                f"got shape {coords.shape}"
            )
        if np.iscomplexobj(coords):
            coords = coords.astype(complex)
            if not np.any(coords.imag):
                coords = coords.real.copy()
        else:
            coords = coords.astype(float)
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.coords)

    @property
    def real(self) -> "AlgebraElement":
        return AlgebraElement(self.descriptor, np.real(self.coords))

    @property
    def imag(self) -> "AlgebraElement":
        return AlgebraElement(self.descriptor, np.imag(self.coords))

    def conj(self) -> "AlgebraElement":
        return AlgebraElement(self.descriptor, np.conj(self.coords))

    def _check(self, other: "AlgebraElement") -> None:
        if not isinstance(other, AlgebraElement):
            raise TypeError(f"Expected AlgebraElement, got {type(other).__name__}")
        if other.descriptor != self.descriptor:
            raise DescriptorMismatchError(
                f"{self.descriptor.name} and {other.descriptor.name} differ"
            )

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.descriptor, self.coords + other.coords)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.descriptor, self.coords - other.coords)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.descriptor, -self.coords)

    def __mul__(self, scalar: complex) -> "AlgebraElement":
        if isinstance(scalar, AlgebraElement):
            return jordan_product(self, scalar)
        return AlgebraElement(self.descriptor, scalar * self.coords)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"AlgebraElement({self.descriptor.name}, {self.coords.tolist()})"


def element(descriptor: AlgebraDescriptor, coords: Sequence[complex]) -> AlgebraElement:
    return AlgebraElement(descriptor, np.asarray(coords))


def complex_element(
    real_part: AlgebraElement, imag_part: AlgebraElement
) -> AlgebraElement:
    """``x + i y`` from two real elements."""
    real_part._check(imag_part)
    return AlgebraElement(real_part.descriptor, real_part.coords + 1j * imag_part.coords)


# ---------------------------------------------------------------------------
# Matrix kinds


def _upper_pairs(n: int) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def basis_matrices(descriptor: AlgebraDescriptor) -> List[np.ndarray]:
    """Matrices (real or complex n x n) of the basis of a matrix kind."""
    if descriptor.kind not in (AlgebraKind.SYM_REAL, AlgebraKind.HERM_COMPLEX):
        raise UnsupportedOperationError(f"{descriptor.name} is not a matrix kind")
    n = descriptor.n
    dtype = complex if descriptor.kind == AlgebraKind.HERM_COMPLEX else float
    result = []
    for i in range(n):
        m = np.zeros((n, n), dtype=dtype)
        m[i, i] = 1
        result.append(m)
    for i, j in _upper_pairs(n):
        m = np.zeros((n, n), dtype=dtype)
        m[i, j] = m[j, i] = 1
        result.append(m)
    if descriptor.kind == AlgebraKind.HERM_COMPLEX:
        for i, j in _upper_pairs(n):
            m = np.zeros((n, n), dtype=complex)
            m[i, j] = 1j
            m[j, i] = -1j
            result.append(m)
    return result


def to_matrix(a: AlgebraElement) -> np.ndarray:
    """Matrix of an element of a matrix kind (complex coordinates allowed)."""
    mats = basis_matrices(a.descriptor)
    return np.tensordot(a.coords, np.array(mats), axes=1)


def from_matrix(
    descriptor: AlgebraDescriptor, m: np.ndarray, real: bool = False
) -> AlgebraElement:
    """Coordinates of a matrix in the span of the basis of a matrix kind.

    Inverse of :func:`to_matrix` on that span; off-diagonal coordinates are
    read from the symmetric (and, for Hermitian kinds, skew) parts. With
    ``real=True`` the matrix is known to represent a real element and
    rounding residue in the imaginary parts of the coordinates is dropped.
    """
    n = descriptor.n
    m = np.asarray(m)
    if m.shape != (n, n):
        raise DimensionMismatchError(f"Expected a {n}x{n} matrix, got shape {m.shape}")
    pairs = _upper_pairs(n)
    coords = [m[i, i] for i in range(n)]
    coords += [(m[i, j] + m[j, i]) / 2 for i, j in pairs]
    if descriptor.kind == AlgebraKind.HERM_COMPLEX:
        coords += [(m[i, j] - m[j, i]) / 2j for i, j in pairs]
    elif descriptor.kind != AlgebraKind.SYM_REAL:
        raise UnsupportedOperationError(f"{descriptor.name} is not a matrix kind")
    coords = np.array(coords)
    if real:
        coords = np.real(coords)
    return AlgebraElement(descriptor, coords)


def _split(a: AlgebraElement) -> List[AlgebraElement]:
    return [
        AlgebraElement(summand, a.coords[start:stop])
        for summand, (start, stop) in zip(a.descriptor.summands, a.descriptor.offsets())
    ]


def _join(descriptor: AlgebraDescriptor, parts: Sequence[AlgebraElement]) -> AlgebraElement:
    return AlgebraElement(descriptor, np.concatenate([p.coords for p in parts]))


def _require_jordan(descriptor: AlgebraDescriptor, operation: str) -> None:
    if not descriptor.is_jordan:
        raise UnsupportedOperationError(
            f"{operation} needs a Jordan structure; {descriptor.name} has none"
        )


# ---------------------------------------------------------------------------
# Operations


def jordan_product(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Jordan product ``a o b`` (bilinear, also over the complexification)."""
    a._check(b)
    descriptor = a.descriptor
    _require_jordan(descriptor, "jordan_product")
    kind = descriptor.kind
    if kind == AlgebraKind.REAL_LINE:
        return AlgebraElement(descriptor, a.coords * b.coords)
    if kind == AlgebraKind.SPIN_FACTOR:
        la, va = a.coords[0], a.coords[1:]
        lb, vb = b.coords[0], b.coords[1:]
        head = la * lb + np.dot(va, vb)
        return AlgebraElement(descriptor, np.concatenate([[head], la * vb + lb * va]))
    if kind == AlgebraKind.DIRECT_SUM:
        return _join(descriptor, [jordan_product(x, y) for x, y in zip(_split(a), _split(b))])
    ma, mb = to_matrix(a), to_matrix(b)
    product = (ma @ mb + mb @ ma) / 2
    return from_matrix(descriptor, product, real=a.is_real and b.is_real)


def unit(descriptor: AlgebraDescriptor) -> AlgebraElement:
    """Identity element e of the Jordan product."""
    _require_jordan(descriptor, "unit")
    kind = descriptor.kind
    if kind == AlgebraKind.REAL_LINE:
        return AlgebraElement(descriptor, np.ones(1))
    if kind == AlgebraKind.SPIN_FACTOR:
        coords = np.zeros(descriptor.dim)
        coords[0] = 1.0
        return AlgebraElement(descriptor, coords)
    if kind == AlgebraKind.DIRECT_SUM:
        return _join(descriptor, [unit(s) for s in descriptor.summands])
    return from_matrix(descriptor, np.eye(descriptor.n), real=True)


def jordan_determinant(a: AlgebraElement) -> complex:
    """Generic norm of an element (product over direct summands)."""
    descriptor = a.descriptor
    _require_jordan(descriptor, "jordan_determinant")
    kind = descriptor.kind
    if kind == AlgebraKind.REAL_LINE:
        return a.coords[0]
    if kind == AlgebraKind.SPIN_FACTOR:
        return a.coords[0] ** 2 - np.dot(a.coords[1:], a.coords[1:])
    if kind == AlgebraKind.DIRECT_SUM:
        return np.prod([jordan_determinant(p) for p in _split(a)])
    return np.linalg.det(to_matrix(a))


def inverse(a: AlgebraElement, settings: Optional[Settings] = None) -> AlgebraElement:
    """Jordan inverse of ``a``.

    Raises
    ------
    NotInvertibleError
        If ``|det a| <= invertibility_threshold * scale**rank`` where ``scale``
        is the largest coordinate magnitude (checked per direct summand).
    """
    settings = settings or DEFAULT_SETTINGS
    descriptor = a.descriptor
    _require_jordan(descriptor, "inverse")
    if descriptor.kind == AlgebraKind.DIRECT_SUM:
        return _join(descriptor, [inverse(p, settings) for p in _split(a)])

    det = jordan_determinant(a)
    scale = float(np.max(np.abs(a.coords)))
    if scale == 0.0 or abs(det) <= settings.invertibility_threshold * scale**descriptor.rank:
        raise NotInvertibleError(f"{descriptor.name} element is not invertible", det)

    kind = descriptor.kind
    if kind == AlgebraKind.REAL_LINE:
        return AlgebraElement(descriptor, 1.0 / a.coords)
    if kind == AlgebraKind.SPIN_FACTOR:
        return AlgebraElement(
            descriptor, np.concatenate([[a.coords[0]], -a.coords[1:]]) / det
        )
    return from_matrix(descriptor, np.linalg.inv(to_matrix(a)), real=a.is_real)


def trace_form(a: AlgebraElement, b: AlgebraElement) -> complex:
    """Associative trace form sigma(a, b), bilinear without conjugation."""
    a._check(b)
    value = a.coords @ a.descriptor.sigma_gram @ b.coords
    return value.item() if hasattr(value, "item") else value


def cone_contains(x: AlgebraElement, rep: Any, epsilon: Optional[float] = None) -> bool:
    """Whether ``x`` lies in the positivity cone Y of ``rep``.

    ``x`` belongs to Y when the smallest eigenvalue of ``psi(x)`` exceeds
    ``epsilon`` times its largest eigenvalue magnitude. The default
    ``epsilon=None`` uses the boundary cushion ``settings.cone_epsilon`` of
    ``rep``, so points within that relative distance of the boundary are
    excluded; ``epsilon=0`` is the plain strict test. Boundary information is
    available from ``rep.cone_test``.
    """
    return rep.cone_test(x, epsilon).member
