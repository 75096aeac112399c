"""
Numerical verification of the theta transformation identities.

Every check returns :class:`IdentityCheck` records. A record compares two
complex numbers with the relative residual
``|lhs - rhs| / max(1, |lhs|, |rhs|)`` and refuses to exist when its
tolerance does not dominate the truncation bounds of the evaluations that
produced it. Matrix identities report their normalized Frobenius defect as
``lhs`` against ``rhs = 0``.
"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import (
    TYPE_CHECKING,
    Any,
    Callable,
    Dict,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np
import scipy.integrate
import scipy.linalg
import sympy

from .errors import (
    CertificationError,
    DimensionMismatchError,
    DomainError,
    LatticeMembershipError,
    NotInvertibleError,
    TubeThetaError,
    UnsupportedConfigurationError,
    UnsupportedOperationError,
)
from .jordan_core import (
    AlgebraDescriptor,
    AlgebraElement,
    AlgebraKind,
    basis_matrices,
    from_matrix,
    inverse,
    jordan_product,
    trace_form,
    unit,
)
from .lattice import (
    Lattice,
    covolume,
    dual_lattice,
    period_lattice,
    rational_vector,
    require_member,
    transform_lattice,
)
from .representation import (
    RepresentationConfig,
    _as_vector,
    _natural_psi,
    basepoint_transform,
    clifford_generators,
    normalize_basepoint,
    psi_inverse,
    realify,
    rho_adjoint,
    s_form,
    sigma_adjoint,
)
from .sample_points import (
    SamplePoint,
    random_cone_element,
    random_vector,
)
from .theta_engine import (
    ThetaEvaluation,
    expected_fourier_coefficient,
    fourier_coefficient,
    lattice_gaussian_sum,
    theta_eval,
)

if TYPE_CHECKING:
    from .scenarios import Scenario

logger = logging.getLogger(__name__)

# Fraction of a check tolerance granted to each theta evaluation.
EVALUATION_SHARE = 1e-3


@dataclass(frozen=True)
class IdentityCheck:
    """One numerical comparison of two sides of an identity.

    ``residual`` and ``passed`` are derived. Construction raises
    :class:`CertificationError` when the tolerance does not exceed the
    summed tail bounds relative to the comparison scale.
    """

    tag: str
    lhs: complex
    rhs: complex
    tolerance: float
    tail_bounds: Tuple[float, ...] = ()
    inputs: Dict[str, Any] = field(default_factory=dict)
    sample: int = 0
    error: Optional[str] = None
    extras: Dict[str, Any] = field(default_factory=dict)
    residual: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance!r}")
        if self.error is not None:
            object.__setattr__(self, "residual", math.nan)
            object.__setattr__(self, "passed", False)
            return
        lhs, rhs = complex(self.lhs), complex(self.rhs)
        scale = max(1.0, abs(lhs), abs(rhs))
        certified = sum(self.tail_bounds) / scale
        if not self.tolerance > certified:
            raise CertificationError(
                f"{self.tag}: tolerance {self.tolerance:.3e} does not exceed the "
                f"summed tail bounds {certified:.3e}"
            )
        residual = abs(lhs - rhs) / scale
        object.__setattr__(self, "lhs", lhs)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "residual", residual)
        object.__setattr__(self, "passed", bool(residual <= self.tolerance))

    @classmethod
    def failure(
        cls,
        tag: str,
        error: Exception,
        tolerance: float,
        inputs: Optional[Dict[str, Any]] = None,
        sample: int = 0,
    ) -> "IdentityCheck":
        """Record a check that could not be evaluated."""
        return cls(
            tag,
            complex(math.nan, math.nan),
            complex(math.nan, math.nan),
            tolerance,
            inputs=inputs or {},
            sample=sample,
            error=f"{type(error).__name__}: {error}",
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tag": self.tag,
            "sample": self.sample,
            "inputs": self.inputs,
            "lhs": _pair(self.lhs),
            "rhs": _pair(self.rhs),
            "residual": _decimal(self.residual),
            "tolerance": _decimal(self.tolerance),
            "tail_bounds": [_decimal(b) for b in self.tail_bounds],
            "pass": self.passed,
            "error": self.error,
            "extras": self.extras,
        }


def _pair(value: complex) -> List[Optional[float]]:
    value = complex(value)
    return [_finite(value.real), _finite(value.imag)]


def _finite(x: float) -> Optional[float]:
    return float(x) if math.isfinite(x) else None


def _decimal(x: float) -> str:
    return "%.6e" % x


def _pairs(values: Any) -> List[List[Optional[float]]]:
    return [_pair(v) for v in np.asarray(values, dtype=complex).ravel()]


def _point_inputs(z: AlgebraElement, u: Sequence[complex], **extra: Any) -> Dict[str, Any]:
    inputs = {"z": _pairs(z.coords), "u": _pairs(u)}
    inputs.update(extra)
    return inputs


def matrix_check(
    tag: str,
    left: np.ndarray,
    right: np.ndarray,
    tolerance: float,
    inputs: Optional[Dict[str, Any]] = None,
    sample: int = 0,
) -> IdentityCheck:
    """Compare two arrays through ``|L - R|_F / max(1, |L|_F, |R|_F)``."""
    left, right = np.asarray(left), np.asarray(right)
    if left.shape != right.shape:
        raise DimensionMismatchError(f"{tag}: shapes {left.shape} and {right.shape} differ")
    defect = float(np.linalg.norm(left - right)) / max(
        1.0, float(np.linalg.norm(left)), float(np.linalg.norm(right))
    )
    return IdentityCheck(tag, defect, 0.0, tolerance, inputs=inputs or {}, sample=sample)


def count_check(
    tag: str,
    failures: int,
    tolerance: float = 0.5,
    inputs: Optional[Dict[str, Any]] = None,
    sample: int = 0,
) -> IdentityCheck:
    """Pass iff no sample failed."""
    return IdentityCheck(tag, failures, 0.0, tolerance, inputs=inputs or {}, sample=sample)


def _evaluate(
    rep: RepresentationConfig,
    lattice: Lattice,
    z: AlgebraElement,
    u: Sequence[complex],
    tolerance: float,
    factor: float = 1.0,
) -> ThetaEvaluation:
    return theta_eval(rep, lattice, z, u, tolerance * EVALUATION_SHARE / max(1.0, factor))


def _float_vector(vector: sympy.Matrix) -> np.ndarray:
    return np.array([float(v) for v in vector], dtype=float)


# ---------------------------------------------------------------------------
# Periodicities


def check_periodicity_u(
    rep: RepresentationConfig,
    lattice: Lattice,
    z: AlgebraElement,
    u: Sequence[complex],
    m: Sequence,
    tolerance: float = 1e-9,
    sample: int = 0,
) -> IdentityCheck:
    """``theta(z, u + m) = theta(z, u)`` for ``m`` in Lambda."""
    shift = _float_vector(require_member(lattice, m, "lattice"))
    u = _as_vector(u, rep.dim_u)
    left = _evaluate(rep, lattice, z, u + shift, tolerance)
    right = _evaluate(rep, lattice, z, u, tolerance)
    return IdentityCheck(
        "periodicity-u",
        left.value,
        right.value,
        tolerance,
        (left.tail_bound, right.tail_bound),
        _point_inputs(z, u, m=[str(v) for v in m]),
        sample,
    )


def check_quasiperiodicity(
    rep: RepresentationConfig,
    lattice: Lattice,
    z: AlgebraElement,
    u: Sequence[complex],
    n: Sequence,
    tolerance: float = 1e-9,
    sample: int = 0,
) -> IdentityCheck:
    """Quasi-periodicity along the dual lattice.

    ``theta(z, u + psi(z) n) = exp(-pi i rho(psi(z) n + 2u, n)) theta(z, u)``
    for ``n`` in the dual lattice.
    """
    dual = dual_lattice(lattice, rep.rho)
    shift = _float_vector(require_member(dual, n, "dual lattice"))
    u = _as_vector(u, rep.dim_u).astype(complex)
    p = rep.psi(z)
    factor = np.exp(-1j * np.pi * rep.rho(p @ shift + 2 * u, shift))
    left = _evaluate(rep, lattice, z, u + p @ shift, tolerance)
    right = _evaluate(rep, lattice, z, u, tolerance, abs(factor))
    return IdentityCheck(
        "quasi-periodicity",
        left.value,
        factor * right.value,
        tolerance,
        (left.tail_bound, abs(factor) * right.tail_bound),
        _point_inputs(z, u, n=[str(v) for v in n]),
        sample,
    )


def check_periodicity_z(
    rep: RepresentationConfig,
    lattice: Lattice,
    z: AlgebraElement,
    u: Sequence[complex],
    k: Sequence,
    tolerance: float = 1e-9,
    sample: int = 0,
) -> IdentityCheck:
    """``theta(z + k, u) = theta(z, u)`` for ``k`` in the period lattice."""
    periods = period_lattice(rep, lattice)
    vector = k if isinstance(k, sympy.MatrixBase) else rational_vector(k)
    if not periods.contains(vector):
        raise LatticeMembershipError(f"{list(vector)} is not in the period lattice")
    shifted = AlgebraElement(rep.descriptor, z.coords + _float_vector(vector))
    left = _evaluate(rep, lattice, shifted, u, tolerance)
    right = _evaluate(rep, lattice, z, u, tolerance)
    return IdentityCheck(
        "periodicity-z",
        left.value,
        right.value,
        tolerance,
        (left.tail_bound, right.tail_bound),
        _point_inputs(z, u, k=[str(v) for v in vector]),
        sample,
    )


def check_evenness(
    rep: RepresentationConfig,
    lattice: Lattice,
    z: AlgebraElement,
    u: Sequence[complex],
    tolerance: float = 1e-9,
    sample: int = 0,
) -> IdentityCheck:
    """``theta(z, -u) = theta(z, u)``."""
    u = _as_vector(u, rep.dim_u)
    left = _evaluate(rep, lattice, z, -u, tolerance)
    right = _evaluate(rep, lattice, z, u, tolerance)
    return IdentityCheck(
        "evenness",
        left.value,
        right.value,
        tolerance,
        (left.tail_bound, right.tail_bound),
        _point_inputs(z, u),
        sample,
    )


def check_certification(
    rep: RepresentationConfig,
    lattice: Lattice,
    z: AlgebraElement,
    u: Sequence[complex],
    tol: float = 1e-10,
    sample: int = 0,
) -> IdentityCheck:
    """``theta`` at tolerance ``tol`` against ``tol / 100``.

    Both truncation errors together stay below ``1.01 tol``, so the check
    tolerance is ``1.02 tol`` (absolute whenever ``|theta| <= 1``).
    """
    coarse = theta_eval(rep, lattice, z, u, tol)
    fine = theta_eval(rep, lattice, z, u, tol / 100)
    return IdentityCheck(
        "certification",
        coarse.value,
        fine.value,
        1.02 * tol,
        (coarse.tail_bound, fine.tail_bound),
        _point_inputs(z, u, tol=_decimal(tol)),
        sample,
        extras={"points": [coarse.points_summed, fine.points_summed]},
    )


# ---------------------------------------------------------------------------
# Linear substitutions


class LinearPair(NamedTuple):
    """``W`` acting on V coordinates and ``W_hat`` on U."""

    name: str
    w: np.ndarray
    w_hat: np.ndarray

    @property
    def is_integral(self) -> bool:
        return bool(np.all(self.w_hat == np.round(self.w_hat)))


def _congruence(descriptor: AlgebraDescriptor, g: np.ndarray) -> np.ndarray:
    """Matrix of ``x -> g x g^*`` on the coordinates of a matrix kind."""
    columns = [
        from_matrix(descriptor, g @ b @ np.conj(g).T).coords
        for b in basis_matrices(descriptor)
    ]
    return np.real_if_close(np.array(columns).T).astype(float)


def _matrix_kind_pairs(descriptor: AlgebraDescriptor) -> List[LinearPair]:
    n = descriptor.n
    hermitian = descriptor.kind == AlgebraKind.HERM_COMPLEX
    moves = []
    if n >= 2:
        upper = np.eye(n)
        upper[0, 1] = 1
        lower = np.eye(n)
        lower[1, 0] = -1
        swap = np.eye(n)[[1, 0] + list(range(2, n))]
        moves += [("shear-upper", upper), ("shear-lower", lower), ("swap", swap)]
    flip = np.eye(n)
    flip[0, 0] = -1
    moves.append(("flip", flip))
    if hermitian:
        phase = np.eye(n, dtype=complex)
        phase[0, 0] = 1j
        moves.append(("phase", phase))
    pairs = []
    for name, g in moves:
        w_hat = realify(g) if hermitian else g
        pairs.append(LinearPair(name, _congruence(descriptor, g), np.real(w_hat)))
    return pairs


def _spin_pairs(descriptor: AlgebraDescriptor) -> List[LinearPair]:
    gammas = clifford_generators(descriptor.n - 1)
    pairs = []
    for i, gamma in enumerate(gammas):
        w = -np.eye(descriptor.dim)
        w[0, 0] = 1
        w[i + 1, i + 1] = 1
        pairs.append(LinearPair(f"reflect-{i + 1}", w, gamma))
    for i in range(len(gammas)):
        for j in range(i + 1, len(gammas)):
            w = np.eye(descriptor.dim)
            w[i + 1, i + 1] = w[j + 1, j + 1] = -1
            pairs.append(LinearPair(f"rotate-{i + 1}{j + 1}", w, gammas[i] @ gammas[j]))
    return pairs


def _kind_pairs(descriptor: AlgebraDescriptor) -> List[LinearPair]:
    kind = descriptor.kind
    if kind in (AlgebraKind.SYM_REAL, AlgebraKind.HERM_COMPLEX):
        return _matrix_kind_pairs(descriptor)
    if kind == AlgebraKind.SPIN_FACTOR:
        return _spin_pairs(descriptor)
    if kind != AlgebraKind.DIRECT_SUM:
        return []
    sizes_v = [s.dim for s in descriptor.summands]
    sizes_u = [_natural_psi(s).shape[1] for s in descriptor.summands]
    pairs = []
    for index, summand in enumerate(descriptor.summands):
        scale = LinearPair(
            "scale", 4.0 * np.eye(summand.dim), 2.0 * np.eye(sizes_u[index])
        )
        for pair in [scale] + _kind_pairs(summand):
            w_blocks = [np.eye(d) for d in sizes_v]
            u_blocks = [np.eye(d) for d in sizes_u]
            w_blocks[index] = pair.w
            u_blocks[index] = pair.w_hat
            pairs.append(
                LinearPair(
                    f"s{index}.{pair.name}",
                    scipy.linalg.block_diag(*w_blocks),
                    scipy.linalg.block_diag(*u_blocks),
                )
            )
    return pairs


def _is_natural(rep: RepresentationConfig) -> bool:
    if not rep.descriptor.is_jordan:
        return False
    try:
        natural = _natural_psi(rep.descriptor)
    except UnsupportedConfigurationError:
        return False
    return natural.shape == rep.psi_basis.shape and bool(
        np.allclose(natural, rep.psi_basis) and np.allclose(rep.rho.gram, np.eye(rep.dim_u))
    )


def standard_pairs(rep: RepresentationConfig) -> List[LinearPair]:
    """Linear pairs ``(W, W_hat)`` with ``psi(W z) = W_hat psi(z) W_hat^rho``.

    Always: identity, parity ``(I, -I)``, scaling ``(4I, 2I)`` and the
    irrational scalings ``(tI, sqrt(t) I)`` for ``t = 2, 3``. For the built-in
    representations also integer congruences (matrix kinds), Clifford
    reflections (spin factors) and blockwise pairs (direct sums).
    """
    dv, du = rep.dim_v, rep.dim_u
    pairs = [
        LinearPair("identity", np.eye(dv), np.eye(du)),
        LinearPair("parity", np.eye(dv), -np.eye(du)),
        LinearPair("scale-2", 4.0 * np.eye(dv), 2.0 * np.eye(du)),
        LinearPair("sqrt-scale-2", 2.0 * np.eye(dv), math.sqrt(2.0) * np.eye(du)),
        LinearPair("sqrt-scale-3", 3.0 * np.eye(dv), math.sqrt(3.0) * np.eye(du)),
    ]
    if _is_natural(rep):
        pairs += _kind_pairs(rep.descriptor)
    return pairs


def check_linear_pair(
    rep: RepresentationConfig,
    lattice: Lattice,
    w: np.ndarray,
    w_hat: np.ndarray,
    samples: Sequence[SamplePoint],
    tolerance: float = 1e-9,
    algebraic_tolerance: float = 1e-12,
    seed: int = 0,
    name: str = "pair",
) -> List[IdentityCheck]:
    """Verify a linear substitution ``(W, W_hat)``.

    Checks the algebraic identity ``psi(W x) = W_hat psi(x) W_hat^rho``, the
    S-equivariance ``S(W_hat^rho u, W_hat^rho v) = W^sigma S(u, v)``, that W
    maps sampled cone points into the cone (both directions), and the theta
    identity ``theta_{W_hat Lambda}(W z, W_hat u) = theta_Lambda(z, u)``.
    """
    w = np.asarray(w, dtype=float)
    w_hat = np.asarray(w_hat, dtype=float)
    if w.shape != (rep.dim_v, rep.dim_v) or w_hat.shape != (rep.dim_u, rep.dim_u):
        raise DimensionMismatchError(f"{name}: W or W_hat has the wrong shape")
    for label, matrix in (("W", w), ("W_hat", w_hat)):
        if np.linalg.cond(matrix) > 1e12:
            raise NotInvertibleError(
                f"{name}: {label} is singular", float(np.linalg.det(matrix))
            )
    inputs = {"pair": name}
    rng = np.random.default_rng(seed)
    w_hat_rho = rho_adjoint(rep, w_hat)

    image = np.tensordot(w.T, rep.psi_basis, axes=1)
    conjugated = np.einsum("ij,ajk,kl->ail", w_hat, rep.psi_basis, w_hat_rho)
    checks = [matrix_check("linear-psi", image, conjugated, algebraic_tolerance, inputs)]

    w_sigma = sigma_adjoint(rep, w)
    left, right = [], []
    for _ in range(8):
        u = random_vector(rep.dim_u, rng, 1.0, 1.0)
        v = random_vector(rep.dim_u, rng, 1.0, 1.0)
        left.append(s_form(rep, w_hat_rho @ u, w_hat_rho @ v).coords)
        right.append(w_sigma @ s_form(rep, u, v).coords)
    checks.append(
        matrix_check("linear-s-equivariance", left, right, algebraic_tolerance, inputs)
    )

    w_inv = np.linalg.inv(w)
    failures = 0
    for _ in range(16):
        y = random_cone_element(rep, rng)
        for matrix in (w, w_inv):
            if not rep.cone_test(AlgebraElement(rep.descriptor, matrix @ y.coords)).member:
                failures += 1
    checks.append(count_check("linear-cone", failures, inputs=inputs))

    dual_basis = np.linalg.solve(w_hat_rho, dual_lattice(lattice, rep.rho).float_basis)
    for index, (z, u) in enumerate(samples):
        point_inputs = _point_inputs(z, u, pair=name)
        try:
            wz = AlgebraElement(rep.descriptor, w @ z.coords)
            right_side = _evaluate(rep, lattice, z, u, tolerance)
            left_side = lattice_gaussian_sum(
                dual_basis,
                rep.rho.gram,
                rep.psi(wz),
                w_hat @ np.asarray(u),
                tolerance * EVALUATION_SHARE,
                rep.settings,
            )
            checks.append(
                IdentityCheck(
                    "linear-theta",
                    left_side.value,
                    right_side.value,
                    tolerance,
                    (left_side.tail_bound, right_side.tail_bound),
                    point_inputs,
                    index,
                )
            )
        except TubeThetaError as error:
            checks.append(
                IdentityCheck.failure("linear-theta", error, tolerance, point_inputs, index)
            )
    return checks


def check_lattice_transform(
    rep: RepresentationConfig, lattice: Lattice, b_hat: Any, name: str = "pair"
) -> IdentityCheck:
    """``(B_hat Lambda)^rho`` equals ``(B_hat^rho)^{-1} Lambda^rho`` exactly."""
    result = transform_lattice(lattice, sympy.Matrix(b_hat), rep.rho)
    return IdentityCheck(
        "lattice-transform",
        0.0 if result.consistent else 1.0,
        0.0,
        1e-12,
        inputs={"pair": name, "dual": result.dual.basis_strings()},
    )


# ---------------------------------------------------------------------------
# Analytic lemmas


def det_sqrt(rep: RepresentationConfig, z: AlgebraElement) -> complex:
    """``det(-i psi(z))^{1/2}`` through principal logarithms of the eigenvalues.

    The eigenvalues lie in the open right half-plane when ``Im z`` is in the
    cone, which makes this branch holomorphic and positive on ``i Y``.
    """
    eigenvalues = np.linalg.eigvals(-1j * rep.psi(z).astype(complex))
    return complex(np.exp(0.5 * np.sum(np.log(eigenvalues))))


def h_factor(rep: RepresentationConfig, z: AlgebraElement, u: Sequence[complex]) -> complex:
    """``H(z, u) = det(-i psi(z))^{1/2} exp(pi i rho(psi(z)^{-1} u, u))``."""
    test = rep.cone_test(z.imag)
    if not test.member:
        raise DomainError("Im z is not in the cone", test.min_eigenvalue)
    u = _as_vector(u, rep.dim_u).astype(complex)
    x = psi_inverse(rep, z) @ u
    return det_sqrt(rep, z) * complex(np.exp(1j * np.pi * rep.rho(x, u)))


def gaussian_integral_check(
    rep: RepresentationConfig,
    z: AlgebraElement,
    w: Sequence[complex],
    tolerance: Optional[float] = None,
    sample: int = 0,
) -> IdentityCheck:
    """``int exp(pi i rho(psi(z)(v + w), v + w)) dv = det(-i psi(z))^{-1/2}``.

    ``dv`` gives the rho-unit cube volume 1. Adaptive quadrature (dim U <= 2)
    integrates real and imaginary parts over a box around the peak of the
    integrand that drops it below ``exp(-40)``.
    """
    dim = rep.dim_u
    if dim > 2:
        raise UnsupportedOperationError(f"Gaussian integral check needs dim U <= 2, got {dim}")
    tolerance = tolerance if tolerance is not None else (1e-8 if dim == 1 else 1e-6)
    test = rep.cone_test(z.imag)
    if not test.member:
        raise DomainError("Im z is not in the cone", test.min_eigenvalue)
    w = _as_vector(w, dim).astype(complex)
    lower = rep.rho.cholesky_lower
    a = lower.T @ rep.psi(z).astype(complex) @ np.linalg.inv(lower.T)
    a = (a + a.T) / 2
    shift = lower.T @ w
    a_imag, a_real = np.imag(a), np.real(a)
    lam = float(np.linalg.eigvalsh(a_imag)[0])
    peak = -np.real(shift) - np.linalg.solve(a_imag, a_real @ np.imag(shift))
    width = math.sqrt(40.0 / (math.pi * lam))

    def integrand(s: np.ndarray) -> complex:
        x = s + shift
        return complex(np.exp(1j * np.pi * (x @ a @ x)))

    if dim == 1:
        limits = (peak[0] - width, peak[0] + width)
        options = {"epsabs": 1e-13, "epsrel": 1e-12, "limit": 400}
        re, re_err = scipy.integrate.quad(
            lambda s: integrand(np.array([s])).real, *limits, **options
        )
        im, im_err = scipy.integrate.quad(
            lambda s: integrand(np.array([s])).imag, *limits, **options
        )
    else:
        x0, x1 = peak[0] - width, peak[0] + width
        y0, y1 = peak[1] - width, peak[1] + width
        options = {"epsabs": 1e-10, "epsrel": 1e-10}
        re, re_err = scipy.integrate.dblquad(
            lambda t, s: integrand(np.array([s, t])).real, x0, x1, y0, y1, **options
        )
        im, im_err = scipy.integrate.dblquad(
            lambda t, s: integrand(np.array([s, t])).imag, x0, x1, y0, y1, **options
        )
    closed_form = 1.0 / det_sqrt(rep, z)
    return IdentityCheck(
        "gaussian-integral",
        complex(re, im),
        closed_form,
        tolerance,
        inputs=_point_inputs(z, w, quadrature_error=_decimal(re_err + im_err)),
        sample=sample,
    )


def check_square_completion(
    rep: RepresentationConfig,
    y: AlgebraElement,
    x: Sequence[complex],
    v: Sequence[complex],
    tolerance: float = 1e-12,
    sample: int = 0,
) -> IdentityCheck:
    """Completing the square with ``P = psi(y)``.

    ``rho(P(x + P^{-1} v), x + P^{-1} v) - rho(P^{-1} v, v) = rho(P x + 2v, x)``
    """
    test = rep.cone_test(y)
    if not test.member:
        raise DomainError("y is not in the cone", test.min_eigenvalue)
    x = _as_vector(x, rep.dim_u).astype(complex)
    v = _as_vector(v, rep.dim_u).astype(complex)
    p = rep.psi(y)
    moved = np.linalg.solve(p, v)
    shifted = x + moved
    left = rep.rho(p @ shifted, shifted) - rep.rho(moved, v)
    right = rep.rho(p @ x + 2 * v, x)
    return IdentityCheck(
        "square-completion",
        left,
        right,
        tolerance,
        inputs={"y": _pairs(y.coords), "x": _pairs(x), "v": _pairs(v)},
        sample=sample,
    )


# ---------------------------------------------------------------------------
# Transformation formulas


def check_partial_transformation(
    rep: RepresentationConfig,
    lattice: Lattice,
    z: AlgebraElement,
    u: Sequence[complex],
    tolerance: float = 1e-8,
    sample: int = 0,
) -> IdentityCheck:
    """Poisson summation: the sum over the dual lattice against the sum over Lambda.

    ``theta(z, u) = C det(-i psi(z))^{-1/2} exp(-pi i rho(psi(z)^{-1} u, u))
    sum_d exp(pi i rho(-psi(z)^{-1} d + 2 psi(z)^{-1} u, d))`` with ``C`` the
    covolume of Lambda.
    """
    u = _as_vector(u, rep.dim_u).astype(complex)
    left = _evaluate(rep, lattice, z, u, tolerance)
    p_inv = psi_inverse(rep, z)
    moved = p_inv @ u
    constant = covolume(lattice, rep.rho)
    prefactor = constant / det_sqrt(rep, z) * np.exp(-1j * np.pi * rep.rho(moved, u))
    weight = abs(prefactor)
    poisson = lattice_gaussian_sum(
        lattice.float_basis,
        rep.rho.gram,
        -p_inv,
        moved,
        tolerance * EVALUATION_SHARE / max(1.0, weight),
        rep.settings,
    )
    return IdentityCheck(
        "partial-transformation",
        left.value,
        prefactor * poisson.value,
        tolerance,
        (left.tail_bound, weight * poisson.tail_bound),
        _point_inputs(z, u, covolume=_decimal(constant)),
        sample,
    )


def _require_jordan_normalized(
    rep: RepresentationConfig, operation: str, unit_base: bool = True
) -> None:
    if not rep.descriptor.is_jordan or not rep.is_normalized:
        raise UnsupportedConfigurationError(
            f"{operation} needs a normalized representation of a Jordan algebra"
        )
    if unit_base and not rep.has_unit_base:
        raise UnsupportedConfigurationError(
            f"{operation} needs the base point to be the unit of {rep.descriptor.name}"
        )


def involution(rep: RepresentationConfig, z: AlgebraElement) -> AlgebraElement:
    """``j(z) = -z^{-1}``."""
    _require_jordan_normalized(rep, "involution", unit_base=False)
    return -inverse(z, rep.settings)


class _FullSides(NamedTuple):
    left: ThetaEvaluation
    right: ThetaEvaluation
    h: complex


def _full_sides(
    rep: RepresentationConfig,
    lattice: Lattice,
    z: AlgebraElement,
    u: np.ndarray,
    tol: float,
) -> _FullSides:
    _require_jordan_normalized(rep, "the full transformation")
    jz = involution(rep, z)
    ju = psi_inverse(rep, z) @ u
    h = h_factor(rep, z, u)
    left = theta_eval(rep, dual_lattice(lattice, rep.rho), jz, ju, tol)
    right = theta_eval(rep, lattice, z, u, tol / max(1.0, abs(h)))
    return _FullSides(left, right, h)


def check_full_transformation(
    rep: RepresentationConfig,
    lattice: Lattice,
    z: AlgebraElement,
    u: Sequence[complex],
    tolerance: float = 1e-10,
    sample: int = 0,
) -> IdentityCheck:
    """``theta_{Lambda^rho}(-z^{-1}, psi(z)^{-1} u) = c H(z, u) theta_Lambda(z, u)``.

    ``c = 1 / covolume(Lambda)``. The observed ratio ``lhs / (H theta)`` is
    kept in ``extras["c_ratio"]``.
    """
    u = _as_vector(u, rep.dim_u).astype(complex)
    c = 1.0 / covolume(lattice, rep.rho)
    sides = _full_sides(rep, lattice, z, u, tolerance * EVALUATION_SHARE / max(1.0, c))
    weight = c * abs(sides.h)
    extras = {}
    if sides.right.value != 0:
        extras["c_ratio"] = _pair(sides.left.value / (sides.h * sides.right.value))
    return IdentityCheck(
        "full-transformation",
        sides.left.value,
        c * sides.h * sides.right.value,
        tolerance,
        (sides.left.tail_bound, weight * sides.right.tail_bound),
        _point_inputs(z, u, c=_decimal(c), h=_pair(sides.h)),
        sample,
        extras=extras,
    )


@dataclass(frozen=True)
class CLambdaEstimate:
    """Ratios ``theta_{Lambda^rho}(j z, J u) / (H theta_Lambda(z, u))`` over samples."""

    ratios: Tuple[complex, ...]
    mean: complex
    spread: float
    covolume: float
    product: complex
    checks: Tuple[IdentityCheck, ...]


def estimate_c_lambda(
    rep: RepresentationConfig,
    lattice: Lattice,
    samples: Sequence[SamplePoint],
    tolerance: float = 1e-8,
) -> CLambdaEstimate:
    """Estimate the constant of the full transformation formula.

    Yields two checks: the spread of the ratios around their mean, and
    ``mean * covolume(Lambda) = 1``.
    """
    if not samples:
        raise ValueError("estimate_c_lambda needs at least one sample")
    ratios, errors = [], []
    for z, u in samples:
        u = _as_vector(u, rep.dim_u).astype(complex)
        sides = _full_sides(rep, lattice, z, u, tolerance * EVALUATION_SHARE * 1e-1)
        denominator = sides.h * sides.right.value
        if denominator == 0:
            raise DomainError("theta vanishes at a sample; the ratio is undefined")
        ratio = sides.left.value / denominator
        ratios.append(ratio)
        errors.append(
            (sides.left.tail_bound + abs(ratio * sides.h) * sides.right.tail_bound)
            / abs(denominator)
        )
    mean = complex(np.mean(ratios))
    spread = float(max(abs(r - mean) for r in ratios))
    constant = covolume(lattice, rep.rho)
    product = mean * constant
    inputs = {"samples": len(samples), "covolume": _decimal(constant)}
    checks = (
        IdentityCheck("c-lambda-spread", spread, 0.0, tolerance, (2 * max(errors),), inputs),
        IdentityCheck(
            "c-lambda-covolume", product, 1.0, tolerance, (constant * max(errors),), inputs
        ),
    )
    return CLambdaEstimate(tuple(ratios), mean, spread, constant, product, checks)


# ---------------------------------------------------------------------------
# Structural checks


def check_jordan_hom(
    rep: RepresentationConfig,
    samples: Sequence[AlgebraElement],
    tolerance: float = 1e-11,
) -> List[IdentityCheck]:
    """Jordan structure of the algebra and of ``psi``.

    Checks ``psi(x^{-1}) = psi(x)^{-1}`` and
    ``2 psi(a o b) = psi(a) psi(b) + psi(b) psi(a)`` for the representation,
    then the Jordan identity ``(a o b) o a^2 = a o (b o a^2)`` and the
    associativity ``sigma(a o b, c) = sigma(b, a o c)`` of the trace form on
    consecutive samples. Reports the worst sample for each identity.
    """
    _require_jordan_normalized(rep, "check_jordan_hom")
    worst_inverse, worst_product = 0.0, 0.0
    worst_identity, worst_trace = 0.0, 0.0
    for x in samples:
        px = rep.psi(x)
        left = rep.psi(inverse(x, rep.settings))
        right = np.linalg.inv(px)
        worst_inverse = max(worst_inverse, matrix_check("", left, right, 1.0).lhs.real)
    for a, b in zip(samples, samples[1:]):
        pa, pb = rep.psi(a), rep.psi(b)
        left = 2 * rep.psi(jordan_product(a, b))
        defect = matrix_check("", left, pa @ pb + pb @ pa, 1.0).lhs.real
        worst_product = max(worst_product, defect)
        a2 = jordan_product(a, a)
        left = jordan_product(jordan_product(a, b), a2).coords
        right = jordan_product(a, jordan_product(b, a2)).coords
        worst_identity = max(worst_identity, matrix_check("", left, right, 1.0).lhs.real)
    for a, b, c in zip(samples, samples[1:], samples[2:]):
        lhs = trace_form(jordan_product(a, b), c)
        rhs = trace_form(b, jordan_product(a, c))
        defect = abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
        worst_trace = max(worst_trace, float(defect))
    inputs = {"samples": len(samples)}
    return [
        IdentityCheck("jordan-inverse", worst_inverse, 0.0, tolerance, inputs=inputs),
        IdentityCheck("jordan-product", worst_product, 0.0, tolerance, inputs=inputs),
        IdentityCheck("jordan-identity", worst_identity, 0.0, tolerance, inputs=inputs),
        IdentityCheck("trace-associativity", worst_trace, 0.0, tolerance, inputs=inputs),
    ]


def _span_sample(
    lattice: Lattice, rep: RepresentationConfig, rng: np.random.Generator
) -> np.ndarray:
    dim = rep.dim_u
    if 5**dim <= 4096:
        axes = np.meshgrid(*[np.arange(-2, 3)] * dim, indexing="ij")
        grid = np.array(axes).reshape(dim, -1).T
    else:
        grid = rng.integers(-2, 3, size=(2000, dim))
    return grid @ dual_lattice(lattice, rep.rho).float_basis.T


def check_s_properties(
    rep: RepresentationConfig,
    lattice: Lattice,
    sample_size: int = 1000,
    seed: int = 0,
    tolerance: float = 1e-11,
) -> List[IdentityCheck]:
    """Linearity, Hermitian symmetry, defining identity, cone values,
    definiteness and spanning property of ``S``."""
    rng = np.random.default_rng(seed)
    dim = rep.dim_u
    linear_left, linear_right = [], []
    herm_left, herm_right = [], []
    defining_left, defining_right = [], []
    cone_failures, definite_failures = 0, 0
    jordan = rep.descriptor.is_jordan and rep.is_normalized
    cone_points = [random_cone_element(rep, rng) for _ in range(8)] if not jordan else []

    for _ in range(sample_size):
        u, u2, v = (random_vector(dim, rng, 1.0, 1.0) for _ in range(3))
        alpha, beta = rng.normal(size=2) + 1j * rng.normal(size=2)
        linear_left.append(s_form(rep, alpha * u + beta * u2, v).coords)
        linear_right.append(
            alpha * s_form(rep, u, v).coords + beta * s_form(rep, u2, v).coords
        )
        s_uv = s_form(rep, u, v)
        herm_left.append(s_uv.coords)
        herm_right.append(np.conj(s_form(rep, v, u).coords))
        x = rng.normal(size=rep.dim_v)
        defining_left.append(x @ rep.sigma_gram @ s_uv.coords)
        psi_x = rep.psi(AlgebraElement(rep.descriptor, x))
        defining_right.append(rep.rho(psi_x @ u, np.conj(v)))

        s_uu = s_form(rep, u, u)
        real_part = AlgebraElement(rep.descriptor, np.real(s_uu.coords))
        scale = max(1.0, float(np.max(np.abs(s_uu.coords))))
        if jordan:
            if rep.eigenvalues(real_part)[0] < -1e-12 * scale:
                cone_failures += 1
        elif any(trace_pair(rep, real_part, y) < -1e-12 * scale for y in cone_points):
            cone_failures += 1
        if float(np.max(np.abs(s_uu.coords))) == 0.0:
            definite_failures += 1
    if np.any(s_form(rep, np.zeros(dim), np.zeros(dim)).coords):
        definite_failures += 1

    values = [np.real(s_form(rep, l, l).coords) for l in _span_sample(lattice, rep, rng)]
    rank = int(np.linalg.matrix_rank(np.array(values)))
    inputs = {"samples": sample_size, "seed": seed}
    return [
        matrix_check("s-linearity", linear_left, linear_right, tolerance, inputs),
        matrix_check("s-hermitian", herm_left, herm_right, tolerance, inputs),
        matrix_check("s-defining", defining_left, defining_right, tolerance, inputs),
        count_check("s-cone", cone_failures, inputs=inputs),
        count_check("s-definite", definite_failures, inputs=inputs),
        IdentityCheck("s-span", rank, rep.dim_v, 1e-12, inputs={"points": len(values)}),
    ]


def trace_pair(rep: RepresentationConfig, a: AlgebraElement, b: AlgebraElement) -> float:
    """``sigma(a, b)`` through the representation's sigma Gram."""
    return float(np.real(a.coords @ rep.sigma_gram @ b.coords))


def check_involution(
    rep: RepresentationConfig,
    z: AlgebraElement,
    tolerance: float = 1e-9,
    step: float = 1e-5,
    sample: int = 0,
) -> List[IdentityCheck]:
    """``j(j(z)) = z``, ``Im j(z)`` in the cone, ``j(ie) = ie`` and ``dj(ie) = -I``."""
    jz = involution(rep, z)
    inputs = {"z": _pairs(z.coords)}
    ie = AlgebraElement(rep.descriptor, 1j * unit(rep.descriptor).coords)
    outside = 0 if rep.cone_test(jz.imag).member else 1
    checks = [
        matrix_check(
            "involution-square",
            involution(rep, jz).coords,
            z.coords,
            tolerance,
            inputs,
            sample,
        ),
        count_check("involution-tube", outside, inputs=inputs, sample=sample),
        matrix_check(
            "involution-fixed-point",
            involution(rep, ie).coords,
            ie.coords,
            tolerance,
            inputs,
            sample,
        ),
    ]
    columns = []
    for k in range(rep.dim_v):
        direction = np.zeros(rep.dim_v)
        direction[k] = step
        forward = involution(rep, AlgebraElement(rep.descriptor, ie.coords + direction))
        backward = involution(rep, AlgebraElement(rep.descriptor, ie.coords - direction))
        columns.append((forward.coords - backward.coords) / (2 * step))
    derivative = np.array(columns).T
    checks.append(
        matrix_check(
            "involution-derivative", derivative, -np.eye(rep.dim_v), 1e-6, inputs, sample
        )
    )
    return checks


def check_holomorphy(
    rep: RepresentationConfig,
    lattice: Lattice,
    z: AlgebraElement,
    u: Sequence[complex],
    tolerance: float = 1e-6,
    step: float = 1e-5,
    sample: int = 0,
) -> List[IdentityCheck]:
    """Cauchy-Riemann equations for theta in z and in u by central differences.

    Reports, per variable, the coordinate with the largest defect
    ``|d/dy - i d/dx|``.
    """
    u = _as_vector(u, rep.dim_u).astype(complex)
    tol = tolerance * step * EVALUATION_SHARE
    Move = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]

    def value_at(zc: np.ndarray, uc: np.ndarray) -> ThetaEvaluation:
        return theta_eval(rep, lattice, AlgebraElement(rep.descriptor, zc), uc, tol)

    def worst(tag: str, dim: int, move: Move) -> IdentityCheck:
        best: Optional[IdentityCheck] = None
        for k in range(dim):
            unit_vector = np.zeros(dim, dtype=complex)
            unit_vector[k] = 1.0
            evaluations = [
                value_at(*move(sign * scale * unit_vector))
                for scale in (step, 1j * step)
                for sign in (1, -1)
            ]
            d_real = (evaluations[0].value - evaluations[1].value) / (2 * step)
            d_imag = (evaluations[2].value - evaluations[3].value) / (2 * step)
            bound = sum(e.tail_bound for e in evaluations) / step
            check = IdentityCheck(
                tag,
                d_imag,
                1j * d_real,
                tolerance,
                (bound,),
                {"coordinate": k, **_point_inputs(z, u)},
                sample,
            )
            if best is None or check.residual > best.residual:
                best = check
        assert best is not None
        return best

    return [
        worst("holomorphy-z", rep.dim_v, lambda d: (z.coords + d, u)),
        worst("holomorphy-u", rep.dim_u, lambda d: (z.coords, u + d)),
    ]


def check_basepoint_invariance(
    raw: RepresentationConfig,
    lattice: Lattice,
    z: AlgebraElement,
    u: Sequence[complex],
    tolerance: float = 1e-9,
    sample: int = 0,
) -> IdentityCheck:
    """``theta_raw(z, u) = theta_normalized(z, psi(e)^{-1} u)``."""
    normalized, moved_lattice = normalize_basepoint(raw, lattice)
    _, p_inv = basepoint_transform(raw)
    u = _as_vector(u, raw.dim_u)
    left = _evaluate(raw, lattice, z, u, tolerance)
    right = _evaluate(normalized, moved_lattice, z, p_inv @ u, tolerance)
    return IdentityCheck(
        "basepoint-invariance",
        left.value,
        right.value,
        tolerance,
        (left.tail_bound, right.tail_bound),
        _point_inputs(z, u),
        sample,
    )


def check_fourier_coefficient(
    rep: RepresentationConfig,
    lattice: Lattice,
    z: AlgebraElement,
    l: Sequence,
    tolerance: float = 1e-6,
    sample: int = 0,
) -> IdentityCheck:
    """Quadrature Fourier coefficient against ``exp(pi i rho(psi(z) l, l))``."""
    tol = tolerance * EVALUATION_SHARE
    value = fourier_coefficient(rep, lattice, z, l, tol)
    vector = [float(sympy.Rational(v)) if isinstance(v, str) else float(v) for v in l]
    return IdentityCheck(
        "fourier-coefficient",
        value,
        expected_fourier_coefficient(rep, z, vector),
        tolerance,
        (tol,),
        {"z": _pairs(z.coords), "l": [str(v) for v in l]},
        sample,
    )


# ---------------------------------------------------------------------------
# Reports and suites


@dataclass
class VerificationReport:
    """Result of a verification run with its provenance."""

    scenario: str
    representation: Dict[str, Any]
    lattice: List[List[str]]
    seed: int
    settings: Dict[str, Any]
    checks: List[IdentityCheck] = field(default_factory=list)
    conventions: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.checks = sorted(self.checks, key=lambda c: (c.tag, c.sample))

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def counts(self) -> Dict[str, int]:
        failed = sum(not c.passed and c.error is None for c in self.checks)
        errors = sum(c.error is not None for c in self.checks)
        return {
            "total": len(self.checks),
            "passed": len(self.checks) - failed - errors,
            "failed": failed,
            "errors": errors,
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scenario": self.scenario,
            "representation": self.representation,
            "lattice": self.lattice,
            "seed": self.seed,
            "settings": self.settings,
            "conventions": self.conventions,
            "summary": self.counts,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def to_rows(self) -> List[Dict[str, Any]]:
        """Flat rows for CSV output."""
        rows = []
        for check in self.checks:
            entry = check.to_dict()
            rows.append(
                {
                    "tag": check.tag,
                    "sample": check.sample,
                    "lhs_re": entry["lhs"][0],
                    "lhs_im": entry["lhs"][1],
                    "rhs_re": entry["rhs"][0],
                    "rhs_im": entry["rhs"][1],
                    "residual": entry["residual"],
                    "tolerance": entry["tolerance"],
                    "tail_bound": _decimal(sum(check.tail_bounds)),
                    "pass": check.passed,
                    "error": check.error or "",
                }
            )
        return rows


CONVENTIONS = {
    "sigma": "trace form: trace(ab) for matrix kinds, 2(lm + <v,w>) for spin factors",
    "c_lambda": "1 / covolume(Lambda, rho)",
    "poisson_constant": "covolume(Lambda, rho)",
    "det_sqrt_branch": "principal logarithms of the eigenvalues of -i psi(z)",
    "theta_hat_zero": "1",
}

Task = Tuple[str, float, int, Dict[str, Any], Callable[[], Any]]


def _run_task(task: Task) -> List[IdentityCheck]:
    tag, tolerance, sample, inputs, function = task
    try:
        result = function()
    except TubeThetaError as error:
        logger.info("%s[%d] raised %s", tag, sample, error)
        return [IdentityCheck.failure(tag, error, tolerance, inputs, sample)]
    if isinstance(result, IdentityCheck):
        return [result]
    if isinstance(result, CLambdaEstimate):
        return list(result.checks)
    return list(result)


def run_suite(scenario: "Scenario", jobs: Optional[int] = None) -> VerificationReport:
    """Run every check a scenario requests and assemble the report.

    Checks run on a thread pool of ``jobs`` workers; errors raised by a check
    are recorded in the report instead of aborting the run.
    """
    from .scenarios import build_tasks

    tasks = build_tasks(scenario)
    jobs = jobs or scenario.settings.jobs
    logger.info("running %d checks of %s with %d worker(s)", len(tasks), scenario.name, jobs)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(task) for task in tasks]
    checks = [check for group in results for check in group]
    rep = scenario.representation
    return VerificationReport(
        scenario=scenario.name,
        representation={
            "algebra": rep.descriptor.name,
            "dim_v": rep.dim_v,
            "dim_u": rep.dim_u,
            "normalized": rep.is_normalized,
        },
        lattice=scenario.lattice.basis_strings(),
        seed=scenario.seed,
        settings=scenario.settings.as_dict(),
        checks=checks,
        conventions=dict(CONVENTIONS),
    )
