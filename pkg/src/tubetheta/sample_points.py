"""
Sample point generator for verification runs.

Provides seeded algebra elements, cone points and tube-domain points so that
identity checks and reports are reproducible without hand-picked inputs.
"""

from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .jordan_core import AlgebraDescriptor, AlgebraElement, jordan_determinant
from .representation import RepresentationConfig


class SamplePoint(NamedTuple):
    """A point ``(z, u)`` of the tube domain times U."""

    z: AlgebraElement
    u: np.ndarray


def random_element(
    descriptor: AlgebraDescriptor, rng: np.random.Generator, scale: float = 1.0
) -> AlgebraElement:
    """Real element with independent normal coordinates."""
    return AlgebraElement(descriptor, rng.normal(0.0, scale, descriptor.dim))


def random_invertible_element(
    descriptor: AlgebraDescriptor,
    rng: np.random.Generator,
    min_relative_det: float = 0.05,
) -> AlgebraElement:
    """Random element whose Jordan determinant is not small.

    Rejection sampling keeps ``|det x| >= min_relative_det * scale**rank``,
    with ``scale`` the largest coordinate magnitude.
    """
    while True:
        x = random_element(descriptor, rng)
        scale = float(np.max(np.abs(x.coords)))
        if abs(jordan_determinant(x)) >= min_relative_det * scale**descriptor.rank:
            return x


def random_cone_element(
    rep: RepresentationConfig,
    rng: np.random.Generator,
    spread: float = 0.7,
) -> AlgebraElement:
    """Random point of the cone Y.

    Moves away from the base point ``e`` along a random direction by at most
    ``spread`` times the distance to the boundary, then rescales by a random
    positive factor.
    """
    if not 0 < spread < 1:
        raise ValueError(f"spread must lie in (0, 1), got {spread}")
    e = rep.base_point
    direction = random_element(rep.descriptor, rng)
    reach = float(np.max(np.abs(rep.eigenvalues(direction))))
    if reach == 0.0:
        return e
    step = rng.uniform(0.0, spread) * float(rep.eigenvalues(e)[0]) / reach
    return (e + step * direction) * float(rng.uniform(0.5, 3.0))


def random_tube_point(
    rep: RepresentationConfig,
    rng: np.random.Generator,
    imag_range: Tuple[float, float] = (0.5, 3.0),
    real_scale: float = 0.5,
) -> AlgebraElement:
    """``x + i y`` with the spectrum of ``psi(y)`` inside ``imag_range`` when possible."""
    low, high = imag_range
    if not 0 < low <= high:
        raise ValueError(f"imag_range must satisfy 0 < low <= high, got {imag_range}")
    y = random_cone_element(rep, rng)
    ev = rep.eigenvalues(y)
    lowest, highest = float(ev[0]), float(ev[-1])
    smallest_factor, largest_factor = low / lowest, high / highest
    if smallest_factor <= largest_factor:
        factor = rng.uniform(smallest_factor, largest_factor)
    else:
        factor = smallest_factor
    x = random_element(rep.descriptor, rng, real_scale)
    return AlgebraElement(rep.descriptor, x.coords + 1j * factor * y.coords)


def random_vector(
    dim: int, rng: np.random.Generator, scale: float = 0.5, imag_scale: float = 0.0
) -> np.ndarray:
    """Vector in U; complex when ``imag_scale > 0``."""
    real = rng.uniform(-scale, scale, dim)
    if imag_scale > 0:
        return real + 1j * rng.uniform(-imag_scale, imag_scale, dim)
    return real


def create_sample_points(
    rep: RepresentationConfig,
    n_points: int = 20,
    random_seed: int = 42,
    imag_range: Tuple[float, float] = (0.5, 3.0),
    imag_u_scale: float = 0.0,
) -> List[SamplePoint]:
    """
    Create seeded points of the tube domain for identity checks.

    Parameters
    ----------
    rep : RepresentationConfig
        Representation whose cone the points live over.
    n_points : int, default 20
        Number of points.
    random_seed : int, default 42
        Seed for reproducible points.
    imag_range : tuple of float, default (0.5, 3.0)
        Target range for the spectrum of ``psi(Im z)``.
    imag_u_scale : float, default 0.0
        Half-width of the imaginary parts of ``u``; 0 keeps ``u`` real.

    Returns
    -------
    list of SamplePoint
    """
    if n_points < 0:
        raise ValueError(f"n_points must be non-negative, got {n_points}")
    rng = np.random.default_rng(random_seed)
    points = []
    for _ in range(n_points):
        z = random_tube_point(rep, rng, imag_range)
        u = random_vector(rep.dim_u, rng, imag_scale=imag_u_scale)
        points.append(SamplePoint(z, u))
    return points


def base_sample_point(rep: RepresentationConfig, u: Optional[np.ndarray] = None) -> SamplePoint:
    """``(i e, u)``, by default with ``u = 0``."""
    z = AlgebraElement(rep.descriptor, 1j * rep.base_point.coords)
    return SamplePoint(z, np.zeros(rep.dim_u) if u is None else np.asarray(u))
