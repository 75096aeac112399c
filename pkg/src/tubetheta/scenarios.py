"""
Scenario files: what to verify, on which configuration and at which points.

A scenario is a TOML file. Numbers that end up in lattices or in the
representation arrays are written as rational strings (``"1/2"``,
``"0.25"``) so that exact lattice data survive parsing. A minimal file::

    name = "classical"
    seed = 7

    [representation]
    kind = "RealLine"

    [points]
    random = 20

    [checks]
    periodicity_u = "1e-9"
    full_transformation = "1e-10"

Custom representations give ``rho``, ``psi`` and ``base_point`` arrays with
``kind = "custom"``; they are symmetrized, reduced and normalized on load.
"""

import logging
import re
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import partial
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .config import Settings, scenario_directory
from .errors import ScenarioError, TubeThetaError
from .jordan_core import AlgebraElement, descriptor_from_spec, unit
from .lattice import (
    Lattice,
    dual_lattice,
    integer_lattice,
    lattice_from_vectors,
    period_lattice,
)
from .representation import (
    BilinearFormRho,
    RawRepresentation,
    RepresentationConfig,
    natural_representation,
    normalize_basepoint,
    reduce_domain,
    symmetrize_psi,
)
from .sample_points import SamplePoint, create_sample_points, random_invertible_element
from . import transform_verify as tv

logger = logging.getLogger(__name__)

# Default tolerance of every check a scenario may request.
CHECK_DEFAULTS: Dict[str, float] = {
    "periodicity_u": 1e-9,
    "quasiperiodicity": 1e-9,
    "periodicity_z": 1e-9,
    "evenness": 1e-9,
    "certification": 1e-10,
    "linear_pairs": 1e-9,
    "lattice_transform": 1e-12,
    "gaussian_integral": 1e-6,
    "square_completion": 1e-12,
    "partial_transformation": 1e-8,
    "full_transformation": 1e-10,
    "c_lambda": 1e-8,
    "jordan_hom": 1e-11,
    "s_properties": 1e-11,
    "involution": 1e-9,
    "holomorphy": 1e-6,
    "basepoint_invariance": 1e-9,
    "fourier_coefficient": 1e-6,
}

LOW_DIMENSIONAL_CHECKS = ("gaussian_integral", "fourier_coefficient")
JORDAN_CHECKS = ("full_transformation", "c_lambda", "involution", "jordan_hom")
UNIT_BASE_CHECKS = ("full_transformation", "c_lambda", "jordan_hom")

_TOP_LEVEL = {
    "name",
    "description",
    "seed",
    "tolerance",
    "representation",
    "lattice",
    "points",
    "checks",
    "settings",
}

# Per-check caps on the number of sample points used.
_POINT_CAPS = {
    "holomorphy": 5,
    "involution": 5,
    "c_lambda": 5,
    "linear_pairs": 3,
    "gaussian_integral": 3,
}


@dataclass
class Scenario:
    """A parsed scenario.

    Attributes
    ----------
    representation
        Normalized representation the checks run on.
    lattice
        Lattice in the normalized coordinates.
    raw_representation, raw_lattice
        Representation and lattice as written in the file when normalization
        changed them; None otherwise.
    """

    name: str
    representation: RepresentationConfig
    lattice: Lattice
    points: List[SamplePoint]
    checks: Dict[str, float]
    seed: int = 0
    tolerance: float = 1e-10
    description: str = ""
    settings: Settings = field(default_factory=Settings)
    raw_representation: Optional[RepresentationConfig] = None
    raw_lattice: Optional[Lattice] = None
    source: Optional[Path] = None

    def with_tolerance(self, tolerance: float) -> "Scenario":
        """Copy that uses ``tolerance`` for evaluations and for every check."""
        if not tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {tolerance!r}")
        checks = dict.fromkeys(self.checks, tolerance)
        return replace(self, tolerance=tolerance, checks=checks)


# ---------------------------------------------------------------------------
# Parsing helpers


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool):
        raise ScenarioError(f"Expected a number, got {value!r}", where)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            raise ScenarioError(f"Not a rational number: {value!r}", where)
    raise ScenarioError(f"Expected a number, got {value!r}", where)


def _array(value: Any, where: str) -> np.ndarray:
    """Nested lists of numbers to a float array."""
    if isinstance(value, list):
        return np.array([_array(v, f"{where}[{k}]") for k, v in enumerate(value)])
    return np.array(_number(value, where))


def _complex_vector(value: Any, dim: int, where: str) -> np.ndarray:
    """``[[re, im], ...]`` pairs, or plain reals, to a complex vector."""
    if not isinstance(value, list) or len(value) != dim:
        raise ScenarioError(f"Expected {dim} coordinates", where)
    coords = []
    for k, entry in enumerate(value):
        if isinstance(entry, list):
            if len(entry) != 2:
                raise ScenarioError("Complex coordinates are [re, im] pairs", f"{where}[{k}]")
            re_part, im_part = (_number(v, f"{where}[{k}]") for v in entry)
            coords.append(complex(re_part, im_part))
        else:
            coords.append(complex(_number(entry, f"{where}[{k}]")))
    return np.array(coords, dtype=complex)


def _table(data: Dict[str, Any], key: str) -> Dict[str, Any]:
    value = data.get(key, {})
    if not isinstance(value, dict):
        raise ScenarioError(f"'{key}' must be a table", key)
    return value


def _read_toml(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "rb") as handle:
            return tomllib.load(handle)
    except OSError as e:
        raise ScenarioError(f"Cannot read scenario {path}: {e}")
    except tomllib.TOMLDecodeError as e:
        match = re.search(r"line (\d+)", str(e))
        raise ScenarioError(
            f"Malformed scenario {path.name}: {e}",
            line=int(match.group(1)) if match else None,
        )


# ---------------------------------------------------------------------------
# Sections


def _parse_settings(data: Dict[str, Any], base: Settings) -> Settings:
    table = _table(data, "settings")
    try:
        return base.updated(**table)
    except (TypeError, ValueError) as e:
        raise ScenarioError(str(e), "settings")


def _parse_lattice(data: Dict[str, Any], dim: int) -> Lattice:
    table = _table(data, "lattice")
    unknown = set(table) - {"vectors", "scale"}
    if unknown:
        raise ScenarioError(f"Unknown keys {sorted(unknown)}", "lattice")
    try:
        if "vectors" in table:
            lattice = lattice_from_vectors(table["vectors"])
        else:
            lattice = integer_lattice(dim)
        if "scale" in table:
            lattice = lattice.scaled(table["scale"])
    except ScenarioError:
        raise
    except (TypeError, ValueError) as e:
        raise ScenarioError(str(e), "lattice")
    if lattice.dim != dim:
        raise ScenarioError(
            f"Lattice has dimension {lattice.dim} but U has dimension {dim}",
            "lattice.vectors",
        )
    return lattice


def _parse_custom(table: Dict[str, Any], settings: Settings) -> RepresentationConfig:
    for key in ("rho", "psi", "base_point"):
        if key not in table:
            raise ScenarioError(f"Custom representations need '{key}'", f"representation.{key}")
    descriptor = None
    if "algebra" in table:
        descriptor = descriptor_from_spec(table["algebra"], "representation.algebra")
    try:
        rho = BilinearFormRho(_array(table["rho"], "representation.rho"))
        psi = symmetrize_psi(_array(table["psi"], "representation.psi"), rho)
        base = _array(table["base_point"], "representation.base_point")
        raw = RawRepresentation(rho, psi, base, descriptor)
        return reduce_domain(raw, settings)
    except ScenarioError:
        raise
    except ValueError as e:
        raise ScenarioError(str(e), "representation")


def _parse_representation(
    data: Dict[str, Any], settings: Settings
) -> RepresentationConfig:
    table = _table(data, "representation")
    if "kind" not in table:
        raise ScenarioError("Missing algebra kind", "representation.kind")
    if table["kind"] == "custom":
        return _parse_custom(table, settings)
    descriptor = descriptor_from_spec(table, "representation")
    try:
        return natural_representation(descriptor, settings)
    except TubeThetaError as e:
        raise ScenarioError(str(e), "representation")


def _parse_checks(data: Dict[str, Any]) -> Dict[str, float]:
    table = _table(data, "checks")
    checks = {}
    for name, value in table.items():
        if name not in CHECK_DEFAULTS:
            allowed = ", ".join(sorted(CHECK_DEFAULTS))
            raise ScenarioError(f"Unknown check {name!r} (allowed: {allowed})", f"checks.{name}")
        if value is True or value == "default":
            checks[name] = CHECK_DEFAULTS[name]
            continue
        tolerance = _number(value, f"checks.{name}")
        if not tolerance > 0:
            raise ScenarioError("Check tolerances must be positive", f"checks.{name}")
        checks[name] = tolerance
    return checks


def _parse_points(
    data: Dict[str, Any], rep: RepresentationConfig, seed: int
) -> List[SamplePoint]:
    table = _table(data, "points")
    points = []
    for k, entry in enumerate(table.get("explicit", [])):
        where = f"points.explicit[{k}]"
        if not isinstance(entry, dict) or "z" not in entry:
            raise ScenarioError("Explicit points need 'z'", where)
        z = _complex_vector(entry["z"], rep.dim_v, f"{where}.z")
        if "u" in entry:
            u = _complex_vector(entry["u"], rep.dim_u, f"{where}.u")
        else:
            u = np.zeros(rep.dim_u, dtype=complex)
        if not np.any(np.imag(u)):
            u = np.real(u)
        points.append(SamplePoint(AlgebraElement(rep.descriptor, z), u))
    count = table.get("random", 0 if points else 20)
    if not isinstance(count, int) or count < 0:
        raise ScenarioError("'random' must be a non-negative integer", "points.random")
    bounds = table.get("imag_range", [0.5, 3.0])
    imag_range = tuple(_number(v, "points.imag_range") for v in bounds)
    imag_u = _number(table.get("imag_u", 0.0), "points.imag_u")
    try:
        points += create_sample_points(rep, count, seed, imag_range, imag_u)
    except ValueError as e:
        raise ScenarioError(str(e), "points")
    if not points:
        raise ScenarioError("A scenario needs at least one point", "points")
    return points


def _check_applicable(
    checks: Dict[str, float], rep: RepresentationConfig
) -> Dict[str, float]:
    """Reject checks the configuration cannot support; drop unit-dependent ones.

    Checks in UNIT_BASE_CHECKS assume the base point is the algebra's unit and
    are skipped with a warning otherwise.
    """
    applicable = {}
    for name, tolerance in checks.items():
        if name in LOW_DIMENSIONAL_CHECKS and rep.dim_u > 2:
            raise ScenarioError(
                f"Unsupported check {name}: needs dim U <= 2, got {rep.dim_u}",
                f"checks.{name}",
            )
        if name in JORDAN_CHECKS and not (rep.descriptor.is_jordan and rep.is_normalized):
            raise ScenarioError(
                f"Unsupported check {name}: needs a normalized Jordan representation, "
                f"got {rep.descriptor.name}",
                f"checks.{name}",
            )
        if name in UNIT_BASE_CHECKS and not rep.has_unit_base:
            logger.warning(
                "skipping check %s: the base point %s is not the unit of %s",
                name,
                rep.base_point.coords.tolist(),
                rep.descriptor.name,
            )
            continue
        applicable[name] = tolerance
    return applicable


def parse_scenario(
    data: Dict[str, Any],
    name: str = "scenario",
    seed: Optional[int] = None,
    tolerance: Optional[float] = None,
    settings: Optional[Settings] = None,
) -> Scenario:
    """Build a :class:`Scenario` from a parsed TOML tree.

    ``seed`` and ``tolerance`` override the file's values; ``settings`` is
    the base the file's ``[settings]`` table is laid over.
    """
    unknown = set(data) - _TOP_LEVEL
    if unknown:
        raise ScenarioError(f"Unknown keys {sorted(unknown)}", sorted(unknown)[0])
    settings = _parse_settings(data, settings or Settings.from_env())
    if seed is None:
        seed = data.get("seed", settings.seed)
    if not isinstance(seed, int) or seed < 0:
        raise ScenarioError(f"seed must be a non-negative integer, got {seed!r}", "seed")
    if tolerance is None:
        tolerance = _number(data.get("tolerance", settings.default_tolerance), "tolerance")
    if not tolerance > 0:
        raise ScenarioError("tolerance must be positive", "tolerance")

    rep = _parse_representation(data, settings)
    lattice = _parse_lattice(data, rep.dim_u)
    raw_rep, raw_lattice = None, None
    if not rep.is_normalized:
        try:
            normalized, moved = normalize_basepoint(rep, lattice)
        except TubeThetaError as e:
            raise ScenarioError(str(e), "representation.base_point")
        raw_rep, raw_lattice = rep, lattice
        rep, lattice = normalized, moved
        logger.info("%s: normalized the base point", name)

    checks = _check_applicable(_parse_checks(data), rep)
    points = _parse_points(data, rep, seed)
    return Scenario(
        name=str(data.get("name", name)),
        representation=rep,
        lattice=lattice,
        points=points,
        checks=checks,
        seed=seed,
        tolerance=tolerance,
        description=str(data.get("description", "")),
        settings=settings,
        raw_representation=raw_rep,
        raw_lattice=raw_lattice,
    )


def list_scenarios(directory: Optional[Path] = None) -> List[str]:
    """Names of the scenario files in ``directory`` (default: the scenario directory)."""
    directory = Path(directory) if directory is not None else scenario_directory()
    if not directory.is_dir():
        return []
    return sorted(path.stem for path in directory.glob("*.toml"))


def resolve_scenario(source: Union[str, Path]) -> Path:
    """A path to an existing file, or the name of a file in the scenario directory."""
    path = Path(source)
    if path.is_file():
        return path
    candidate = scenario_directory() / f"{path.stem}.toml"
    if candidate.is_file():
        return candidate
    raise ScenarioError(
        f"No scenario {str(source)!r}; available: {', '.join(list_scenarios()) or 'none'}"
    )


def load_scenario(
    source: Union[str, Path],
    seed: Optional[int] = None,
    tolerance: Optional[float] = None,
    settings: Optional[Settings] = None,
) -> Scenario:
    """Read and validate a scenario file.

    Raises
    ------
    ScenarioError
        For unreadable or malformed files, schema violations and checks that
        do not apply to the configuration.
    """
    path = resolve_scenario(source)
    logger.debug("loading scenario %s", path)
    scenario = parse_scenario(_read_toml(path), path.stem, seed, tolerance, settings)
    scenario.source = path
    return scenario


# ---------------------------------------------------------------------------
# Planning


def _take(scenario: Scenario, check: str) -> List[Tuple[int, SamplePoint]]:
    points = list(enumerate(scenario.points))
    return points[: _POINT_CAPS.get(check, len(points))]


def _basepoint_pair(scenario: Scenario) -> Tuple[RepresentationConfig, Lattice]:
    if scenario.raw_representation is not None:
        return scenario.raw_representation, scenario.raw_lattice
    rep = scenario.representation
    doubled = AlgebraElement(rep.descriptor, 2.0 * rep.base_point.coords)
    raw = RepresentationConfig(
        rep.descriptor, rep.rho, rep.psi_basis, doubled, rep.settings
    )
    return raw, scenario.lattice


def _fourier_vectors(scenario: Scenario) -> List[List[Any]]:
    dual = dual_lattice(scenario.lattice, scenario.representation.rho)
    first = dual.vector(0)
    last = dual.vector(dual.dim - 1)
    return [list(v) for v in (0 * first, first, first + last)]


def _periodicity_z(
    rep: RepresentationConfig,
    lattice: Lattice,
    z: AlgebraElement,
    u: np.ndarray,
    tolerance: float,
    sample: int,
) -> "tv.IdentityCheck":
    periods = period_lattice(rep, lattice)
    k = periods.vector(sample % periods.basis.cols)
    return tv.check_periodicity_z(rep, lattice, z, u, k, tolerance, sample)


def _jordan_samples(scenario: Scenario) -> List[AlgebraElement]:
    rng = np.random.default_rng(scenario.seed)
    descriptor = scenario.representation.descriptor
    samples = [random_invertible_element(descriptor, rng) for _ in range(1000)]
    samples[0] = unit(descriptor)
    return samples


def build_tasks(scenario: Scenario) -> List["tv.Task"]:
    """Expand a scenario into independent check tasks.

    Each task is ``(tag, tolerance, sample, inputs, function)``; ``function``
    takes no arguments and returns an IdentityCheck, a list of them or a
    CLambdaEstimate.
    """
    rep = scenario.representation
    lattice = scenario.lattice
    checks = scenario.checks
    dual = dual_lattice(lattice, rep.rho)
    n = lattice.dim
    tasks: List[tv.Task] = []

    def add(tag: str, check: str, sample: int, inputs: Dict[str, Any], function):
        tasks.append((tag, checks[check], sample, inputs, function))

    per_point = {
        "periodicity_u": (
            "periodicity-u",
            lambda i, z, u, t: partial(
                tv.check_periodicity_u, rep, lattice, z, u, lattice.vector(i % n), t, i
            ),
        ),
        "quasiperiodicity": (
            "quasi-periodicity",
            lambda i, z, u, t: partial(
                tv.check_quasiperiodicity, rep, lattice, z, u, dual.vector(i % n), t, i
            ),
        ),
        "periodicity_z": (
            "periodicity-z",
            lambda i, z, u, t: partial(_periodicity_z, rep, lattice, z, u, t, i),
        ),
        "evenness": (
            "evenness",
            lambda i, z, u, t: partial(tv.check_evenness, rep, lattice, z, u, t, i),
        ),
        "certification": (
            "certification",
            lambda i, z, u, t: partial(tv.check_certification, rep, lattice, z, u, t, i),
        ),
        "square_completion": (
            "square-completion",
            lambda i, z, u, t: partial(
                tv.check_square_completion,
                rep,
                z.imag,
                u,
                scenario.points[(i + 1) % len(scenario.points)].u,
                t,
                i,
            ),
        ),
        "partial_transformation": (
            "partial-transformation",
            lambda i, z, u, t: partial(
                tv.check_partial_transformation, rep, lattice, z, u, t, i
            ),
        ),
        "full_transformation": (
            "full-transformation",
            lambda i, z, u, t: partial(
                tv.check_full_transformation, rep, lattice, z, u, t, i
            ),
        ),
        "basepoint_invariance": (
            "basepoint-invariance",
            lambda i, z, u, t: partial(
                tv.check_basepoint_invariance, *_basepoint_pair(scenario), z, u, t, i
            ),
        ),
        "holomorphy": (
            "holomorphy-z",
            lambda i, z, u, t: partial(
                tv.check_holomorphy, rep, lattice, z, u, t, sample=i
            ),
        ),
        "involution": (
            "involution-square",
            lambda i, z, u, t: partial(tv.check_involution, rep, z, t, sample=i),
        ),
        "gaussian_integral": (
            "gaussian-integral",
            lambda i, z, u, t: partial(tv.gaussian_integral_check, rep, z, u, t, i),
        ),
    }
    for check, (tag, make) in per_point.items():
        if check not in checks:
            continue
        for index, (z, u) in _take(scenario, check):
            function = make(index, z, u, checks[check])
            add(tag, check, index, tv._point_inputs(z, u), function)

    if "c_lambda" in checks:
        samples = [p for _, p in _take(scenario, "c_lambda")]
        function = partial(tv.estimate_c_lambda, rep, lattice, samples, checks["c_lambda"])
        add("c-lambda-spread", "c_lambda", 0, {"samples": len(samples)}, function)
    if "linear_pairs" in checks or "lattice_transform" in checks:
        pairs = tv.standard_pairs(rep)
    if "linear_pairs" in checks:
        samples = [p for _, p in _take(scenario, "linear_pairs")]
        for number, pair in enumerate(pairs):
            function = partial(
                tv.check_linear_pair,
                rep,
                lattice,
                pair.w,
                pair.w_hat,
                samples,
                checks["linear_pairs"],
                seed=scenario.seed + number,
                name=pair.name,
            )
            add("linear-theta", "linear_pairs", number, {"pair": pair.name}, function)
    if "lattice_transform" in checks:
        for number, pair in enumerate(pairs):
            if pair.is_integral:
                function = partial(
                    tv.check_lattice_transform, rep, lattice, pair.w_hat, pair.name
                )
                inputs = {"pair": pair.name}
                add("lattice-transform", "lattice_transform", number, inputs, function)
    if "jordan_hom" in checks:
        samples = _jordan_samples(scenario)
        function = partial(tv.check_jordan_hom, rep, samples, checks["jordan_hom"])
        add("jordan-inverse", "jordan_hom", 0, {"samples": len(samples)}, function)
    if "s_properties" in checks:
        function = partial(
            tv.check_s_properties,
            rep,
            lattice,
            seed=scenario.seed,
            tolerance=checks["s_properties"],
        )
        add("s-linearity", "s_properties", 0, {"seed": scenario.seed}, function)
    if "fourier_coefficient" in checks:
        z = scenario.points[0].z
        tolerance = checks["fourier_coefficient"]
        for number, vector in enumerate(_fourier_vectors(scenario)):
            function = partial(
                tv.check_fourier_coefficient, rep, lattice, z, vector, tolerance, number
            )
            inputs = {"l": [str(v) for v in vector]}
            add("fourier-coefficient", "fourier_coefficient", number, inputs, function)
    return tasks
