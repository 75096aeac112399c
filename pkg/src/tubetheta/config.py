"""
Runtime settings for TubeTheta.

Settings are plain values with validated defaults. They can be overlaid from
environment variables with :meth:`Settings.from_env` and are further
overridden by scenario files and command-line flags.
"""

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

SCENARIO_DIR_ENV = "TUBETHETA_SCENARIO_DIR"

_ENV_OVERRIDES = {
    "TUBETHETA_POINT_BUDGET": ("point_budget", int),
    "TUBETHETA_CONE_EPSILON": ("cone_epsilon", float),
    "TUBETHETA_JOBS": ("jobs", int),
}


@dataclass(frozen=True)
class Settings:
    """Numerical guardrails shared by all modules.

    Parameters
    ----------
    cone_epsilon
        Relative cushion (w.r.t. the largest eigenvalue) below which a point
        counts as lying on the cone boundary. Default 1e-10.
    invertibility_threshold
        An element is singular when its Jordan determinant is at most this
        value times ``scale ** rank``. Default 1e-12.
    point_budget
        Maximal number of lattice points summed for one evaluation.
        Default 10**7.
    default_tolerance
        Absolute truncation tolerance used when none is requested.
    quadrature_points
        Trapezoid grid size per dimension for Fourier coefficients; the
        Richardson partner uses twice as many.
    radius_grid
        Truncation radii are multiples of this step, which keeps them
        monotone in the input parameters.
    jobs
        Number of worker threads used by suite runs.
    seed
        Default seed for sample generation.
    """

    cone_epsilon: float = 1e-10
    invertibility_threshold: float = 1e-12
    point_budget: int = 10**7
    default_tolerance: float = 1e-10
    quadrature_points: int = 2**8
    radius_grid: float = 1.0 / 16.0
    jobs: int = 1
    seed: int = 0

    def __post_init__(self):
        if not self.cone_epsilon >= 0:
            raise ValueError(
                f"cone_epsilon must be non-negative, got {self.cone_epsilon!r}"
            )
        if not self.invertibility_threshold > 0:
            raise ValueError(
                "invertibility_threshold must be positive, got "
                f"{self.invertibility_threshold!r}"
            )
        if self.point_budget < 1:
            raise ValueError(
                f"point_budget must be at least 1, got {self.point_budget!r}"
            )
        if not self.default_tolerance > 0:
            raise ValueError(
                f"default_tolerance must be positive, got {self.default_tolerance!r}"
            )
        if self.quadrature_points < 4:
            raise ValueError(
                f"quadrature_points must be at least 4, got {self.quadrature_points!r}"
            )
        if not self.radius_grid > 0:
            raise ValueError(f"radius_grid must be positive, got {self.radius_grid!r}")
        if self.jobs < 1:
            raise ValueError(f"jobs must be at least 1, got {self.jobs!r}")

    @classmethod
    def from_env(cls, environ: Optional[Dict[str, str]] = None) -> "Settings":
        """Build settings from defaults overlaid with ``TUBETHETA_*`` variables."""
        environ = os.environ if environ is None else environ
        values: Dict[str, Any] = {}
        for variable, (name, convert) in _ENV_OVERRIDES.items():
            if variable in environ:
                try:
                    values[name] = convert(environ[variable])
                except ValueError:
                    raise ValueError(
                        f"{variable} must be {convert.__name__}, "
                        f"got {environ[variable]!r}"
                    )
        return cls(**values)

    def updated(self, **changes: Any) -> "Settings":
        """Return a copy with ``changes`` applied, ignoring ``None`` values."""
        known = {f.name for f in fields(self)}
        unknown = set(changes) - known
        if unknown:
            raise ValueError(f"Unknown settings: {sorted(unknown)}")
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def as_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_SETTINGS = Settings()


def scenario_directory(environ: Optional[Dict[str, str]] = None) -> Path:
    """Directory searched for scenario files.

    ``TUBETHETA_SCENARIO_DIR`` wins; otherwise the scenarios bundled with the
    package are used.
    """
    environ = os.environ if environ is None else environ
    configured = environ.get(SCENARIO_DIR_ENV)
    if configured:
        return Path(configured)
    return Path(__file__).resolve().parent / "scenarios"
