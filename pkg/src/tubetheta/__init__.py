"""
TubeTheta - Theta Series on Tube Domains

Jordan algebras, their representations and lattices, certified evaluation of
generalized theta series, and numerical verification of their
transformation identities.
"""

__version__ = "1.0.0"
__author__ = "TubeTheta Team"

from .config import DEFAULT_SETTINGS, Settings
from .errors import (
    BudgetError,
    CertificationError,
    DescriptorMismatchError,
    DimensionMismatchError,
    DomainError,
    LatticeMembershipError,
    NotInvertibleError,
    ScenarioError,
    TubeThetaError,
    UnsupportedConfigurationError,
    UnsupportedOperationError,
)
from .jordan_core import (
    AlgebraDescriptor,
    AlgebraElement,
    AlgebraKind,
    cone_contains,
    direct_sum,
    generic,
    herm_complex,
    inverse,
    jordan_determinant,
    jordan_product,
    real_line,
    spin_factor,
    sym_real,
    trace_form,
    unit,
)
from .representation import (
    BilinearFormRho,
    RawRepresentation,
    RepresentationConfig,
    natural_representation,
    normalize_basepoint,
    psi_apply,
    reduce_domain,
    s_form,
    siegel_contains,
    siegel_translation,
    symmetrize_psi,
    tube_contains,
)
from .lattice import (
    Lattice,
    covolume,
    dual_lattice,
    enumerate_ellipsoid,
    integer_lattice,
    lattice_from_vectors,
    period_lattice,
    scaled_integer_lattice,
    sheared_integer_lattice,
    transform_lattice,
)
from .theta_engine import (
    ThetaEvaluation,
    fourier_coefficient,
    nullwert,
    tail_radius,
    theta_eval,
    theta_grid,
)
from .transform_verify import (
    IdentityCheck,
    VerificationReport,
    det_sqrt,
    h_factor,
    run_suite,
)
from .sample_points import create_sample_points
from .scenarios import Scenario, list_scenarios, load_scenario
from .cli_runner import ScenarioRunner, run_scenario

__all__ = [
    "AlgebraDescriptor",
    "AlgebraElement",
    "AlgebraKind",
    "BilinearFormRho",
    "BudgetError",
    "CertificationError",
    "DEFAULT_SETTINGS",
    "DescriptorMismatchError",
    "DimensionMismatchError",
    "DomainError",
    "IdentityCheck",
    "Lattice",
    "LatticeMembershipError",
    "NotInvertibleError",
    "RawRepresentation",
    "RepresentationConfig",
    "Scenario",
    "ScenarioError",
    "ScenarioRunner",
    "Settings",
    "ThetaEvaluation",
    "TubeThetaError",
    "UnsupportedConfigurationError",
    "UnsupportedOperationError",
    "VerificationReport",
    "cone_contains",
    "covolume",
    "create_sample_points",
    "det_sqrt",
    "direct_sum",
    "dual_lattice",
    "enumerate_ellipsoid",
    "fourier_coefficient",
    "generic",
    "h_factor",
    "herm_complex",
    "integer_lattice",
    "inverse",
    "jordan_determinant",
    "jordan_product",
    "lattice_from_vectors",
    "list_scenarios",
    "load_scenario",
    "natural_representation",
    "normalize_basepoint",
    "nullwert",
    "period_lattice",
    "psi_apply",
    "real_line",
    "reduce_domain",
    "run_scenario",
    "run_suite",
    "s_form",
    "scaled_integer_lattice",
    "sheared_integer_lattice",
    "siegel_contains",
    "siegel_translation",
    "spin_factor",
    "sym_real",
    "symmetrize_psi",
    "tail_radius",
    "theta_eval",
    "theta_grid",
    "trace_form",
    "transform_lattice",
    "tube_contains",
    "unit",
]
