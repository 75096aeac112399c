"""
Command-line front end.

``tubetheta verify --scenario siegel_genus2`` runs the checks of a scenario
and writes a JSON (or CSV) report; ``eval`` evaluates theta at the
scenario's points; ``bench`` compares the enumeration strategies;
``list-scenarios`` shows the bundled scenarios.

Exit codes: 0 when every check passes, 1 when a check fails or errors,
2 for configuration errors.
"""

import argparse
import csv
import io
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import TubeThetaError
from .jordan_core import (
    AlgebraDescriptor,
    AlgebraElement,
    herm_complex,
    real_line,
    spin_factor,
    sym_real,
    unit,
)
from .lattice import integer_lattice
from .representation import natural_representation
from .scenarios import Scenario, list_scenarios, load_scenario
from .theta_engine import STRATEGIES, theta_eval
from .transform_verify import VerificationReport, run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

COMMANDS = ["eval", "verify"]
FORMATS = ["json", "csv"]

BENCH_CONFIGURATIONS = [
    real_line(),
    sym_real(2),
    herm_complex(2),
    spin_factor(3),
]
BENCH_TOLERANCES = [1e-4, 1e-6, 1e-8, 1e-10, 1e-12]


def _csv_text(rows: List[Dict[str, Any]]) -> str:
    if not rows:
        return ""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def _pairs(values: Any) -> List[List[float]]:
    return [[float(c.real), float(c.imag)] for c in np.asarray(values, dtype=complex)]


def evaluate_points(scenario: Scenario, tol: Optional[float] = None) -> Dict[str, Any]:
    """Theta values at every point of a scenario.

    Points outside the tube domain are reported with their error instead of a
    value.
    """
    tol = scenario.tolerance if tol is None else tol
    rep = scenario.representation
    rows = []
    for index, (z, u) in enumerate(scenario.points):
        row: Dict[str, Any] = {
            "sample": index,
            "z": _pairs(z.coords),
            "u": _pairs(u),
        }
        try:
            result = theta_eval(rep, scenario.lattice, z, u, tol)
        except TubeThetaError as e:
            row["error"] = f"{type(e).__name__}: {e}"
        else:
            row.update(
                value=[result.value.real, result.value.imag],
                tail_bound="%.6e" % result.tail_bound,
                points=result.points_summed,
                radius=result.radius_used,
            )
        rows.append(row)
    return {
        "scenario": scenario.name,
        "algebra": rep.descriptor.name,
        "lattice": scenario.lattice.basis_strings(),
        "seed": scenario.seed,
        "tolerance": "%.6e" % tol,
        "evaluations": rows,
    }


def _evaluation_rows(result: Dict[str, Any]) -> List[Dict[str, Any]]:
    rows = []
    for entry in result["evaluations"]:
        value = entry.get("value", [None, None])
        rows.append(
            {
                "sample": entry["sample"],
                "value_re": value[0],
                "value_im": value[1],
                "tail_bound": entry.get("tail_bound", ""),
                "points": entry.get("points", ""),
                "error": entry.get("error", ""),
            }
        )
    return rows


class ScenarioRunner:
    """Run one scenario and export its report.

    Parameters
    ----------
    scenario
        Path of a scenario file or name of a bundled scenario.
    command
        ``"verify"`` runs the scenario's checks, ``"eval"`` evaluates theta
        at its points. Default is ``"verify"``.
    tolerance
        Overrides the scenario's evaluation tolerance; for ``"verify"`` it
        also replaces the tolerance of every check.
    jobs
        Number of worker threads; overrides settings and scenario.
    seed
        Overrides the scenario's seed.
    output_format
        ``"json"`` or ``"csv"``. Default is ``"json"``.
    """

    def __init__(
        self,
        scenario: Union[str, Path],
        command: str = "verify",
        tolerance: Optional[float] = None,
        jobs: Optional[int] = None,
        seed: Optional[int] = None,
        output_format: str = "json",
    ):
        if command not in COMMANDS:
            raise ValueError(f"command must be one of {COMMANDS}, got '{command}'")
        if output_format not in FORMATS:
            raise ValueError(
                f"output_format must be one of {FORMATS}, got '{output_format}'"
            )
        if tolerance is not None and not tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {tolerance!r}")
        if seed is not None and seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed!r}")
        self.command: str = command
        self.output_format: str = output_format
        self.tolerance: Optional[float] = tolerance
        if jobs is not None and jobs < 1:
            raise ValueError(f"jobs must be at least 1, got {jobs!r}")
        self.jobs: Optional[int] = jobs
        self.scenario: Scenario = load_scenario(scenario, seed, tolerance)
        if command == "verify" and tolerance is not None:
            self.scenario = self.scenario.with_tolerance(tolerance)
        self.result: Optional[Union[VerificationReport, Dict[str, Any]]] = None

    @property
    def passed(self) -> bool:
        if self.result is None:
            raise RuntimeError("run() has not been called")
        if isinstance(self.result, VerificationReport):
            return self.result.passed
        return all("error" not in row for row in self.result["evaluations"])

    def run(self) -> Union[VerificationReport, Dict[str, Any]]:
        """Execute the command and keep its result."""
        start = time.perf_counter()
        if self.command == "verify":
            self.result = run_suite(self.scenario, self.jobs)
            counts = self.result.counts
            logger.info(
                "%s: %d checks, %d passed, %d failed, %d errors in %.2fs",
                self.scenario.name,
                counts["total"],
                counts["passed"],
                counts["failed"],
                counts["errors"],
                time.perf_counter() - start,
            )
        else:
            self.result = evaluate_points(self.scenario, self.tolerance)
        return self.result

    def render(self) -> str:
        if self.result is None:
            self.run()
        if isinstance(self.result, VerificationReport):
            if self.output_format == "csv":
                return _csv_text(self.result.to_rows())
            return self.result.to_json()
        if self.output_format == "csv":
            return _csv_text(_evaluation_rows(self.result))
        return json.dumps(self.result, sort_keys=True, indent=2) + "\n"

    def export_report(self, out: Optional[Union[str, Path]] = None) -> Optional[Path]:
        """Write the report to ``out``, or to stdout when ``out`` is None."""
        text = self.render()
        if out is None:
            sys.stdout.write(text)
            return None
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info("report written to %s", path)
        return path


def run_scenario(
    path: Union[str, Path],
    tol: Optional[float] = None,
    jobs: Optional[int] = None,
    seed: Optional[int] = None,
    out: Optional[Union[str, Path]] = None,
    output_format: str = "json",
) -> Tuple[Optional[VerificationReport], int]:
    """Verify a scenario, write its report and return it with the exit code."""
    try:
        runner = ScenarioRunner(path, "verify", tol, jobs, seed, output_format)
        report = runner.run()
        runner.export_report(out)
    except (TubeThetaError, ValueError, OSError) as e:
        logger.error("%s", e)
        return None, EXIT_CONFIG
    return report, EXIT_OK if runner.passed else EXIT_FAILED


def _bench_point(descriptor: AlgebraDescriptor) -> Tuple[AlgebraElement, np.ndarray]:
    e = unit(descriptor).coords
    z = AlgebraElement(descriptor, 0.25 * e + 1j * e)
    return z, np.zeros(natural_representation(descriptor).dim_u)


def bench(
    tolerances: Optional[Sequence[float]] = None,
    configurations: Optional[Sequence[AlgebraDescriptor]] = None,
) -> List[Dict[str, Any]]:
    """Terms, wall time and achieved bound of each enumeration strategy.

    The value difference against the ellipsoid strategy is included so that
    disagreement beyond the combined bounds is visible.
    """
    tolerances = list(tolerances or BENCH_TOLERANCES)
    rows = []
    for descriptor in configurations or BENCH_CONFIGURATIONS:
        rep = natural_representation(descriptor)
        lattice = integer_lattice(rep.dim_u)
        z, u = _bench_point(descriptor)
        for tol in tolerances:
            reference = None
            for strategy in reversed(STRATEGIES):
                start = time.perf_counter()
                result = theta_eval(rep, lattice, z, u, tol, strategy=strategy)
                elapsed = time.perf_counter() - start
                if reference is None:
                    reference = result
                rows.append(
                    {
                        "configuration": descriptor.name,
                        "dim_u": rep.dim_u,
                        "strategy": strategy,
                        "tol": "%.1e" % tol,
                        "terms": result.points_summed,
                        "wall_time": "%.6f" % elapsed,
                        "tail_bound": "%.6e" % result.tail_bound,
                        "value_re": repr(result.value.real),
                        "value_im": repr(result.value.imag),
                        "difference": "%.3e" % abs(result.value - reference.value),
                    }
                )
            logger.debug("bench %s at %.1e done", descriptor.name, tol)
    return rows


def _scenario_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--scenario", required=True, help="scenario file or bundled scenario name"
    )
    parser.add_argument(
        "--tol", type=float, help="evaluation tolerance; verify applies it to every check"
    )
    parser.add_argument("--jobs", type=int, help="number of worker threads")
    parser.add_argument("--seed", type=int, help="seed for random sample points")
    _output_arguments(parser)


def _output_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=FORMATS, default="json", dest="output_format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tubetheta",
        description="Certified theta series on tube domains and identity checks.",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="-v for progress, -vv for debug output",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    _scenario_arguments(commands.add_parser("eval", help="evaluate theta at the scenario points"))
    _scenario_arguments(commands.add_parser("verify", help="run the scenario's checks"))
    bench_parser = commands.add_parser("bench", help="compare enumeration strategies")
    bench_parser.add_argument("--tol", type=float, help="single tolerance instead of a sweep")
    _output_arguments(bench_parser)
    bench_parser.set_defaults(output_format="csv")
    commands.add_parser("list-scenarios", help="list the available scenarios")
    return parser


def _configure_logging(verbosity: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)

    if args.command == "list-scenarios":
        for name in list_scenarios():
            print(name)
        return EXIT_OK

    if args.command == "bench":
        tolerances = [args.tol] if args.tol is not None else None
        try:
            rows = bench(tolerances)
        except TubeThetaError as e:
            logger.error("%s", e)
            return EXIT_CONFIG
        if args.output_format == "json":
            _write(json.dumps(rows, indent=2) + "\n", args.out)
        else:
            _write(_csv_text(rows), args.out)
        return EXIT_OK

    try:
        runner = ScenarioRunner(
            args.scenario,
            args.command,
            args.tol,
            args.jobs,
            args.seed,
            args.output_format,
        )
        runner.run()
        runner.export_report(args.out)
    except (TubeThetaError, ValueError, OSError) as e:
        logger.error("%s", e)
        print(f"tubetheta: {e}", file=sys.stderr)
        return EXIT_CONFIG

    if isinstance(runner.result, VerificationReport):
        counts = runner.result.counts
        print(
            f"{runner.scenario.name}: {counts['passed']}/{counts['total']} checks passed"
            f" ({counts['failed']} failed, {counts['errors']} errors)",
            file=sys.stderr,
        )
    return EXIT_OK if runner.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
