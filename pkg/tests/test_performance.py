"""
Performance and stress tests for TubeTheta.
"""

import time

import numpy as np
import pytest


@pytest.mark.performance
@pytest.mark.slow
def test_classical_suite_performance():
    """The full classical check suite finishes in reasonable time."""
    from tubetheta.scenarios import load_scenario
    from tubetheta.transform_verify import run_suite

    scenario = load_scenario("classical")
    start_time = time.time()
    report = run_suite(scenario)
    execution_time = time.time() - start_time

    assert execution_time < 60, f"Classical suite took too long: {execution_time:.2f}s"
    assert report.passed


@pytest.mark.performance
def test_tight_tolerance_sym_real_3():
    """A six-digit-plus evaluation in dimension 3 stays fast."""
    from tubetheta.jordan_core import element, sym_real
    from tubetheta.lattice import integer_lattice
    from tubetheta.representation import natural_representation
    from tubetheta.theta_engine import theta_eval

    descriptor = sym_real(3)
    rep = natural_representation(descriptor)
    z = element(
        descriptor,
        [0.1 + 1.0j, 0.2 + 0.9j, -0.1 + 1.1j, 0.05 + 0.1j, 0.0 + 0.2j, -0.1 + 0.1j],
    )
    u = np.array([0.1, 0.2, -0.3])

    start_time = time.time()
    result = theta_eval(rep, integer_lattice(3), z, u, 1e-12)
    execution_time = time.time() - start_time

    assert execution_time < 5, f"Evaluation took too long: {execution_time:.2f}s"
    assert result.tail_bound <= 1e-12


@pytest.mark.performance
def test_ellipsoid_beats_box():
    """Ellipsoid enumeration never sums more terms than the bounding box."""
    from tubetheta.cli_runner import bench

    rows = bench([1e-8])
    by_key = {(row["configuration"], row["strategy"]): row["terms"] for row in rows}
    for (name, strategy), terms in by_key.items():
        if strategy == "ellipsoid":
            assert terms <= by_key[(name, "box")]


@pytest.mark.performance
def test_memory_usage():
    """Memory does not explode over repeated evaluations."""
    # Check for required dependencies upfront
    psutil = pytest.importorskip("psutil", reason="psutil required for memory testing")
    import os

    from tubetheta.jordan_core import herm_complex, unit
    from tubetheta.lattice import integer_lattice
    from tubetheta.representation import natural_representation
    from tubetheta.theta_engine import theta_eval

    process = psutil.Process(os.getpid())
    initial_memory = process.memory_info().rss / 1024 / 1024  # MB

    descriptor = herm_complex(2)
    rep = natural_representation(descriptor)
    z = 1j * unit(descriptor)
    for i in range(20):
        theta_eval(rep, integer_lattice(4), z, np.full(4, 0.05 * i), 1e-10)

    final_memory = process.memory_info().rss / 1024 / 1024  # MB
    memory_increase = final_memory - initial_memory

    assert memory_increase < 500, f"Memory usage increased by {memory_increase:.1f}MB"
