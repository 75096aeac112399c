#!/usr/bin/env python3
"""
Example script demonstrating TubeTheta usage.

This script shows different ways to use the package:
1. Certified evaluation of the classical Jacobi theta function
2. Siegel theta series of genus 2 and its transformation formula
3. The constant c_Lambda for a scaled lattice
4. Budget exhaustion near the boundary of the cone
5. Running a bundled scenario and exporting its report
"""

import math

import numpy as np

from tubetheta import (
    BudgetError,
    Settings,
    create_sample_points,
    integer_lattice,
    natural_representation,
    real_line,
    run_scenario,
    scaled_integer_lattice,
    sym_real,
    theta_eval,
    unit,
)
from tubetheta.jordan_core import element
from tubetheta.transform_verify import check_full_transformation, estimate_c_lambda


def example_1_jacobi_theta():
    """Example 1: theta(i, 0) of the lattice Z."""
    print("📊 Example 1: classical Jacobi theta")
    print("-" * 50)

    rep = natural_representation(real_line())
    z = element(real_line(), [1j])
    for tol in (1e-4, 1e-8, 1e-12):
        result = theta_eval(rep, integer_lattice(1), z, [0.0], tol)
        print(
            f"   tol={tol:.0e}: value={result.value.real:.15f}"
            f" bound={result.tail_bound:.2e} points={result.points_summed}"
        )
    exact = math.pi**0.25 / math.gamma(0.75)
    print(f"✅ pi^(1/4) / Gamma(3/4) = {exact:.15f}")


def example_2_siegel_genus_two():
    """Example 2: genus-2 Siegel theta and its inversion formula."""
    print("\n📊 Example 2: Siegel theta series of genus 2")
    print("-" * 50)

    descriptor = sym_real(2)
    rep = natural_representation(descriptor)
    lattice = integer_lattice(2)
    z = 1j * unit(descriptor)
    value = theta_eval(rep, lattice, z, np.zeros(2), 1e-12).value
    print(f"   theta(i I, 0) = {value.real:.10f} (square of example 1)")

    z = element(descriptor, [0.3 + 0.8j, -0.4 + 1.1j, 0.2 + 0.3j])
    check = check_full_transformation(rep, lattice, z, np.array([0.2, -0.1]))
    print(f"   full transformation: residual={check.residual:.2e} pass={check.passed}")


def example_3_c_lambda():
    """Example 3: c_Lambda for the lattice 2Z."""
    print("\n📊 Example 3: the constant c_Lambda")
    print("-" * 50)

    rep = natural_representation(real_line())
    lattice = scaled_integer_lattice(1, 2)
    samples = create_sample_points(rep, n_points=8, random_seed=1)
    estimate = estimate_c_lambda(rep, lattice, samples)
    print(f"   mean ratio = {estimate.mean.real:.10f} (spread {estimate.spread:.1e})")
    print(f"   covolume   = {estimate.covolume:.1f}")
    print(f"✅ mean * covolume = {estimate.product.real:.10f}")


def example_4_budget():
    """Example 4: a tiny point budget near the cone boundary."""
    print("\n⚠️  Example 4: point budget")
    print("-" * 50)

    rep = natural_representation(real_line()).with_settings(Settings(point_budget=50))
    try:
        theta_eval(rep, integer_lattice(1), element(real_line(), [0.001j]), [0.0], 1e-12)
    except BudgetError as e:
        print(f"   BudgetError: bound {e.achieved_bound:.2e} after {e.points} points")


def example_5_scenario():
    """Example 5: verify a bundled scenario."""
    print("\n📁 Example 5: bundled scenario")
    print("-" * 50)

    report, code = run_scenario("classical_2z", out="./example_output/classical_2z.json")
    counts = report.counts
    print(f"   {counts['passed']}/{counts['total']} checks passed, exit code {code}")
    print("   Report written to ./example_output/classical_2z.json")


def main():
    """Run all examples."""
    print("🔢 TUBETHETA EXAMPLES")
    print("=" * 60)

    example_1_jacobi_theta()
    example_2_siegel_genus_two()
    example_3_c_lambda()
    example_4_budget()
    example_5_scenario()

    print("\n" + "=" * 60)
    print("✅ ALL EXAMPLES COMPLETED!")
    print("💡 From the shell: tubetheta verify --scenario siegel_genus2")
    print("=" * 60)


if __name__ == "__main__":
    main()
