"""Acceptance gate: every criterion at its stated tolerance.

Each test prints its pass/fail line (visible with ``pytest -s`` or in the
CLI ``verify`` subcommand, which runs the same checks).
"""

import pytest

from crnforge import acceptance

SEED = 42


def _run(fn):
    result = fn(SEED)
    print(result.line())
    assert result.passed, result.detail
    return result


def test_c01_classification_table():
    _run(acceptance.criterion_1_classification_table)


def test_c02_canonical_round_trip():
    _run(acceptance.criterion_2_canonical_round_trip)


def test_c03_flow_invariance_identity():
    _run(acceptance.criterion_3_flow_invariance)


def test_c04_fixed_point_oracle():
    _run(acceptance.criterion_4_fixed_point_oracle)


def test_c05_published_network_rates():
    _run(acceptance.criterion_5_sec43_network)


def test_c06_boundary_fixed_points():
    _run(acceptance.criterion_6_boundary_fixed_points)


def test_c07_rate_degeneracies():
    _run(acceptance.criterion_7_degeneracies)


def test_c08_melnikov():
    _run(acceptance.criterion_8_melnikov)


def test_c09_bifurcation_sides():
    _run(acceptance.criterion_9_bifurcation_sides)


def test_c10_qssa_convergence():
    _run(acceptance.criterion_10_qssa_convergence)


def test_c11_xfact_kineticity():
    _run(acceptance.criterion_11_xfact_kineticity)


def test_c12_dulac():
    _run(acceptance.criterion_12_dulac)


def test_full_suite_runner_is_green():
    results = acceptance.run_suite(seed=SEED)
    assert len(results) == 12
    assert all(r.passed for r in results)
