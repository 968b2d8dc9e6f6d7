"""Kinetic / nonnegative / x-factorable classification."""

import math

import numpy as np
import pytest

from crnforge.classify import (
    check_cross_negative_effect,
    check_x_factorable,
    classify_system,
    find_cross_negative_terms,
)
from crnforge.poly import Polynomial, PolySystem
from crnforge.randomsys import random_system
from crnforge.transform import x_factorize

from conftest import VARS2, make_system


def cnt_example(k):
    return make_system(
        [
            [(1.0, (0, 0)), (1.0, (2, 0)), (2.0 * k, (0, 1)), (1.0, (0, 2))],
            [(1.0, (0, 0))],
        ],
        k=k,
    )


def test_cnt_example_kinetic_for_nonnegative_k():
    assert find_cross_negative_terms(cnt_example(1.0)) == []
    assert find_cross_negative_terms(cnt_example(0.0)) == []


def test_cnt_example_one_cross_negative_term_for_negative_k():
    found = find_cross_negative_terms(cnt_example(-0.5))
    assert len(found) == 1
    eq, mono = found[0]
    assert eq == 0
    assert mono.exponents == (0, 1)
    assert mono.coeff == -1.0


def test_constant_decay_is_cross_negative():
    v = ("x",)
    sys = PolySystem(v, [Polynomial(v, [(-2.0, (0,))])])
    found = find_cross_negative_terms(sys)
    assert len(found) == 1
    assert found[0][0] == 0
    assert found[0][1].coeff == -2.0


def test_effect_absent_in_mild_regime():
    verdict, witnesses = check_cross_negative_effect(cnt_example(-0.5))
    assert verdict == "nonnegative"
    assert witnesses == []


def test_effect_interval_for_strong_regime():
    verdict, witnesses = check_cross_negative_effect(cnt_example(-2.0))
    assert verdict == "negative"
    w = witnesses[0]
    lo, hi = w.interval
    assert abs(lo - (2.0 - math.sqrt(3.0))) < 1e-9
    assert abs(hi - (2.0 + math.sqrt(3.0))) < 1e-9
    # the witness point is the interval midpoint on the face x1 = 0
    assert w.point == (0.0, 2.0)
    assert w.value < 0.0


def test_no_terms_implies_nonnegative(rng):
    for _ in range(50):
        sys = random_system(rng, n_vars=2, degree=3, kinetic=True)
        verdict, _ = check_cross_negative_effect(sys)
        assert verdict == "nonnegative"


def test_witness_soundness(rng):
    for _ in range(100):
        sys = random_system(rng, n_vars=2, degree=3)
        verdict, witnesses = check_cross_negative_effect(sys)
        for w in witnesses:
            x = np.asarray(w.point)
            assert np.any(x == 0.0)
            assert sys.equations[w.equation_index].evaluate(x) < 0.0


def test_exact_verdict_agrees_with_dense_sampling(rng):
    grid = np.linspace(0.0, 50.0, 10_000)
    for _ in range(60):
        sys = random_system(rng, n_vars=2, degree=3)
        verdict, _ = check_cross_negative_effect(sys)
        sampled_negative = False
        for s in range(2):
            u = 1 - s
            pts = np.zeros((len(grid), 2))
            pts[:, u] = grid
            if np.any(sys.equations[s].evaluate_many(pts) < -1e-9):
                sampled_negative = True
        if sampled_negative:
            assert verdict == "negative"
        elif verdict == "negative":
            # the violation must live beyond or between the sampled points
            assert True


def test_three_variable_sampling_detects_violation():
    v = ("x1", "x2", "x3")
    sys = PolySystem(
        v,
        [
            Polynomial(v, [(1.0, (0, 0, 0)), (-1.0, (0, 1, 1))]),
            Polynomial(v, [(1.0, (0, 0, 0))]),
            Polynomial(v, [(1.0, (0, 0, 0))]),
        ],
    )
    verdict, witnesses = check_cross_negative_effect(sys)
    assert verdict == "negative"
    assert witnesses[0].equation_index == 0


def test_three_variable_undetermined_when_clean():
    v = ("x1", "x2", "x3")
    # a cross-negative term that never wins on the face: 1 + x2^2 - x2
    sys = PolySystem(
        v,
        [
            Polynomial(v, [(1.0, (0, 0, 0)), (1.0, (0, 2, 0)), (-1.0, (0, 1, 0))]),
            Polynomial(v, [(1.0, (0, 0, 0))]),
            Polynomial(v, [(1.0, (0, 0, 0))]),
        ],
    )
    verdict, witnesses = check_cross_negative_effect(sys)
    assert verdict == "undetermined"
    assert witnesses == []


def test_x_factorable_autocatalytic_example():
    sys = make_system([[(-1.0, (1, 1))], [(1.0, (1, 1))]])
    factorable, fully = check_x_factorable(sys)
    assert factorable == {0, 1}
    assert fully


def test_x_factorable_fails_with_constant_terms(oracle_params):
    from crnforge.homoclinic import build_variant

    sys = build_variant(oracle_params, "translated").system
    factorable, fully = check_x_factorable(sys)
    assert factorable == set()
    assert not fully


def test_zero_system_vacuously_factorable():
    sys = make_system([[], []])
    factorable, fully = check_x_factorable(sys)
    assert factorable == {0, 1}
    assert fully


def test_x_factorization_always_kinetic(rng):
    for _ in range(200):
        sys = random_system(rng, n_vars=2, degree=2)
        assert find_cross_negative_terms(x_factorize(sys, (0, 1))) == []


def test_report_consistency(rng):
    for _ in range(40):
        sys = random_system(rng, n_vars=2, degree=2)
        rep = classify_system(sys)
        assert rep.kinetic == (not rep.cross_negative_terms)
        if rep.kinetic:
            assert rep.nonnegative is True
        for w in rep.cross_negative_effect_witnesses:
            val = sys.equations[w.equation_index].evaluate(list(w.point))
            assert val < 0.0


def test_report_json_shape():
    rep = classify_system(cnt_example(-2.0))
    payload = rep.to_json_dict(VARS2)
    assert payload["kinetic"] is False
    assert payload["nonnegative"] is False
    assert payload["witnesses"][0]["interval"] is not None
