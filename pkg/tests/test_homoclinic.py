"""Case-study closed forms: curve, systems, records, constraints, networks."""

import math

import numpy as np
import pytest

from crnforge.classify import classify_system, find_cross_negative_terms
from crnforge.crn import canonicalize, induce_kinetics
from crnforge.errors import ConstraintViolationError
from crnforge.homoclinic import (
    LOOP_HALF_WIDTH,
    AlphaCurve,
    CaseStudyParams,
    base_system,
    build_variant,
    constraint_set,
    fixed_points_closed_form,
    perturbed_system,
    published_networks,
    saddle_quantity,
    separation_distance,
    sheared_coefficients,
    translated_coefficients,
)
from crnforge.poly import Polynomial


def test_curve_identity_on_both_branches(rng):
    curve = AlphaCurve()
    x2 = rng.uniform(-1.0, 5.0, size=1000)
    for sign in (+1, -1):
        x1 = curve.branch(x2, sign)
        vals = np.abs([curve.evaluate(a, b) for a, b in zip(x1, x2)])
        assert np.max(vals) < 1e-12


def test_loop_box():
    curve = AlphaCurve()
    pts = curve.loop_points(800)
    assert np.all(pts[:, 1] >= -1.0 - 1e-12)
    assert np.all(pts[:, 1] <= 0.0 + 1e-12)
    assert np.max(np.abs(pts[:, 0])) <= LOOP_HALF_WIDTH + 1e-12


def test_base_system_coefficients():
    sys = base_system(-0.8)
    v = sys.variables
    assert sys.equations[0].allclose(
        Polynomial(v, [(-0.8, (1, 0)), (1.0, (0, 1)), (-1.2, (1, 1)), (1.5, (0, 2))]),
        1e-15,
    )
    assert sys.equations[1] == Polynomial(
        v, [(1.0, (1, 0)), (-0.8, (0, 1)), (-0.8, (0, 2))]
    )


def test_base_system_rejects_large_a():
    with pytest.raises(ConstraintViolationError):
        base_system(1.0)
    with pytest.raises(ConstraintViolationError):
        base_system(-1.2)


def test_flow_invariance_identity_exact(rng):
    # grad(H) . P == a (2 + 3 x2) H with exact term cancellation
    curve = AlphaCurve()
    for a in rng.uniform(-0.999, -0.001, size=20):
        sys = base_system(float(a))
        lhs = Polynomial.zero(curve.h.variables)
        for j in range(2):
            lhs = lhs + curve.h.deriv(j) * sys.equations[j]
        factor = Polynomial(
            curve.h.variables, [(2.0 * float(a), (0, 0)), (3.0 * float(a), (0, 1))]
        )
        assert (lhs - factor * curve.h).is_zero


def test_perturbed_system_reduces_to_base():
    assert perturbed_system(-0.8, 0.0) == base_system(-0.8)


def test_perturbed_system_shifts_linear_coefficient():
    sys = perturbed_system(-0.8, 0.01)
    assert abs(sys.equations[0].coefficient((1, 0)) - (-0.79)) < 1e-15


def test_perturbed_system_is_kinetic_in_original_frame():
    assert classify_system(perturbed_system(-0.8, 0.01)).kinetic


def test_fixed_points_closed_form_values():
    points = fixed_points_closed_form(-0.8)
    locs = [p for p, _ in points]
    assert locs[0] == (0.0, 0.0)
    assert abs(locs[1][0] - (-0.17777777777777778)) < 1e-15
    assert abs(locs[1][1] - (-2.0 / 3.0)) < 1e-15
    assert abs(locs[2][0] - 0.703125) < 1e-15
    assert abs(locs[2][1] - 0.5625) < 1e-15
    assert [t for _, t in points] == ["saddle", "unstable spiral", "stable node"]


def test_spiral_inside_loop_box():
    for a in (-0.9, -0.5, -0.1):
        (spiral, _) = fixed_points_closed_form(a)[1]
        assert -LOOP_HALF_WIDTH <= spiral[0] <= LOOP_HALF_WIDTH
        assert -1.0 <= spiral[1] <= 0.0


def test_saddle_quantity_and_distance():
    assert saddle_quantity(-0.8) == -1.6
    assert abs(separation_distance(-0.8) - 0.9004394) < 1e-6
    # the node slides toward the saddle as a -> -1
    assert separation_distance(-0.999) < separation_distance(-0.9)
    assert separation_distance(-0.99) < 0.03


def test_translated_coefficients_match_oracle(oracle_params):
    rec = translated_coefficients(oracle_params)
    expected = {
        "k0_1": 0.875, "k0_2": -1.6, "k1_1": 1.0, "k1_2": 1.0, "k2_1": -2.3,
        "k2_2": 1.6, "k12_1": -1.2, "k22_1": 1.5, "k22_2": -0.8,
    }
    for key, val in expected.items():
        assert abs(rec[key] - val) < 1e-12


def test_translated_variant_has_two_cross_negative_terms(oracle_params):
    variant = build_variant(oracle_params, "translated")
    cnt = find_cross_negative_terms(variant.system)
    assert {(s, m.exponents) for s, m in cnt} == {(0, (0, 1)), (1, (0, 0))}


def test_sheared_coefficients_sign_structure():
    params = CaseStudyParams(a=-0.75, t=2.2)
    rec = sheared_coefficients(params)
    assert rec["k0_1"] < 0 and rec["k0_2"] > 0
    assert rec["k11_1"] < 0 and rec["k11_2"] < 0
    assert rec["k12_1"] > 0 and rec["k12_2"] > 0
    assert rec["k22_1"] < 0 and rec["k22_2"] < 0


def test_variant_systems_are_kinetic(oracle_params):
    for name in ("xfact", "qssa", "hybrid"):
        variant = build_variant(oracle_params, name)
        assert find_cross_negative_terms(variant.system) == [], name
    sheared = build_variant(CaseStudyParams(a=-0.75, t=2.2), "sheared_xfact")
    assert find_cross_negative_terms(sheared.system) == []


def test_constraint_windows():
    cs = constraint_set("xfact")
    ok = CaseStudyParams(a=-0.8, t1=1.0, t2=1.5)
    assert cs.satisfied(ok.bundle())
    # t2 below the lower bound max(1, -a t1)
    assert not cs.satisfied(CaseStudyParams(a=-0.8, t1=2.0, t2=1.2).bundle())
    # t1 below the loop half width
    assert not cs.satisfied(CaseStudyParams(a=-0.8, t1=0.3, t2=1.5).bundle())

    sheared = constraint_set("sheared_xfact")
    assert sheared.satisfied(CaseStudyParams(a=-0.75, t=2.2).bundle())
    assert not sheared.satisfied(CaseStudyParams(a=-0.75, t=2.4).bundle())
    assert not sheared.satisfied(CaseStudyParams(a=-0.3, t=2.2).bundle())


def test_sheared_window_arithmetic():
    # lower bound max(1, 2 a^-2 (1 - a^2)) and upper 2 a^-1 (1+4a)^-1 (1-a)
    b = CaseStudyParams(a=-0.75, t=2.2).bundle()
    lower = max(1.0, 2.0 * (1.0 - 0.75**2) / 0.75**2)
    upper = 2.0 * (1.0 + 0.75) / (-0.75 * (1.0 - 3.0))
    assert abs(lower - 1.5555555555555556) < 1e-12
    assert abs(upper - 7.0 / 3.0) < 1e-12
    assert lower < b["t"] < upper


def test_xfact_window_is_nonempty_where_required(rng):
    # the upper bound on t2 exceeds the lower bound across the regime
    cs = constraint_set("xfact")
    for a in rng.uniform(-0.95, -0.05, size=30):
        for t1 in rng.uniform(LOOP_HALF_WIDTH + 1e-6, 5.0, size=10):
            lower = max(1.0, -a * t1)
            upper = 2.0 / 3.0 + (8.0 / 3.0) * (3.0 - a * a) * (a + 4.0 * t1) / (a * a)
            assert upper > lower


def test_build_variant_rejects_out_of_window():
    with pytest.raises(ConstraintViolationError) as err:
        build_variant(CaseStudyParams(a=-0.8, t1=0.1, t2=1.5), "xfact")
    assert any("t1" in name for name, _ in err.value.failed)


def test_build_variant_unknown_name(oracle_params):
    with pytest.raises(KeyError):
        build_variant(oracle_params, "mystery")


def test_xfact_equals_manual_factorization(oracle_params):
    from crnforge.transform import x_factorize

    translated = build_variant(oracle_params, "translated").system
    assert x_factorize(translated, (0, 1)).allclose(
        build_variant(oracle_params, "xfact").system, 1e-12
    )


def test_published_sec43_network(oracle_params):
    net = published_networks(oracle_params, "sec43")
    assert net.n_reactions == 9
    # r2 is x2 -> empty with rate 1.6
    r2 = net.reactions[1]
    assert r2.reactant.stoich == (0, 1) and r2.product.is_zero
    assert abs(r2.rate - 1.6) < 1e-12
    rates = [r.rate for r in net.reactions]
    expected = [0.875, 1.6, 1.0, 1.0, 2.3, 1.6, 1.2, 1.5, 0.8]
    assert max(abs(r - e) for r, e in zip(rates, expected)) < 1e-12
    assert induce_kinetics(net).allclose(
        build_variant(oracle_params, "xfact").system, 1e-12
    )


def test_published_rates_are_absolute_record_values(oracle_params):
    variant = build_variant(oracle_params, "xfact")
    net = published_networks(oracle_params, "sec43")
    keys = ["k0_1", "k0_2", "k1_1", "k1_2", "k2_1", "k2_2", "k12_1", "k22_1", "k22_2"]
    for key, reaction in zip(keys, net.reactions):
        assert abs(reaction.rate - abs(variant.coefficients[key])) < 1e-15


def test_published_sheared_network_round_trip():
    params = CaseStudyParams(a=-0.75, t=2.2)
    net = published_networks(params, "appC_sheared")
    assert net.n_reactions == 12
    assert induce_kinetics(net).allclose(
        build_variant(params, "sheared_xfact").system, 1e-12
    )


def test_published_hybrid_network(oracle_params):
    net = published_networks(oracle_params, "appC_hybrid")
    assert net.n_reactions == 11
    # input reaction: empty -> y at omega/mu; decay: x2 + y -> x2 at 1/mu
    inputs = [r for r in net.reactions if r.reactant.is_zero]
    assert len(inputs) == 1
    assert abs(inputs[0].rate - oracle_params.omega / oracle_params.mu) < 1e-9
    assert induce_kinetics(net).allclose(
        build_variant(oracle_params, "hybrid").system, 1e-9
    )


def test_hybrid_degeneracy_drops_first_reaction():
    params = CaseStudyParams(a=-0.8, alpha=0.0, t1=1.5 / 0.8, t2=1.5)
    variant = build_variant(params, "hybrid")
    assert abs(variant.coefficients["k0_1"]) < 1e-12
    net = published_networks(params, "appC_hybrid")
    assert net.n_reactions == 10


def test_sheared_degeneracy_k4():
    a = -0.8
    t = -(2.0 / 3.0) / (2.0 + 3.0 * a)
    variant = build_variant(CaseStudyParams(a=a, t=t), "sheared_xfact")
    assert abs(variant.coefficients["k1_2"]) < 1e-12
    net = published_networks(CaseStudyParams(a=a, t=t), "appC_sheared")
    assert net.n_reactions == 11


def test_canonicalize_matches_published(oracle_params):
    assert canonicalize(build_variant(oracle_params, "xfact").system).allclose(
        published_networks(oracle_params, "sec43"), 1e-12
    )
    params = CaseStudyParams(a=-0.75, t=2.2)
    assert canonicalize(build_variant(params, "sheared_xfact").system).allclose(
        published_networks(params, "appC_sheared"), 1e-12
    )
    assert canonicalize(build_variant(oracle_params, "hybrid").system).allclose(
        published_networks(oracle_params, "appC_hybrid"), 1e-9
    )
