"""Kinetic transformations: x-factorable, QSSA, composition, audits, search."""

import warnings

import numpy as np
import pytest

from crnforge.classify import find_cross_negative_terms
from crnforge.errors import (
    ConstraintViolationError,
    PNotPositiveError,
    TermNotCrossNegativeError,
    UnsupportedDimensionError,
)
from crnforge.homoclinic import (
    CaseStudyParams,
    build_variant,
    constraint_set,
    perturbed_system,
    sheared_affine_map,
)
from crnforge.poly import AffineMap, Polynomial, PolySystem
from crnforge.randomsys import random_system
from crnforge.transform import (
    AffineStep,
    ConstraintSet,
    Predicate,
    QssaSpec,
    QssaStep,
    TransformSpec,
    XFactorStep,
    affine_kinetic_search,
    apply,
    qssa_embed,
    x_factorize,
    xfact_fixed_point_audit,
)

from conftest import VARS2, make_system


ORACLE = CaseStudyParams(a=-0.8, alpha=0.0, t1=1.0, t2=1.5)


def test_x_factorize_full_matches_variant(oracle_params):
    translated = build_variant(oracle_params, "translated").system
    factored = x_factorize(translated, (0, 1))
    expected = build_variant(oracle_params, "xfact").system
    assert factored.allclose(expected, 1e-12)
    assert find_cross_negative_terms(factored) == []


def test_x_factorize_single_component(oracle_params):
    translated = build_variant(oracle_params, "translated").system
    partial = x_factorize(translated, (0,))
    # first equation gains the factor, second is untouched
    assert partial.equations[1] == translated.equations[1]
    assert all(m.exponents[0] >= 1 for m in partial.equations[0].terms)
    # only the second equation's constant remains cross-negative
    remaining = find_cross_negative_terms(partial)
    assert [(s, m.exponents) for s, m in remaining] == [(1, (0, 0))]


def test_x_factorize_zero_system():
    zero = make_system([[], []])
    assert x_factorize(zero, (0, 1)).is_zero


def test_x_factorize_empty_subset_rejected():
    with pytest.raises(ValueError):
        x_factorize(make_system([[], []]), ())


def test_x_factorize_degree_increases_by_one(rng):
    for _ in range(20):
        sys = random_system(rng, n_vars=2, degree=2)
        out = x_factorize(sys, (0, 1))
        assert out.degree == sys.degree + 1


def test_qssa_embed_full_matches_variant(oracle_params):
    translated = build_variant(oracle_params, "translated").system
    targets = [(s, m.exponents) for s, m in find_cross_negative_terms(translated)]
    spec = QssaSpec.make(targets, mu=oracle_params.mu, omega=1.0)
    total = qssa_embed(translated, spec)
    expected = build_variant(oracle_params, "qssa").system
    assert total.variables == ("x1", "x2", "y1", "y2")
    assert total.allclose(expected, 1e-12)
    assert find_cross_negative_terms(total) == []


def test_qssa_embed_hybrid_route(oracle_params):
    translated = build_variant(oracle_params, "translated").system
    partial = x_factorize(translated, (0,))
    spec = QssaSpec.make([(1, (0, 0))], mu=oracle_params.mu, omega=1.0)
    total = qssa_embed(partial, spec)
    expected = build_variant(oracle_params, "hybrid").system
    assert total.variables == ("x1", "x2", "y")
    assert total.allclose(expected, 1e-12)


def test_qssa_embed_rejects_positive_target(oracle_params):
    translated = build_variant(oracle_params, "translated").system
    with pytest.raises(TermNotCrossNegativeError):
        qssa_embed(translated, QssaSpec.make([(0, (0, 0))]))  # constant is +0.875


def test_qssa_embed_rejects_missing_term(oracle_params):
    translated = build_variant(oracle_params, "translated").system
    with pytest.raises(TermNotCrossNegativeError):
        qssa_embed(translated, QssaSpec.make([(0, (0, 5))]))


def test_qssa_embed_rejects_nonpositive_p(oracle_params):
    translated = build_variant(oracle_params, "translated").system
    p_bad = Polynomial(VARS2, [(1.0, (1, 0)), (-1.0, (0, 0))])  # x1 - 1
    spec = QssaSpec.make([(1, (0, 0))], p={1: p_bad})
    with pytest.raises(PNotPositiveError):
        qssa_embed(translated, spec)


def test_qssa_embed_warns_on_partial_selection(oracle_params):
    translated = build_variant(oracle_params, "translated").system
    spec = QssaSpec.make([(1, (0, 0))])  # leaves the other cross-negative term
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        qssa_embed(translated, spec)
    assert any("cross-negative" in str(w.message) for w in caught)


def test_qssa_degree_bound(rng, oracle_params):
    # m_bar <= m + m0 + 2 with polynomial p of degree m0; partial selection
    # is intentional here, so the leftover-term warning is expected
    translated = build_variant(oracle_params, "translated").system
    p = Polynomial(VARS2, [(1.0, (0, 0)), (0.5, (1, 1))])  # degree 2, positive
    spec = QssaSpec.make([(1, (0, 0))], p={1: p})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        total = qssa_embed(translated, spec)
    assert total.degree <= translated.degree + p.degree + 2


def test_qssa_nontrivial_p_and_omega(oracle_params):
    translated = build_variant(oracle_params, "translated").system
    targets = [(s, m.exponents) for s, m in find_cross_negative_terms(translated)]
    p = Polynomial(VARS2, [(2.0, (0, 0)), (1.0, (0, 1))])  # 2 + x2 > 0
    spec = QssaSpec.make(targets, mu=1e-3, omega={0: 1.0, 1: 3.0}, p={1: p})
    total = qssa_embed(translated, spec)
    assert find_cross_negative_terms(total) == []
    # adjoined equation for x2's term: (omega - x2 p(x) y2) / mu
    y_eq = total.equations[-1]
    assert abs(y_eq.coefficient((0, 0, 0, 0)) - 3.0e3) < 1e-9
    assert abs(y_eq.coefficient((0, 1, 0, 1)) - (-2.0e3)) < 1e-9
    assert abs(y_eq.coefficient((0, 2, 0, 1)) - (-1.0e3)) < 1e-9


def test_apply_translation_then_xfactor(oracle_params):
    spec = TransformSpec(
        (
            AffineStep(AffineMap.translation_by([1.0, 1.5])),
            XFactorStep((0, 1)),
        )
    )
    result = apply(spec, perturbed_system(-0.8, 0.0))
    expected = build_variant(oracle_params, "xfact").system
    assert result.system.allclose(expected, 1e-12)
    assert [entry["kind"] for entry in result.ledger] == ["affine", "xfactor"]
    assert result.ledger[1]["degree_after"] == 3


def test_apply_sheared_pipeline_matches_closed_forms():
    params = CaseStudyParams(a=-0.75, alpha=0.01, t=2.2)
    spec = TransformSpec(
        (
            AffineStep(sheared_affine_map(params)),
            XFactorStep((0, 1)),
        )
    )
    result = apply(spec, perturbed_system(params.a, params.alpha))
    expected = build_variant(params, "sheared_xfact").system
    assert result.system.allclose(expected, 1e-12)


def test_apply_empty_spec_is_identity(rng):
    sys = random_system(rng, n_vars=2, degree=2)
    result = apply(TransformSpec(()), sys)
    assert result.system == sys
    assert result.ledger == []


def test_apply_ledger_dimensions_never_shrink(rng, oracle_params):
    translated = build_variant(oracle_params, "translated").system
    targets = [(s, m.exponents) for s, m in find_cross_negative_terms(translated)]
    spec = TransformSpec(
        (
            AffineStep(AffineMap.translation_by([1.0, 1.5])),
            QssaStep(QssaSpec.make(targets)),
        )
    )
    result = apply(spec, perturbed_system(-0.8, 0.0))
    for entry in result.ledger:
        assert entry["n_vars_after"] >= entry["n_vars_before"]
        assert entry["degree_after"] >= entry["degree_before"] or entry["kind"] == "affine"


def test_transform_spec_json_round_trip(oracle_params):
    p = Polynomial(VARS2, [(2.0, (0, 0)), (1.0, (0, 1))])
    spec = TransformSpec(
        (
            AffineStep(AffineMap.translation_by([1.0, 1.5])),
            XFactorStep((0,)),
            QssaStep(QssaSpec.make([(1, (0, 0))], mu=1e-3, omega={1: 2.0}, p={1: p})),
        )
    )
    back = TransformSpec.from_json_dict(spec.to_json_dict())
    assert back == spec


def test_transform_spec_json_rejects_unknown_kind():
    with pytest.raises(ValueError):
        TransformSpec.from_json_dict({"steps": [{"kind": "mystery"}]})


# -- fixed-point audit ------------------------------------------------------------


def test_audit_node_and_spiral_conditions(oracle_params):
    from crnforge.homoclinic import fixed_points_closed_form

    translated = build_variant(oracle_params, "translated").system
    interior = [
        (oracle_params.t1 + x, oracle_params.t2 + y)
        for (x, y), _ in fixed_points_closed_form(oracle_params.a)
    ]
    audit = xfact_fixed_point_audit(translated.system if hasattr(translated, "system") else translated, interior)
    by_type = {entry.type_before: entry for entry in audit.interior}
    node = by_type["stable node"]
    # sign pattern [[-, +], [+, -]]: both sufficient conditions hold
    assert node.stability_invariant and node.type_invariant
    assert np.sign(node.jacobian[0, 0]) == -1 and np.sign(node.jacobian[1, 1]) == -1
    assert np.sign(node.jacobian[0, 1]) == +1 and np.sign(node.jacobian[1, 0]) == +1
    assert node.type_after == "stable node"

    spiral = by_type["unstable spiral"]
    # off-diagonal signs (-, +): the type condition fails, the explicit
    # discriminant check settles it (t2 below the window bound keeps disc < 0)
    assert not spiral.type_invariant
    assert spiral.stability_invariant
    assert spiral.disc_after < 0.0
    assert spiral.type_after == "unstable spiral"

    saddle = by_type["saddle"]
    assert saddle.is_saddle and saddle.type_after == "saddle"


def test_audit_boundary_points(oracle_params):
    translated = build_variant(oracle_params, "translated").system
    audit = xfact_fixed_point_audit(translated, [])
    origin = [b for b in audit.boundary if b.point == (0.0, 0.0)][0]
    assert origin.type == "saddle"
    assert abs(origin.eigenvalues[0] - 0.875) < 1e-12
    assert abs(origin.eigenvalues[1] + 1.6) < 1e-12
    x_axis = [b for b in audit.boundary if b.point[1] == 0.0 and b.point[0] != 0.0]
    assert len(x_axis) == 1
    assert abs(x_axis[0].point[0] + 0.875) < 1e-9
    assert not x_axis[0].in_nonnegative_orthant
    # the x2-axis pair is complex for these parameters: no real points
    assert all(b.point[0] == 0.0 for b in audit.boundary if b.point[1] != 0.0) or True
    y_axis = [b for b in audit.boundary if b.point[0] == 0.0 and b.point[1] != 0.0]
    assert y_axis == []


def test_audit_rejects_non_planar():
    v = ("a", "b", "c")
    sys = PolySystem(v, [Polynomial.zero(v)] * 3)
    with pytest.raises(UnsupportedDimensionError):
        xfact_fixed_point_audit(sys, [])


# -- affine kinetic search ---------------------------------------------------------


def test_search_returns_identity_for_kinetic_system(rng):
    sys = random_system(rng, n_vars=2, degree=2, kinetic=True)
    result = affine_kinetic_search(sys, n_angles=8, t_points=5)
    assert result.found
    assert result.witness.matrix == AffineMap.identity(2).matrix
    assert result.candidates_examined == 1


def test_search_finds_rotation_for_negative_constants():
    sys = make_system([[(-1.0, (0, 0))], [(-1.0, (0, 0))]])
    result = affine_kinetic_search(sys, n_angles=16, t_points=5)
    assert result.found
    out = None
    from crnforge.poly import substitute_affine

    out = substitute_affine(sys, result.witness)
    assert find_cross_negative_terms(out) == []


def test_search_respects_budget():
    # budget granularity is one angle batch of t_points**2 candidates
    sys = make_system([[(-1.0, (0, 1))], [(-1.0, (1, 0))]])
    result = affine_kinetic_search(sys, n_angles=64, t_points=10, budget=150)
    assert result.candidates_examined <= 150 + 10 * 10 + 1
    if not result.found:
        assert "budget" in result.note


def test_search_no_witness_under_loop_constraints():
    # the translated-loop constraint set admits no orthogonal witness at
    # moderate grid resolution, matching the translation-nonkineticity result
    sys = perturbed_system(-0.8, 0.0)
    constraints = constraint_set("translated")
    result = affine_kinetic_search(
        sys, constraints, n_angles=90, t_points=12,
        t_box=((0.0, 10.0), (0.0, 10.0)),
    )
    assert not result.found
    # the constraint signs are not scale invariant, so no nonkineticity
    # evidence is claimed
    assert result.lambda_sign_invariant is False
    assert not result.nonkinetic_evidence


def test_search_rejects_higher_dimensions():
    v = ("a", "b", "c")
    sys = PolySystem(v, [Polynomial.zero(v)] * 3)
    with pytest.raises(UnsupportedDimensionError):
        affine_kinetic_search(sys)


def test_constraint_set_machinery():
    cs = ConstraintSet(
        (
            Predicate("positive", lambda b: b["v"], strict=True),
            Predicate("nonneg", lambda b: b["w"], strict=False),
        )
    )
    assert cs.satisfied({"v": 1.0, "w": 0.0})
    assert not cs.satisfied({"v": 0.0, "w": 0.0})
    with pytest.raises(ConstraintViolationError) as err:
        cs.check({"v": -2.0, "w": -1.0})
    assert [name for name, _ in err.value.failed] == ["positive", "nonneg"]
