"""Polynomial arithmetic, vector fields and affine substitution."""

import json

import numpy as np
import pytest

from crnforge.errors import DimensionMismatchError, SingularMatrixError
from crnforge.poly import AffineMap, Monomial, Polynomial, PolySystem, substitute_affine
from crnforge import jsonio

from conftest import VARS2, make_system


def test_canonical_form_is_construction_order_independent():
    a = Polynomial(VARS2, [(1.0, (1, 0)), (2.0, (0, 2)), (3.0, (1, 1))])
    b = Polynomial(VARS2, [(3.0, (1, 1)), (1.0, (1, 0)), (2.0, (0, 2))])
    assert a == b
    assert a.terms == b.terms


def test_zero_coefficients_are_never_stored():
    p = Polynomial(VARS2, [(1.0, (1, 0)), (-1.0, (1, 0)), (5e-15, (0, 1))])
    assert p.is_zero
    assert p.degree == 0


def test_drop_tolerance_is_configurable():
    p = Polynomial(VARS2, [(5e-15, (0, 1))], drop_tol=0.0)
    assert not p.is_zero


def test_graded_lex_ordering():
    p = Polynomial(VARS2, [(1.0, (2, 0)), (1.0, (0, 1)), (1.0, (1, 1)), (1.0, (0, 0))])
    assert [m.exponents for m in p.terms] == [(0, 0), (0, 1), (1, 1), (2, 0)]


def test_duplicate_exponents_merge():
    p = Polynomial(VARS2, [(1.0, (1, 1)), (2.5, (1, 1))])
    assert p.terms == (Monomial(3.5, (1, 1)),)


def test_evaluate_reaction_rhs():
    # -k1 x1 x2 at k1 = 1, x = (2, 3)
    p = Polynomial(VARS2, [(-1.0, (1, 1))])
    assert p.evaluate([2.0, 3.0]) == -6.0


def test_evaluate_zero_polynomial():
    assert Polynomial.zero(VARS2).evaluate([17.0, -3.0]) == 0.0


def test_evaluate_classification_example():
    # 1 + x1^2 + 2k x2 + x2^2 with k = -2 at (0, 2)
    p = Polynomial(VARS2, [(1.0, (0, 0)), (1.0, (2, 0)), (-4.0, (0, 1)), (1.0, (0, 2))])
    assert p.evaluate([0.0, 2.0]) == -3.0


def test_evaluate_zero_power_convention():
    # 0**0 == 1: the constant term survives at the origin
    p = Polynomial(VARS2, [(2.0, (0, 0)), (3.0, (1, 0))])
    assert p.evaluate([0.0, 0.0]) == 2.0


def test_evaluate_dimension_mismatch():
    p = Polynomial(VARS2, [(1.0, (1, 0))])
    with pytest.raises(DimensionMismatchError):
        p.evaluate([1.0])


def test_evaluate_many_matches_scalar(rng):
    p = Polynomial(VARS2, [(1.5, (2, 1)), (-0.5, (0, 3)), (2.0, (0, 0))])
    pts = rng.uniform(-2, 2, size=(50, 2))
    vec = p.evaluate_many(pts)
    for x, v in zip(pts, vec):
        assert abs(p.evaluate(x) - v) < 1e-12


def test_jacobian_of_base_system_matches_closed_form():
    a = -0.8
    sys = make_system(
        [
            [(a, (1, 0)), (1.0, (0, 1)), (1.5 * a, (1, 1)), (1.5, (0, 2))],
            [(1.0, (1, 0)), (a, (0, 1)), (a, (0, 2))],
        ]
    )
    jac = sys.jacobian()
    # J11 = a + (3/2) a x2
    assert jac[0][0] == Polynomial(VARS2, [(a, (0, 0)), (1.5 * a, (0, 1))])
    # J12 = 1 + (3/2) a x1 + 3 x2
    assert jac[0][1] == Polynomial(VARS2, [(1.0, (0, 0)), (1.5 * a, (1, 0)), (3.0, (0, 1))])
    # J21 = 1, J22 = a + 2 a x2
    assert jac[1][0] == Polynomial.constant(VARS2, 1.0)
    assert jac[1][1] == Polynomial(VARS2, [(a, (0, 0)), (2.0 * a, (0, 1))])


def test_jacobian_of_linear_system_is_constant_matrix(rng):
    mat = rng.uniform(-1, 1, size=(2, 2))
    sys = make_system(
        [
            [(mat[0, 0], (1, 0)), (mat[0, 1], (0, 1))],
            [(mat[1, 0], (1, 0)), (mat[1, 1], (0, 1))],
        ]
    )
    jac = sys.jacobian()
    for i in range(2):
        for j in range(2):
            assert jac[i][j] == Polynomial.constant(VARS2, mat[i, j])


def test_jacobian_of_autocatalytic_example():
    sys = make_system([[(-1.0, (1, 1))], [(1.0, (1, 1))]])
    jac = sys.jacobian()
    assert jac[0][0] == Polynomial(VARS2, [(-1.0, (0, 1))])
    assert jac[0][1] == Polynomial(VARS2, [(-1.0, (1, 0))])
    assert jac[1][0] == Polynomial(VARS2, [(1.0, (0, 1))])
    assert jac[1][1] == Polynomial(VARS2, [(1.0, (1, 0))])


def test_jacobian_degree_bound(rng):
    from crnforge.randomsys import random_system

    for _ in range(20):
        sys = random_system(rng, n_vars=2, degree=3)
        m = sys.degree
        for row in sys.jacobian():
            for entry in row:
                assert entry.degree <= max(m - 1, 0)


def test_substitute_identity_is_exact():
    sys = make_system([[(1.25, (2, 1)), (-0.5, (0, 1))], [(3.0, (1, 0))]])
    out = substitute_affine(sys, AffineMap.identity(2))
    assert out == sys


def test_substitute_translation_matches_paper_coefficients():
    # translation of the perturbed loop system reproduces the closed-form record
    a, alpha = -0.8, 0.0
    sys = make_system(
        [
            [(a + alpha, (1, 0)), (1.0, (0, 1)), (1.5 * a, (1, 1)), (1.5, (0, 2))],
            [(1.0, (1, 0)), (a, (0, 1)), (a, (0, 2))],
        ]
    )
    out = substitute_affine(sys, AffineMap.translation_by([1.0, 1.5]))
    expected = {
        (0, 0): 0.875, (1, 0): 1.0, (0, 1): -2.3, (1, 1): -1.2, (0, 2): 1.5,
    }
    got = out.equations[0].as_dict()
    for key, val in expected.items():
        assert abs(got[key] - val) < 1e-12
    got2 = out.equations[1].as_dict()
    for key, val in {(0, 0): -1.6, (1, 0): 1.0, (0, 1): 1.6, (0, 2): -0.8}.items():
        assert abs(got2[key] - val) < 1e-12


def test_substitute_inverse_round_trip(rng):
    from crnforge.randomsys import random_system

    for _ in range(10):
        sys = random_system(rng, n_vars=2, degree=3)
        t = rng.uniform(-2, 2, size=2)
        amap = AffineMap.translation_by(t)
        back = substitute_affine(substitute_affine(sys, amap), amap.inverse())
        assert back.allclose(sys, 1e-12)


def test_substitute_centroaffine_round_trip(rng):
    from crnforge.randomsys import random_system

    for _ in range(10):
        mat = rng.uniform(-1, 1, size=(2, 2)) + 2.0 * np.eye(2)
        amap = AffineMap.from_arrays(mat, rng.uniform(-1, 1, size=2))
        sys = random_system(rng, n_vars=2, degree=2)
        back = substitute_affine(substitute_affine(sys, amap), amap.inverse())
        assert back.allclose(sys, 1e-10)


def test_substitute_commutes_with_evaluation(rng):
    from crnforge.randomsys import random_system

    sys = random_system(rng, n_vars=2, degree=3)
    mat = np.array([[1.5, 0.3], [-0.2, 0.8]])
    t = np.array([0.7, -1.1])
    amap = AffineMap.from_arrays(mat, t)
    out = substitute_affine(sys, amap)
    for x in rng.uniform(-3, 3, size=(100, 2)):
        lhs = out.evaluate(amap.apply(x))
        rhs = mat @ sys.evaluate(x)
        assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_substitute_preserves_degree(rng):
    from crnforge.randomsys import random_system

    for _ in range(10):
        sys = random_system(rng, n_vars=2, degree=3)
        mat = rng.uniform(-1, 1, size=(2, 2)) + 2.0 * np.eye(2)
        amap = AffineMap.from_arrays(mat, rng.uniform(-1, 1, 2))
        assert substitute_affine(sys, amap).degree == sys.degree


def test_substitute_singular_matrix_rejected():
    sys = make_system([[(1.0, (1, 0))], [(1.0, (0, 1))]])
    with pytest.raises(SingularMatrixError):
        substitute_affine(sys, AffineMap.from_arrays([[1, 1], [1, 1]], [0, 0]))


def test_perturbation_frame_substitutes_without_pushforward():
    # state_change multiplies by A; perturbation_frame only shifts arguments
    sys = make_system([[(1.0, (1, 0))], [(1.0, (0, 1))]])
    amap = AffineMap.from_arrays([[2.0, 0.0], [0.0, 1.0]], [0.0, 0.0])
    frame = substitute_affine(sys, amap, mode="perturbation_frame")
    # x1 -> x1/2 in each component, no leading factor of A
    assert frame.equations[0] == Polynomial(VARS2, [(0.5, (1, 0))])
    assert frame.equations[1] == Polynomial(VARS2, [(1.0, (0, 1))])


def test_json_round_trip_exact(tmp_path, rng):
    from crnforge.randomsys import random_system

    sys = random_system(rng, n_vars=3, degree=3)
    path = tmp_path / "sys.json"
    jsonio.dump(sys.to_json_dict(), path)
    back = PolySystem.from_json_dict(jsonio.load(path))
    assert back == sys


def test_json_floats_use_17_significant_digits():
    text = jsonio.dumps({"v": 0.1})
    assert "0.10000000000000001" in text
    parsed = json.loads(text)
    assert parsed["v"] == 0.1


def test_system_requires_matching_shapes():
    with pytest.raises(DimensionMismatchError):
        PolySystem(VARS2, [Polynomial.zero(VARS2)])
    with pytest.raises(DimensionMismatchError):
        PolySystem(VARS2, [Polynomial.zero(VARS2), Polynomial.zero(("x1",))])


def test_affine_map_compose():
    a = AffineMap.from_arrays([[0.0, -1.0], [1.0, 0.0]], [1.0, 2.0])
    b = AffineMap.translation_by([3.0, -1.0])
    x = np.array([0.5, 0.25])
    assert np.allclose(a.compose(b).apply(x), a.apply(b.apply(x)))
