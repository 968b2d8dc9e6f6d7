"""Kinetic transformations: affine, x-factorable and quasi-steady-state.

A transformation pipeline is described by a :class:`TransformSpec` whose
``steps`` list is executed first-element-first.  That matches reading the
usual composition notation right to left: the composition
``Psi_X o Psi_A o Psi_T`` is the list ``[affine(T), affine(A),
xfactor(...)]`` here.

The module also provides the fixed-point invariance audit for x-factorable
transformations of planar systems, and a grid search for an affine map that
makes a system kinetic subject to a constraint set.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .classify import find_cross_negative_terms, is_kinetic
from .errors import (
    ConstraintViolationError,
    PNotPositiveError,
    TermNotCrossNegativeError,
    UnsupportedDimensionError,
)
from .poly import DROP_TOL, AffineMap, Polynomial, PolySystem, substitute_affine

# -- constraint sets -------------------------------------------------------------


@dataclass(frozen=True)
class Predicate:
    """Named real-valued function of a parameter bundle.

    Satisfied when the value is strictly positive (``strict=True``, the
    default; all the case-study theorems use open conditions, so a parameter
    sitting exactly on a boundary fails) or nonnegative (``strict=False``).
    """

    name: str
    fn: Callable[[Mapping[str, float]], float]
    strict: bool = True

    def holds(self, value: float) -> bool:
        return value > 0.0 if self.strict else value >= 0.0


@dataclass(frozen=True)
class ConstraintSet:
    predicates: tuple[Predicate, ...] = ()

    def evaluate(self, bundle: Mapping) -> list[tuple[str, float, bool]]:
        out = []
        for p in self.predicates:
            value = float(p.fn(bundle))
            out.append((p.name, value, p.holds(value)))
        return out

    def failed(self, bundle: Mapping) -> list[tuple[str, float]]:
        return [(n, v) for n, v, ok in self.evaluate(bundle) if not ok]

    def satisfied(self, bundle: Mapping) -> bool:
        return not self.failed(bundle)

    def check(self, bundle: Mapping) -> None:
        failures = self.failed(bundle)
        if failures:
            raise ConstraintViolationError(failures)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.predicates)


# -- transformation steps ----------------------------------------------------------


@dataclass(frozen=True)
class AffineStep:
    map: AffineMap
    kind: str = field(default="affine", init=False)


@dataclass(frozen=True)
class XFactorStep:
    subset: tuple[int, ...]
    kind: str = field(default="xfactor", init=False)


@dataclass(frozen=True)
class QssaSpec:
    """Quasi-steady-state embedding specification.

    ``targets`` names the cross-negative terms to eliminate as
    ``(equation_index, exponent_vector)`` pairs.  One new adjoined variable
    is created per distinct target equation, with time-scale ``mu`` and
    influx ``omega``; ``p`` optionally gives the auxiliary polynomial per
    target equation (default: the constant 1), which must be strictly
    positive on the nonnegative orthant.
    """

    targets: tuple[tuple[int, tuple[int, ...]], ...]
    mu: float = 1e-4
    omegas: tuple[tuple[int, float], ...] = ()
    p: tuple[tuple[int, Polynomial], ...] = ()

    @classmethod
    def make(
        cls,
        targets: Sequence[tuple[int, Sequence[int]]],
        mu: float = 1e-4,
        omega: float | Mapping[int, float] = 1.0,
        p: Mapping[int, Polynomial] | None = None,
    ) -> "QssaSpec":
        targets = tuple((int(s), tuple(int(e) for e in expo)) for s, expo in targets)
        eqs = sorted({s for s, _ in targets})
        if isinstance(omega, Mapping):
            omegas = tuple((s, float(omega[s])) for s in eqs)
        else:
            omegas = tuple((s, float(omega)) for s in eqs)
        ps = tuple((s, p[s]) for s in sorted(p)) if p else ()
        return cls(targets=targets, mu=float(mu), omegas=omegas, p=ps)

    def omega_for(self, eq: int) -> float:
        for s, w in self.omegas:
            if s == eq:
                return w
        return 1.0

    def p_for(self, eq: int) -> Polynomial | None:
        for s, poly in self.p:
            if s == eq:
                return poly
        return None

    @property
    def target_equations(self) -> list[int]:
        return sorted({s for s, _ in self.targets})


@dataclass(frozen=True)
class QssaStep:
    spec: QssaSpec
    kind: str = field(default="qssa", init=False)


Step = AffineStep | XFactorStep | QssaStep


@dataclass(frozen=True)
class TransformSpec:
    """Ordered transformation pipeline; ``steps[0]`` is applied first."""

    steps: tuple[Step, ...]

    def to_json_dict(self) -> dict:
        out = []
        for step in self.steps:
            if isinstance(step, AffineStep):
                out.append(
                    {
                        "kind": "affine",
                        "matrix": [list(row) for row in step.map.matrix],
                        "translation": list(step.map.translation),
                    }
                )
            elif isinstance(step, XFactorStep):
                out.append({"kind": "xfactor", "subset": list(step.subset)})
            else:
                spec = step.spec
                out.append(
                    {
                        "kind": "qssa",
                        "targets": [[s, list(e)] for s, e in spec.targets],
                        "mu": spec.mu,
                        "omega": [[s, w] for s, w in spec.omegas],
                        "p": [
                            [
                                s,
                                [
                                    {"coeff": m.coeff, "exponents": list(m.exponents)}
                                    for m in poly.terms
                                ],
                                list(poly.variables),
                            ]
                            for s, poly in spec.p
                        ],
                    }
                )
        return {"steps": out}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "TransformSpec":
        steps: list[Step] = []
        for raw in data["steps"]:
            kind = raw["kind"]
            if kind == "affine":
                steps.append(
                    AffineStep(AffineMap.from_arrays(raw["matrix"], raw["translation"]))
                )
            elif kind == "xfactor":
                steps.append(XFactorStep(tuple(int(i) for i in raw["subset"])))
            elif kind == "qssa":
                ps = tuple(
                    (
                        int(s),
                        Polynomial(
                            tuple(variables),
                            [(t["coeff"], t["exponents"]) for t in terms],
                        ),
                    )
                    for s, terms, variables in raw.get("p", [])
                )
                steps.append(
                    QssaStep(
                        QssaSpec(
                            targets=tuple(
                                (int(s), tuple(int(e) for e in expo))
                                for s, expo in raw["targets"]
                            ),
                            mu=float(raw.get("mu", 1e-4)),
                            omegas=tuple(
                                (int(s), float(w)) for s, w in raw.get("omega", [])
                            ),
                            p=ps,
                        )
                    )
                )
            else:
                raise ValueError(f"unknown step kind {kind!r}")
        return cls(tuple(steps))


# -- elementary transformations ------------------------------------------------------


def x_factorize(sys: PolySystem, subset: Sequence[int]) -> PolySystem:
    """Multiply equation ``s`` by ``x_s`` for every ``s`` in ``subset``.

    Raises the degree of those equations by exactly one (zero equations stay
    zero).  Factorizing over the full variable set always yields a kinetic
    system.
    """
    subset = sorted({int(s) for s in subset})
    if not subset:
        raise ValueError("x-factorable subset must be nonempty")
    if subset[0] < 0 or subset[-1] >= sys.n_vars:
        raise IndexError(f"subset {subset} out of range for {sys.n_vars} variables")
    equations = list(sys.equations)
    for s in subset:
        equations[s] = equations[s].multiply_by_variable(s)
    return PolySystem(sys.variables, equations, sys.param_meta)


def _unique_names(base: list[str], taken: Sequence[str]) -> list[str]:
    out = []
    taken = set(taken)
    for name in base:
        candidate = name
        while candidate in taken:
            candidate = candidate + "_"
        taken.add(candidate)
        out.append(candidate)
    return out


def _check_p_positive(p: Polynomial, n_vars: int) -> None:
    levels = np.concatenate([[0.0], np.geomspace(1e-3, 1e3, 9)])
    grids = np.meshgrid(*[levels] * n_vars, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    vals = p.evaluate_many(pts)
    if np.any(vals <= 0.0):
        bad = pts[int(np.argmin(vals))]
        raise PNotPositiveError(
            f"auxiliary polynomial is not strictly positive on the nonnegative "
            f"orthant (value {vals.min():g} at {bad.tolist()})"
        )


def qssa_embed(sys: PolySystem, spec: QssaSpec) -> PolySystem:
    """Embed selected cross-negative terms into a higher-dimensional system.

    Each selected term ``b x^beta`` of equation ``s`` (``b < 0``, zero
    exponent of ``x_s``) is replaced by ``b / omega_s * x_s p_s(x) y_s x^beta``,
    and one adjoined equation ``dy_s/dt = (omega_s - x_s p_s(x) y_s) / mu``
    is appended per distinct target equation.  The result is kinetic exactly
    when every cross-negative term of the input was selected; solutions of
    the input system are recovered in the limit ``mu -> 0``.
    """
    if spec.mu <= 0.0:
        raise ValueError(f"mu must be positive, got {spec.mu}")
    target_eqs = spec.target_equations
    for s, _ in spec.omegas:
        if spec.omega_for(s) <= 0.0:
            raise ValueError("omega must be positive")

    p_by_eq: dict[int, Polynomial] = {}
    for s in target_eqs:
        p = spec.p_for(s)
        if p is None:
            p = Polynomial.constant(sys.variables, 1.0)
        elif p.variables != sys.variables:
            p = p.embed(sys.variables)
        _check_p_positive(p, sys.n_vars)
        p_by_eq[s] = p

    selected: dict[int, set[tuple[int, ...]]] = {}
    for s, expo in spec.targets:
        if s < 0 or s >= sys.n_vars:
            raise IndexError(f"target equation {s} out of range")
        if len(expo) != sys.n_vars:
            raise TermNotCrossNegativeError(
                f"target exponent vector {expo} has wrong length"
            )
        coeff = sys.equations[s].coefficient(expo)
        if coeff == 0.0:
            raise TermNotCrossNegativeError(
                f"equation {s} has no term with exponents {expo}"
            )
        if coeff > 0.0 or expo[s] != 0:
            raise TermNotCrossNegativeError(
                f"term with exponents {expo} in equation {s} is not "
                f"cross-negative (coeff {coeff:g}, own exponent {expo[s]})"
            )
        selected.setdefault(s, set()).add(tuple(expo))

    base_names = ["y"] if len(target_eqs) == 1 else [
        f"y{i + 1}" for i in range(len(target_eqs))
    ]
    y_names = _unique_names(base_names, sys.variables)
    new_vars = sys.variables + tuple(y_names)
    y_pos = {s: sys.n_vars + i for i, s in enumerate(target_eqs)}
    n_new = len(new_vars)

    def widen(expo: tuple[int, ...]) -> list[int]:
        return list(expo) + [0] * len(target_eqs)

    equations: list[Polynomial] = []
    for s, eq in enumerate(sys.equations):
        terms: list[tuple[float, Sequence[int]]] = []
        for m in eq.terms:
            if s in selected and m.exponents in selected[s]:
                omega = spec.omega_for(s)
                for pm in p_by_eq[s].terms:
                    expo = widen(m.exponents)
                    for j, e in enumerate(pm.exponents):
                        expo[j] += e
                    expo[s] += 1
                    expo[y_pos[s]] += 1
                    terms.append((m.coeff * pm.coeff / omega, expo))
            else:
                terms.append((m.coeff, widen(m.exponents)))
        equations.append(Polynomial(new_vars, terms))

    for s in target_eqs:
        omega, mu = spec.omega_for(s), spec.mu
        terms = [(omega / mu, (0,) * n_new)]
        for pm in p_by_eq[s].terms:
            expo = widen(pm.exponents)
            expo[s] += 1
            expo[y_pos[s]] += 1
            terms.append((-pm.coeff / mu, expo))
        equations.append(Polynomial(new_vars, terms))

    out = PolySystem(new_vars, equations, sys.param_meta)
    leftover = find_cross_negative_terms(out)
    if leftover:
        warnings.warn(
            f"qssa_embed output still has {len(leftover)} cross-negative "
            f"term(s); not all cross-negative terms were selected",
            stacklevel=2,
        )
    return out


@dataclass
class TransformResult:
    """Transformed system plus the per-step degree/dimension ledger."""

    system: PolySystem
    ledger: list[dict]


def apply(spec: TransformSpec, sys: PolySystem) -> TransformResult:
    """Run the pipeline; ``steps[0]`` executes first (composition read
    right to left)."""
    current = sys
    ledger: list[dict] = []
    for step in spec.steps:
        before = (current.n_vars, current.degree)
        if isinstance(step, AffineStep):
            current = substitute_affine(current, step.map)
        elif isinstance(step, XFactorStep):
            current = x_factorize(current, step.subset)
        elif isinstance(step, QssaStep):
            current = qssa_embed(current, step.spec)
        else:  # pragma: no cover - spec construction prevents this
            raise TypeError(f"unknown step {step!r}")
        ledger.append(
            {
                "kind": step.kind,
                "n_vars_before": before[0],
                "n_vars_after": current.n_vars,
                "degree_before": before[1],
                "degree_after": current.degree,
            }
        )
    return TransformResult(system=current, ledger=ledger)


# -- fixed-point invariance audit ---------------------------------------------------


def _planar_type(trace: float, det: float, disc: float, tol: float = 1e-11) -> str:
    if abs(det) <= tol:
        return "degenerate"
    if det < 0.0:
        return "saddle"
    if abs(trace) <= tol:
        return "degenerate"
    stability = "stable" if trace < 0.0 else "unstable"
    shape = "spiral" if disc < -tol else "node"
    return f"{stability} {shape}"


@dataclass
class InteriorPointAudit:
    point: tuple[float, float]
    jacobian: np.ndarray
    type_before: str
    is_saddle: bool
    stability_condition_value: float  # dP1/dx1 * dP2/dx2
    stability_invariant: bool
    type_condition_value: float  # dP1/dx2 * dP2/dx1
    type_invariant: bool
    disc_after: float
    type_after: str


@dataclass
class BoundaryPointAudit:
    point: tuple[float, float]
    eigenvalues: tuple[float, float]
    type: str
    node_criterion_value: float | None
    in_nonnegative_orthant: bool


@dataclass
class XFactorAuditReport:
    subset: tuple[int, ...]
    interior: list[InteriorPointAudit]
    boundary: list[BoundaryPointAudit]


def xfact_fixed_point_audit(
    sys: PolySystem,
    fixed_points: Sequence[Sequence[float]],
    subset: Sequence[int] | None = None,
) -> XFactorAuditReport:
    """Audit what an x-factorable transformation does to a planar system.

    ``sys`` is the system *before* factorization and ``fixed_points`` its
    interior fixed points.  For each interior point the report gives the
    unconditional saddle invariance, the sufficient stability-invariance
    condition ``dP1/dx1 * dP2/dx2 >= 0``, the sufficient type-invariance
    condition ``dP1/dx2 * dP2/dx1 >= 0``, and the discriminant of the
    factored Jacobian (which settles the spiral case when the sufficient
    condition fails).  Boundary fixed points created by the factorization
    are located on the axes by univariate root isolation and classified by
    their exact (triangular-Jacobian) eigenvalues; for points with one
    nonzero coordinate the node criterion ``P_i(x_b) * dP_j/dx_j(x_b)``
    is reported as well.
    """
    if sys.n_vars != 2:
        raise UnsupportedDimensionError("the audit is implemented for planar systems")
    subset = tuple(sorted({0, 1} if subset is None else {int(s) for s in subset}))
    if not subset:
        raise ValueError("subset must be nonempty")

    interior = []
    for pt in fixed_points:
        pt = (float(pt[0]), float(pt[1]))
        jac = sys.jacobian_at(pt)
        trace, det = float(np.trace(jac)), float(np.linalg.det(jac))
        disc = trace * trace - 4.0 * det
        d = np.diag([pt[s] if s in subset else 1.0 for s in range(2)])
        jac_after = d @ jac
        tr_a, det_a = float(np.trace(jac_after)), float(np.linalg.det(jac_after))
        disc_a = tr_a * tr_a - 4.0 * det_a
        stab_val = float(jac[0, 0] * jac[1, 1])
        type_val = float(jac[0, 1] * jac[1, 0])
        interior.append(
            InteriorPointAudit(
                point=pt,
                jacobian=jac,
                type_before=_planar_type(trace, det, disc),
                is_saddle=det < 0.0,
                stability_condition_value=stab_val,
                stability_invariant=stab_val >= 0.0,
                type_condition_value=type_val,
                type_invariant=type_val >= 0.0,
                disc_after=disc_a,
                type_after=_planar_type(tr_a, det_a, disc_a),
            )
        )

    boundary = []
    p_at_origin = [eq.evaluate([0.0, 0.0]) for eq in sys.equations]
    origin_is_fixed = all(
        s in subset or abs(p_at_origin[s]) < 1e-14 for s in range(2)
    )
    if origin_is_fixed:
        lam = tuple(float(v) for v in p_at_origin)
        boundary.append(
            BoundaryPointAudit(
                point=(0.0, 0.0),
                eigenvalues=lam,
                type=_axis_point_type(lam),
                node_criterion_value=None,
                in_nonnegative_orthant=True,
            )
        )
    from .classify import _real_roots, _restrict_to_face

    jac_polys = sys.jacobian()
    for s in subset:
        j = 1 - s
        q = _restrict_to_face(sys.equations[j], s, j)
        for root in _real_roots(q):
            if abs(root) < 1e-12:
                continue
            point = [0.0, 0.0]
            point[j] = root
            lam_s = float(sys.equations[s].evaluate(point))
            djj = float(jac_polys[j][j].evaluate(point))
            lam_j = root * djj if j in subset else djj
            crit = lam_s * djj
            boundary.append(
                BoundaryPointAudit(
                    point=(point[0], point[1]),
                    eigenvalues=(lam_s, lam_j),
                    type=_axis_point_type((lam_s, lam_j)),
                    node_criterion_value=crit,
                    in_nonnegative_orthant=root > 0.0,
                )
            )
    return XFactorAuditReport(subset=subset, interior=interior, boundary=boundary)


def _axis_point_type(lam: tuple[float, float], tol: float = 1e-12) -> str:
    l1, l2 = lam
    if abs(l1) <= tol or abs(l2) <= tol:
        return "degenerate"
    if l1 * l2 < 0.0:
        return "saddle"
    return "stable node" if l1 < 0.0 else "unstable node"


# -- affine kineticity search ----------------------------------------------------------


@dataclass
class AffineSearchResult:
    witness: AffineMap | None
    found: bool
    candidates_examined: int
    lambda_sign_invariant: bool | None
    nonkinetic_evidence: bool
    note: str


def _coefficient_functions(rotated: PolySystem) -> list[dict]:
    """Coefficients of the translated system as polynomials in the shift.

    For each equation, substitute ``x_j -> x_j - t_j`` symbolically and group
    by x-exponent; the result maps x-exponent tuples to ``{t_exponent: coeff}``
    dictionaries that can be evaluated on a whole translation grid at once.
    """
    n = rotated.n_vars
    ext_vars = rotated.variables + tuple(f"_t{i}" for i in range(n))
    subs = []
    for j in range(n):
        xe = [0] * (2 * n)
        xe[j] = 1
        te = [0] * (2 * n)
        te[n + j] = 1
        subs.append(Polynomial(ext_vars, [(1.0, xe), (-1.0, te)]))
    grouped = []
    for eq in rotated.equations:
        shifted = eq.compose(ext_vars, subs, drop_tol=0.0)
        by_x: dict[tuple[int, ...], dict[tuple[int, ...], float]] = {}
        for m in shifted.terms:
            xe, te = m.exponents[:n], m.exponents[n:]
            by_x.setdefault(xe, {})[te] = by_x.get(xe, {}).get(te, 0.0) + m.coeff
        grouped.append(by_x)
    return grouped


def _eval_t_poly(tpoly: dict, t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t1)
    for (f1, f2), c in tpoly.items():
        out += c * t1**f1 * t2**f2
    return out


def affine_kinetic_search(
    sys: PolySystem,
    constraints: ConstraintSet | None = None,
    budget: int | None = None,
    *,
    n_angles: int = 720,
    t_points: int = 50,
    t_box: tuple[tuple[float, float], tuple[float, float]] = ((-10.0, 10.0), (-10.0, 10.0)),
    include_reflections: bool = True,
    drop_tol: float = 1e-12,
    lambda_samples: int = 100,
    seed: int = 0,
) -> AffineSearchResult:
    """Scan orthogonal maps composed with translations for a kinetic witness.

    Candidates are the composite maps ``x_new = Q (x + T)`` with ``Q``
    running over ``n_angles`` rotation angles in ``[0, 2 pi)`` (both
    orientations when ``include_reflections``) and ``T`` over a
    ``t_points x t_points`` grid in ``t_box``; the identity map is tried
    first.  The first candidate (deterministic scan order: orientation,
    angle index, then row-major grid index) that makes the system kinetic
    while satisfying ``constraints`` wins.  Constraint predicates receive a
    bundle with keys ``t1, t2, theta, det_sign`` and ``coeffs`` (the
    transformed coefficient record).

    When no witness is found the result reports whether the constraint signs
    were invariant under sampled positive diagonal rescalings; only then is
    the failure flagged as evidence of affine nonkineticity, and even that is
    heuristic, not a proof.  ``budget`` caps the number of candidates
    examined, with the granularity of one translation grid per angle.
    """
    if sys.n_vars != 2:
        raise UnsupportedDimensionError("the search grid is implemented for 2-D")
    constraints = constraints or ConstraintSet()
    examined = 0
    budget_left = math.inf if budget is None else int(budget)

    def make_bundle(t1, t2, theta, det_sign, coeffs):
        return {
            "t1": float(t1),
            "t2": float(t2),
            "theta": float(theta),
            "det_sign": det_sign,
            "coeffs": coeffs,
        }

    # identity first: an already-kinetic system with satisfiable constraints
    # should return the trivial witness
    examined += 1
    if is_kinetic(sys):
        coeffs = {
            (s, m.exponents): m.coeff
            for s, eq in enumerate(sys.equations)
            for m in eq.terms
        }
        if constraints.satisfied(make_bundle(0.0, 0.0, 0.0, 1, coeffs)):
            return AffineSearchResult(
                witness=AffineMap.identity(2),
                found=True,
                candidates_examined=examined,
                lambda_sign_invariant=None,
                nonkinetic_evidence=False,
                note="identity map",
            )

    t1_vals = np.linspace(t_box[0][0], t_box[0][1], t_points)
    t2_vals = np.linspace(t_box[1][0], t_box[1][1], t_points)
    t1g, t2g = np.meshgrid(t1_vals, t2_vals, indexing="ij")
    angles = np.linspace(0.0, 2.0 * math.pi, n_angles, endpoint=False)
    orientations = (1, -1) if include_reflections else (1,)
    exhausted = False

    for det_sign in orientations:
        for theta in angles:
            if budget_left <= examined:
                exhausted = True
                break
            qmap = (
                AffineMap.rotation(theta)
                if det_sign == 1
                else AffineMap.reflection(theta)
            )
            q = qmap.matrix_array()
            rotated = substitute_affine(sys, qmap)
            grouped = _coefficient_functions(rotated)
            # scan is over the pre-rotation translation T; the rotated system
            # is shifted by T' = Q T
            tp1 = q[0, 0] * t1g + q[0, 1] * t2g
            tp2 = q[1, 0] * t1g + q[1, 1] * t2g
            mask = np.ones(t1g.shape, dtype=bool)
            values: list[tuple[int, tuple[int, ...], np.ndarray]] = []
            for s, by_x in enumerate(grouped):
                for xe, tpoly in by_x.items():
                    vals = _eval_t_poly(tpoly, tp1, tp2)
                    values.append((s, xe, vals))
                    if xe[s] == 0:
                        mask &= vals >= -drop_tol
            examined += t1g.size
            if not mask.any():
                continue
            for i, j in np.argwhere(mask):
                coeffs = {(s, xe): float(v[i, j]) for s, xe, v in values}
                bundle = make_bundle(t1g[i, j], t2g[i, j], theta, det_sign, coeffs)
                if constraints.satisfied(bundle):
                    tvec = np.array([t1g[i, j], t2g[i, j]])
                    witness = AffineMap.from_arrays(q, q @ tvec)
                    return AffineSearchResult(
                        witness=witness,
                        found=True,
                        candidates_examined=examined,
                        lambda_sign_invariant=None,
                        nonkinetic_evidence=False,
                        note=(
                            f"orthogonal angle {theta:.6f} (det {det_sign}) with "
                            f"pre-rotation translation ({t1g[i, j]:g}, {t2g[i, j]:g})"
                        ),
                    )
        if exhausted:
            break

    lambda_ok: bool | None = None
    if constraints.predicates:
        lambda_ok = _lambda_sign_invariance(
            constraints, t_box, lambda_samples, seed
        )
    evidence = (not exhausted) and (lambda_ok is None or lambda_ok)
    note = "scan budget exhausted" if exhausted else "orthogonal-translation scan exhausted"
    return AffineSearchResult(
        witness=None,
        found=False,
        candidates_examined=examined,
        lambda_sign_invariant=lambda_ok,
        nonkinetic_evidence=evidence,
        note=note,
    )


def _lambda_sign_invariance(
    constraints: ConstraintSet,
    t_box,
    n_samples: int,
    seed: int,
) -> bool:
    """Sample positive diagonal rescalings and check constraint-sign invariance.

    Under ``x -> Lambda x`` a translation ``T`` becomes ``Lambda T``; the
    theorem reducing affine to orthogonal nonkineticity needs every
    constraint's sign to survive all such rescalings.  Sampled, not proved.
    """
    rng = np.random.default_rng(seed)
    refs = [
        {"t1": 0.5 * (lo + hi), "t2": 0.5 * (lo2 + hi2)}
        for (lo, hi), (lo2, hi2) in [t_box]
    ]
    refs += [
        {"t1": float(rng.uniform(*t_box[0])), "t2": float(rng.uniform(*t_box[1]))}
        for _ in range(4)
    ]
    for ref in refs:
        base_bundle = {**ref, "theta": 0.0, "det_sign": 1, "coeffs": {}}
        base_signs = [
            np.sign(p.fn(base_bundle)) for p in constraints.predicates
        ]
        for _ in range(n_samples):
            lam = 10.0 ** rng.uniform(-3.0, 3.0, size=2)
            bundle = {
                "t1": ref["t1"] * lam[0],
                "t2": ref["t2"] * lam[1],
                "theta": 0.0,
                "det_sign": 1,
                "coeffs": {},
            }
            for p, s0 in zip(constraints.predicates, base_signs):
                if np.sign(p.fn(bundle)) != s0:
                    return False
    return True
