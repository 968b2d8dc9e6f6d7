"""Acceptance criteria as executable checks.

Each criterion returns a :class:`CriterionResult`; the CLI ``verify``
subcommand and the pytest acceptance module both run these, so the release
gate and the test suite cannot drift apart.  All tolerances are pinned here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .classify import classify_system, find_cross_negative_terms
from .crn import canonicalize, induce_kinetics
from .dynamics import (
    Section,
    detect_limit_cycle,
    dulac_no_limit_cycle_test,
    find_fixed_points,
    melnikov_at_zero,
    qssa_convergence_test,
)
from .homoclinic import (
    AlphaCurve,
    CaseStudyParams,
    base_system,
    build_variant,
    constraint_set,
    fixed_points_closed_form,
    published_networks,
    saddle_quantity,
)
from .poly import Polynomial, PolySystem
from .randomsys import random_system
from .transform import x_factorize, xfact_fixed_point_audit


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number:2d} ({self.name}): {self.detail}"


def example_cnt_system(k: float) -> PolySystem:
    """The two-variable classification example: quadratic first equation
    with tunable linear cross coefficient, constant second equation."""
    v = ("x1", "x2")
    p1 = Polynomial(v, [(1.0, (0, 0)), (1.0, (2, 0)), (2.0 * k, (0, 1)), (1.0, (0, 2))])
    p2 = Polynomial(v, [(1.0, (0, 0))])
    return PolySystem(v, [p1, p2], {"k": k})


def example_rn_system(k1: float = 1.0) -> PolySystem:
    """Mass-action kinetics of the single autocatalytic reaction
    ``s1 + s2 -> 2 s2``."""
    v = ("s1", "s2")
    return PolySystem(
        v,
        [
            Polynomial(v, [(-k1, (1, 1))]),
            Polynomial(v, [(k1, (1, 1))]),
        ],
    )


ORACLE_PARAMS = CaseStudyParams(a=-0.8, alpha=0.0, t1=1.0, t2=1.5)

#: Regression constant: the Melnikov value at a = -0.8 recorded after first
#: verification (the construction fixes only its sign).
MELNIKOV_REGRESSION_VALUE = -0.9549597606563317
MELNIKOV_REGRESSION_RTOL = 1e-4

#: Recorded numerically: of the two perturbation signs at the oracle
#: parameters, the negative one produces the interior stable cycle.
CYCLE_BEARING_ALPHA = -0.01


def criterion_1_classification_table(seed: int = 0) -> CriterionResult:
    details = []
    ok = True

    rep = classify_system(example_cnt_system(1.0))
    ok &= rep.kinetic and rep.nonnegative is True
    details.append(f"k=1: kinetic={rep.kinetic}")

    rep = classify_system(example_cnt_system(-0.5))
    ok &= (not rep.kinetic) and rep.nonnegative is True
    ok &= len(rep.cross_negative_terms) == 1
    details.append(f"k=-0.5: kinetic={rep.kinetic}, nonnegative={rep.nonnegative}")

    rep = classify_system(example_cnt_system(-2.0))
    ok &= (not rep.kinetic) and rep.nonnegative is False
    lo_exp, hi_exp = 2.0 - math.sqrt(3.0), 2.0 + math.sqrt(3.0)
    interval_err = math.inf
    if rep.cross_negative_effect_witnesses:
        w = rep.cross_negative_effect_witnesses[0]
        if w.interval is not None:
            interval_err = max(abs(w.interval[0] - lo_exp), abs(w.interval[1] - hi_exp))
    ok &= interval_err < 1e-9
    details.append(f"k=-2: interval endpoint error {interval_err:.2e} (tol 1e-9)")
    return CriterionResult(1, "classification table", ok, "; ".join(details))


def criterion_2_canonical_round_trip(seed: int = 42) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(500):
        n_vars = 2 if i % 2 == 0 else 3
        sys = random_system(rng, n_vars=n_vars, degree=3, kinetic=True)
        back = induce_kinetics(canonicalize(sys))
        for eq_a, eq_b in zip(sys.equations, back.equations):
            da, db = eq_a.as_dict(), eq_b.as_dict()
            for key in set(da) | set(db):
                worst = max(worst, abs(da.get(key, 0.0) - db.get(key, 0.0)))
    variants_ok = True
    for name in ("translated", "xfact", "sheared_xfact", "qssa", "hybrid"):
        params = (
            ORACLE_PARAMS.with_(a=-0.75, t=2.2)
            if name == "sheared_xfact"
            else ORACLE_PARAMS
        )
        sys = build_variant(params, name).system
        if find_cross_negative_terms(sys):
            continue  # the translated variant is nonkinetic by design
        back = induce_kinetics(canonicalize(sys))
        variants_ok &= back.allclose(sys, 1e-12)
    net = canonicalize(example_rn_system())
    exact = (
        net.n_reactions == 2
        and net.reactions[0].rate == net.reactions[1].rate == 1.0
    )
    ok = worst <= 1e-12 and variants_ok and exact
    return CriterionResult(
        2,
        "canonical round trip",
        ok,
        f"500 random kinetic cubics: worst coefficient error {worst:.2e} "
        f"(tol 1e-12); case-study variants ok={variants_ok}; "
        f"2-reaction canonical network exact={exact}",
    )


def criterion_3_flow_invariance(seed: int = 7) -> CriterionResult:
    rng = np.random.default_rng(seed)
    curve = AlphaCurve()
    h = curve.h
    worst_terms = 0
    for a in rng.uniform(-0.999, -0.001, size=20):
        sys = base_system(float(a))
        grad_dot_p = Polynomial.zero(h.variables)
        for j in range(2):
            grad_dot_p = grad_dot_p + h.deriv(j) * sys.equations[j]
        factor = Polynomial(
            h.variables, [(float(a) * 2.0, (0, 0)), (float(a) * 3.0, (0, 1))]
        )
        residual = grad_dot_p - factor * h
        worst_terms = max(worst_terms, len(residual.terms))
    ok = worst_terms == 0
    return CriterionResult(
        3,
        "flow-invariance identity",
        ok,
        f"residual term count over 20 sampled a values: {worst_terms} "
        f"(exact cancellation required)",
    )


def criterion_4_fixed_point_oracle(seed: int = 0) -> CriterionResult:
    a = -0.8
    found = find_fixed_points(base_system(a), [(-1.0, 1.0), (-1.0, 1.0)])
    expected = fixed_points_closed_form(a)
    ok = len(found) == 3
    worst = math.inf if not ok else 0.0
    type_ok = ok
    for loc, type_tag in expected:
        best = None
        for fp in found:
            d = float(np.linalg.norm(fp.location - np.asarray(loc)))
            if best is None or d < best[0]:
                best = (d, fp)
        if best is None:
            continue
        worst = max(worst if worst != math.inf else 0.0, best[0])
        type_ok &= best[1].type == type_tag
    origin = min(found, key=lambda fp: np.linalg.norm(fp.location), default=None)
    eig_err = math.inf
    if origin is not None:
        eigs = sorted(ev.real for ev in origin.eigenvalues)
        eig_err = max(abs(eigs[0] - (a - 1.0)), abs(eigs[1] - (a + 1.0)))
    sigma_exact = saddle_quantity(a) == -1.6
    ok = ok and worst < 1e-8 and type_ok and eig_err < 1e-10 and sigma_exact
    return CriterionResult(
        4,
        "fixed-point oracle",
        ok,
        f"3 points found, worst location error {worst:.2e} (tol 1e-8), "
        f"types ok={type_ok}, origin eigenvalue error {eig_err:.2e} "
        f"(tol 1e-10), sigma0 == -1.6 exactly: {sigma_exact}",
    )


def criterion_5_sec43_network(seed: int = 0) -> CriterionResult:
    params = ORACLE_PARAMS
    cs = constraint_set("xfact")
    constraints_ok = cs.satisfied(params.bundle())
    net = published_networks(params, "sec43")
    expected = [0.875, 1.6, 1.0, 1.0, 2.3, 1.6, 1.2, 1.5, 0.8]
    ok = net.n_reactions == 9 and constraints_ok
    worst = max(
        abs(r.rate - e) for r, e in zip(net.reactions, expected)
    ) if net.n_reactions == 9 else math.inf
    ok &= worst <= 1e-12
    canonical = canonicalize(build_variant(params, "xfact").system)
    ok &= canonical.allclose(net, 1e-12)
    return CriterionResult(
        5,
        "published 9-reaction network",
        ok,
        f"9 reactions, worst rate error {worst:.2e} (tol 1e-12), "
        f"window constraints satisfied={constraints_ok}, "
        f"canonicalize agrees={canonical.allclose(net, 1e-12)}",
    )


def criterion_6_boundary_fixed_points(seed: int = 0) -> CriterionResult:
    params = ORACLE_PARAMS
    translated = build_variant(params, "translated")
    interior = [
        (params.t1 + loc[0], params.t2 + loc[1])
        for loc, _ in fixed_points_closed_form(params.a)
    ]
    audit = xfact_fixed_point_audit(translated.system, interior)
    origin = next(
        (b for b in audit.boundary if np.allclose(b.point, (0.0, 0.0))), None
    )
    ok = origin is not None
    lam_err = math.inf
    if origin is not None:
        lam_err = max(
            abs(origin.eigenvalues[0] - 0.875), abs(origin.eigenvalues[1] - (-1.6))
        )
        ok &= origin.type == "saddle" and lam_err < 1e-12
    x_axis = [
        b for b in audit.boundary if b.point[1] == 0.0 and b.point[0] != 0.0
    ]
    axis_ok = (
        len(x_axis) == 1
        and abs(x_axis[0].point[0] - (-0.875)) < 1e-9
        and not x_axis[0].in_nonnegative_orthant
    )
    ok &= axis_ok
    return CriterionResult(
        6,
        "boundary fixed-point audit",
        ok,
        f"origin saddle eigenvalue error {lam_err:.2e} (tol 1e-12); "
        f"x-axis point at (-0.875, 0) outside the nonnegative orthant: {axis_ok}",
    )


def criterion_7_degeneracies(seed: int = 0) -> CriterionResult:
    a = -0.8  # inside (-8/9, (2 - sqrt(34))/5)
    t_deg = -(2.0 / 3.0) / (2.0 + 3.0 * a)
    sheared = build_variant(CaseStudyParams(a=a, t=t_deg), "sheared_xfact")
    k4 = abs(sheared.coefficients["k1_2"])

    params = CaseStudyParams(a=-0.8, alpha=0.0, t1=1.5 / 0.8, t2=1.5)
    hybrid = build_variant(params, "hybrid")
    k1 = abs(hybrid.coefficients["k0_1"])
    ok = k4 < 1e-12 and k1 < 1e-12
    return CriterionResult(
        7,
        "rate degeneracies",
        ok,
        f"|k1_2| = {k4:.2e} at the shared-translation degeneracy and "
        f"|k0_1| = {k1:.2e} at t1 = -t2/a (tol 1e-12 each)",
    )


def criterion_8_melnikov(seed: int = 0) -> CriterionResult:
    mel = melnikov_at_zero(-0.8)
    rel_routes = abs(mel.value - mel.value_branch_route) / abs(mel.value)
    phi_positive = bool(np.all(mel.phi_samples[:, 1] > 0.0))
    regression = abs(mel.value - MELNIKOV_REGRESSION_VALUE) <= (
        MELNIKOV_REGRESSION_RTOL * abs(MELNIKOV_REGRESSION_VALUE)
    )
    ok = (
        mel.value < 0.0
        and rel_routes <= 1e-4
        and phi_positive
        and mel.h_drift_max < 1e-6
        and regression
    )
    return CriterionResult(
        8,
        "Melnikov integral",
        ok,
        f"M(0) = {mel.value:.8f} < 0, routes agree to {rel_routes:.2e} "
        f"(tol 1e-4), phi > 0: {phi_positive}, |H| drift {mel.h_drift_max:.2e} "
        f"(tol 1e-6), regression match: {regression}",
    )


def criterion_9_bifurcation_sides(seed: int = 0) -> CriterionResult:
    spiral = (
        ORACLE_PARAMS.t1 + 2.0 * ORACLE_PARAMS.a / 9.0,
        ORACLE_PARAMS.t2 - 2.0 / 3.0,
    )
    section = Section(anchor=spiral, direction=(0.0, -1.0))
    outcomes = {}
    for alpha in (0.01, -0.01):
        variant = build_variant(ORACLE_PARAMS.with_(alpha=alpha), "xfact")
        outcomes[alpha] = detect_limit_cycle(variant.system, section, seed=0.24)
    with_cycle = [alpha for alpha, out in outcomes.items() if out.cycle is not None]
    ok = len(with_cycle) == 1
    detail = []
    for alpha, out in outcomes.items():
        if out.cycle is not None:
            stable = abs(out.cycle.multiplier) < 1.0
            ok &= stable
            detail.append(
                f"alpha={alpha:+g}: stable cycle (multiplier "
                f"{out.cycle.multiplier:.2e}, period {out.cycle.period:.3f})"
            )
        else:
            detail.append(f"alpha={alpha:+g}: no cycle")
    return CriterionResult(9, "bifurcation sides", ok, "; ".join(detail))


def criterion_10_qssa_convergence(seed: int = 0) -> CriterionResult:
    rep = qssa_convergence_test(ORACLE_PARAMS)
    errors = dict(rep.entries)
    final = errors[1e-4]
    ok = rep.monotone and final < 1e-2
    table = ", ".join(f"mu={mu:.0e}: {err:.2e}" for mu, err in rep.entries)
    return CriterionResult(
        10,
        "QSSA convergence",
        ok,
        f"{table}; monotone={rep.monotone}, final < 1e-2: {final < 1e-2}",
    )


def criterion_11_xfact_kineticity(seed: int = 42) -> CriterionResult:
    rng = np.random.default_rng(seed + 1)
    bad = 0
    for _ in range(200):
        sys = random_system(rng, n_vars=2, degree=2, kinetic=False)
        factored = x_factorize(sys, (0, 1))
        if find_cross_negative_terms(factored):
            bad += 1
    ok = bad == 0
    return CriterionResult(
        11,
        "x-factorization kineticity",
        ok,
        f"{200 - bad}/200 random planar quadratics kinetic after full "
        f"x-factorization",
    )


def criterion_12_dulac(seed: int = 0) -> CriterionResult:
    v = ("x1", "x2")
    sym = PolySystem(
        v,
        [
            Polynomial(v, [(1.0, (0, 0)), (-1.0, (1, 1))]),
            Polynomial(v, [(1.0, (0, 0)), (-1.0, (1, 1))]),
        ],
    )
    rep = dulac_no_limit_cycle_test(sym)
    ok = rep.verdict == "no_limit_cycles" and rep.dbar_min_sampled >= -1e-12

    rep_pos = dulac_no_limit_cycle_test(example_cnt_system(-0.5))
    rep_neg = dulac_no_limit_cycle_test(example_cnt_system(-2.0))
    ok &= rep_pos.verdict == "inapplicable" and rep_neg.verdict == "inapplicable"
    return CriterionResult(
        12,
        "Dulac test",
        ok,
        f"symmetric instance: {rep.verdict} with sampled min "
        f"{rep.dbar_min_sampled:.2e}; hypothesis-violating instances "
        f"inapplicable: {rep_pos.verdict == 'inapplicable' and rep_neg.verdict == 'inapplicable'}",
    )


CRITERIA: dict[str, Callable[[int], CriterionResult]] = {
    "classification": criterion_1_classification_table,
    "roundtrip": criterion_2_canonical_round_trip,
    "flow": criterion_3_flow_invariance,
    "fixedpoints": criterion_4_fixed_point_oracle,
    "network43": criterion_5_sec43_network,
    "boundary": criterion_6_boundary_fixed_points,
    "degeneracies": criterion_7_degeneracies,
    "melnikov": criterion_8_melnikov,
    "bifurcation": criterion_9_bifurcation_sides,
    "qssa": criterion_10_qssa_convergence,
    "xfact": criterion_11_xfact_kineticity,
    "dulac": criterion_12_dulac,
}


def run_suite(names: list[str] | None = None, seed: int = 42) -> list[CriterionResult]:
    selected = list(CRITERIA) if not names or names == ["all"] else names
    results = []
    for name in selected:
        if name not in CRITERIA:
            raise KeyError(f"unknown suite {name!r}; choose from {list(CRITERIA)}")
        results.append(CRITERIA[name](seed))
    return results
