"""Kinetic / nonnegative / x-factorable classification of polynomial systems.

A monomial of equation ``s`` is *cross-negative* when its coefficient is
negative and its exponent of the own variable ``x_s`` is zero: such a term
can stay strictly negative while ``x_s = 0``, so no reaction can realize it.
A system without cross-negative terms is *kinetic*.

Nonnegativity is the weaker face condition: on every boundary face
``{x_s = 0, other coordinates >= 0}`` the whole component ``P_s`` must be
nonnegative.  For two-variable systems the restriction is univariate and the
verdict is exact (companion-matrix root isolation); for three or more
variables the verdict is sampled and reported as ``"undetermined"`` rather
than ``"nonnegative"`` when no violation is found.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .poly import Monomial, Polynomial, PolySystem

#: Residual target for the univariate root polish.
ROOT_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class CrossNegativeWitness:
    """A boundary point where component ``equation_index`` is negative.

    ``point`` has at least one zero coordinate; ``value`` is the (strictly
    negative) component value there.  For two-variable systems ``interval``
    holds the violating open interval ``(lo, hi)`` of the free face
    coordinate, with ``hi = inf`` for an unbounded violation.
    """

    equation_index: int
    point: tuple[float, ...]
    value: float
    face_variable: int | None = None
    interval: tuple[float, float] | None = None


@dataclass
class ClassificationReport:
    kinetic: bool
    cross_negative_terms: list[tuple[int, Monomial]]
    nonnegative: bool | str
    cross_negative_effect_witnesses: list[CrossNegativeWitness]
    x_factorable_components: set[int]
    fully_x_factorable: bool

    def to_json_dict(self, variables: Sequence[str]) -> dict:
        return {
            "kinetic": self.kinetic,
            "cross_negative_terms": [
                {
                    "equation": i,
                    "variable": variables[i],
                    "coeff": m.coeff,
                    "exponents": list(m.exponents),
                }
                for i, m in self.cross_negative_terms
            ],
            "nonnegative": self.nonnegative,
            "witnesses": [
                {
                    "equation": w.equation_index,
                    "point": list(w.point),
                    "value": w.value,
                    "face_variable": w.face_variable,
                    "interval": None if w.interval is None else list(w.interval),
                }
                for w in self.cross_negative_effect_witnesses
            ],
            "x_factorable_components": sorted(self.x_factorable_components),
            "fully_x_factorable": self.fully_x_factorable,
        }


def find_cross_negative_terms(sys: PolySystem) -> list[tuple[int, Monomial]]:
    """All monomials with negative coefficient and zero own-variable exponent."""
    found = []
    for s, eq in enumerate(sys.equations):
        for m in eq.terms:
            if m.coeff < 0.0 and m.exponents[s] == 0:
                found.append((s, m))
    return found


def is_kinetic(sys: PolySystem) -> bool:
    return not find_cross_negative_terms(sys)


def check_x_factorable(sys: PolySystem) -> tuple[set[int], bool]:
    """Indices ``s`` whose every monomial contains ``x_s``; vacuous for zero equations."""
    factorable = {
        s
        for s, eq in enumerate(sys.equations)
        if all(m.exponents[s] >= 1 for m in eq.terms)
    }
    return factorable, len(factorable) == sys.n_vars


def _restrict_to_face(eq: Polynomial, s: int, u: int) -> np.ndarray:
    """Coefficients (ascending) of ``eq`` on the face ``x_s = 0`` as a
    univariate polynomial in ``x_u``; terms containing ``x_s`` vanish."""
    coeffs: dict[int, float] = {}
    for m in eq.terms:
        if m.exponents[s] != 0:
            continue
        coeffs[m.exponents[u]] = coeffs.get(m.exponents[u], 0.0) + m.coeff
    if not coeffs:
        return np.zeros(1)
    out = np.zeros(max(coeffs) + 1)
    for e, c in coeffs.items():
        out[e] = c
    return out


def _real_roots(coeffs_ascending: np.ndarray) -> list[float]:
    """Real roots of a univariate polynomial via companion-matrix eigenvalues,
    polished with Newton to residual below ``ROOT_RESIDUAL_TOL``."""
    c = np.trim_zeros(coeffs_ascending, "b")
    if len(c) <= 1:
        return []
    scale = max(1.0, float(np.max(np.abs(c))))
    roots = np.roots(c[::-1])
    deriv = np.polynomial.polynomial.polyder(c)
    real = []
    for r in roots:
        if abs(r.imag) > 1e-9 * max(1.0, abs(r)):
            continue
        x = float(r.real)
        for _ in range(8):
            f = float(np.polynomial.polynomial.polyval(x, c))
            if abs(f) < ROOT_RESIDUAL_TOL * scale:
                break
            df = float(np.polynomial.polynomial.polyval(x, deriv))
            if df == 0.0:
                break
            x -= f / df
        real.append(x)
    return sorted(real)


def _face_check_exact_1d(
    q: np.ndarray, s: int, u: int, n_vars: int
) -> list[CrossNegativeWitness]:
    """Exact nonnegativity of a univariate restriction over ``[0, inf)``."""
    qq = np.trim_zeros(q, "b")
    if len(qq) == 0:
        return []

    def val(x: float) -> float:
        return float(np.polynomial.polynomial.polyval(x, qq))

    roots = [r for r in _real_roots(qq) if r > 0.0]
    probes = [0.0]
    knots = [0.0] + roots
    for lo, hi in zip(knots, knots[1:]):
        probes.append(0.5 * (lo + hi))
    probes.append((roots[-1] + 1.0) if roots else 1.0)

    witnesses = []
    for p in probes:
        v = val(p)
        if v < 0.0:
            lo = max((r for r in roots if r < p), default=0.0)
            hi = min((r for r in roots if r > p), default=np.inf)
            point = [0.0] * n_vars
            point[u] = p
            witnesses.append(
                CrossNegativeWitness(
                    equation_index=s,
                    point=tuple(point),
                    value=v,
                    face_variable=u,
                    interval=(lo, hi),
                )
            )
    return witnesses


def _face_check_sampled(
    sys: PolySystem, s: int, free: list[int]
) -> CrossNegativeWitness | None:
    """Grid sampling plus local descent on one face of a >=3 variable system."""
    eq = sys.equations[s]
    levels = np.concatenate([[0.0], np.geomspace(1e-3, 1e3, 12)])
    grids = np.meshgrid(*[levels] * len(free), indexing="ij")
    pts = np.zeros((grids[0].size, sys.n_vars))
    for g, u in zip(grids, free):
        pts[:, u] = g.ravel()
    vals = eq.evaluate_many(pts)
    worst = int(np.argmin(vals))
    x = pts[worst].copy()
    best = float(vals[worst])

    grad_polys = [eq.deriv(u) for u in free]
    step = 1.0
    for _ in range(10):
        g = np.zeros(sys.n_vars)
        for gp, u in zip(grad_polys, free):
            g[u] = gp.evaluate(x)
        norm = float(np.linalg.norm(g))
        if norm == 0.0:
            break
        trial_step = step
        for _ in range(15):
            x_new = x - trial_step * g / norm
            x_new = np.clip(x_new, 0.0, 1e4)
            x_new[s] = 0.0
            v = eq.evaluate(x_new)
            if v < best:
                x, best, step = x_new, float(v), trial_step * 2.0
                break
            trial_step *= 0.5
        else:
            break
    if best < -1e-10:
        return CrossNegativeWitness(
            equation_index=s, point=tuple(float(v) for v in x), value=best
        )
    return None


def check_cross_negative_effect(
    sys: PolySystem,
) -> tuple[str, list[CrossNegativeWitness]]:
    """Decide nonnegativity over all boundary faces.

    Returns ``(verdict, witnesses)`` with verdict ``"nonnegative"``,
    ``"negative"`` or ``"undetermined"``.  Systems without cross-negative
    terms are nonnegative by definition and short-circuit.  The decision is
    exact for one- and two-variable systems and sampled otherwise.
    """
    if not find_cross_negative_terms(sys):
        return "nonnegative", []

    n = sys.n_vars
    witnesses: list[CrossNegativeWitness] = []
    if n == 1:
        v = sys.equations[0].evaluate([0.0])
        if v < 0.0:
            witnesses.append(
                CrossNegativeWitness(equation_index=0, point=(0.0,), value=float(v))
            )
        return ("negative" if witnesses else "nonnegative"), witnesses

    if n == 2:
        for s in range(2):
            u = 1 - s
            q = _restrict_to_face(sys.equations[s], s, u)
            witnesses.extend(_face_check_exact_1d(q, s, u, n))
        return ("negative" if witnesses else "nonnegative"), witnesses

    for s in range(n):
        free = [u for u in range(n) if u != s]
        w = _face_check_sampled(sys, s, free)
        if w is not None:
            witnesses.append(w)
    if witnesses:
        return "negative", witnesses
    return "undetermined", []


def classify_system(sys: PolySystem) -> ClassificationReport:
    """Full classification: kinetic, nonnegative and x-factorable verdicts."""
    cnt = find_cross_negative_terms(sys)
    verdict, witnesses = check_cross_negative_effect(sys)
    factorable, fully = check_x_factorable(sys)
    nonnegative: bool | str
    if verdict == "nonnegative":
        nonnegative = True
    elif verdict == "negative":
        nonnegative = False
    else:
        nonnegative = "undetermined"
    return ClassificationReport(
        kinetic=not cnt,
        cross_negative_terms=cnt,
        nonnegative=nonnegative,
        cross_negative_effect_witnesses=witnesses,
        x_factorable_components=factorable,
        fully_x_factorable=fully,
    )
