"""Closed-form builders for the homoclinic-bifurcation case study.

Everything here comes straight from closed formulas: the invariant cubic
curve, the planar base system carrying it as a homoclinic loop, the
perturbed system, the five transformed variants with their coefficient
records and constraint sets, and the three published reaction networks.
The formulas are written out explicitly (rather than calling the generic
transformation pipeline) so they can serve as an independent oracle for
:mod:`crnforge.transform`; the test suite checks that both routes agree.

Conventions: the free parameter ``a`` lives in ``(-1, 0)`` for the
stable-loop regime; ``alpha`` is the bifurcation parameter; ``t1, t2`` are
translation components (``t`` the shared value for the sheared variant);
``omega1, omega2, omega, mu`` parametrize the quasi-steady-state variants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .crn import Complex, Reaction, ReactionNetwork
from .errors import ConstraintViolationError
from .poly import AffineMap, Polynomial, PolySystem
from .transform import ConstraintSet, Predicate

#: x1-extent of the loop: the tear-shaped component spans [-LOOP_HALF_WIDTH, LOOP_HALF_WIDTH] x [-1, 0].
LOOP_HALF_WIDTH = 2.0 * math.sqrt(3.0) / 9.0

VARIANTS = ("translated", "xfact", "sheared_xfact", "qssa", "hybrid")


@dataclass(frozen=True)
class CaseStudyParams:
    """Parameter bundle for the case-study constructions."""

    a: float
    alpha: float = 0.0
    t1: float = 1.0
    t2: float = 1.5
    t: float = 2.0
    omega1: float = 1.0
    omega2: float = 1.0
    omega: float = 1.0
    mu: float = 1e-4

    def __post_init__(self):
        if not self.a * self.a < 1.0:
            raise ConstraintViolationError([("a^2 < 1", self.a * self.a - 1.0)])

    def bundle(self) -> dict:
        return {
            "a": self.a,
            "alpha": self.alpha,
            "t1": self.t1,
            "t2": self.t2,
            "t": self.t,
            "omega1": self.omega1,
            "omega2": self.omega2,
            "omega": self.omega,
            "mu": self.mu,
        }

    def with_(self, **kwargs) -> "CaseStudyParams":
        return replace(self, **kwargs)


class AlphaCurve:
    """The invariant cubic ``H(x1, x2) = -x1^2 + x2^2 (1 + x2)``.

    The zero set consists of a tear-shaped loop for ``x2 in [-1, 0]`` (the
    homoclinic orbit of the base system) and two unbounded branches for
    ``x2 > 0``.  ``branch(x2, +1)`` and ``branch(x2, -1)`` evaluate
    ``x1 = +-x2 sqrt(1 + x2)``.
    """

    variables = ("x1", "x2")

    def __init__(self):
        self.h = Polynomial(
            self.variables, [(-1.0, (2, 0)), (1.0, (0, 2)), (1.0, (0, 3))]
        )

    def evaluate(self, x1: float, x2: float) -> float:
        return self.h.evaluate([x1, x2])

    @staticmethod
    def branch(x2, sign: int = 1):
        x2 = np.asarray(x2, dtype=float)
        return sign * x2 * np.sqrt(1.0 + x2)

    def loop_points(self, n: int = 400) -> np.ndarray:
        """Points tracing the loop counterclockwise from and back to the origin."""
        x2 = np.linspace(0.0, -1.0, n // 2)
        upper = np.stack([self.branch(x2, +1), x2], axis=1)
        lower = np.stack([self.branch(x2, -1), x2], axis=1)[::-1]
        return np.vstack([upper, lower[1:]])


def _require_stable_regime(a: float) -> None:
    if not (-1.0 < a < 0.0):
        raise ConstraintViolationError([("a in (-1, 0)", min(a + 1.0, -a))])


def base_system(a: float) -> PolySystem:
    """The planar quadratic field carrying the alpha curve as orbits.

    Valid for ``a^2 < 1``.  For ``a in (-1, 0)`` the loop is a homoclinic
    orbit to a saddle at the origin, stable from the inside, with an
    unstable spiral inside the loop and a stable node on the positive branch.
    """
    if not a * a < 1.0:
        raise ConstraintViolationError([("a^2 < 1", a * a - 1.0)])
    variables = ("x1", "x2")
    p1 = Polynomial(
        variables,
        [(a, (1, 0)), (1.0, (0, 1)), (1.5 * a, (1, 1)), (1.5, (0, 2))],
    )
    p2 = Polynomial(variables, [(1.0, (1, 0)), (a, (0, 1)), (a, (0, 2))])
    return PolySystem(variables, [p1, p2], {"a": a})


def perturbed_system(a: float, alpha: float) -> PolySystem:
    """Base system with the loop-breaking perturbation ``alpha * x1`` added
    to the first equation."""
    sys = base_system(a)
    bump = Polynomial(sys.variables, [(alpha, (1, 0))])
    return PolySystem(
        sys.variables,
        [sys.equations[0] + bump, sys.equations[1]],
        {"a": a, "alpha": alpha},
    )


def fixed_points_closed_form(a: float) -> list[tuple[tuple[float, float], str]]:
    """The three fixed points of the base system with their types,
    for ``a in (-1, 0)``."""
    _require_stable_regime(a)
    inv_a = 1.0 / a
    return [
        ((0.0, 0.0), "saddle"),
        ((2.0 * a / 9.0, -2.0 / 3.0), "unstable spiral"),
        ((inv_a * (1.0 - inv_a * inv_a), -1.0 + inv_a * inv_a), "stable node"),
    ]


def saddle_quantity(a: float) -> float:
    """Sum of the saddle eigenvalues ``(a - 1) + (a + 1) = 2 a``."""
    _require_stable_regime(a)
    return 2.0 * a


def separation_distance(a: float) -> float:
    """Distance between the saddle and the node along the positive branch.

    Returned as the magnitude ``|a^-3 (1 - a^2) sqrt(1 + a^2)|``; the raw
    formula is negative throughout ``a in (-1, 0)`` although it measures a
    distance.  It grows without bound as ``a -> 0`` and vanishes as
    ``a -> -1``.
    """
    _require_stable_regime(a)
    return abs((1.0 - a * a) * math.sqrt(1.0 + a * a) / a**3)


# -- constraint sets -------------------------------------------------------------


def _pred(name, fn):
    return Predicate(name=name, fn=fn, strict=True)


def constraint_set(name: str) -> ConstraintSet:
    """Named constraint sets used by the case-study variants.

    ``loop_positive``  -- the raw requirement that the translated loop lies in
    the open positive quadrant ({t1 > 0, t2 > 1}; the loop's lowest point
    ``(0, -1)`` maps to ``(t1, t2 - 1)``).
    ``translated``     -- t1 clear of the loop half-width, t2 > 1.
    ``xfact``          -- the window for the x-factored variant: spiral type
    preserved and the axis artefact removed.
    ``sheared_xfact``  -- the window for the sheared variant.
    ``qssa``           -- translated window plus the upper bound keeping both
    cross-negative coefficients negative.
    ``hybrid``         -- x-factored window with the lower bound on t2 relaxed to 1.
    """
    if name == "loop_positive":
        return ConstraintSet(
            (
                _pred("t1 > 0", lambda b: b["t1"]),
                _pred("t2 > 1", lambda b: b["t2"] - 1.0),
            )
        )
    if name == "translated":
        return ConstraintSet(
            (
                _pred("t1 > 2*sqrt(3)/9", lambda b: b["t1"] - LOOP_HALF_WIDTH),
                _pred("t2 > 1", lambda b: b["t2"] - 1.0),
            )
        )
    if name == "xfact":
        return ConstraintSet(
            (
                _pred("t1 > 2*sqrt(3)/9", lambda b: b["t1"] - LOOP_HALF_WIDTH),
                _pred(
                    "t2 > max(1, -a*t1)",
                    lambda b: b["t2"] - max(1.0, -b["a"] * b["t1"]),
                ),
                _pred(
                    "t2 < 2/3 + 8/3 a^-2 (3 - a^2)(a + 4 t1)",
                    lambda b: 2.0 / 3.0
                    + (8.0 / 3.0)
                    * (3.0 - b["a"] ** 2)
                    * (b["a"] + 4.0 * b["t1"])
                    / b["a"] ** 2
                    - b["t2"],
                ),
            )
        )
    if name == "sheared_xfact":
        return ConstraintSet(
            (
                _pred("a > -1", lambda b: b["a"] + 1.0),
                _pred("a < -1/2", lambda b: -0.5 - b["a"]),
                _pred(
                    "t > max(1, 2 a^-2 (1 - a^2))",
                    lambda b: b["t"]
                    - max(1.0, 2.0 * (1.0 - b["a"] ** 2) / b["a"] ** 2),
                ),
                _pred(
                    "t < 2 a^-1 (1 + 4a)^-1 (1 - a)",
                    lambda b: 2.0 * (1.0 - b["a"]) / (b["a"] * (1.0 + 4.0 * b["a"]))
                    - b["t"],
                ),
            )
        )
    if name == "qssa":
        return ConstraintSet(
            (
                _pred("t1 > 2*sqrt(3)/9", lambda b: b["t1"] - LOOP_HALF_WIDTH),
                _pred("t1 < -a*t2", lambda b: -b["a"] * b["t2"] - b["t1"]),
                _pred("t2 > 1", lambda b: b["t2"] - 1.0),
                _pred("omega1 > 0", lambda b: b["omega1"]),
                _pred("omega2 > 0", lambda b: b["omega2"]),
                _pred("mu > 0", lambda b: b["mu"]),
            )
        )
    if name == "hybrid":
        return ConstraintSet(
            (
                _pred("t1 > 2*sqrt(3)/9", lambda b: b["t1"] - LOOP_HALF_WIDTH),
                _pred("t2 > 1", lambda b: b["t2"] - 1.0),
                _pred(
                    "t2 < 2/3 + 8/3 a^-2 (3 - a^2)(a + 4 t1)",
                    lambda b: 2.0 / 3.0
                    + (8.0 / 3.0)
                    * (3.0 - b["a"] ** 2)
                    * (b["a"] + 4.0 * b["t1"])
                    / b["a"] ** 2
                    - b["t2"],
                ),
                _pred("omega > 0", lambda b: b["omega"]),
                _pred("mu > 0", lambda b: b["mu"]),
            )
        )
    raise KeyError(f"unknown constraint set {name!r}")


# -- coefficient records -----------------------------------------------------------


def translated_coefficients(params: CaseStudyParams) -> dict[str, float]:
    """Coefficient record of the translated system.

    Keys follow the pattern ``k<monomial>_<equation>``: ``k0_1`` is the
    constant of equation 1, ``k12_1`` the ``x1 x2`` coefficient of equation
    1, ``k22_2`` the ``x2^2`` coefficient of equation 2, and so on.
    """
    a, alpha, t1, t2 = params.a, params.alpha, params.t1, params.t2
    return {
        "k0_1": 0.5 * (3.0 * (t2 - 2.0 / 3.0) * (a * t1 + t2) - 2.0 * alpha * t1),
        "k0_2": -t1 + a * t2 * (t2 - 1.0),
        "k1_1": -1.5 * a * (t2 - 2.0 / 3.0) + alpha,
        "k1_2": 1.0,
        "k2_1": 1.0 - 1.5 * (a * t1 + 2.0 * t2),
        "k2_2": -2.0 * a * (t2 - 0.5),
        "k12_1": 1.5 * a,
        "k22_1": 1.5,
        "k22_2": a,
    }


def sheared_coefficients(params: CaseStudyParams) -> dict[str, float]:
    """Coefficient record of the sheared, rotated, translated system."""
    a, alpha, t = params.a, params.alpha, params.t
    return {
        "k0_1": 0.5 * t * (-2.0 + a * (2.0 * alpha + t + a * (2.0 + 5.0 * t) + 4.0 * t * a * a)),
        "k0_2": -0.5 * t * (2.0 + 2.0 * alpha + 3.0 * t + a * (4.0 + 9.0 * t + 6.0 * t * a)),
        "k1_1": -0.5 * t * a * (2.0 + 5.0 * a),
        "k1_2": 1.0 + 4.5 * t * (2.0 / 3.0 + a),
        "k2_1": 1.0 - 0.5 * a * (2.0 * alpha + a * (2.0 + 5.0 * t + 8.0 * t * a)),
        "k2_2": alpha + a * (2.0 + 4.5 * t + 6.0 * t * a),
        "k11_1": 0.5 * a,
        "k11_2": -1.5,
        "k12_1": 2.5 * a * a,
        "k12_2": -4.5 * a,
        "k22_1": 2.0 * a**3,
        "k22_2": -3.0 * a * a,
    }


#: Exponent vector (over the planar variables) of each quadratic-record key.
_MONO = {
    "k0": (0, 0),
    "k1": (1, 0),
    "k2": (0, 1),
    "k11": (2, 0),
    "k12": (1, 1),
    "k22": (0, 2),
}


def _poly_from_record(
    variables: Sequence[str], record: dict[str, float], equation: int
) -> Polynomial:
    terms = []
    for key, value in record.items():
        mono, eq = key.rsplit("_", 1)
        if int(eq) != equation:
            continue
        terms.append((value, _MONO[mono]))
    return Polynomial(variables, terms)


#: The rotation used by the sheared variant: improper orthogonal, angle 3 pi / 2.
ROTATION_3PI2_IMPROPER = ((0.0, -1.0), (-1.0, 0.0))


def shear_matrix(a: float) -> tuple[tuple[float, float], tuple[float, float]]:
    return ((1.0, 0.0), (-a, 1.0))


def sheared_affine_map(params: CaseStudyParams) -> AffineMap:
    """The affine step of the sheared variant: shear, then the fixed improper
    rotation, then translation by ``(t, t)``."""
    q = np.array(ROTATION_3PI2_IMPROPER)
    s2 = np.array(shear_matrix(params.a))
    return AffineMap.from_arrays(q @ s2, [params.t, params.t])


@dataclass
class CaseStudyVariant:
    name: str
    system: PolySystem
    constraints: ConstraintSet
    coefficients: dict[str, float]
    params: CaseStudyParams


def build_variant(
    params: CaseStudyParams, variant: str, *, check: bool = True
) -> CaseStudyVariant:
    """Build one of the five case-study systems from its closed forms.

    ``translated``    -- the perturbed system shifted by ``(t1, t2)``
    (generally nonkinetic: two cross-negative terms in the admissible window).
    ``xfact``         -- the translated system with both equations
    x-factorized (kinetic; cubic).
    ``sheared_xfact`` -- shear, improper rotation, shared translation
    ``(t, t)``, then x-factorization (kinetic; cubic).
    ``qssa``          -- both cross-negative terms of the translated system
    embedded quasi-steady-state style (kinetic; 4 variables).
    ``hybrid``        -- first equation x-factorized, the remaining
    cross-negative constant embedded (kinetic; 3 variables).

    With ``check=True`` the variant's constraint set is validated first and
    a :class:`ConstraintViolationError` names any failed predicates.
    """
    if variant not in VARIANTS:
        raise KeyError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    _require_stable_regime(params.a)
    constraints = constraint_set(variant)
    if check:
        constraints.check(params.bundle())

    if variant == "sheared_xfact":
        record = sheared_coefficients(params)
        variables = ("x1", "x2")
        inner = [
            _poly_from_record(variables, record, 1),
            _poly_from_record(variables, record, 2),
        ]
        equations = [p.multiply_by_variable(i) for i, p in enumerate(inner)]
        system = PolySystem(variables, equations, params.bundle())
        return CaseStudyVariant(variant, system, constraints, record, params)

    record = translated_coefficients(params)
    variables = ("x1", "x2")
    inner = [
        _poly_from_record(variables, record, 1),
        _poly_from_record(variables, record, 2),
    ]

    if variant == "translated":
        system = PolySystem(variables, inner, params.bundle())
    elif variant == "xfact":
        system = PolySystem(
            variables,
            [p.multiply_by_variable(i) for i, p in enumerate(inner)],
            params.bundle(),
        )
    elif variant == "qssa":
        qvars = ("x1", "x2", "y1", "y2")
        omega1, omega2, mu = params.omega1, params.omega2, params.mu
        eq1 = Polynomial(
            qvars,
            [
                (record["k0_1"], (0, 0, 0, 0)),
                (record["k1_1"], (1, 0, 0, 0)),
                (record["k2_1"] / omega1, (1, 1, 1, 0)),
                (record["k12_1"], (1, 1, 0, 0)),
                (record["k22_1"], (0, 2, 0, 0)),
            ],
        )
        eq2 = Polynomial(
            qvars,
            [
                (record["k0_2"] / omega2, (0, 1, 0, 1)),
                (record["k1_2"], (1, 0, 0, 0)),
                (record["k2_2"], (0, 1, 0, 0)),
                (record["k22_2"], (0, 2, 0, 0)),
            ],
        )
        eq3 = Polynomial(
            qvars, [(omega1 / mu, (0, 0, 0, 0)), (-1.0 / mu, (1, 0, 1, 0))]
        )
        eq4 = Polynomial(
            qvars, [(omega2 / mu, (0, 0, 0, 0)), (-1.0 / mu, (0, 1, 0, 1))]
        )
        system = PolySystem(qvars, [eq1, eq2, eq3, eq4], params.bundle())
    else:  # hybrid
        hvars = ("x1", "x2", "y")
        omega, mu = params.omega, params.mu
        eq1 = Polynomial(
            hvars,
            [
                (record["k0_1"], (1, 0, 0)),
                (record["k1_1"], (2, 0, 0)),
                (record["k2_1"], (1, 1, 0)),
                (record["k12_1"], (2, 1, 0)),
                (record["k22_1"], (1, 2, 0)),
            ],
        )
        eq2 = Polynomial(
            hvars,
            [
                (record["k0_2"] / omega, (0, 1, 1)),
                (record["k1_2"], (1, 0, 0)),
                (record["k2_2"], (0, 1, 0)),
                (record["k22_2"], (0, 2, 0)),
            ],
        )
        eq3 = Polynomial(
            hvars, [(omega / mu, (0, 0, 0)), (-1.0 / mu, (0, 1, 1))]
        )
        system = PolySystem(hvars, [eq1, eq2, eq3], params.bundle())
    return CaseStudyVariant(variant, system, constraints, record, params)


# -- published reaction networks -----------------------------------------------------

#: Reaction tables: (record key, reactant stoichiometry, affected species index).
#: The product complex is ``reactant + sign(record value) * e_species``; entries
#: whose record value is zero are dropped from the network.
_SEC43_TABLE = (
    ("k0_1", (1, 0), 0),
    ("k0_2", (0, 1), 1),
    ("k1_1", (2, 0), 0),
    ("k1_2", (1, 1), 1),
    ("k2_1", (1, 1), 0),
    ("k2_2", (0, 2), 1),
    ("k12_1", (2, 1), 0),
    ("k22_1", (1, 2), 0),
    ("k22_2", (0, 3), 1),
)

_APPC_SHEARED_TABLE = (
    ("k0_1", (1, 0), 0),
    ("k0_2", (0, 1), 1),
    ("k1_1", (2, 0), 0),
    ("k1_2", (1, 1), 1),
    ("k2_1", (1, 1), 0),
    ("k2_2", (0, 2), 1),
    ("k11_1", (3, 0), 0),
    ("k11_2", (2, 1), 1),
    ("k12_1", (2, 1), 0),
    ("k12_2", (1, 2), 1),
    ("k22_1", (1, 2), 0),
    ("k22_2", (0, 3), 1),
)

_APPC_HYBRID_TABLE = (
    ("k0_1", (1, 0, 0), 0),
    ("k0_2", (0, 1, 1), 1),
    ("k1_1", (2, 0, 0), 0),
    ("k1_2", (1, 0, 0), 1),
    ("k2_1", (1, 1, 0), 0),
    ("k2_2", (0, 1, 0), 1),
    ("k12_1", (2, 1, 0), 0),
    ("k22_1", (1, 2, 0), 0),
    ("k22_2", (0, 2, 0), 1),
)


#: Coefficients below this magnitude are degenerate zeros: the reaction is dropped.
ZERO_RATE_TOL = 1e-12


def _network_from_table(
    table, record: dict[str, float], species: tuple[str, ...], extra=()
) -> ReactionNetwork:
    reactions = []
    for key, reactant, target in table:
        value = record[key]
        if abs(value) < ZERO_RATE_TOL:
            continue
        product = list(reactant)
        product[target] += 1 if value > 0.0 else -1
        reactions.append(
            Reaction(Complex(tuple(reactant)), Complex(tuple(product)), abs(value))
        )
    for reactant, product, rate in extra:
        reactions.append(Reaction(Complex(reactant), Complex(product), rate))
    return ReactionNetwork(species, reactions)


def published_networks(params: CaseStudyParams, which: str) -> ReactionNetwork:
    """The three reference reaction networks with rates from the coefficient records.

    ``sec43``        -- 9 reactions for the x-factored variant;
    ``appC_sheared`` -- 12 reactions for the sheared variant;
    ``appC_hybrid``  -- 11 reactions for the hybrid variant, including the
    adjoined-variable reactions (empty complex -> y, rate ``omega / mu``;
    x2 + y -> x2, rate ``1 / mu``).

    Rates are the absolute values of the coefficient-record entries, and
    product complexes follow their signs; a degenerate zero coefficient
    drops its reaction.  ``induce_kinetics`` of the result reproduces the
    corresponding ``build_variant`` system.
    """
    if which == "sec43":
        variant = build_variant(params, "xfact")
        return _network_from_table(
            _SEC43_TABLE, variant.coefficients, ("x1", "x2")
        )
    if which == "appC_sheared":
        variant = build_variant(params, "sheared_xfact")
        return _network_from_table(
            _APPC_SHEARED_TABLE, variant.coefficients, ("x1", "x2")
        )
    if which == "appC_hybrid":
        variant = build_variant(params, "hybrid")
        # the x2-equation carries k0_2 / omega as its actual rate; at the
        # default omega = 1 this equals the record entry itself
        record = dict(variant.coefficients)
        record["k0_2"] = record["k0_2"] / params.omega
        extra = (
            ((0, 0, 0), (0, 0, 1), params.omega / params.mu),
            ((0, 1, 1), (0, 1, 0), 1.0 / params.mu),
        )
        return _network_from_table(
            _APPC_HYBRID_TABLE, record, ("x1", "x2", "y"), extra
        )
    raise KeyError(f"unknown network {which!r}")
