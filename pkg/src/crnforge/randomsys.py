"""Seeded random polynomial systems for property tests and verification runs."""

from __future__ import annotations

import numpy as np

from .poly import Polynomial, PolySystem


def _all_exponents(n_vars: int, degree: int) -> list[tuple[int, ...]]:
    if n_vars == 0:
        return [()]
    out = []
    for e in range(degree + 1):
        for rest in _all_exponents(n_vars - 1, degree - e):
            out.append((e,) + rest)
    return out


def random_system(
    rng: np.random.Generator,
    n_vars: int = 2,
    degree: int = 2,
    *,
    kinetic: bool = False,
    term_probability: float = 0.6,
    coeff_scale: float = 2.0,
) -> PolySystem:
    """Random sparse system with coefficients uniform in ``[-scale, scale]``.

    With ``kinetic=True``, any term that could be cross-negative (zero
    own-variable exponent) gets a nonnegative coefficient, which makes the
    system kinetic by construction.  Each equation is guaranteed at least
    one term.
    """
    variables = tuple(f"x{i + 1}" for i in range(n_vars))
    exponents = _all_exponents(n_vars, degree)
    equations = []
    for s in range(n_vars):
        terms = []
        for expo in exponents:
            if rng.random() > term_probability:
                continue
            coeff = float(rng.uniform(-coeff_scale, coeff_scale))
            if kinetic and expo[s] == 0:
                coeff = abs(coeff)
            if coeff != 0.0:
                terms.append((coeff, expo))
        if not terms:
            expo = exponents[int(rng.integers(len(exponents)))]
            coeff = float(rng.uniform(0.1, coeff_scale))
            if kinetic and expo[s] == 0:
                coeff = abs(coeff)
            terms.append((coeff, expo))
        equations.append(Polynomial(variables, terms))
    return PolySystem(variables, equations)
