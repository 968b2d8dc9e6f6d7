"""Sparse multivariate polynomial arithmetic and polynomial vector fields.

This is the representation every other module consumes.  A polynomial is a
canonical, immutable list of monomials over a fixed ordered variable tuple:

* no zero-coefficient monomials are stored (magnitudes below ``drop_tol``
  are treated as cancellation residue and dropped);
* terms are sorted graded-lexicographically (total degree first, then the
  exponent tuple), so equal polynomials have identical term lists no matter
  how they were built.

Coefficients are double-precision floats throughout; the package does not do
exact rational arithmetic.  Evaluation uses the convention ``0**0 == 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatchError, SingularMatrixError

#: Default magnitude below which a coefficient is considered a numerical zero.
DROP_TOL = 1e-14


@dataclass(frozen=True)
class Monomial:
    """One term ``coeff * prod(x_i ** exponents_i)``.

    Invariants: ``coeff != 0`` and ``len(exponents)`` equals the variable
    count of the owning polynomial.
    """

    coeff: float
    exponents: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.exponents)


def _sort_key(expo: tuple[int, ...]):
    # graded lexicographic: total degree first, then the exponent tuple
    return (sum(expo), expo)


class Polynomial:
    """Immutable sparse polynomial over an ordered variable tuple."""

    __slots__ = ("variables", "terms")

    def __init__(
        self,
        variables: Sequence[str],
        terms: Iterable[tuple[float, Sequence[int]]] = (),
        *,
        drop_tol: float = DROP_TOL,
    ):
        variables = tuple(variables)
        acc: dict[tuple[int, ...], float] = {}
        for coeff, expo in terms:
            expo = tuple(int(e) for e in expo)
            if len(expo) != len(variables):
                raise DimensionMismatchError(
                    f"exponent tuple {expo} has length {len(expo)}, "
                    f"expected {len(variables)}"
                )
            if any(e < 0 for e in expo):
                raise ValueError(f"negative exponent in {expo}")
            acc[expo] = acc.get(expo, 0.0) + float(coeff)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "terms", _canonical_terms(acc, drop_tol))

    # -- construction helpers -------------------------------------------------

    @classmethod
    def _from_dict(
        cls,
        variables: tuple[str, ...],
        acc: Mapping[tuple[int, ...], float],
        drop_tol: float = DROP_TOL,
    ) -> "Polynomial":
        p = cls.__new__(cls)
        object.__setattr__(p, "variables", variables)
        object.__setattr__(p, "terms", _canonical_terms(acc, drop_tol))
        return p

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Polynomial":
        return cls(variables)

    @classmethod
    def constant(cls, variables: Sequence[str], value: float) -> "Polynomial":
        n = len(variables)
        return cls(variables, [(value, (0,) * n)])

    @classmethod
    def variable(cls, variables: Sequence[str], index: int) -> "Polynomial":
        expo = [0] * len(variables)
        expo[index] = 1
        return cls(variables, [(1.0, expo)])

    # -- basic queries ---------------------------------------------------------

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("Polynomial is immutable")

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def degree(self) -> int:
        """Max total degree over terms; the zero polynomial has degree 0."""
        if not self.terms:
            return 0
        return max(m.degree for m in self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exponents: Sequence[int]) -> float:
        """Coefficient of the given exponent vector (0.0 when absent)."""
        expo = tuple(int(e) for e in exponents)
        for m in self.terms:
            if m.exponents == expo:
                return m.coeff
        return 0.0

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return {m.exponents: m.coeff for m in self.terms}

    # -- arithmetic ------------------------------------------------------------

    def _check_compatible(self, other: "Polynomial"):
        if self.variables != other.variables:
            raise DimensionMismatchError(
                f"variable mismatch: {self.variables} vs {other.variables}"
            )

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_compatible(other)
        acc = dict(self.as_dict())
        for m in other.terms:
            acc[m.exponents] = acc.get(m.exponents, 0.0) + m.coeff
        return Polynomial._from_dict(self.variables, acc)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check_compatible(other)
        acc = dict(self.as_dict())
        for m in other.terms:
            acc[m.exponents] = acc.get(m.exponents, 0.0) - m.coeff
        return Polynomial._from_dict(self.variables, acc)

    def __neg__(self) -> "Polynomial":
        return self.scale(-1.0)

    def scale(self, c: float) -> "Polynomial":
        if c == 0.0:
            return Polynomial.zero(self.variables)
        return Polynomial._from_dict(
            self.variables, {m.exponents: c * m.coeff for m in self.terms}
        )

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        self._check_compatible(other)
        acc: dict[tuple[int, ...], float] = {}
        for ma in self.terms:
            for mb in other.terms:
                key = tuple(a + b for a, b in zip(ma.exponents, mb.exponents))
                acc[key] = acc.get(key, 0.0) + ma.coeff * mb.coeff
        return Polynomial._from_dict(self.variables, acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative polynomial power")
        result = Polynomial.constant(self.variables, 1.0)
        for _ in range(n):
            result = result * self
        return result

    def deriv(self, index: int) -> "Polynomial":
        """Partial derivative with respect to variable ``index``."""
        acc: dict[tuple[int, ...], float] = {}
        for m in self.terms:
            e = m.exponents[index]
            if e == 0:
                continue
            key = list(m.exponents)
            key[index] = e - 1
            key = tuple(key)
            acc[key] = acc.get(key, 0.0) + m.coeff * e
        return Polynomial._from_dict(self.variables, acc)

    def multiply_by_variable(self, index: int) -> "Polynomial":
        """Multiply by ``x_index`` (exponent bump; exact, no cancellation)."""
        acc = {}
        for m in self.terms:
            key = list(m.exponents)
            key[index] += 1
            acc[tuple(key)] = m.coeff
        return Polynomial._from_dict(self.variables, acc, drop_tol=0.0)

    # -- evaluation ------------------------------------------------------------

    def evaluate(self, x: Sequence[float]) -> float:
        """Evaluate at a point, with ``0**0 == 1``."""
        if len(x) != self.n_vars:
            raise DimensionMismatchError(
                f"point has length {len(x)}, expected {self.n_vars}"
            )
        total = 0.0
        for m in self.terms:
            v = m.coeff
            for xi, e in zip(x, m.exponents):
                if e:
                    v *= xi ** e
            total += v
        return total

    def evaluate_many(self, pts: np.ndarray) -> np.ndarray:
        """Vectorized evaluation at an ``(n_points, n_vars)`` array."""
        pts = np.asarray(pts, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.n_vars:
            raise DimensionMismatchError(
                f"expected shape (n, {self.n_vars}), got {pts.shape}"
            )
        if not self.terms:
            return np.zeros(pts.shape[0])
        expos = np.array([m.exponents for m in self.terms], dtype=np.int64)
        coeffs = np.array([m.coeff for m in self.terms])
        powers = pts[:, None, :] ** expos[None, :, :]
        return powers.prod(axis=2) @ coeffs

    # -- substitution ----------------------------------------------------------

    def compose(
        self,
        new_variables: Sequence[str],
        substitutions: Sequence["Polynomial"],
        *,
        drop_tol: float = DROP_TOL,
    ) -> "Polynomial":
        """Substitute ``x_j -> substitutions[j]`` and expand.

        Each substitution polynomial must live over ``new_variables``.
        """
        if len(substitutions) != self.n_vars:
            raise DimensionMismatchError(
                f"need {self.n_vars} substitution polynomials, "
                f"got {len(substitutions)}"
            )
        new_variables = tuple(new_variables)
        result = Polynomial.zero(new_variables)
        for m in self.terms:
            term = Polynomial.constant(new_variables, m.coeff)
            for sub, e in zip(substitutions, m.exponents):
                if e:
                    term = term * (sub ** e)
            result = result + term
        return Polynomial._from_dict(new_variables, result.as_dict(), drop_tol)

    def embed(self, new_variables: Sequence[str]) -> "Polynomial":
        """Re-express over a superset of variables (old ones must appear)."""
        new_variables = tuple(new_variables)
        positions = [new_variables.index(v) for v in self.variables]
        acc = {}
        for m in self.terms:
            key = [0] * len(new_variables)
            for pos, e in zip(positions, m.exponents):
                key[pos] = e
            acc[tuple(key)] = m.coeff
        return Polynomial._from_dict(new_variables, acc, drop_tol=0.0)

    # -- comparison / display ----------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self):
        return hash((self.variables, self.terms))

    def allclose(self, other: "Polynomial", tol: float = 1e-12) -> bool:
        """Coefficient-wise comparison within ``tol`` (absolute)."""
        if self.variables != other.variables:
            return False
        a, b = self.as_dict(), other.as_dict()
        for key in set(a) | set(b):
            if abs(a.get(key, 0.0) - b.get(key, 0.0)) > tol:
                return False
        return True

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in self.terms:
            factors = [f"{m.coeff:g}"]
            for v, e in zip(self.variables, m.exponents):
                if e == 1:
                    factors.append(v)
                elif e > 1:
                    factors.append(f"{v}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)


def _canonical_terms(
    acc: Mapping[tuple[int, ...], float], drop_tol: float
) -> tuple[Monomial, ...]:
    kept = {k: c for k, c in acc.items() if c != 0.0 and abs(c) > drop_tol}
    return tuple(
        Monomial(kept[k], k) for k in sorted(kept.keys(), key=_sort_key)
    )


class PolySystem:
    """Autonomous polynomial vector field ``dx/dt = P(x)``.

    ``variables`` is the ordered state-variable tuple, ``equations`` has one
    :class:`Polynomial` per variable (same variable ordering throughout) and
    ``param_meta`` is an optional provenance record mapping symbolic parameter
    names to the numeric values used to build the system.

    Instances are immutable after construction; every operation returns a new
    system, so values are safe to share across threads.
    """

    __slots__ = ("variables", "equations", "param_meta", "_compiled")

    def __init__(
        self,
        variables: Sequence[str],
        equations: Sequence[Polynomial],
        param_meta: Mapping[str, float] | None = None,
    ):
        variables = tuple(variables)
        equations = tuple(equations)
        if len(equations) != len(variables):
            raise DimensionMismatchError(
                f"{len(equations)} equations for {len(variables)} variables"
            )
        for eq in equations:
            if eq.variables != variables:
                raise DimensionMismatchError(
                    f"equation over {eq.variables} in system over {variables}"
                )
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "equations", equations)
        object.__setattr__(
            self, "param_meta", dict(param_meta) if param_meta else {}
        )
        object.__setattr__(self, "_compiled", None)

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("PolySystem is immutable")

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def degree(self) -> int:
        return max((eq.degree for eq in self.equations), default=0)

    @property
    def is_zero(self) -> bool:
        return all(eq.is_zero for eq in self.equations)

    def evaluate(self, x: Sequence[float]) -> np.ndarray:
        return np.array([eq.evaluate(x) for eq in self.equations])

    def jacobian(self) -> tuple[tuple[Polynomial, ...], ...]:
        """Matrix of partial derivatives; entry ``(i, j)`` is dP_i/dx_j."""
        return tuple(
            tuple(eq.deriv(j) for j in range(self.n_vars))
            for eq in self.equations
        )

    def jacobian_at(self, x: Sequence[float]) -> np.ndarray:
        jac = self.jacobian()
        return np.array([[p.evaluate(x) for p in row] for row in jac])

    def divergence(self) -> Polynomial:
        div = Polynomial.zero(self.variables)
        for i, eq in enumerate(self.equations):
            div = div + eq.deriv(i)
        return div

    def compiled(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flat term arrays ``(coeffs, exponents, equation_index)`` for kernels."""
        if self._compiled is None:
            coeffs, expos, eq_idx = [], [], []
            for i, eq in enumerate(self.equations):
                for m in eq.terms:
                    coeffs.append(m.coeff)
                    expos.append(m.exponents)
                    eq_idx.append(i)
            arrays = (
                np.array(coeffs, dtype=np.float64),
                np.array(expos, dtype=np.int64).reshape(len(coeffs), self.n_vars),
                np.array(eq_idx, dtype=np.int64),
            )
            object.__setattr__(self, "_compiled", arrays)
        return self._compiled

    # -- comparison --------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolySystem):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.equations == other.equations
        )

    def __hash__(self):
        return hash((self.variables, self.equations))

    def allclose(self, other: "PolySystem", tol: float = 1e-12) -> bool:
        return self.variables == other.variables and all(
            a.allclose(b, tol) for a, b in zip(self.equations, other.equations)
        )

    def __repr__(self):
        lines = [
            f"d{v}/dt = {eq!r}" for v, eq in zip(self.variables, self.equations)
        ]
        return "PolySystem(\n  " + "\n  ".join(lines) + "\n)"

    # -- JSON wire format ----------------------------------------------------------

    def to_json_dict(self) -> dict:
        out = {
            "variables": list(self.variables),
            "equations": [
                [
                    {"coeff": m.coeff, "exponents": list(m.exponents)}
                    for m in eq.terms
                ]
                for eq in self.equations
            ],
        }
        if self.param_meta:
            out["param_meta"] = dict(self.param_meta)
        return out

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "PolySystem":
        variables = tuple(data["variables"])
        equations = [
            Polynomial(
                variables,
                [(t["coeff"], t["exponents"]) for t in eq],
                drop_tol=0.0,
            )
            for eq in data["equations"]
        ]
        return cls(variables, equations, data.get("param_meta"))


@dataclass(frozen=True)
class AffineMap:
    """Affine change of state ``x_new = matrix @ x + translation``."""

    matrix: tuple[tuple[float, ...], ...]
    translation: tuple[float, ...]

    @classmethod
    def from_arrays(cls, matrix, translation) -> "AffineMap":
        matrix = np.asarray(matrix, dtype=float)
        translation = np.asarray(translation, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"matrix shape {matrix.shape} is not square")
        if translation.shape != (matrix.shape[0],):
            raise DimensionMismatchError(
                f"translation shape {translation.shape} does not match "
                f"matrix {matrix.shape}"
            )
        return cls(
            tuple(tuple(float(v) for v in row) for row in matrix),
            tuple(float(v) for v in translation),
        )

    @classmethod
    def identity(cls, n: int) -> "AffineMap":
        return cls.from_arrays(np.eye(n), np.zeros(n))

    @classmethod
    def translation_by(cls, vec) -> "AffineMap":
        vec = np.asarray(vec, dtype=float)
        return cls.from_arrays(np.eye(len(vec)), vec)

    @classmethod
    def linear(cls, matrix) -> "AffineMap":
        matrix = np.asarray(matrix, dtype=float)
        return cls.from_arrays(matrix, np.zeros(matrix.shape[0]))

    @classmethod
    def rotation(cls, theta: float) -> "AffineMap":
        c, s = math.cos(theta), math.sin(theta)
        return cls.from_arrays([[c, -s], [s, c]], [0.0, 0.0])

    @classmethod
    def reflection(cls, theta: float) -> "AffineMap":
        """Improper orthogonal 2x2 map at angle ``theta`` (determinant -1)."""
        c, s = math.cos(theta), math.sin(theta)
        return cls.from_arrays([[c, s], [s, -c]], [0.0, 0.0])

    @property
    def n(self) -> int:
        return len(self.translation)

    def matrix_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)

    def translation_array(self) -> np.ndarray:
        return np.array(self.translation, dtype=float)

    def det(self) -> float:
        return float(np.linalg.det(self.matrix_array()))

    def is_invertible(self, tol: float = 1e-12) -> bool:
        return abs(self.det()) > tol

    def apply(self, x) -> np.ndarray:
        return self.matrix_array() @ np.asarray(x, dtype=float) + self.translation_array()

    def inverse(self) -> "AffineMap":
        if not self.is_invertible():
            raise SingularMatrixError("affine map is not invertible")
        inv = np.linalg.inv(self.matrix_array())
        return AffineMap.from_arrays(inv, -inv @ self.translation_array())

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """``self o inner``: apply ``inner`` first."""
        a2, t2 = self.matrix_array(), self.translation_array()
        a1, t1 = inner.matrix_array(), inner.translation_array()
        return AffineMap.from_arrays(a2 @ a1, a2 @ t1 + t2)


# -- module-level operations ---------------------------------------------------


def evaluate(p: Polynomial, x: Sequence[float]) -> float:
    """Evaluate a polynomial at a point (``0**0 == 1``)."""
    return p.evaluate(x)


def jacobian(sys: PolySystem) -> tuple[tuple[Polynomial, ...], ...]:
    """Jacobian matrix of a system as canonical polynomials."""
    return sys.jacobian()


def substitute_affine(
    sys: PolySystem,
    amap: AffineMap,
    mode: str = "state_change",
    *,
    drop_tol: float = DROP_TOL,
) -> PolySystem:
    """Rewrite a system in the new coordinates ``x_new = A x + T``.

    ``mode="state_change"`` transforms the vector field itself: the result
    satisfies ``P_new(A x + T) = A P_old(x)``, which reduces to the
    centroaffine rewrite for ``T = 0`` and to the translation rewrite for
    ``A = I``.  ``mode="perturbation_frame"`` substitutes the coordinates
    into each component without the leading matrix factor, which is the
    right operation for scalar invariants and auxiliary fields carried
    alongside a system (the components are composed with the inverse map,
    not pushed forward).

    The result is fully expanded and re-canonicalized; affine substitution
    preserves the polynomial degree.
    """
    if mode not in ("state_change", "perturbation_frame"):
        raise ValueError(f"unknown mode {mode!r}")
    if amap.n != sys.n_vars:
        raise DimensionMismatchError(
            f"map dimension {amap.n} does not match system {sys.n_vars}"
        )
    a = amap.matrix_array()
    t = amap.translation_array()
    is_translation = np.array_equal(a, np.eye(sys.n_vars))
    if not is_translation and not amap.is_invertible():
        raise SingularMatrixError("centroaffine substitution needs |det A| > 1e-12")
    a_inv = np.eye(sys.n_vars) if is_translation else np.linalg.inv(a)
    offset = -a_inv @ t

    variables = sys.variables
    subs = []
    for j in range(sys.n_vars):
        terms = [(offset[j], (0,) * sys.n_vars)]
        for k in range(sys.n_vars):
            expo = [0] * sys.n_vars
            expo[k] = 1
            terms.append((a_inv[j, k], expo))
        subs.append(Polynomial(variables, terms, drop_tol=0.0))

    composed = [eq.compose(variables, subs, drop_tol=drop_tol) for eq in sys.equations]
    if mode == "perturbation_frame":
        new_eqs = composed
    else:
        new_eqs = []
        for i in range(sys.n_vars):
            acc: dict[tuple[int, ...], float] = {}
            for j in range(sys.n_vars):
                if a[i, j] == 0.0:
                    continue
                for m in composed[j].terms:
                    acc[m.exponents] = acc.get(m.exponents, 0.0) + a[i, j] * m.coeff
            new_eqs.append(Polynomial._from_dict(variables, acc, drop_tol))
    return PolySystem(variables, new_eqs, sys.param_meta)
