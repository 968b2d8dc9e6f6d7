"""Numerical verification engine.

Adaptive Dormand-Prince 5(4) integration with dense output and event
handling, fixed-point finding and classification, the Melnikov integral of
the homoclinic case study (computed by two independent quadrature routes),
Poincare return-map limit-cycle detection, the Dulac no-limit-cycle test for
planar bimolecular systems, and the quasi-steady-state convergence table.

Every run is deterministic for fixed tolerances; parameter sweeps can be
parallelized externally because all inputs are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _tableau as tb
from .backend import get_stepper
from ._kernels_numpy import dopri5_window_callable, rhs as rhs_numpy
from .classify import check_cross_negative_effect
from .errors import (
    IntegrationError,
    LoopTrackingError,
    MelnikovError,
    StiffnessError,
    UnsupportedDimensionError,
)
from .homoclinic import (
    CaseStudyParams,
    base_system,
    build_variant,
    fixed_points_closed_form,
    perturbed_system,
)
from .poly import Polynomial, PolySystem

#: Window size for the resumable kernel stepper.
_WINDOW = 4096

#: Saddle-proximity truncation radius for homoclinic-loop runs.
LOOP_DELTA = 1e-6


# -- dense output -------------------------------------------------------------------


class DenseOutput:
    """Piecewise quartic interpolant assembled from accepted DOPRI5 steps."""

    def __init__(self, t0, y0, t_ends, y_ends, ks):
        self.t0 = t0
        self.t_ends = np.asarray(t_ends)
        starts = np.concatenate([[t0], self.t_ends[:-1]])
        self.t_starts = starts
        self.h = self.t_ends - starts
        self.y_starts = np.vstack([y0[None, :], y_ends[:-1]])
        self.y_ends = np.asarray(y_ends)
        self.ks = np.asarray(ks)
        dy = self.y_ends - self.y_starts
        hk = self.h[:, None]
        self.r2 = dy
        self.r3 = hk * self.ks[:, 0, :] - dy
        self.r4 = dy - hk * self.ks[:, 6, :] - self.r3
        self.r5 = hk * np.einsum("m,smj->sj", tb.D, self.ks)
        self.forward = self.t_ends[-1] >= t0 if len(self.t_ends) else True

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tq = np.atleast_1d(t)
        if self.forward:
            idx = np.searchsorted(self.t_ends, tq, side="left")
        else:
            idx = len(self.t_ends) - np.searchsorted(self.t_ends[::-1], tq, side="left")
        idx = np.clip(idx, 0, len(self.t_ends) - 1)
        h = self.h[idx]
        theta = (tq - self.t_starts[idx]) / h
        th = theta[:, None]
        out = self.y_starts[idx] + th * (
            self.r2[idx]
            + (1.0 - th)
            * (self.r3[idx] + th * (self.r4[idx] + (1.0 - th) * self.r5[idx]))
        )
        return out[0] if scalar else out

    def eval_segment(self, seg: int, theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))[:, None]
        out = self.y_starts[seg] + theta * (
            self.r2[seg]
            + (1.0 - theta)
            * (self.r3[seg] + theta * (self.r4[seg] + (1.0 - theta) * self.r5[seg]))
        )
        return out


@dataclass(frozen=True)
class PlaneEvent:
    """Hyperplane crossing ``normal . x = offset``.

    ``direction``: +1 for crossings where the signed distance goes negative
    to positive, -1 for the opposite, 0 for both.  ``guard`` may reject a
    located crossing (e.g. to restrict to a half line); ``min_time`` ignores
    crossings before that much elapsed time (to skip a start on the plane).
    """

    normal: tuple[float, ...]
    offset: float = 0.0
    direction: int = 0
    terminal: bool = True
    guard: Callable[[np.ndarray], bool] | None = None
    min_time: float = 0.0


@dataclass
class TrajectoryRecord:
    """Accepted integration points plus step-acceptance metadata.

    ``t`` is strictly monotone (increasing for forward runs); ``diverged``
    flags truncation at state norm 1e12.  ``sol`` is the dense interpolant
    when the run was made with ``dense=True``.
    """

    t: np.ndarray
    y: np.ndarray
    status: str
    diverged: bool
    n_accepted: int
    n_rejected: int
    err_norms: np.ndarray
    sol: DenseOutput | None = None
    events: list = field(default_factory=list)
    used_fallback: bool = False

    @property
    def final_state(self) -> np.ndarray:
        return self.y[-1]

    @property
    def final_time(self) -> float:
        return float(self.t[-1])


_STATUS_NAMES = {
    tb.STATUS_REACHED_END: "reached_end",
    tb.STATUS_BALL_EVENT: "ball_event",
    tb.STATUS_DIVERGED: "diverged",
    tb.STATUS_UNDERFLOW: "underflow",
}


def _initial_step(f0, y0, t0, t_end, rtol, atol):
    scale = atol + np.abs(y0) * rtol
    d0 = float(np.sqrt(np.mean((y0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    span = abs(t_end - t0)
    h = min(h0, 0.1 * span) if span > 0 else h0
    return math.copysign(max(h, 1e-12), t_end - t0)


def integrate(
    sys: PolySystem,
    x0: Sequence[float],
    t_span: tuple[float, float],
    rtol: float = 1e-9,
    atol: float = 1e-12,
    *,
    dense: bool = False,
    max_steps: int = 3_000_000,
    first_step: float | None = None,
    ball_center: Sequence[float] | None = None,
    ball_radius: float = 0.0,
    ball_weights: Sequence[float] | None = None,
    plane_event: PlaneEvent | None = None,
    backend: str | None = None,
    stiff_fallback: bool = False,
) -> TrajectoryRecord:
    """Integrate ``dx/dt = P(x)`` over ``t_span`` with local error control.

    Event hooks: a weighted ball ``|x - c| <= r`` terminates the run
    (``status == "ball_event"``); a :class:`PlaneEvent` is located on the
    dense interpolant by bisection and, when terminal, truncates the record
    exactly at the crossing.  Divergence (state norm above 1e12) truncates
    with ``diverged=True``.  Persistent step underflow raises unless
    ``stiff_fallback`` enables the semi-implicit midpoint rescue, which
    finishes the span at reduced order.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (sys.n_vars,):
        raise IntegrationError(
            f"initial state has shape {x0.shape}, expected ({sys.n_vars},)"
        )
    if not np.all(np.isfinite(x0)):
        raise IntegrationError("initial state must be finite")
    t0, t_end = float(t_span[0]), float(t_span[1])
    coeffs, expos, eq_idx = sys.compiled()
    stepper = get_stepper(backend)

    n = sys.n_vars
    center = (
        np.zeros(n) if ball_center is None else np.asarray(ball_center, dtype=float)
    )
    weights = (
        np.ones(n) if ball_weights is None else np.asarray(ball_weights, dtype=float)
    )
    radius = float(ball_radius)

    k1 = rhs_numpy(coeffs, expos, eq_idx, n, x0)
    h = first_step if first_step is not None else _initial_step(k1, x0, t0, t_end, rtol, atol)
    hmin = 1e-14 * max(1.0, abs(t_end - t0))

    ts_parts, ys_parts, ks_parts, err_parts = [], [], [], []
    t, y = t0, x0.copy()
    n_acc_total, n_rej_total = 0, 0
    status = tb.STATUS_REACHED_END
    events: list[tuple[float, np.ndarray]] = []
    used_fallback = False
    truncate_at: tuple[float, np.ndarray] | None = None

    while True:
        window = min(_WINDOW, max_steps - n_acc_total)
        if window <= 0:
            # the explicit budget ran out; for stiff problems hand the rest
            # of the span to the semi-implicit rescue
            if stiff_fallback:
                used_fallback = True
                fb_t, fb_y = _semi_implicit_midpoint(sys, t, y, t_end, rtol, atol)
                if len(fb_t):
                    ts_parts.append(fb_t)
                    ys_parts.append(fb_y)
                    ks_parts.append(np.zeros((len(fb_t), 7, n)))
                    err_parts.append(np.zeros(len(fb_t)))
                    n_acc_total += len(fb_t)
                    t, y = float(fb_t[-1]), fb_y[-1].copy()
                status = tb.STATUS_REACHED_END
                break
            status = tb.STATUS_WINDOW_FULL
            break
        st, w_ts, w_ys, w_ks, w_errs, n_rej, h, k1 = stepper(
            coeffs, expos, eq_idx, t, y, h, k1, t_end, rtol, atol,
            window, center, radius, weights, hmin,
        )
        n_rej_total += n_rej
        if len(w_ts):
            seg_dense = DenseOutput(t, y, w_ts, w_ys, w_ks)
            if plane_event is not None:
                hit = _scan_plane(seg_dense, t0, plane_event)
                if hit is not None:
                    t_star, x_star, seg = hit
                    keep = seg + 1
                    w_ts, w_ys, w_ks, w_errs = (
                        w_ts[:keep], w_ys[:keep], w_ks[:keep], w_errs[:keep],
                    )
                    events.append((t_star, x_star))
                    if plane_event.terminal:
                        truncate_at = (t_star, x_star)
                        st = -1  # plane event sentinel
            ts_parts.append(w_ts)
            ys_parts.append(w_ys)
            ks_parts.append(w_ks)
            err_parts.append(w_errs)
            n_acc_total += len(w_ts)
            t, y = float(w_ts[-1]), w_ys[-1].copy()
        if st == -1:
            status = st
            break
        if st == tb.STATUS_WINDOW_FULL:
            continue
        if st == tb.STATUS_UNDERFLOW and stiff_fallback:
            used_fallback = True
            fb_t, fb_y = _semi_implicit_midpoint(sys, t, y, t_end, rtol, atol)
            if len(fb_t):
                ts_parts.append(fb_t)
                ys_parts.append(fb_y)
                ks_parts.append(np.zeros((len(fb_t), 7, n)))
                err_parts.append(np.zeros(len(fb_t)))
                n_acc_total += len(fb_t)
                t, y = float(fb_t[-1]), fb_y[-1].copy()
            status = tb.STATUS_REACHED_END
            break
        status = st
        break

    if ts_parts:
        ts = np.concatenate(ts_parts)
        ys = np.vstack(ys_parts)
        ks = np.concatenate(ks_parts)
        errs = np.concatenate(err_parts)
    else:
        ts = np.empty(0)
        ys = np.empty((0, n))
        ks = np.empty((0, 7, n))
        errs = np.empty(0)

    sol = None
    if dense and len(ts) and not used_fallback:
        sol = DenseOutput(t0, x0, ts, ys, ks)

    if truncate_at is not None:
        t_star, x_star = truncate_at
        keep = np.searchsorted(ts, t_star) if t_end >= t0 else np.searchsorted(-ts, -t_star)
        ts = np.concatenate([ts[:keep], [t_star]])
        ys = np.vstack([ys[:keep], x_star[None, :]])
        errs = np.concatenate([errs[:keep], [0.0]])
        status_name = "plane_event"
    else:
        status_name = _STATUS_NAMES.get(status, "max_steps")

    ts_full = np.concatenate([[t0], ts])
    ys_full = np.vstack([x0[None, :], ys])
    record = TrajectoryRecord(
        t=ts_full,
        y=ys_full,
        status=status_name,
        diverged=status == tb.STATUS_DIVERGED,
        n_accepted=n_acc_total,
        n_rejected=n_rej_total,
        err_norms=errs,
        sol=sol,
        events=events,
        used_fallback=used_fallback,
    )
    if status == tb.STATUS_UNDERFLOW and not stiff_fallback:
        raise StiffnessError(
            float("nan"),
            f"step size underflow at t={t:.6g}; the problem is too stiff for "
            f"the explicit integrator (enable stiff_fallback)",
        )
    return record


def _scan_plane(seg_dense: DenseOutput, run_t0: float, ev: PlaneEvent):
    """Locate the first accepted plane crossing inside a window of steps."""
    w = np.asarray(ev.normal, dtype=float)
    n_seg = len(seg_dense.t_ends)
    thetas = np.linspace(0.0, 1.0, 9)
    for seg in range(n_seg):
        t_a = seg_dense.t_starts[seg]
        h = seg_dense.h[seg]
        pts = seg_dense.eval_segment(seg, thetas)
        g = pts @ w - ev.offset
        for i in range(len(thetas) - 1):
            g0, g1 = g[i], g[i + 1]
            if g0 == 0.0 and abs(t_a + thetas[i] * h - run_t0) < ev.min_time:
                continue
            crossed = (g0 < 0.0 <= g1) if ev.direction >= 0 else False
            crossed |= (g0 > 0.0 >= g1) if ev.direction <= 0 else False
            if not crossed:
                continue
            lo, hi = thetas[i], thetas[i + 1]
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                gm = float(seg_dense.eval_segment(seg, mid)[0] @ w - ev.offset)
                same_side = (gm < 0.0) if g0 < 0.0 else (gm > 0.0)
                if same_side:
                    lo = mid
                else:
                    hi = mid
                if hi - lo < 1e-15:
                    break
            theta_star = 0.5 * (lo + hi)
            t_star = float(t_a + theta_star * h)
            if abs(t_star - run_t0) < ev.min_time:
                continue
            x_star = seg_dense.eval_segment(seg, theta_star)[0]
            if ev.guard is not None and not ev.guard(x_star):
                continue
            return t_star, x_star, seg
    return None


def _semi_implicit_midpoint(sys, t0, y0, t_end, rtol, atol, h_init=None):
    """Linearly implicit rescue integrator for stiff tails.

    One step is Richardson-extrapolated linearly implicit Euler,
    ``E(y, h) = y + (I - h J(y))^-1 h f(y)``, advanced as ``2 E(E(y, h/2),
    h/2) - E(y, h)`` with step-doubling error control: second order and
    L-stable, so the fast modes are damped instead of oscillating.  Used
    only when the explicit stepper underflows or exhausts its budget.
    """
    n = sys.n_vars
    direction = math.copysign(1.0, t_end - t0)
    h = h_init if h_init is not None else direction * max(1e-8, abs(t_end - t0) * 1e-6)
    t, y = t0, y0.copy()
    ts, ys = [], []
    eye = np.eye(n)
    jac_polys = sys.jacobian()
    max_iter = 2_000_000

    def jac_at(yc):
        return np.array([[p.evaluate(yc) for p in row] for row in jac_polys])

    def euler(yc, hc):
        delta = np.linalg.solve(eye - hc * jac_at(yc), hc * sys.evaluate(yc))
        return yc + delta

    for _ in range(max_iter):
        if direction * (t_end - t) <= 0.0:
            break
        if direction * (t + h - t_end) > 0.0:
            h = t_end - t
        big = euler(y, h)
        half = euler(euler(y, 0.5 * h), 0.5 * h)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(half))
        err = float(np.sqrt(np.mean(((half - big) / scale) ** 2)))
        if err <= 1.0 or abs(h) < 1e-13:
            t = t + h
            y = 2.0 * half - big  # Richardson extrapolation of the order-1 base
            ts.append(t)
            ys.append(y.copy())
        h *= min(4.0, max(0.2, 0.9 / math.sqrt(max(err, 1e-12))))
    else:
        raise StiffnessError(float("nan"), "semi-implicit fallback exceeded step budget")
    return np.array(ts), np.array(ys) if ys else np.empty((0, n))


# -- fixed points --------------------------------------------------------------------


@dataclass
class FixedPointReport:
    location: np.ndarray
    jacobian: np.ndarray
    trace: float
    det: float
    disc: float
    eigenvalues: list[complex]
    type: str
    boundary: bool

    def to_json_dict(self) -> dict:
        return {
            "location": [float(v) for v in self.location],
            "trace": self.trace,
            "det": self.det,
            "disc": self.disc,
            "eigenvalues": [[ev.real, ev.imag] for ev in self.eigenvalues],
            "type": self.type,
            "boundary": self.boundary,
        }


class FixedPointSearch(list):
    """List of :class:`FixedPointReport` plus a degenerate-input flag."""

    def __init__(self, points=(), degenerate_input: bool = False):
        super().__init__(points)
        self.degenerate_input = degenerate_input


def _char_poly_coeffs(jac: np.ndarray) -> np.ndarray:
    """Characteristic polynomial coefficients (descending) via Faddeev-LeVerrier."""
    n = jac.shape[0]
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    m = np.eye(n)
    for k in range(1, n + 1):
        m = jac @ m
        coeffs[k] = -np.trace(m) / k
        m = m + coeffs[k] * np.eye(n)
    return coeffs


def eigenvalues_via_charpoly(jac: np.ndarray) -> list[complex]:
    """Eigenvalues for n <= 4: characteristic-polynomial roots with one
    complex-Newton polish; conjugate symmetry enforced at 1e-9."""
    coeffs = _char_poly_coeffs(jac)
    roots = np.roots(coeffs)
    asc = coeffs[::-1]
    dasc = np.polynomial.polynomial.polyder(asc)
    polished = []
    for r in roots:
        z = complex(r)
        for _ in range(3):
            f = complex(np.polynomial.polynomial.polyval(z, asc))
            df = complex(np.polynomial.polynomial.polyval(z, dasc))
            if df == 0:
                break
            z = z - f / df
        if abs(z.imag) <= 1e-9 * max(1.0, abs(z)):
            z = complex(z.real, 0.0)
        polished.append(z)
    return sorted(polished, key=lambda z: (z.real, z.imag))


def classify_jacobian(jac: np.ndarray, tol: float = 1e-9) -> tuple[str, list[complex]]:
    """Type tag from the Jacobian eigenvalues (planar rules for n = 2)."""
    eigs = eigenvalues_via_charpoly(jac)
    n = jac.shape[0]
    trace = float(np.trace(jac))
    det = float(np.linalg.det(jac))
    if n == 2:
        disc = trace * trace - 4.0 * det
        if abs(det) <= tol:
            return "degenerate", eigs
        if det < 0.0:
            return "saddle", eigs
        if abs(trace) <= tol:
            return "degenerate", eigs
        stability = "stable" if trace < 0.0 else "unstable"
        shape = "spiral" if disc < -tol else "node"
        return f"{stability} {shape}", eigs
    res = [z.real for z in eigs]
    if any(abs(r) <= tol for r in res):
        return "degenerate", eigs
    has_complex = any(abs(z.imag) > tol for z in eigs)
    if all(r < 0 for r in res):
        return ("stable spiral" if has_complex else "stable node"), eigs
    if all(r > 0 for r in res):
        return ("unstable spiral" if has_complex else "unstable node"), eigs
    return "saddle", eigs


def find_fixed_points(
    sys: PolySystem,
    search_box: Sequence[tuple[float, float]],
    *,
    seeds_per_dim: int | None = None,
    residual_tol: float = 1e-10,
    dedupe_tol: float = 1e-8,
) -> FixedPointSearch:
    """Newton iteration over a seed grid plus axis-restriction candidates.

    Every returned report satisfies ``|P(location)| < residual_tol`` per
    component; points are deduplicated at ``dedupe_tol`` and classified via
    characteristic-polynomial eigenvalues.  An identically zero system is
    flagged degenerate and not enumerated.
    """
    n = sys.n_vars
    if n > 4:
        raise UnsupportedDimensionError("fixed-point search implemented for n <= 4")
    if len(search_box) != n:
        raise ValueError("search_box must give (lo, hi) per variable")
    if sys.is_zero:
        return FixedPointSearch(degenerate_input=True)

    lo = np.array([b[0] for b in search_box], dtype=float)
    hi = np.array([b[1] for b in search_box], dtype=float)
    span = float(np.max(hi - lo))
    if seeds_per_dim is None:
        seeds_per_dim = {1: 101, 2: 31, 3: 11, 4: 7}[n]

    axes_pts = [np.linspace(lo[j], hi[j], seeds_per_dim) for j in range(n)]
    grids = np.meshgrid(*axes_pts, indexing="ij")
    seeds = [np.stack([g.ravel() for g in grids], axis=1)]

    # axis restrictions: candidates with all-but-one coordinate zero
    for v in range(n):
        for eq in sys.equations:
            coeffs = _axis_restriction(eq, v, n)
            from .classify import _real_roots

            for r in _real_roots(coeffs):
                pt = np.zeros(n)
                pt[v] = r
                seeds.append(pt[None, :])
    seeds.append(np.zeros((1, n)))
    seeds = np.vstack(seeds)

    jac_polys = sys.jacobian()

    def jac_at(x):
        return np.array([[p.evaluate(x) for p in row] for row in jac_polys])

    scale = max(1.0, span)
    found: list[np.ndarray] = []
    for seed in seeds:
        x = seed.copy()
        ok = False
        for _ in range(60):
            fx = sys.evaluate(x)
            if np.max(np.abs(fx)) < residual_tol:
                ok = True
                break
            jac = jac_at(x)
            try:
                step = np.linalg.solve(jac, -fx)
            except np.linalg.LinAlgError:
                break
            if not np.all(np.isfinite(step)):
                break
            # damped update
            lam = 1.0
            base = np.max(np.abs(fx))
            for _ in range(12):
                x_new = x + lam * step
                if np.max(np.abs(sys.evaluate(x_new))) < base or lam < 1e-4:
                    break
                lam *= 0.5
            x = x + lam * step
            if np.max(np.abs(x)) > 1e8:
                break
        if not ok:
            continue
        # polish to machine precision; eigenvalue accuracy needs the location
        # tighter than the convergence test alone guarantees
        for _ in range(3):
            fx = sys.evaluate(x)
            if np.max(np.abs(fx)) == 0.0:
                break
            try:
                step = np.linalg.solve(jac_at(x), -fx)
            except np.linalg.LinAlgError:
                break
            x_new = x + step
            if np.max(np.abs(sys.evaluate(x_new))) >= np.max(np.abs(fx)):
                break
            x = x_new
        if np.any(x < lo - 1e-9 * scale) or np.any(x > hi + 1e-9 * scale):
            continue
        if any(np.linalg.norm(x - p) < dedupe_tol * max(1.0, np.linalg.norm(p)) for p in found):
            continue
        found.append(x)

    found.sort(key=lambda p: tuple(p))
    reports = []
    for x in found:
        jac = jac_at(x)
        trace = float(np.trace(jac))
        det = float(np.linalg.det(jac))
        disc = trace * trace - 4.0 * det
        type_tag, eigs = classify_jacobian(jac)
        reports.append(
            FixedPointReport(
                location=x,
                jacobian=jac,
                trace=trace,
                det=det,
                disc=disc,
                eigenvalues=eigs,
                type=type_tag,
                boundary=bool(np.any(np.abs(x) < 1e-9 * scale)),
            )
        )
    return FixedPointSearch(reports)


def _axis_restriction(eq: Polynomial, v: int, n: int) -> np.ndarray:
    """Coefficients (ascending in x_v) of ``eq`` with all other variables 0."""
    coeffs: dict[int, float] = {}
    for m in eq.terms:
        if any(e != 0 for j, e in enumerate(m.exponents) if j != v):
            continue
        coeffs[m.exponents[v]] = coeffs.get(m.exponents[v], 0.0) + m.coeff
    if not coeffs:
        return np.zeros(1)
    out = np.zeros(max(coeffs) + 1)
    for e, c in coeffs.items():
        out[e] = c
    return out


# -- Melnikov integral ----------------------------------------------------------------


@dataclass
class MelnikovResult:
    """Melnikov integral at the bifurcation point, with self-validation data.

    ``value`` is the time-quadrature route; ``value_branch_route`` the
    independent curve-parametrized route.  ``phi_samples`` holds ``(t, phi)``
    along the computed loop; ``h_drift_max`` the worst conservation error.
    """

    value: float
    value_branch_route: float
    phi_samples: np.ndarray
    truncation_delta: float
    estimated_error: float
    h_drift_max: float
    t_forward: float
    t_backward: float


def _melnikov_augmented_system(a: float, f_exponent: int) -> PolySystem:
    base = base_system(a)
    variables = ("x1", "x2", "phi", "m")
    p1 = base.equations[0].embed(variables)
    p2 = base.equations[1].embed(variables)
    div = base.divergence().embed(variables)
    dphi = (-1.0 * div).multiply_by_variable(2)
    integrand = base.equations[1]
    for _ in range(f_exponent):
        integrand = integrand.multiply_by_variable(0)
    dm = (-1.0 * integrand.embed(variables)).multiply_by_variable(2)
    return PolySystem(variables, [p1, p2, dphi, dm])


def melnikov_at_zero(
    a: float,
    *,
    f_exponent: int = 1,
    delta: float = LOOP_DELTA,
    t_max: float = 400.0,
    rtol: float = 1e-10,
    atol: float = 1e-13,
    route_agreement_tol: float = 1e-4,
    h_drift_tol: float = 1e-6,
    backend: str | None = None,
) -> MelnikovResult:
    """Melnikov integral along the homoclinic loop at the bifurcation point.

    The loop-breaking perturbation is ``alpha * x1 ** f_exponent`` (odd
    ``f_exponent``).  Route one integrates the augmented system (state,
    integrating factor ``phi``, quadrature state) from the loop bottom
    ``(0, -1)`` forward and backward in time until within ``delta`` of the
    saddle.  Route two re-derives the integral from the curve-parametrized
    two-branch form, using the closed-form branches; the two must agree to
    ``route_agreement_tol`` (relative) or the run fails.
    """
    if not a * a < 1.0:
        raise ValueError("the loop exists for a^2 < 1")
    if f_exponent % 2 != 1:
        raise ValueError("the perturbation must be odd in x1")

    aug = _melnikov_augmented_system(a, f_exponent)
    weights = np.array([1.0, 1.0, 0.0, 0.0])

    # t > 0 half: from the loop bottom (0, -1) forward along the stable
    # manifold until within delta of the saddle.  Transverse error contracts
    # the whole way, so direct tracking is stable.
    rec_fwd = integrate(
        aug,
        np.array([0.0, -1.0, 1.0, 0.0]),
        (0.0, t_max),
        rtol,
        atol,
        dense=True,
        ball_center=np.zeros(4),
        ball_radius=delta,
        ball_weights=weights,
        backend=backend,
    )
    if rec_fwd.status != "ball_event":
        raise LoopTrackingError(
            f"forward loop tracking did not reach the saddle "
            f"(status {rec_fwd.status!r})"
        )

    # t < 0 half: tracking backward from the bottom is exponentially
    # unstable transverse to the loop, so integrate this branch forward
    # instead, starting on the closed-form curve within delta of the saddle.
    # The (phi, m) pair evolves linearly and only the ratio at the loop
    # bottom is needed, so the pair is renormalized chunk by chunk to keep
    # phi representable (it would overflow on the slow transit as a -> -1).
    m_minus, t_bottom, drift_neg, neg_t, neg_logphi = _melnikov_minus_branch(
        aug, a, delta, t_max, rtol, atol, backend
    )

    drift = drift_neg
    hvals = np.abs(rec_fwd.y[:, 1] ** 2 * (1.0 + rec_fwd.y[:, 1]) - rec_fwd.y[:, 0] ** 2)
    drift = max(drift, float(np.max(hvals)))
    if drift > h_drift_tol:
        raise LoopTrackingError(f"|H| drift {drift:.3e} exceeds {h_drift_tol:.0e}")

    phi_fwd = rec_fwd.y[:, 2]
    if phi_fwd.min() <= 0.0:
        raise MelnikovError("integrating factor lost positivity along the loop")

    m_plus = float(rec_fwd.y[-1, 3])
    m_time = m_plus + m_minus
    # the integrand decays like exp(-2|t|) near the saddle, so each tail
    # contributes about half the endpoint integrand value
    trunc_est = 0.5 * (
        abs(_mdot(aug, rec_fwd.y[-1])) + abs(m_minus) * delta
    )

    m_branch = _melnikov_branch_route(a, f_exponent, delta)

    denom = max(abs(m_time), abs(m_branch))
    rel = abs(m_time - m_branch) / denom if denom > 0 else 0.0
    if rel > route_agreement_tol:
        raise MelnikovError(
            f"independent quadrature routes disagree: time route {m_time:.10g}, "
            f"branch route {m_branch:.10g} (relative {rel:.2e})"
        )

    # stitch the two halves; minus-branch factors are reported in true
    # normalization (phi = 1 at the loop bottom), flooring underflow
    phi_neg = np.maximum(np.exp(neg_logphi), 1e-300)
    t_all = np.concatenate([neg_t - t_bottom, rec_fwd.t[1:]])
    phi_all = np.concatenate([phi_neg, phi_fwd[1:]])
    return MelnikovResult(
        value=m_time,
        value_branch_route=m_branch,
        phi_samples=np.stack([t_all, phi_all], axis=1),
        truncation_delta=delta,
        estimated_error=rel * abs(m_time) + trunc_est,
        h_drift_max=drift,
        t_forward=rec_fwd.final_time,
        t_backward=-t_bottom,
    )


def _melnikov_minus_branch(aug, a, delta, t_max, rtol, atol, backend):
    """Quadrature over the pre-bottom half of the loop.

    Starts on the closed-form curve near the saddle and runs forward to the
    loop bottom in chunks, rescaling the linear (phi, m) pair whenever phi
    grows large; the branch integral in bottom normalization is the final
    ratio m / phi.  Returns ``(integral, bottom_time, h_drift, times,
    log_phi_true)``.
    """
    x2_start = -delta / math.sqrt(2.0)
    x1_start = x2_start * math.sqrt(1.0 + x2_start)
    lam2 = a + 1.0
    horizon = max(t_max, 100.0 + 3.0 * math.log(2.0 / delta) / max(lam2, 1e-3))
    chunk = 40.0 if a == 0.0 else min(40.0, max(2.0, 6.0 / abs(2.0 * a)))
    bottom_event = PlaneEvent(
        normal=(1.0, 0.0, 0.0, 0.0),
        offset=0.0,
        direction=+1,
        terminal=True,
        guard=lambda x: x[1] < -0.9,
        min_time=1e-9,
    )

    state = np.array([x1_start, x2_start, 1.0, 0.0])
    t = 0.0
    log_scale = 0.0  # log of the factor taken out of (phi, m) so far
    drift = 0.0
    times: list[np.ndarray] = []
    logphi: list[np.ndarray] = []
    while t < horizon:
        rec = integrate(
            aug,
            state,
            (t, min(t + chunk, horizon)),
            rtol,
            atol,
            plane_event=bottom_event,
            backend=backend,
        )
        hvals = np.abs(rec.y[:, 1] ** 2 * (1.0 + rec.y[:, 1]) - rec.y[:, 0] ** 2)
        drift = max(drift, float(np.max(hvals)))
        if np.any(rec.y[:, 2] <= 0.0):
            raise MelnikovError("integrating factor lost positivity along the loop")
        times.append(rec.t)
        logphi.append(np.log(rec.y[:, 2]) + log_scale)
        t = rec.final_time
        state = rec.final_state.copy()
        if rec.status == "plane_event":
            phi_b, m_b = float(state[2]), float(state[3])
            if phi_b <= 0.0:
                raise MelnikovError("integrating factor lost positivity at the bottom")
            t_arr = np.concatenate(times)
            lp = np.concatenate(logphi) - (math.log(phi_b) + log_scale)
            return m_b / phi_b, t, drift, t_arr, lp
        if rec.status != "reached_end":
            raise LoopTrackingError(
                f"unstable-manifold branch failed (status {rec.status!r})"
            )
        if state[2] > 1e6:
            log_scale += math.log(state[2])
            state[3] /= state[2]
            state[2] = 1.0
    raise LoopTrackingError(
        "unstable-manifold branch did not reach the loop bottom within the horizon"
    )


def _mdot(aug: PolySystem, state: np.ndarray) -> float:
    return float(aug.equations[3].evaluate(state))


def _melnikov_branch_route(a: float, f_exponent: int, delta: float) -> float:
    """Curve-parametrized route: integrate the integrating factor as an ODE in
    the x2 coordinate along each closed-form branch and quadrate
    ``(phi_plus + phi_minus) * f(branch)``."""
    base = base_system(a)
    div = base.divergence()
    p2 = base.equations[1]

    def branch_x1(x2, sign):
        return sign * x2 * math.sqrt(1.0 + x2)

    def f_of(u):
        return u**f_exponent

    def rhs(x2, state):
        phi_p, phi_m, acc = state
        x1p = branch_x1(x2, +1)
        x1m = branch_x1(x2, -1)
        p2_p = p2.evaluate([x1p, x2])
        p2_m = p2.evaluate([x1m, x2])
        dphi_p = -div.evaluate([x1p, x2]) * phi_p / p2_p
        dphi_m = -div.evaluate([x1m, x2]) * phi_m / p2_m
        dacc = (phi_p + phi_m) * f_of(x1p)
        return np.array([dphi_p, dphi_m, dacc])

    eps0 = 1e-12
    x2_start = -1.0 + eps0
    x2_end = -delta / math.sqrt(2.0)
    y = np.array([1.0, 1.0, 0.0])
    t, h = x2_start, 1e-8
    k1 = rhs(t, y)
    while t < x2_end:
        st, ts_, ys_, _, _, _, h, k1 = dopri5_window_callable(
            rhs, t, y, h, k1, x2_end, 1e-10, 1e-13, 200_000,
            np.zeros(3), 0.0, np.ones(3), 1e-17,
        )
        if len(ts_) == 0 or st not in (0, 5):
            raise MelnikovError("branch-route integration stalled")
        t, y = float(ts_[-1]), ys_[-1]
        if st == 0:
            break
    return float(y[2])


# -- limit-cycle detection ---------------------------------------------------------------


@dataclass(frozen=True)
class Section:
    """Half line ``{anchor + r * direction : r > 0}`` used as a Poincare section."""

    anchor: tuple[float, float]
    direction: tuple[float, float]

    def unit(self) -> np.ndarray:
        d = np.asarray(self.direction, dtype=float)
        return d / np.linalg.norm(d)

    def normal(self) -> np.ndarray:
        d = self.unit()
        return np.array([-d[1], d[0]])

    def point_at(self, r: float) -> np.ndarray:
        return np.asarray(self.anchor, dtype=float) + r * self.unit()

    def radial(self, x: np.ndarray) -> float:
        return float((np.asarray(x) - np.asarray(self.anchor)) @ self.unit())


@dataclass
class LimitCycle:
    period: float
    point: np.ndarray
    multiplier: float
    radial_coordinate: float


@dataclass
class CycleSearchOutcome:
    """Result of the return-map search: a cycle, or none with the reason."""

    cycle: LimitCycle | None
    degenerate: bool
    returns_used: int
    reason: str


def _return_map(
    sys: PolySystem,
    section: Section,
    r: float,
    t_horizon: float,
    rtol: float,
    atol: float,
    backend: str | None,
) -> tuple[float, float] | None:
    """One Poincare return: radial coordinate and flight time, or None."""
    anchor = np.asarray(section.anchor, dtype=float)
    w = section.normal()
    ev = PlaneEvent(
        normal=tuple(w),
        offset=float(w @ anchor),
        direction=0,
        terminal=True,
        guard=lambda x: section.radial(x) > 1e-9,
        min_time=1e-6,
    )
    x0 = section.point_at(r)
    rec = integrate(
        sys, x0, (0.0, t_horizon), rtol, atol,
        plane_event=ev, backend=backend,
    )
    if rec.status != "plane_event":
        return None
    t_star, x_star = rec.events[-1]
    return section.radial(x_star), float(t_star)


def detect_limit_cycle(
    sys: PolySystem,
    section: Section,
    seed: float,
    *,
    max_returns: int = 50,
    t_horizon: float = 400.0,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    fixed_point_tol: float = 1e-9,
    backend: str | None = None,
) -> CycleSearchOutcome:
    """Find a fixed point of the Poincare return map on a half-line section.

    Iterates the return map from ``seed``; a sign change of ``R(r) - r``
    between consecutive iterates is refined by bisection.  The stability
    multiplier is the finite-difference slope of the map at the fixed point
    (``|slope| < 1`` means a stable cycle).  The search is bounded by
    ``max_returns`` section returns in total; an identity return map is
    flagged degenerate (a center, not an isolated cycle).
    """
    if sys.n_vars != 2:
        raise UnsupportedDimensionError("limit-cycle detection is planar only")

    returns_used = 0

    def rmap(r: float) -> tuple[float, float] | None:
        nonlocal returns_used
        returns_used += 1
        return _return_map(sys, section, r, t_horizon, rtol, atol, backend)

    def tol_at(r: float) -> float:
        return fixed_point_tol * max(1.0, abs(r))

    # iterate the map, watching for convergence, escape, or a bracket
    r = float(seed)
    prev: tuple[float, float] | None = None  # (r, R(r) - r)
    r_star = None
    t_star = None
    while returns_used < max_returns:
        out = rmap(r)
        if out is None:
            return CycleSearchOutcome(
                cycle=None,
                degenerate=False,
                returns_used=returns_used,
                reason=f"orbit from r={r:.6g} did not return to the section",
            )
        r_next, t_flight = out
        g = r_next - r
        if abs(g) < tol_at(r):
            r_star, t_star = r_next, t_flight
            break
        if prev is not None and prev[1] * g < 0.0:
            # the map crossed the diagonal: refine by bisection on R(r) - r
            lo, g_lo = prev
            hi, g_hi = r, g
            r_star, t_star = r, t_flight
            while returns_used < max_returns and abs(hi - lo) > tol_at(lo):
                mid = 0.5 * (lo + hi)
                out_mid = rmap(mid)
                if out_mid is None:
                    return CycleSearchOutcome(
                        cycle=None,
                        degenerate=False,
                        returns_used=returns_used,
                        reason="orbit escaped during bisection",
                    )
                g_mid = out_mid[0] - mid
                r_star, t_star = mid, out_mid[1]
                if g_lo * g_mid <= 0.0:
                    hi, g_hi = mid, g_mid
                else:
                    lo, g_lo = mid, g_mid
            break
        prev = (r, g)
        r = r_next
    if r_star is None:
        return CycleSearchOutcome(
            cycle=None,
            degenerate=False,
            returns_used=returns_used,
            reason="return budget exhausted before the map settled",
        )

    # distinguish an isolated fixed point from an identity map (a center has
    # R(r) = r for every r, so a nearby off-fixed-point probe stays fixed too)
    probe_off = max(0.05 * max(0.1, abs(r_star)), 10.0 * tol_at(r_star))
    probe_r = r_star - probe_off
    probe = rmap(probe_r) if returns_used < max_returns else None
    if probe is not None and abs(probe[0] - probe_r) < tol_at(probe_r):
        return CycleSearchOutcome(
            cycle=None,
            degenerate=True,
            returns_used=returns_used,
            reason="return map is the identity to tolerance (center, no isolated cycle)",
        )

    # stability multiplier from the finite-difference slope of the map
    dr = 1e-4 * max(1.0, abs(r_star))
    lo_out = rmap(r_star - dr)
    hi_out = rmap(r_star + dr)
    if lo_out is None or hi_out is None:
        return CycleSearchOutcome(
            cycle=None,
            degenerate=False,
            returns_used=returns_used,
            reason="orbit escaped while estimating the multiplier",
        )
    multiplier = (hi_out[0] - lo_out[0]) / (2.0 * dr)
    cycle = LimitCycle(
        period=t_star,
        point=section.point_at(r_star),
        multiplier=float(multiplier),
        radial_coordinate=float(r_star),
    )
    return CycleSearchOutcome(
        cycle=cycle, degenerate=False, returns_used=returns_used, reason="converged"
    )


# -- homoclinic bifurcation audit -----------------------------------------------------------


@dataclass
class AndronovLeontovichReport:
    """The four hypothesis checks at the bifurcation point, plus the verdict."""

    a: float
    saddle_eigenvalues: tuple[float, float]
    saddle_ok: bool
    homoclinic_ok: bool
    h_drift_max: float
    sigma0: float
    sigma0_ok: bool
    melnikov_value: float | None
    melnikov_ok: bool
    tag: str
    loop_steps: int
    cycle_probe: dict | None = None

    @property
    def all_hold(self) -> bool:
        return self.saddle_ok and self.homoclinic_ok and self.sigma0_ok and self.melnikov_ok


def andronov_leontovich_audit(
    a: float,
    alpha_probe: float | None = None,
    *,
    backend: str | None = None,
) -> AndronovLeontovichReport:
    """Verify the homoclinic bifurcation hypotheses for the base system.

    Checks (i) the saddle eigenvalue signs at the origin, (ii) homoclinic
    loop closure by conservation-checked tracking, (iii) the nonzero saddle
    quantity ``2a``, (iv) the nonzero Melnikov integral; tags the
    bifurcation supercritical when the saddle quantity is negative.  With
    ``alpha_probe`` given, additionally probes which perturbation sign
    produces the interior stable cycle (one return-map search per sign).
    """
    if not a * a < 1.0:
        raise ValueError("the construction needs a^2 < 1")
    sys = base_system(a)
    jac = sys.jacobian_at([0.0, 0.0])
    eigs = eigenvalues_via_charpoly(jac)
    lam1, lam2 = float(eigs[0].real), float(eigs[-1].real)
    saddle_ok = (
        all(abs(z.imag) < 1e-12 for z in eigs) and lam1 < 0.0 < lam2
    )

    sigma0 = 2.0 * a
    sigma0_ok = sigma0 != 0.0

    melnikov_value = None
    melnikov_ok = False
    homoclinic_ok = False
    drift = math.inf
    loop_steps = 0
    try:
        mel = melnikov_at_zero(a, backend=backend)
        melnikov_value = mel.value
        melnikov_ok = mel.value != 0.0 and abs(mel.value) > 10.0 * mel.estimated_error
        homoclinic_ok = True
        drift = mel.h_drift_max
        loop_steps = len(mel.phi_samples)
    except (LoopTrackingError, MelnikovError):
        pass

    if not (saddle_ok and sigma0_ok):
        tag = "degenerate"
    else:
        tag = "supercritical" if sigma0 < 0.0 else "subcritical"

    probe = None
    if alpha_probe is not None:
        probe = {}
        spiral = fixed_points_closed_form(a)[1][0]
        bottom = np.array([0.0, -1.0])
        direction = bottom - np.asarray(spiral)
        direction = direction / np.linalg.norm(direction)
        dist = float(np.linalg.norm(bottom - np.asarray(spiral)))
        for sign in (+1.0, -1.0):
            alpha = sign * abs(alpha_probe)
            outcome = detect_limit_cycle(
                perturbed_system(a, alpha),
                Section(anchor=tuple(spiral), direction=tuple(direction)),
                seed=0.7 * dist,
                backend=backend,
            )
            probe[alpha] = outcome.cycle is not None
    return AndronovLeontovichReport(
        a=a,
        saddle_eigenvalues=(lam1, lam2),
        saddle_ok=saddle_ok,
        homoclinic_ok=homoclinic_ok,
        h_drift_max=drift,
        sigma0=sigma0,
        sigma0_ok=sigma0_ok,
        melnikov_value=melnikov_value,
        melnikov_ok=melnikov_ok,
        tag=tag,
        loop_steps=loop_steps,
        cycle_probe=probe,
    )


# -- Dulac no-limit-cycle test -----------------------------------------------------------


@dataclass
class DulacReport:
    """Outcome of the planar bimolecular no-limit-cycle test.

    The verdict is ``no_limit_cycles`` only when the hypotheses hold (own
    quadratic coefficients nonpositive, system nonnegative); the grid
    minimum of the transformed divergence is a consistency check on top of
    the hypotheses, not the proof itself.
    """

    hypotheses_hold: bool
    dbar_min_sampled: float
    verdict: str
    reason: str
    k11_1: float
    k22_2: float
    nonnegative_verdict: str

    def to_json_dict(self) -> dict:
        return {
            "hypotheses_hold": self.hypotheses_hold,
            "dbar_min_sampled": self.dbar_min_sampled,
            "verdict": self.verdict,
            "reason": self.reason,
            "k11_1": self.k11_1,
            "k22_2": self.k22_2,
            "nonnegative_verdict": self.nonnegative_verdict,
        }


def dulac_no_limit_cycle_test(
    sys: PolySystem, *, grid_points: int = 100
) -> DulacReport:
    """No-limit-cycle test for planar quadratic systems.

    Uses the multiplier ``1 / (x1 x2)``: when the ``x1^2`` coefficient of the
    first equation and the ``x2^2`` coefficient of the second are
    nonpositive and the system is nonnegative, the scaled divergence
    ``Dbar = x2 [P1(0, x2) - k11_1 x1^2] + x1 [P2(x1, 0) - k22_2 x2^2]``
    is nonnegative on the open positive quadrant and periodic orbits are
    excluded.  ``Dbar`` is formed symbolically and sampled on a
    ``grid_points x grid_points`` log-spaced positive grid.
    """
    if sys.n_vars != 2:
        return DulacReport(
            False, math.nan, "inapplicable", "not a planar system",
            math.nan, math.nan, "unchecked",
        )
    if sys.degree > 2:
        return DulacReport(
            False, math.nan, "inapplicable",
            f"degree {sys.degree} exceeds 2 (bimolecular only)",
            math.nan, math.nan, "unchecked",
        )
    k11_1 = sys.equations[0].coefficient((2, 0))
    k22_2 = sys.equations[1].coefficient((0, 2))
    verdict_nn, _ = check_cross_negative_effect(sys)

    reasons = []
    if k11_1 > 0.0:
        reasons.append(f"k11_1 = {k11_1:g} > 0")
    if k22_2 > 0.0:
        reasons.append(f"k22_2 = {k22_2:g} > 0")
    if verdict_nn != "nonnegative":
        reasons.append(f"system is {verdict_nn}, not nonnegative")
    hypotheses = not reasons

    variables = sys.variables
    p1_face = Polynomial(
        variables,
        [(m.coeff, m.exponents) for m in sys.equations[0].terms if m.exponents[0] == 0],
    )
    p2_face = Polynomial(
        variables,
        [(m.coeff, m.exponents) for m in sys.equations[1].terms if m.exponents[1] == 0],
    )
    quad1 = Polynomial(variables, [(k11_1, (2, 0))])
    quad2 = Polynomial(variables, [(k22_2, (0, 2))])
    dbar = (p1_face - quad1).multiply_by_variable(1) + (
        p2_face - quad2
    ).multiply_by_variable(0)

    axis = np.geomspace(1e-3, 1e3, grid_points)
    g1, g2 = np.meshgrid(axis, axis, indexing="ij")
    pts = np.stack([g1.ravel(), g2.ravel()], axis=1)
    dbar_min = float(np.min(dbar.evaluate_many(pts)))

    if not hypotheses:
        return DulacReport(
            False, dbar_min, "inapplicable", "; ".join(reasons),
            k11_1, k22_2, verdict_nn,
        )
    if dbar_min < -1e-12:
        return DulacReport(
            True, dbar_min, "inapplicable",
            f"sampled Dbar minimum {dbar_min:.3e} contradicts the hypotheses",
            k11_1, k22_2, verdict_nn,
        )
    return DulacReport(
        True, dbar_min, "no_limit_cycles", "hypotheses verified",
        k11_1, k22_2, verdict_nn,
    )


# -- QSSA convergence -------------------------------------------------------------------


@dataclass
class QssaConvergenceReport:
    entries: list[tuple[float, float]]  # (mu, sup-norm error)
    monotone: bool
    t_end: float
    x0: tuple[float, float]

    def to_json_dict(self) -> dict:
        return {
            "entries": [{"mu": mu, "sup_error": err} for mu, err in self.entries],
            "monotone": self.monotone,
            "t_end": self.t_end,
            "x0": list(self.x0),
        }


def qssa_convergence_test(
    params: CaseStudyParams,
    mus: Sequence[float] = (1e-2, 1e-3, 1e-4),
    *,
    t_end: float = 10.0,
    x0: Sequence[float] | None = None,
    y_scale: float = 1.0,
    n_samples: int = 2001,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    backend: str | None = None,
) -> QssaConvergenceReport:
    """Sup-norm gap between the embedded total system and its planar limit.

    Integrates the 4-variable quasi-steady-state system at each ``mu`` and
    the translated planar system from matched initial conditions; reports
    ``sup_{t in [0, t_end]} |x_total(t) - x_planar(t)|`` on a shared sample
    grid.  Adjoined variables start on the slow manifold
    (``y_s = omega_s / x_s(0)``) scaled by ``y_scale`` (1 = on-manifold).
    """
    degenerate = build_variant(params, "translated").system
    if x0 is None:
        x0 = (params.t1 + 0.01, params.t2 - 0.9 + 0.01)
    x0 = np.asarray(x0, dtype=float)

    rec_deg = integrate(degenerate, x0, (0.0, t_end), rtol, atol, dense=True, backend=backend)
    if rec_deg.status != "reached_end":
        raise StiffnessError(0.0, f"planar reference run failed ({rec_deg.status})")
    grid = np.linspace(0.0, t_end, n_samples)
    ref = rec_deg.sol(grid)

    entries = []
    for mu in mus:
        p_mu = params.with_(mu=float(mu))
        total = build_variant(p_mu, "qssa").system
        y0 = np.array(
            [
                x0[0],
                x0[1],
                p_mu.omega1 / x0[0] * y_scale,
                p_mu.omega2 / x0[1] * y_scale,
            ]
        )
        rec = integrate(
            total, y0, (0.0, t_end), rtol, atol,
            dense=True, backend=backend, stiff_fallback=True,
        )
        if rec.status != "reached_end":
            raise StiffnessError(mu, f"total-system run failed ({rec.status})")
        if rec.used_fallback:
            vals = _interp_linear(rec.t, rec.y[:, :2], grid)
        else:
            vals = rec.sol(grid)[:, :2]
        err = float(np.max(np.abs(vals - ref[:, :2])))
        entries.append((float(mu), err))

    order = sorted(entries, key=lambda e: -e[0])
    monotone = all(a[1] > b[1] for a, b in zip(order, order[1:]))
    return QssaConvergenceReport(
        entries=entries, monotone=monotone, t_end=t_end, x0=(float(x0[0]), float(x0[1]))
    )


def _interp_linear(ts: np.ndarray, ys: np.ndarray, grid: np.ndarray) -> np.ndarray:
    out = np.empty((len(grid), ys.shape[1]))
    for j in range(ys.shape[1]):
        out[:, j] = np.interp(grid, ts, ys[:, j])
    return out
