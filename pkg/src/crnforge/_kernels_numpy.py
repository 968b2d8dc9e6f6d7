"""Pure-numpy integrator kernels: the fallback path.

Same Dormand-Prince scheme as :mod:`crnforge._kernels_numba`, with the term
sum vectorized over monomials and a Python step loop.  Selected by
``CRNFORGE_BACKEND=numpy`` (or automatically when numba is unavailable).
"""

from __future__ import annotations

import numpy as np

from . import _tableau as tb


def rhs(coeffs, expos, eq_idx, n_eqs, x):
    """Mass-action style polynomial right-hand side, vectorized over terms."""
    if coeffs.shape[0] == 0:
        return np.zeros(n_eqs)
    vals = coeffs * (x[None, :] ** expos).prod(axis=1)
    return np.bincount(eq_idx, weights=vals, minlength=n_eqs)


def dopri5_window(
    coeffs,
    expos,
    eq_idx,
    t0,
    y0,
    h0,
    k1_0,
    t_end,
    rtol,
    atol,
    max_steps,
    ball_center,
    ball_radius,
    ball_weights,
    hmin,
):
    """Advance up to ``max_steps`` accepted steps toward ``t_end``.

    Returns ``(status, ts, ys, Ks, errs, n_rejected, h_next, k1_next)``
    where row ``i`` of the outputs describes accepted step ``i`` (state and
    stage slopes at its endpoint).  ``k1_0`` must hold the slope at
    ``(t0, y0)`` (FSAL chaining across windows).  The ball event fires when
    the weighted distance ``sqrt(sum w_j (y_j - c_j)^2)`` drops to
    ``ball_radius`` (weights select a subspace, e.g. ignoring augmented
    quadrature states).
    """
    n = y0.shape[0]
    direction = 1.0 if t_end >= t0 else -1.0
    ts = np.empty(max_steps)
    ys = np.empty((max_steps, n))
    ks = np.empty((max_steps, 7, n))
    errs = np.empty(max_steps)

    t, y, h, k1 = t0, y0.copy(), h0, k1_0.copy()
    n_acc = 0
    n_rej = 0
    status = tb.STATUS_WINDOW_FULL
    k = np.empty((7, n))

    while n_acc < max_steps:
        if direction * (t_end - t) <= 0.0:
            status = tb.STATUS_REACHED_END
            break
        if abs(h) < hmin:
            status = tb.STATUS_UNDERFLOW
            break
        if direction * (t + h - t_end) > 0.0:
            h = t_end - t

        k[0] = k1
        for i in range(1, 7):
            yi = y + h * (tb.A[i, :i] @ k[:i])
            k[i] = rhs(coeffs, expos, eq_idx, n, yi)
        y_new = y + h * (tb.B @ k)
        # FSAL: stage 7 was evaluated at (t + h, y_new) because A[6] == B
        err_vec = h * (tb.E @ k)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))

        if err <= 1.0:
            t = t + h
            ts[n_acc] = t
            ys[n_acc] = y_new
            ks[n_acc] = k
            errs[n_acc] = err
            n_acc += 1
            y = y_new
            k1 = k[6].copy()
            factor = tb.MAX_FACTOR if err == 0.0 else min(
                tb.MAX_FACTOR, max(tb.MIN_FACTOR, tb.SAFETY * err ** -0.2)
            )
            h = h * factor
            if np.max(np.abs(y)) > tb.DIVERGENCE_NORM:
                status = tb.STATUS_DIVERGED
                break
            if ball_radius > 0.0:
                d = np.sqrt(np.sum(ball_weights * (y - ball_center) ** 2))
                if d <= ball_radius:
                    status = tb.STATUS_BALL_EVENT
                    break
            if direction * (t_end - t) <= 0.0:
                status = tb.STATUS_REACHED_END
                break
        else:
            n_rej += 1
            h = h * min(1.0, max(tb.MIN_FACTOR, tb.SAFETY * err ** -0.2))

    return (
        status,
        ts[:n_acc],
        ys[:n_acc],
        ks[:n_acc],
        errs[:n_acc],
        n_rej,
        h,
        k1,
    )


def dopri5_window_callable(
    f,
    t0,
    y0,
    h0,
    k1_0,
    t_end,
    rtol,
    atol,
    max_steps,
    ball_center,
    ball_radius,
    ball_weights,
    hmin,
):
    """Same stepper for an arbitrary Python right-hand side ``f(t, y)``.

    Used for the non-polynomial auxiliary integrations (e.g. quadrature in a
    curve parametrization); always runs the numpy path.
    """
    n = y0.shape[0]
    direction = 1.0 if t_end >= t0 else -1.0
    ts = np.empty(max_steps)
    ys = np.empty((max_steps, n))
    ks = np.empty((max_steps, 7, n))
    errs = np.empty(max_steps)

    t, y, h, k1 = t0, y0.copy(), h0, k1_0.copy()
    n_acc = 0
    n_rej = 0
    status = tb.STATUS_WINDOW_FULL
    k = np.empty((7, n))

    while n_acc < max_steps:
        if direction * (t_end - t) <= 0.0:
            status = tb.STATUS_REACHED_END
            break
        if abs(h) < hmin:
            status = tb.STATUS_UNDERFLOW
            break
        if direction * (t + h - t_end) > 0.0:
            h = t_end - t

        k[0] = k1
        for i in range(1, 7):
            yi = y + h * (tb.A[i, :i] @ k[:i])
            k[i] = f(t + tb.C[i] * h, yi)
        y_new = y + h * (tb.B @ k)
        err_vec = h * (tb.E @ k)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))

        if err <= 1.0:
            t = t + h
            ts[n_acc] = t
            ys[n_acc] = y_new
            ks[n_acc] = k
            errs[n_acc] = err
            n_acc += 1
            y = y_new
            k1 = k[6].copy()
            factor = tb.MAX_FACTOR if err == 0.0 else min(
                tb.MAX_FACTOR, max(tb.MIN_FACTOR, tb.SAFETY * err ** -0.2)
            )
            h = h * factor
            if np.max(np.abs(y)) > tb.DIVERGENCE_NORM:
                status = tb.STATUS_DIVERGED
                break
            if ball_radius > 0.0:
                d = np.sqrt(np.sum(ball_weights * (y - ball_center) ** 2))
                if d <= ball_radius:
                    status = tb.STATUS_BALL_EVENT
                    break
            if direction * (t_end - t) <= 0.0:
                status = tb.STATUS_REACHED_END
                break
        else:
            n_rej += 1
            h = h * min(1.0, max(tb.MIN_FACTOR, tb.SAFETY * err ** -0.2))

    return (
        status,
        ts[:n_acc],
        ys[:n_acc],
        ks[:n_acc],
        errs[:n_acc],
        n_rej,
        h,
        k1,
    )
