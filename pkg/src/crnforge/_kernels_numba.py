"""Numba-compiled integrator kernels: the hot path.

Scalar-loop mirror of :mod:`crnforge._kernels_numpy`; same tableau, same
status codes, same window contract.  Import only when numba is available
(see :mod:`crnforge.backend`).
"""

from __future__ import annotations

import numpy as np
from numba import njit

from . import _tableau as tb

_A = tb.A
_B = tb.B
_E = tb.E
_SAFETY = tb.SAFETY
_MIN_FACTOR = tb.MIN_FACTOR
_MAX_FACTOR = tb.MAX_FACTOR
_DIVERGENCE_NORM = tb.DIVERGENCE_NORM


@njit(cache=True)
def rhs(coeffs, expos, eq_idx, x, out):
    out[:] = 0.0
    for term in range(coeffs.shape[0]):
        v = coeffs[term]
        for j in range(x.shape[0]):
            e = expos[term, j]
            xj = x[j]
            for _ in range(e):
                v *= xj
        out[eq_idx[term]] += v
    return out


@njit(cache=True)
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
    n = y0.shape[0]
    direction = 1.0 if t_end >= t0 else -1.0
    ts = np.empty(max_steps)
    ys = np.empty((max_steps, n))
    ks = np.empty((max_steps, 7, n))
    errs = np.empty(max_steps)

    t = t0
    y = y0.copy()
    h = h0
    k1 = k1_0.copy()
    n_acc = 0
    n_rej = 0
    status = 5  # window full

    k = np.empty((7, n))
    yi = np.empty(n)
    y_new = np.empty(n)

    while n_acc < max_steps:
        if direction * (t_end - t) <= 0.0:
            status = 0
            break
        if abs(h) < hmin:
            status = 4
            break
        if direction * (t + h - t_end) > 0.0:
            h = t_end - t

        for j in range(n):
            k[0, j] = k1[j]
        for i in range(1, 7):
            for j in range(n):
                acc = 0.0
                for m in range(i):
                    acc += _A[i, m] * k[m, j]
                yi[j] = y[j] + h * acc
            rhs(coeffs, expos, eq_idx, yi, k[i])

        err = 0.0
        for j in range(n):
            acc_b = 0.0
            acc_e = 0.0
            for m in range(7):
                acc_b += _B[m] * k[m, j]
                acc_e += _E[m] * k[m, j]
            y_new[j] = y[j] + h * acc_b
            scale = atol + rtol * max(abs(y[j]), abs(y_new[j]))
            r = h * acc_e / scale
            err += r * r
        err = np.sqrt(err / n)

        if err <= 1.0:
            t = t + h
            ts[n_acc] = t
            for j in range(n):
                ys[n_acc, j] = y_new[j]
                for m in range(7):
                    ks[n_acc, m, j] = k[m, j]
            errs[n_acc] = err
            n_acc += 1
            for j in range(n):
                y[j] = y_new[j]
                k1[j] = k[6, j]
            if err == 0.0:
                factor = _MAX_FACTOR
            else:
                factor = _SAFETY * err**-0.2
                if factor > _MAX_FACTOR:
                    factor = _MAX_FACTOR
                elif factor < _MIN_FACTOR:
                    factor = _MIN_FACTOR
            h = h * factor

            maxabs = 0.0
            for j in range(n):
                if abs(y[j]) > maxabs:
                    maxabs = abs(y[j])
            if maxabs > _DIVERGENCE_NORM:
                status = 3
                break
            if ball_radius > 0.0:
                d2 = 0.0
                for j in range(n):
                    d = y[j] - ball_center[j]
                    d2 += ball_weights[j] * d * d
                if np.sqrt(d2) <= ball_radius:
                    status = 1
                    break
            if direction * (t_end - t) <= 0.0:
                status = 0
                break
        else:
            n_rej += 1
            factor = _SAFETY * err**-0.2
            if factor > 1.0:
                factor = 1.0
            elif factor < _MIN_FACTOR:
                factor = _MIN_FACTOR
            h = h * factor

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
