"""Dormand-Prince 5(4) coefficients, shared by both integrator backends.

``B`` propagates the 5th-order solution, ``E`` is the embedded error weight
vector (b5 - b4), and ``D`` the dense-output weights of the standard 4th-order
interpolant.  The scheme is FSAL: stage 7 equals stage 1 of the next step.
"""

from __future__ import annotations

import numpy as np

C = np.array([0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0])

A = np.zeros((7, 7))
A[1, 0] = 1.0 / 5.0
A[2, :2] = [3.0 / 40.0, 9.0 / 40.0]
A[3, :3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0]
A[4, :4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0]
A[5, :5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
]
A[6, :6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
]

B = A[6].copy()

E = np.array(
    [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ]
)

D = np.array(
    [
        -12715105075.0 / 11282082432.0,
        0.0,
        87487479700.0 / 32700410799.0,
        -10690763975.0 / 1880347072.0,
        701980252875.0 / 199316789632.0,
        -1453857185.0 / 822651844.0,
        69997945.0 / 29380423.0,
    ]
)

#: Step-size controller limits.
SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0

#: Integration aborts when the state infinity-norm exceeds this.
DIVERGENCE_NORM = 1e12

#: Window-stepper status codes.
STATUS_REACHED_END = 0
STATUS_BALL_EVENT = 1
STATUS_DIVERGED = 3
STATUS_UNDERFLOW = 4
STATUS_WINDOW_FULL = 5
