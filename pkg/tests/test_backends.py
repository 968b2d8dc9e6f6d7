"""Numba and numpy integrator paths agree and honor the selection flag."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from crnforge.backend import NUMBA_ENABLED, backend_name, get_stepper
from crnforge.dynamics import integrate
from crnforge.homoclinic import CaseStudyParams, build_variant
from crnforge.poly import Polynomial, PolySystem

numba_required = pytest.mark.skipif(not NUMBA_ENABLED, reason="numba not available")


def decay():
    v = ("x",)
    return PolySystem(v, [Polynomial(v, [(-1.0, (1,))])])


def test_numpy_path_always_available():
    rec = integrate(decay(), [1.0], (0.0, 1.0), backend="numpy")
    assert abs(rec.final_state[0] - math.exp(-1.0)) < 1e-9


@numba_required
def test_backends_agree_on_linear_problem():
    a = integrate(decay(), [1.0], (0.0, 1.0), backend="numpy")
    b = integrate(decay(), [1.0], (0.0, 1.0), backend="numba")
    assert abs(a.final_state[0] - b.final_state[0]) < 1e-12
    assert a.n_accepted == b.n_accepted


@numba_required
def test_backends_agree_on_case_study(oracle_params):
    sys_ = build_variant(oracle_params, "xfact").system
    x0 = [0.9, 0.6]
    a = integrate(sys_, x0, (0.0, 20.0), 1e-10, 1e-13, backend="numpy")
    b = integrate(sys_, x0, (0.0, 20.0), 1e-10, 1e-13, backend="numba")
    # same scheme, different summation order: agreement to integration accuracy
    assert np.max(np.abs(a.final_state - b.final_state)) < 1e-7


@numba_required
def test_backends_agree_on_stiff_qssa(oracle_params):
    sys_ = build_variant(oracle_params.with_(mu=1e-3), "qssa").system
    x0 = [1.01, 0.61, 1.0 / 1.01, 1.0 / 0.61]
    a = integrate(sys_, x0, (0.0, 2.0), 1e-8, 1e-10, backend="numpy")
    b = integrate(sys_, x0, (0.0, 2.0), 1e-8, 1e-10, backend="numba")
    assert np.max(np.abs(a.final_state - b.final_state)) < 1e-5


def test_get_stepper_rejects_unknown():
    with pytest.raises(ValueError):
        get_stepper("fortran")


def test_env_flag_selects_numpy():
    code = (
        "import crnforge.backend as b; print(b.backend_name())"
    )
    env = dict(os.environ, CRNFORGE_BACKEND="numpy")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.stdout.strip() == "numpy"


def test_env_flag_rejects_garbage():
    code = "import crnforge.backend"
    env = dict(os.environ, CRNFORGE_BACKEND="cuda")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.returncode != 0
    assert "CRNFORGE_BACKEND" in out.stderr


def test_backend_name_reports_active():
    assert backend_name() in ("numba", "numpy")
