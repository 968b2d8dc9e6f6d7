"""Numerical backend selection: numba kernels vs pure-numpy fallback.

The hot inner loops (polynomial right-hand-side evaluation and the adaptive
Runge-Kutta stepper) exist in two interchangeable implementations:

* ``crnforge._kernels_numba`` -- scalar loops compiled with ``@njit``;
* ``crnforge._kernels_numpy`` -- the same algorithm with vectorized numpy
  term evaluation and a Python step loop.

The environment variable ``CRNFORGE_BACKEND`` picks one:

* ``auto`` (default) -- numba when importable, numpy otherwise;
* ``numba``          -- require numba, fail loudly if missing;
* ``numpy``          -- force the fallback (useful for debugging and for the
  ``benchmarks/bench_backends.py`` comparison).

Both paths run the same Dormand-Prince scheme with the same tableau, so
results agree to integration tolerance; they are not bitwise identical
because summation orders differ.
"""

from __future__ import annotations

import os

_VALID = ("auto", "numba", "numpy")


def _resolve(choice: str) -> bool:
    if choice not in _VALID:
        raise ValueError(
            f"CRNFORGE_BACKEND must be one of {_VALID}, got {choice!r}"
        )
    if choice == "numpy":
        return False
    if choice == "numba":
        import numba  # noqa: F401  -- fail loudly if forced but missing

        return True
    try:
        import numba  # noqa: F401

        return True
    except ImportError:
        return False


NUMBA_ENABLED: bool = _resolve(os.environ.get("CRNFORGE_BACKEND", "auto").strip().lower())


def backend_name() -> str:
    """Name of the active backend, ``"numba"`` or ``"numpy"``."""
    return "numba" if NUMBA_ENABLED else "numpy"


def get_stepper(force: str | None = None):
    """Return the window-stepper function of the requested backend.

    ``force`` overrides the module-level selection ("numba" or "numpy");
    passing ``None`` uses the environment-selected backend.
    """
    use_numba = NUMBA_ENABLED if force is None else _resolve(force)
    if use_numba:
        from . import _kernels_numba

        return _kernels_numba.dopri5_window
    from . import _kernels_numpy

    return _kernels_numpy.dopri5_window
