"""crnforge: construct and verify mass-action reaction systems with prescribed dynamics.

The pipeline, bottom to top:

* :mod:`crnforge.poly`       -- sparse polynomial vector fields (the common currency)
* :mod:`crnforge.classify`   -- kinetic / nonnegative / x-factorable verdicts
* :mod:`crnforge.crn`        -- reaction networks, mass-action induction, canonical networks
* :mod:`crnforge.transform`  -- kinetic transformations (affine, x-factorable, QSSA)
* :mod:`crnforge.homoclinic` -- the homoclinic-bifurcation case-study constructions
* :mod:`crnforge.dynamics`   -- integration, fixed points, Melnikov, cycle detection
* :mod:`crnforge.cli`        -- command-line surface tying it all together
"""

from .backend import NUMBA_ENABLED, backend_name
from .poly import AffineMap, Monomial, Polynomial, PolySystem, substitute_affine

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "Monomial",
    "NUMBA_ENABLED",
    "Polynomial",
    "PolySystem",
    "backend_name",
    "substitute_affine",
    "__version__",
]
