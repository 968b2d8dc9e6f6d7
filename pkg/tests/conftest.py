import numpy as np
import pytest

from crnforge.homoclinic import CaseStudyParams
from crnforge.poly import Polynomial, PolySystem

VARS2 = ("x1", "x2")


@pytest.fixture
def oracle_params():
    """The reference parameter point used throughout the case study."""
    return CaseStudyParams(a=-0.8, alpha=0.0, t1=1.0, t2=1.5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_system(equations_terms, variables=VARS2, **meta):
    """Build a PolySystem from a list of term lists [(coeff, exponents), ...]."""
    eqs = [Polynomial(variables, terms) for terms in equations_terms]
    return PolySystem(variables, eqs, meta or None)
