"""Shared fixtures.

Phase curves dominate the suite's runtime, so anything reused across
test files is built once per session here.
"""

import numpy as np
import pytest

from levdens import (build_phase_curve, make_delta, make_poschl_teller,
                     make_sech_well, make_square_well)

# coarse-but-honest grid for tests that only need curve plumbing
CURVE_KW = dict(k_min=1e-3, k_max=30.0, n_k=200)


@pytest.fixture(scope="session")
def pt1():
    return make_poschl_teller(1)


@pytest.fixture(scope="session")
def pt2():
    return make_poschl_teller(2)


@pytest.fixture(scope="session")
def delta_attractive():
    return make_delta(-2.0)


@pytest.fixture(scope="session")
def sqw():
    return make_square_well(-1.0, 1.0)


@pytest.fixture(scope="session")
def sech_critical():
    return make_sech_well(2.0)


@pytest.fixture(scope="session")
def pt1_curve(pt1):
    return build_phase_curve(pt1, np.geomspace(1e-3, 50.0, 300))


@pytest.fixture(scope="session")
def delta_curve(delta_attractive):
    return build_phase_curve(delta_attractive,
                             np.geomspace(1e-3, 50.0, 300))


@pytest.fixture(scope="session")
def sqw_curve(sqw):
    return build_phase_curve(sqw, np.geomspace(**_geom(CURVE_KW)))


def _geom(kw):
    return dict(start=kw["k_min"], stop=kw["k_max"], num=kw["n_k"])
