import numpy as np
import pytest

from bishopdiscs.config import PipelineConfig
from bishopdiscs.conformal import riemann_map
from bishopdiscs.curve import SliceData, SliceParams, quadric_slice, trace_level_curve
from bishopdiscs.normal_form import ManifoldSpec
from bishopdiscs.series import BidegreeSeries, ParamPoly, quadric_series
from bishopdiscs.solver import solve_slice

# r sweep used by the decay-rate experiments
RATE_R_LIST = (0.02, 0.03, 0.045, 0.068, 0.1)


def perturbed_slice(lam, cubic=0.1, max_degree=10):
    """Slice data for q + cubic * Re z^3 (parameter-free)."""
    qp = quadric_series(float(lam), nvars=0, max_degree=max_degree).to_matrix()
    qp[3, 0] += cubic / 2.0
    qp[0, 3] += cubic / 2.0
    k = np.zeros_like(qp)
    return SliceData.from_matrices(lam, qp, k)


def make_spec(lam=0.2, cubic=0.0, k7=0.05, n=2, max_degree=10, radius=0.2):
    """Manifold with constant coefficients: P = cubic Re z^3, K = k7 Re z^7."""
    nvars = 2 * (n - 1)
    p_vals = {(3, 0): cubic / 2.0, (0, 3): cubic / 2.0} if cubic else {}
    k_vals = {(7, 0): k7 / 2.0, (0, 7): k7 / 2.0} if k7 else {}
    return ManifoldSpec(
        n=n, l=7,
        lam=ParamPoly.const(lam, nvars, 2),
        p=BidegreeSeries.from_complex_dict(p_vals, nvars, max_degree),
        k=BidegreeSeries.from_complex_dict(k_vals, nvars, max_degree),
        validity_radius=radius)


@pytest.fixture(scope="session")
def ellipse_map():
    """Normalized map for the lam = 0.25 quadric slice at r = 0.1."""
    curve = trace_level_curve(quadric_slice(0.25), SliceParams((0.0, 0.0), 0.1))
    return riemann_map(curve)


@pytest.fixture(scope="session")
def config():
    return PipelineConfig()


@pytest.fixture(scope="session")
def rate_family():
    """Tightly solved slices of the order-7 family over the rate r list."""
    spec = make_spec(lam=0.2, cubic=0.0, k7=0.05)
    x0 = (0.0, 0.0)
    return {r: solve_slice(spec, SliceParams(x0, r), tol=1e-22)
            for r in RATE_R_LIST}
