"""Tracing of the slice boundary: the level set of the real defining part.

For a slice (X, r) the boundary is the closed curve where the real part of
the defining function equals r^2. The curves of interest are small
star-shaped perturbations of an ellipse, so each ray from the origin meets
the curve once and the radial function rho(theta) is found by a safeguarded
Newton iteration.
"""

from dataclasses import dataclass

import numpy as np

from . import fourier
from .config import DEFAULT_CONFIG
from .errors import NoRoot, NotStarShaped, ValidityEscape
from .series import eval_matrix, matrix_derivative_z, quadric_series


@dataclass(frozen=True)
class SliceParams:
    """One slice of the family: parameter point X and radius r (height r^2)."""

    x: tuple
    r: float

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        if self.r <= 0:
            raise ValueError("slice radius must be positive")

    @property
    def u(self):
        return self.r ** 2

    def x_array(self):
        return np.asarray(self.x, dtype=float)


@dataclass(frozen=True)
class SliceData:
    """Parameter-free slice coefficients used by the numeric pipeline."""

    lam: float
    qp: np.ndarray        # coefficient matrix of the real defining part
    k: np.ndarray         # coefficient matrix of the imaginary tail
    qp_dz: np.ndarray     # d/dz of qp

    @staticmethod
    def from_matrices(lam, qp, k):
        return SliceData(float(lam), qp, k, matrix_derivative_z(qp))

    def eval_qp(self, z):
        return eval_matrix(self.qp, z)

    def eval_k(self, z):
        return eval_matrix(self.k, z)

    def eval_qp_dz(self, z):
        return eval_matrix(self.qp_dz, z)


def quadric_slice(lam, max_degree=10):
    """Slice data of the unperturbed model z zbar + lam (z^2 + zbar^2)."""
    qp = quadric_series(float(lam), nvars=0, max_degree=max_degree).to_matrix()
    k = np.zeros_like(qp)
    return SliceData.from_matrices(lam, qp, k)


@dataclass(frozen=True)
class BoundaryCurve:
    """The traced level curve, sampled at equispaced polar angles."""

    slice: SliceParams
    lam: float
    theta_grid: np.ndarray
    rho: np.ndarray
    points: np.ndarray
    tangents: np.ndarray
    data: SliceData

    @property
    def r(self):
        return self.slice.r

    def residual(self):
        """Level-equation defect |qp(z) - r^2| at the stored points."""
        return np.abs(self.data.eval_qp(self.points).real - self.r ** 2)

    def diameter(self):
        return 2.0 * float(np.max(np.abs(self.points)))

    def winding_number(self):
        ang = np.unwrap(np.angle(np.append(self.points, self.points[0])))
        return int(np.round((ang[-1] - ang[0]) / (2 * np.pi)))


def _radial_values(data, rho, theta):
    return data.eval_qp(rho * np.exp(1j * theta)).real


def _radial_slope(data, rho, theta):
    e = np.exp(1j * theta)
    # d/drho of qp(rho e^{i theta}) = 2 Re{ qp_z(z) e^{i theta} }
    return 2.0 * np.real(data.eval_qp_dz(rho * e) * e)


def _ray_reach(lam):
    """Radial search range in units of r; covers the major axis of the model."""
    return max(3.0, 1.25 / np.sqrt(max(1.0 - 2.0 * lam, 1e-6)))


def check_radial_monotonicity(data, r, n_theta=64, n_rho=24, reach=None):
    """Verify the level function increases along rays out to |z| = reach*r."""
    if reach is None:
        reach = _ray_reach(data.lam)
    theta = fourier.grid(n_theta)
    for s in np.linspace(reach / n_rho, reach, n_rho):
        slope = _radial_slope(data, s * r, theta)
        if np.any(slope <= 0.0):
            bad = theta[np.argmin(slope)]
            raise NotStarShaped(
                f"radial slope not positive at |z|={s * r:.4g}, theta={bad:.4g}; "
                "reduce r or the perturbation")


def trace_level_curve(spec, slice_params, n_theta=None, config=DEFAULT_CONFIG):
    """Sample the slice boundary at n_theta equispaced polar angles.

    spec may be a ManifoldSpec (anything with .slice_at) or a SliceData.
    """
    data = spec.slice_at(slice_params.x) if hasattr(spec, "slice_at") else spec
    n = n_theta or config.ntheta
    r = slice_params.r
    if r > config.r_max:
        raise ValidityEscape(f"slice radius {r} exceeds configured r_max {config.r_max}")
    radius = getattr(spec, "validity_radius", None)
    if radius is not None and np.linalg.norm(slice_params.x_array()) > radius + 1e-12:
        raise ValidityEscape(
            f"parameter point {slice_params.x} outside the validity ball {radius}")
    check_radial_monotonicity(data, r)

    theta = fourier.grid(n)
    target = r ** 2
    # quadric initial guess: rho^2 (1 + 2 lam cos 2 theta) = r^2
    base = 1.0 + 2.0 * data.lam * np.cos(2 * theta)
    rho = r / np.sqrt(np.maximum(base, 1e-8))

    tol = config.trace_tol * target
    reach = _ray_reach(data.lam)
    lo = np.full(n, 1e-12 * r)
    hi = np.full(n, reach * r)
    f_hi = _radial_values(data, hi, theta) - target
    if np.any(f_hi <= 0.0):
        raise NoRoot(
            f"level value at |z| = {reach:.2f} r does not exceed r^2 on every ray")

    converged = np.zeros(n, dtype=bool)
    for _ in range(80):
        f = _radial_values(data, rho, theta) - target
        converged = np.abs(f) < tol
        if np.all(converged):
            break
        lo = np.where(f < 0.0, np.maximum(lo, rho), lo)
        hi = np.where(f > 0.0, np.minimum(hi, rho), hi)
        step = f / _radial_slope(data, rho, theta)
        proposal = rho - step
        outside = (proposal <= lo) | (proposal >= hi)
        rho = np.where(converged, rho,
                       np.where(outside, 0.5 * (lo + hi), proposal))
    else:
        raise NoRoot("radial Newton/bisection did not converge on all rays")

    points = rho * np.exp(1j * theta)
    tangents = fourier.derivative(points)
    curve = BoundaryCurve(slice_params, data.lam, theta, rho, points, tangents, data)
    if np.any(rho <= 0.0):
        raise NotStarShaped("nonpositive radial function")
    if curve.winding_number() != 1:
        raise NotStarShaped("curve does not wind once around the origin")
    return curve
