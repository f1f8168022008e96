"""Assembly of attached discs and verification sweeps over slice families.

Each solved slice yields one analytic disc: the boundary data z(1+F) and
the height component extend holomorphically to the closed unit disc through
their Fourier coefficients (equivalently, the Cauchy integral over the
boundary). Families swept over (X, r) are checked for boundary attachment,
mutual disjointness, nested slice curves, decay rates of the solved norms,
and the near-identity behaviour of the slice map at the origin.
"""

from dataclasses import dataclass, field

import numpy as np

from . import fourier
from .config import DEFAULT_CONFIG
from .curve import SliceParams
from .errors import PipelineError, StencilOutOfRange, TargetTooCloseToBoundary
from .solver import DiscSolution, solve_slice


# --------------------------------------------------------------------------
# Cauchy extension
# --------------------------------------------------------------------------

def cauchy_extend(cmap, boundary_values, targets, config=DEFAULT_CONFIG):
    """Holomorphic extension of boundary data to points inside the curve.

    Far from the boundary the trapezoid discretization of the Cauchy
    integral over the conformal parameterization is spectrally accurate;
    near the boundary the value is computed instead by inverting the map
    and summing the Taylor series of the composition.
    """
    targets = np.atleast_1d(np.asarray(targets, dtype=complex))
    g = np.asarray(boundary_values, dtype=complex)
    zb = cmap.boundary_z
    diam = 2.0 * float(np.max(np.abs(zb - np.mean(zb))))
    cutoff = 2.0 * np.pi * diam / cmap.n
    dist = np.min(np.abs(zb[None, :] - targets[:, None]), axis=1)
    out = np.empty(len(targets), dtype=complex)
    far = dist >= cutoff
    if np.any(far):
        out[far] = fourier.cauchy_integral(g, zb, cmap.boundary_dz, targets[far])
    if np.any(~far):
        w = cmap.invert(targets[~far])
        if np.any(np.abs(w) > 1.0 - 1e-6):
            raise TargetTooCloseToBoundary(
                "extension target within a grid spacing of the boundary")
        coeffs = fourier.taylor_from_boundary(g, cmap.n // 2)
        out[~far] = fourier.eval_taylor(coeffs, w)
    return out


def extend_in_disc(boundary_values, zeta, n_coeffs=None):
    """Extension in the disc parameter: Taylor sum of the Fourier data."""
    g = np.asarray(boundary_values, dtype=complex)
    coeffs = fourier.taylor_from_boundary(g, n_coeffs or len(g) // 2)
    return fourier.eval_taylor(coeffs, np.asarray(zeta, dtype=complex))


# --------------------------------------------------------------------------
# attached discs
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AttachedDisc:
    """One analytic disc in ambient coordinates, over a unit-disc grid."""

    slice: SliceParams
    zeta: np.ndarray          # (n_radii, ntheta) interior grid, closed disc
    z_values: np.ndarray
    w_values: np.ndarray
    boundary_residual: float
    center_offset: float      # |z component| at zeta = 0
    center_height_residual: float
    solution: DiscSolution

    def ambient_points(self, max_points=512):
        """Flattened sample of ambient coordinates (Re z, Im z, X, Re w, Im w)."""
        z = self.z_values.ravel()
        w = self.w_values.ravel()
        stride = max(1, len(z) // max_points)
        z = z[::stride][:max_points]
        w = w[::stride][:max_points]
        x = np.asarray(self.slice.x, dtype=float)
        cols = [z.real, z.imag]
        cols.extend(np.full(len(z), xv) for xv in x)
        cols.extend([w.real, w.imag])
        return np.stack(cols, axis=1)


def interior_grid(n_radii, ntheta):
    """Radial-angular grid of the closed unit disc, clustered at the rim."""
    j = np.arange(1, n_radii + 1)
    radii = np.sin(0.5 * np.pi * j / n_radii)
    t = fourier.grid(ntheta)
    return radii[:, None] * np.exp(1j * t)[None, :]


def build_disc(spec, slice_params, solution, config=DEFAULT_CONFIG, n_radii=16):
    """Populate the interior of one solved slice disc and check attachment."""
    cmap = solution.cmap
    boundary_zc = cmap.boundary_z * (1.0 + solution.f_samples)
    boundary_w = solution.b_samples
    zeta = interior_grid(n_radii, cmap.n)
    # keep the resolution of the stored map so the disc matches r sigma(zeta)
    n_coeffs = config.taylor_count()
    z_values = extend_in_disc(boundary_zc, zeta, n_coeffs)
    w_values = extend_in_disc(boundary_w, zeta, n_coeffs)

    data = solution.curve.data
    direct = data.eval_qp(boundary_zc).real + 1j * data.eval_k(boundary_zc).real
    boundary_residual = float(np.max(np.abs(boundary_w - direct)))
    z_center = complex(np.mean(boundary_zc))
    w_center = complex(np.mean(boundary_w))
    return AttachedDisc(
        slice=slice_params,
        zeta=zeta,
        z_values=z_values,
        w_values=w_values,
        boundary_residual=boundary_residual,
        center_offset=abs(z_center),
        center_height_residual=abs(w_center.real - slice_params.u),
        solution=solution,
    )


# --------------------------------------------------------------------------
# probes
# --------------------------------------------------------------------------

def fit_loglog_slope(values_x, values_y):
    return float(np.polyfit(np.log(values_x), np.log(values_y), 1)[0])


def radial_derivative_of_u(spec, slice_params, config=DEFAULT_CONFIG, tol=None):
    """Central finite difference of the boundary unknown in the radius."""
    r = slice_params.r
    h = r / config.fd_r_factor
    if not (0.0 < r - h and r + h <= config.r_max):
        raise StencilOutOfRange(f"radius stencil [{r - h}, {r + h}] leaves (0, r_max]")
    lo = solve_slice(spec, SliceParams(slice_params.x, r - h), config, tol)
    hi = solve_slice(spec, SliceParams(slice_params.x, r + h), config, tol)
    return (hi.u_samples - lo.u_samples) / (2.0 * h)


def derivative_bound_probe(spec, slice_params, j, s, config=DEFAULT_CONFIG,
                           tol=None, solution=None):
    """Sup norm of the theta/radius derivatives of the disc correction F."""
    l = spec.l
    if j + 2 * s > l - 4:
        raise ValueError(f"probe order (j={j}, s={s}) outside j + 2s <= l - 4")
    r = slice_params.r
    h = r / config.fd_r_factor
    if s > 0 and not (0.0 < r - s * h and r + s * h <= config.r_max):
        raise StencilOutOfRange("radius stencil leaves (0, r_max]")

    def f_of(rr):
        sol = solve_slice(spec, SliceParams(slice_params.x, rr), config, tol)
        return sol.f_samples

    if s == 0:
        f = (solution.f_samples if solution is not None
             else f_of(r))
    elif s == 1:
        f = (f_of(r + h) - f_of(r - h)) / (2.0 * h)
    elif s == 2:
        f = (f_of(r + h) - 2.0 * f_of(r) + f_of(r - h)) / h ** 2
    else:
        raise ValueError("radial derivative order above 2 is not implemented")
    if j > 0:
        f = fourier.derivative(f, j)
    return fourier.sup_norm(f, config.upsample)


def jacobian_defect(spec, slice_params, config=DEFAULT_CONFIG, tol=None,
                    base_solution=None):
    """Max deviation of the slice-map derivative at the origin from the
    flat inclusion (z, X, u) -> (z, X, u + 0 i), by central differences."""
    x = np.asarray(slice_params.x, dtype=float)
    r = slice_params.r
    u = slice_params.u
    sol = base_solution or solve_slice(spec, slice_params, config, tol)

    def center_values(solution, z_targets):
        cmap = solution.cmap
        zc = cmap.boundary_z * (1.0 + solution.f_samples)
        z_ext = cauchy_extend(cmap, zc, z_targets, config)
        w_ext = cauchy_extend(cmap, solution.b_samples, z_targets, config)
        return z_ext, w_ext

    defects = []
    # z block: expect dZ/dz = 1, dW/dz = 0 (Wirtinger via x/y differences)
    h = r / config.fd_r_factor
    z_ext, w_ext = center_values(sol, [h, -h, 1j * h, -1j * h])
    dz_dx = (z_ext[0] - z_ext[1]) / (2 * h)
    dz_dy = (z_ext[2] - z_ext[3]) / (2 * h)
    dw_dx = (w_ext[0] - w_ext[1]) / (2 * h)
    dw_dy = (w_ext[2] - w_ext[3]) / (2 * h)
    defects.extend([abs(dz_dx - 1.0), abs(dz_dy - 1j), abs(dw_dx), abs(dw_dy)])
    # X block: expect dZ/dX = dW/dX = 0
    hx = config.fd_x_step
    for axis in range(len(x)):
        shift = np.zeros_like(x)
        shift[axis] = hx
        sol_p = solve_slice(spec, SliceParams(tuple(x + shift), r), config, tol)
        sol_m = solve_slice(spec, SliceParams(tuple(x - shift), r), config, tol)
        zp, wp = center_values(sol_p, [0.0])
        zm, wm = center_values(sol_m, [0.0])
        defects.append(abs(zp[0] - zm[0]) / (2 * hx))
        defects.append(abs(wp[0] - wm[0]) / (2 * hx))
    # u direction: expect dZ/du = 0 and dW/du = 1
    hu = u / 10.0
    sol_p = solve_slice(spec, SliceParams(slice_params.x, np.sqrt(u + hu)), config, tol)
    sol_m = solve_slice(spec, SliceParams(slice_params.x, np.sqrt(u - hu)), config, tol)
    zp, wp = center_values(sol_p, [0.0])
    zm, wm = center_values(sol_m, [0.0])
    defects.append(abs(zp[0] - zm[0]) / (2 * hu))
    defects.append(abs((wp[0] - wm[0]) / (2 * hu) - 1.0))
    return float(max(defects))


# --------------------------------------------------------------------------
# family sweep
# --------------------------------------------------------------------------

@dataclass
class FamilyReport:
    """Per-slice metrics and family-level verification results."""

    slices: list = field(default_factory=list)
    rate_fits: list = field(default_factory=list)
    disjointness: dict = field(default_factory=dict)
    nested_curves: bool = True
    jacobian_trend: list = field(default_factory=list)
    hilbert_gaps: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def converged_count(self):
        return sum(1 for s in self.slices if s["converged"])

    def to_dict(self):
        return {
            "slices": self.slices,
            "rate_fits": self.rate_fits,
            "disjointness": self.disjointness,
            "nested_curves": self.nested_curves,
            "jacobian_trend": self.jacobian_trend,
            "hilbert_gaps": self.hilbert_gaps,
            "failures": self.failures,
        }


def min_pairwise_distance(points_a, points_b):
    aa = np.sum(points_a ** 2, axis=1)
    bb = np.sum(points_b ** 2, axis=1)
    d2 = aa[:, None] + bb[None, :] - 2.0 * points_a @ points_b.T
    return float(np.sqrt(max(np.min(d2), 0.0)))


def _disjointness(discs, max_points=512):
    clouds = {key: d.ambient_points(max_points) for key, d in discs.items()}
    keys = sorted(clouds)
    overall = np.inf
    same_x_margin = np.inf
    for i, ka in enumerate(keys):
        for kb in keys[i + 1:]:
            dist = min_pairwise_distance(clouds[ka], clouds[kb])
            overall = min(overall, dist)
            if ka[0] == kb[0]:   # same parameter point, different radii
                gap = abs(ka[1] ** 2 - kb[1] ** 2)
                same_x_margin = min(same_x_margin, dist / gap)
    return {
        "min_distance": overall if np.isfinite(overall) else None,
        "same_height_margin": same_x_margin if np.isfinite(same_x_margin) else None,
        "pairs": len(keys) * (len(keys) - 1) // 2,
    }


def sweep(spec, x_grid, r_list, config=DEFAULT_CONFIG, tol=None,
          with_jacobian=True, with_rates=True, with_hilbert_probe=False,
          seed=0):
    """Solve and assemble every slice, then run the family checks.

    Per-slice failures are recorded, never raised; rate fits need at least
    three radii. The optional transform probe records, per parameter point,
    the gap between the slice transform and its quadratic-model transform.
    """
    r_list = sorted(float(r) for r in r_list)
    x_grid = [tuple(float(v) for v in x) for x in x_grid]
    report = FamilyReport()
    discs = {}
    curves = {}
    for x in x_grid:
        for r in r_list:
            sp = SliceParams(x, r)
            record = {"x": list(x), "r": r, "converged": False}
            try:
                sol = solve_slice(spec, sp, config, tol)
                disc = build_disc(spec, sp, sol, config)
                record.update({
                    "converged": True,
                    "iterations": sol.iterations,
                    "norm_u": sol.norm_u,
                    "residual": sol.residual,
                    "boundary_residual": disc.boundary_residual,
                    "center_offset": disc.center_offset,
                    "center_height_residual": disc.center_height_residual,
                    "contraction_ok": sol.contraction_ok,
                })
                discs[(x, r)] = disc
                curves[(x, r)] = sol.curve
                if with_jacobian:
                    record["jacobian_defect"] = jacobian_defect(
                        spec, sp, config, tol, base_solution=sol)
            except PipelineError as exc:
                record["error"] = f"{type(exc).__name__}: {exc}"
                report.failures.append({"x": list(x), "r": r,
                                        "error": record["error"]})
            report.slices.append(record)

    # decay-rate fits per parameter point
    if with_rates and len(r_list) >= 3:
        for x in x_grid:
            rs = [r for r in r_list if (x, r) in discs]
            if len(rs) < 3:
                continue
            norms = [discs[(x, r)].solution.norm_u for r in rs]
            entry = {"x": list(x)}
            if min(norms) > 0.0:
                entry["slope_norm_u"] = fit_loglog_slope(rs, norms)
                dr_norms = []
                for r in rs:
                    du = radial_derivative_of_u(spec, SliceParams(x, r), config, tol)
                    dr_norms.append(fourier.sup_norm(du, config.upsample))
                entry["slope_dr_u"] = fit_loglog_slope(rs, dr_norms)
            report.rate_fits.append(entry)

    # nested slice curves per parameter point
    for x in x_grid:
        rhos = [curves[(x, r)].rho for r in r_list if (x, r) in curves]
        for lo, hi in zip(rhos, rhos[1:]):
            if not np.all(lo < hi):
                report.nested_curves = False

    if len(discs) >= 2:
        report.disjointness = _disjointness(discs)

    # jacobian defect trend over r (max across the grid)
    if with_jacobian:
        for r in r_list:
            vals = [rec.get("jacobian_defect") for rec in report.slices
                    if rec["r"] == r and rec.get("jacobian_defect") is not None]
            if vals:
                report.jacobian_trend.append({"r": r, "max_defect": max(vals)})

    if with_hilbert_probe:
        from .hilbert import HilbertOperator, norm_probe
        for x in x_grid:
            rs = [r for r in r_list if (x, r) in discs]
            if not rs:
                continue
            r = rs[-1]
            op = HilbertOperator(discs[(x, r)].solution.cmap)
            gap = norm_probe(op, j=0, trials=10, seed=seed, config=config)
            report.hilbert_gaps.append({"x": list(x), "r": r, "gap": gap})
    return report
