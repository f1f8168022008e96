"""Command-line front end: normalize / curve / disc / sweep / verify.

All commands read a manifold description (path or builtin:<name>), run the
requested stage of the pipeline, and write deterministic reports: repeated
runs with the same inputs and seed produce byte-identical files.
"""

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, fourier, specio
from .config import PipelineConfig
from .conformal import riemann_map
from .curve import SliceParams, trace_level_curve
from .discs import build_disc, sweep
from .errors import PipelineError
from .figures import curve_family_svg, mapped_grid_svg, write_svg
from .hilbert import (
    HilbertOperator, eval_trig_poly, origin_imaginary_residual, random_trig_poly,
)
from .normal_form import RawDefiningSeries, normalize_full
from .solver import build_slice_operators, solve_u


@dataclass
class RunConfig:
    """Resolved invocation parameters, echoed into every report."""

    command: str
    spec_path: str
    out_dir: str
    ntheta: int = 256
    tol: float = 1e-12
    r_list: list = field(default_factory=lambda: [0.02, 0.03, 0.045, 0.068, 0.1])
    x_grid: str = "0"
    figures: bool = False
    seed: int = 0

    def validate(self):
        if self.ntheta < 64 or self.ntheta & (self.ntheta - 1):
            raise ValueError(f"ntheta must be a power of two >= 64, got {self.ntheta}")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if any(b <= a for a, b in zip(self.r_list, self.r_list[1:])) or not self.r_list:
            raise ValueError("r-list must be nonempty and strictly increasing")
        if any(r <= 0 for r in self.r_list):
            raise ValueError("radii must be positive")
        return self

    def pipeline_config(self):
        return PipelineConfig(ntheta=self.ntheta)

    def to_dict(self):
        return {
            "command": self.command,
            "spec": self.spec_path,
            "out": self.out_dir,
            "ntheta": self.ntheta,
            "tol": self.tol,
            "rList": self.r_list,
            "xGrid": self.x_grid,
            "figures": self.figures,
            "seed": self.seed,
        }


def parse_x_grid(descriptor, nvars):
    """Either '0', 'a:b:n' (per-axis tensor grid), or 'x;y;...' tuples."""
    if nvars == 0:
        return [()]
    descriptor = descriptor.strip()
    if descriptor == "0":
        return [tuple(0.0 for _ in range(nvars))]
    if ":" in descriptor:
        lo, hi, count = descriptor.split(":")
        axis = np.linspace(float(lo), float(hi), int(count))
        grids = np.meshgrid(*([axis] * nvars), indexing="ij")
        return [tuple(row) for row in np.stack([g.ravel() for g in grids], axis=1)]
    points = []
    for chunk in descriptor.split(";"):
        vals = tuple(float(v) for v in chunk.split(","))
        if len(vals) != nvars:
            raise ValueError(f"grid point {chunk!r} has {len(vals)} of {nvars} coordinates")
        points.append(vals)
    return points


def write_report(out_dir, name, payload, run_config):
    payload = dict(payload)
    payload["config"] = run_config.to_dict()
    payload["version"] = __version__
    path = Path(out_dir) / name
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_normalize(spec, run_config):
    if not isinstance(spec, RawDefiningSeries):
        raise PipelineError("normalize expects a raw defining series ('raw' field)")
    out, change = normalize_full(spec, l=7, config=run_config.pipeline_config())
    specio.save(out, Path(run_config.out_dir) / "normalized_spec.json")
    records = {}
    for x in sorted(change.records):
        rec = change.records[x]
        replay = change.apply_slice(spec, x)
        lam_val, qp, kmat = out.samples[x]
        records[json.dumps(list(x))] = {
            "z0": [rec.z0.real, rec.z0.imag],
            "gamma": [rec.gamma.real, rec.gamma.imag],
            "theta": rec.theta,
            "lambda": rec.lam,
            "roundTripResidual": float(np.max(np.abs(replay - (qp + 1j * kmat)))),
        }
    low_k = 0.0
    for x in sorted(out.samples):
        _, _, kmat = out.samples[x]
        for j in range(kmat.shape[0]):
            for kk in range(kmat.shape[1]):
                if 0 < j + kk < out.l:
                    low_k = max(low_k, abs(kmat[j, kk]))
    def complex_fit(fit):
        return {"re": fit.re.to_list(), "im": fit.im.to_list()} if fit else None

    payload = {
        "records": records,
        "lambdaFit": out.lam.to_list(),
        "changeFits": {
            "z0": complex_fit(change.z0_fit),
            "gamma": complex_fit(change.gamma_fit),
            "c10": complex_fit(change.c10_fit),
            "theta": change.theta_fit.to_list() if change.theta_fit else None,
            "quadAbsorb": complex_fit(change.quad_absorb_fit),
            "tailStages": {str(m): {f"{jk}": complex_fit(c)
                                    for jk, c in fits.items()}
                           for m, fits in change.bm_fits.items()},
        },
        "maxLowOrderImagCoeff": low_k,
        "order": out.l,
    }
    write_report(run_config.out_dir, "normalize_report.json", payload, run_config)
    return 0


def _slices(spec, run_config):
    grid = parse_x_grid(run_config.x_grid, spec.nvars)
    return [SliceParams(x, r) for x in grid for r in run_config.r_list]


def cmd_curve(spec, run_config):
    cfg = run_config.pipeline_config()
    rows = []
    figures = []
    for sp in _slices(spec, run_config):
        curve = trace_level_curve(spec, sp, cfg.ntheta, cfg)
        cmap = riemann_map(curve, cfg)
        rows.append({
            "x": list(sp.x), "r": sp.r,
            "traceResidual": float(np.max(curve.residual())),
            "derivAtZero": cmap.deriv_at_zero,
            "epsCondition": cmap.eps_condition,
            "univalenceMargin": cmap.univalence_margin,
            "iterations": cmap.iterations,
        })
        figures.append((sp, curve, cmap))
    if run_config.figures:
        by_x = {}
        for sp, curve, cmap in figures:
            by_x.setdefault(sp.x, []).append(curve.points)
        for i, (x, curves) in enumerate(sorted(by_x.items())):
            write_svg(Path(run_config.out_dir) / f"curves_{i}.svg",
                      curve_family_svg(curves))
        write_svg(Path(run_config.out_dir) / "mapped_grid.svg",
                  mapped_grid_svg(figures[-1][2]))
    write_report(run_config.out_dir, "curve_report.json", {"slices": rows}, run_config)
    return 0


def cmd_disc(spec, run_config):
    cfg = run_config.pipeline_config()
    rows = []
    for sp in _slices(spec, run_config):
        curve = trace_level_curve(spec, sp, cfg.ntheta, cfg)
        cmap = riemann_map(curve, cfg)
        ops = build_slice_operators(curve, cmap, cfg)
        sol = solve_u(curve, cmap, ops, tol=run_config.tol * sp.r ** 2, config=cfg)
        disc = build_disc(spec, sp, sol, cfg)
        rows.append({
            "x": list(sp.x), "r": sp.r,
            "iterations": sol.iterations,
            "normU": sol.norm_u,
            "residual": sol.residual,
            "boundaryResidual": disc.boundary_residual,
            "centerOffset": disc.center_offset,
            "centerHeightResidual": disc.center_height_residual,
        })
    write_report(run_config.out_dir, "disc_report.json", {"slices": rows}, run_config)
    return 0


def _csv_rows(spec, report):
    nvars = spec.nvars
    names = []
    for i in range(nvars // 2):
        names.extend([f"x{i + 2}", f"y{i + 2}"])
    header = names + ["r", "iterations", "normU", "residual", "slopeU",
                      "slopeDrU", "minDisjointDistance", "jacobianDefect"]
    fits = {tuple(e["x"]): e for e in report.rate_fits}
    min_dist = report.disjointness.get("min_distance")
    rows = [header]
    for rec in report.slices:
        x = tuple(rec["x"])
        fit = fits.get(x, {})
        rows.append(list(x) + [
            rec["r"],
            rec.get("iterations", ""),
            rec.get("norm_u", ""),
            rec.get("residual", ""),
            fit.get("slope_norm_u", ""),
            fit.get("slope_dr_u", ""),
            min_dist if min_dist is not None else "",
            rec.get("jacobian_defect", ""),
        ])
    return rows


def cmd_sweep(spec, run_config):
    cfg = run_config.pipeline_config()
    grid = parse_x_grid(run_config.x_grid, spec.nvars)
    report = sweep(spec, grid, run_config.r_list, cfg,
                   with_hilbert_probe=True, seed=run_config.seed)
    write_report(run_config.out_dir, "sweep_report.json",
                 {"report": report.to_dict(), "seed": run_config.seed}, run_config)
    with open(Path(run_config.out_dir) / "sweep.csv", "w", encoding="utf-8",
              newline="") as fh:
        csv.writer(fh).writerows(_csv_rows(spec, report))
    if run_config.figures:
        for i, x in enumerate(grid):
            curves = []
            for r in run_config.r_list:
                try:
                    curves.append(trace_level_curve(
                        spec, SliceParams(x, r), cfg.ntheta, cfg).points)
                except PipelineError:
                    continue
            if curves:
                write_svg(Path(run_config.out_dir) / f"nested_{i}.svg",
                          curve_family_svg(curves))
    return 0


def cmd_verify(spec, run_config):
    cfg = run_config.pipeline_config()
    rng = np.random.default_rng(run_config.seed)
    checks = []

    def check(name, value, threshold):
        checks.append({"name": name, "value": float(value),
                       "threshold": threshold, "passed": bool(value < threshold)})

    t = fourier.grid(cfg.ntheta)
    worst = 0.0
    for nmode in range(1, 33):
        worst = max(worst, float(np.max(np.abs(
            fourier.conjugate_samples(np.cos(nmode * t)) - np.sin(nmode * t)))))
        worst = max(worst, float(np.max(np.abs(
            fourier.conjugate_samples(np.sin(nmode * t)) + np.cos(nmode * t)))))
    check("conjugation_identities", worst, 1e-11)

    trivial = not spec.p.coeffs and not spec.k.coeffs
    slices = []
    for sp in _slices(spec, run_config):
        curve = trace_level_curve(spec, sp, cfg.ntheta, cfg)
        cmap = riemann_map(curve, cfg)
        ops = build_slice_operators(curve, cmap, cfg)
        sol = solve_u(curve, cmap, ops, tol=run_config.tol * sp.r ** 2, config=cfg)
        disc = build_disc(spec, sp, sol, cfg)
        label = f"x={list(sp.x)},r={sp.r}"
        check(f"fixed_point[{label}]", sol.residual, 10 * run_config.tol * sp.r ** 2)
        check(f"attachment[{label}]", disc.boundary_residual, 1e-8)
        check(f"center_offset[{label}]", disc.center_offset, 1e-10)
        check(f"center_height[{label}]", disc.center_height_residual, 1e-8)
        check(f"d_holomorphy[{label}]", ops.d_energy, 1e-8)
        fmean = sol.f_samples - np.mean(sol.f_samples)
        check(f"f_holomorphy[{label}]",
              fourier.negative_energy_fraction(fmean) if np.max(np.abs(fmean)) > 0 else 0.0,
              1e-8)
        op = HilbertOperator(cmap)
        phi = eval_trig_poly(random_trig_poly(rng), t)
        check(f"origin_normalization[{label}]",
              origin_imaginary_residual(op, phi) / np.max(np.abs(phi)), 1e-9)
        if trivial:
            check(f"trivial_norm_u[{label}]", sol.norm_u, 1e-10)
            check(f"trivial_d[{label}]",
                  float(np.max(np.abs(ops.d_samples - 1.0))), 1e-10)
        slices.append({"x": list(sp.x), "r": sp.r, "normU": sol.norm_u,
                       "iterations": sol.iterations})

    passed = all(c["passed"] for c in checks)
    write_report(run_config.out_dir, "verify_report.json",
                 {"checks": checks, "slices": slices, "allPassed": passed,
                  "seed": run_config.seed}, run_config)
    return 0 if passed else 1


COMMANDS = {
    "normalize": cmd_normalize,
    "curve": cmd_curve,
    "disc": cmd_disc,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bishopdiscs",
        description="attached-disc construction and verification pipelines")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--spec", required=True,
                        help="manifold description path or builtin:<name>")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--ntheta", type=int, default=256)
    parser.add_argument("--tol", type=float, default=1e-12,
                        help="solver tolerance, scaled by r^2 per slice")
    parser.add_argument("--r-list", default="0.02,0.03,0.045,0.068,0.1")
    parser.add_argument("--x-grid", default="0")
    parser.add_argument("--figures", action="store_true")
    parser.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        run_config = RunConfig(
            command=args.command,
            spec_path=args.spec,
            out_dir=args.out,
            ntheta=args.ntheta,
            tol=args.tol,
            r_list=[float(v) for v in args.r_list.split(",") if v],
            x_grid=args.x_grid,
            figures=args.figures,
            seed=args.seed,
        ).validate()
        Path(run_config.out_dir).mkdir(parents=True, exist_ok=True)
        spec = specio.load(specio.resolve_spec_path(run_config.spec_path))
        return COMMANDS[args.command](spec, run_config)
    except (PipelineError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
