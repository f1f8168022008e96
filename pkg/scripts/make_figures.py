#!/usr/bin/env python3
"""Emit SVG figures for the bundled manifolds: nested slice boundaries and
the image of a concentric-circle grid under one slice map."""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from bishopdiscs import specio
from bishopdiscs.conformal import riemann_map
from bishopdiscs.curve import SliceParams, trace_level_curve
from bishopdiscs.figures import curve_family_svg, mapped_grid_svg, write_svg


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="figures")
    ap.add_argument("--spec", default="builtin:perturbed")
    ap.add_argument("--r-list", default="0.04,0.06,0.08,0.1,0.12")
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    spec = specio.load(specio.resolve_spec_path(args.spec))
    x0 = tuple(0.0 for _ in range(spec.nvars))

    curves = []
    cmap = None
    for r in [float(v) for v in args.r_list.split(",")]:
        curve = trace_level_curve(spec, SliceParams(x0, r))
        curves.append(curve.points)
        cmap = riemann_map(curve)
    write_svg(out / "nested_boundaries.svg", curve_family_svg(curves))
    write_svg(out / "mapped_grid.svg", mapped_grid_svg(cmap))
    print(f"wrote {out / 'nested_boundaries.svg'} and {out / 'mapped_grid.svg'}")


if __name__ == "__main__":
    main()
