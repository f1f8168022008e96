"""Minimal deterministic SVG emission for slice curves and mapped grids."""

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#e377c2", "#17becf")


def _path(points, color, width, scale, offset):
    coords = " ".join(
        f"{(p.real * scale + offset):.3f},{(offset - p.imag * scale):.3f}"
        for p in points)
    first = points[0]
    closing = f" {(first.real * scale + offset):.3f},{(offset - first.imag * scale):.3f}"
    return (f'<polyline points="{coords}{closing}" fill="none" '
            f'stroke="{color}" stroke-width="{width:.2f}"/>')


def curve_family_svg(curves, size=640):
    """Nested slice boundaries, one closed path per curve."""
    extent = max(float(np.max(np.abs(c))) for c in curves) * 1.1
    scale = size / (2 * extent)
    offset = size / 2
    body = [_path(np.asarray(c), PALETTE[i % len(PALETTE)], 1.5, scale, offset)
            for i, c in enumerate(curves)]
    axes = (f'<line x1="0" y1="{offset}" x2="{size}" y2="{offset}" '
            f'stroke="#cccccc" stroke-width="0.5"/>'
            f'<line x1="{offset}" y1="0" x2="{offset}" y2="{size}" '
            f'stroke="#cccccc" stroke-width="0.5"/>')
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
            f'height="{size}" viewBox="0 0 {size} {size}">'
            f'{axes}{"".join(body)}</svg>\n')


def mapped_grid_svg(cmap, size=640, n_circles=6):
    """Images of concentric circles under the slice map, with the boundary."""
    t = np.linspace(0.0, 2 * np.pi, 181)
    rings = []
    for rho in np.linspace(1.0 / n_circles, 1.0, n_circles):
        rings.append(cmap.r * cmap.sigma(rho * np.exp(1j * t)))
    rings.append(cmap.boundary_z)
    return curve_family_svg(rings, size)


def write_svg(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
