"""Deterministic CSV and plain-shape SVG output."""

from __future__ import annotations

import numpy as np

CSV_VERSION = "anisolab-csv v1"


def write_csv(path, kind, columns):
    """Write named columns with a versioned comment header; %.17g keeps runs
    bit-identical for identical inputs."""
    names = list(columns)
    arrays = [np.asarray(columns[k], dtype=float) for k in names]
    length = arrays[0].size
    with open(path, "w") as fh:
        fh.write(f"# {CSV_VERSION} {kind}\n")
        fh.write(",".join(names) + "\n")
        for i in range(length):
            fh.write(",".join(f"{a[i]:.17g}" for a in arrays) + "\n")


def _svg_header(size, extent, title):
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="{-extent} {-extent} {2 * extent} {2 * extent}">\n'
        f"<title>{title}</title>\n"
        f'<line x1="{-extent}" y1="0" x2="{extent}" y2="0" '
        f'stroke="#cccccc" stroke-width="{extent / 300}"/>\n'
        f'<line x1="0" y1="{-extent}" x2="0" y2="{extent}" '
        f'stroke="#cccccc" stroke-width="{extent / 300}"/>\n'
    )


def _polyline(points, color, width):
    coords = " ".join(f"{x:.6g},{-y:.6g}" for x, y in points)  # SVG y points down
    return f'<polyline fill="none" stroke="{color}" stroke-width="{width:.6g}" points="{coords}"/>\n'


def svg_curves(path, curves, size=640, title="anisolab"):
    """curves: list of (points (m,2), color) closed polylines."""
    extent = 1.0
    for pts, _ in curves:
        pts = np.asarray(pts)
        extent = max(extent, float(np.abs(pts).max()))
    extent *= 1.1
    with open(path, "w") as fh:
        fh.write(_svg_header(size, extent, title))
        for pts, color in curves:
            pts = np.asarray(pts, dtype=float)
            closed = np.vstack([pts, pts[:1]])
            fh.write(_polyline(closed, color, extent / 150))
        fh.write("</svg>\n")


def unit_ball_points(H, samples=2048):
    theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    r = 1.0 / H.evaluate_many(dirs)
    return dirs * r[:, None]


def render_unit_ball(H, path, samples=2048, include_dual=False):
    """SVG of the unit ball boundary of a planar norm, optionally overlaid with
    the unit Wulff shape (the dual unit ball)."""
    if H.dimension != 2:
        raise ValueError("unit-ball rendering is planar")
    curves = [(unit_ball_points(H, samples), "#1f6fb2")]
    if include_dual:
        from .duality import dual_norm

        curves.append((unit_ball_points(dual_norm(H), samples), "#d94801"))
    svg_curves(path, curves, title=f"unit ball of {H.name}")
    return path


def render_field_heatmap(path, field, H=None, radii=(), center=(0.0, 0.0),
                         size=640, max_cells=96):
    """Grayscale |grad u| cell map with optional Wulff-ball contour overlays."""
    grads = field.cell_gradients()
    mag = np.linalg.norm(grads, axis=2)
    nx, ny = mag.shape
    stride = max(1, int(np.ceil(max(nx, ny) / max_cells)))
    mag = mag[::stride, ::stride]
    vmax = float(mag.max()) or 1.0
    xs, ys = field.cell_centers()
    xs = xs[:-1][::stride]
    ys = ys[:-1][::stride]
    cell = field.h * stride

    extent = 1.1 * max(abs(xs).max() + cell, abs(ys).max() + cell)
    with open(path, "w") as fh:
        fh.write(_svg_header(size, extent, "|grad u|"))
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                shade = int(255 * (1.0 - mag[i, j] / vmax))
                fh.write(
                    f'<rect x="{x:.5g}" y="{-y - cell:.5g}" width="{cell:.5g}" '
                    f'height="{cell:.5g}" fill="rgb({shade},{shade},{shade})"/>\n'
                )
        if H is not None:
            from .duality import dual_norm

            Hd = dual_norm(H)
            theta = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
            dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
            rim = 1.0 / Hd.evaluate_many(dirs)
            for R in radii:
                pts = np.asarray(center) + R * dirs * rim[:, None]
                fh.write(_polyline(np.vstack([pts, pts[:1]]), "#d94801", extent / 200))
        fh.write("</svg>\n")
    return path
