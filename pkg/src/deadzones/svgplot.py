"""Dependency-free SVG output: torus partition rasters and catalog strips.

Rasters map phi1 = theta_2 - theta_1 rightward and phi2 = theta_3 - theta_2
upward over [0, 2*pi)^2. Cells are coloured by the graph-colour scheme;
horizontal runs of equal colour are merged into single rects to keep files
small. Overlays mark zero-difference lines (solid), difference-pi lines
(dashed), full synchrony (filled dots at the corners) and the splay points
(hollow dots).
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .angles import TWO_PI
from .effective import RasterGrid, Catalog
from .graphs import DirectedGraph, graph_color

CANVAS = 600.0
MARGIN = 20.0


def _hex(rgb: tuple[float, float, float]) -> str:
    return "#" + "".join(f"{int(round(255 * max(0.0, min(1.0, c)))):02x}" for c in rgb)


_NU_COLORS = [_hex(graph_color(DirectedGraph.from_nu(v))) for v in range(64)]


def _sx(phi: float) -> float:
    return MARGIN + phi / TWO_PI * CANVAS


def _sy(phi: float) -> float:
    return MARGIN + (1.0 - phi / TWO_PI) * CANVAS


def raster_svg(grid: RasterGrid, trajectories: Iterable[np.ndarray] = ()) -> str:
    """Render a raster (and optional phase-difference trajectories) to SVG text."""
    r = grid.resolution
    cell = CANVAS / r
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS + 2 * MARGIN:.0f}" '
        f'height="{CANVAS + 2 * MARGIN:.0f}" viewBox="0 0 {CANVAS + 2 * MARGIN:.0f} '
        f'{CANVAS + 2 * MARGIN:.0f}">',
        f'<rect x="0" y="0" width="{CANVAS + 2 * MARGIN:.0f}" '
        f'height="{CANVAS + 2 * MARGIN:.0f}" fill="white"/>',
    ]
    nu = grid.nu
    for i in range(r):
        x = MARGIN + i * cell
        j = 0
        while j < r:
            v = nu[i, j]
            j2 = j
            while j2 + 1 < r and nu[i, j2 + 1] == v:
                j2 += 1
            y = MARGIN + CANVAS - (j2 + 1) * cell
            h = (j2 - j + 1) * cell
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cell + 0.05:.2f}" '
                f'height="{h + 0.05:.2f}" fill="{_NU_COLORS[int(v)]}"/>'
            )
            j = j2 + 1

    def line(x1, y1, x2, y2, dashed=False):
        dash = ' stroke-dasharray="6,6"' if dashed else ""
        parts.append(
            f'<line x1="{_sx(x1):.2f}" y1="{_sy(y1):.2f}" x2="{_sx(x2):.2f}" '
            f'y2="{_sy(y2):.2f}" stroke="black" stroke-width="1.2"{dash}/>'
        )

    # solid: theta_1 = theta_2 (phi1 = 0), theta_2 = theta_3 (phi2 = 0),
    # theta_3 = theta_1 (phi1 + phi2 = 2*pi); plus the torus border
    line(0, 0, 0, TWO_PI)
    line(TWO_PI, 0, TWO_PI, TWO_PI)
    line(0, 0, TWO_PI, 0)
    line(0, TWO_PI, TWO_PI, TWO_PI)
    line(0, TWO_PI, TWO_PI, 0)
    # dashed: one phase difference equal to pi
    line(math.pi, 0, math.pi, TWO_PI, dashed=True)
    line(0, math.pi, TWO_PI, math.pi, dashed=True)
    line(0, math.pi, math.pi, 0, dashed=True)
    line(math.pi, TWO_PI, TWO_PI, math.pi, dashed=True)

    for traj in trajectories:
        pts = np.asarray(traj)
        segments: list[list[str]] = [[]]
        prev = None
        for p1, p2 in pts:
            if prev is not None and (
                abs(p1 - prev[0]) > math.pi or abs(p2 - prev[1]) > math.pi
            ):
                segments.append([])
            segments[-1].append(f"{_sx(p1):.2f},{_sy(p2):.2f}")
            prev = (p1, p2)
        for seg in segments:
            if len(seg) >= 2:
                parts.append(
                    f'<polyline points="{" ".join(seg)}" fill="none" '
                    f'stroke="white" stroke-width="1.0"/>'
                )

    for cx, cy in ((0, 0), (TWO_PI, 0), (0, TWO_PI), (TWO_PI, TWO_PI)):
        parts.append(
            f'<circle cx="{_sx(cx):.2f}" cy="{_sy(cy):.2f}" r="5" fill="black"/>'
        )
    for s in (TWO_PI / 3.0, 2.0 * TWO_PI / 3.0):
        parts.append(
            f'<circle cx="{_sx(s):.2f}" cy="{_sy(s):.2f}" r="5" fill="white" '
            f'stroke="black" stroke-width="1.5"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def catalog_strip_svg(catalog: Catalog) -> str:
    """Black/white presence strip over graph numbers 0..63."""
    present = set(catalog.nu_values())
    cell = 12.0
    height = 26.0
    width = 64 * cell + 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">'
    ]
    for v in range(64):
        fill = "black" if v in present else "white"
        parts.append(
            f'<rect x="{1 + v * cell:.1f}" y="1" width="{cell:.1f}" height="{height - 2:.1f}" '
            f'fill="{fill}" stroke="gray" stroke-width="0.5"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
