"""Static SVG heat maps: grid cells as colored rectangles, embedding points
on top, no external dependencies and no timestamps (output is byte-stable).

Cell colors follow a linear two-color ramp from LOW_COLOR to HIGH_COLOR over
the [min, max] range of the plotted field.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .interpret import GridReport

LOW_COLOR = "#1d3a6d"
HIGH_COLOR = "#f7e04b"

_PLOT = 520
_PAD = 12
_LEGEND_W = 190


def _hex_to_rgb(color: str):
    return tuple(int(color[i:i + 2], 16) for i in (1, 3, 5))


def _ramp(t: float) -> str:
    lo = _hex_to_rgb(LOW_COLOR)
    hi = _hex_to_rgb(HIGH_COLOR)
    return "#" + "".join(f"{round(l + t * (h - l)):02x}" for l, h in zip(lo, hi))


def write_svg_heatmap(grid: GridReport, embedding, path) -> None:
    """Render a grid report with the embedding scattered on top.

    The legend states the plotted field and its min/max to 4 significant
    digits. Exactly one <rect> is emitted per grid cell.
    """
    emb = np.asarray(embedding, dtype=np.float64)
    res = grid.resolution
    values = grid.scalar_values()
    vmin = float(values.min())
    vmax = float(values.max())
    vspan = vmax - vmin

    # Grid points are cell centers; the frame extends half a step beyond them.
    gmin, gmax = grid.grid_min, grid.grid_max
    step = (gmax - gmin) / (res - 1)
    frame_lo = gmin - step / 2.0
    frame_span = np.where(gmax > gmin, (gmax - gmin) + step, 1.0)
    cell = _PLOT / res

    def to_px(coord) -> tuple[float, float]:
        fx = (coord[0] - frame_lo[0]) / frame_span[0]
        fy = (coord[1] - frame_lo[1]) / frame_span[1]
        return _PAD + fx * _PLOT, _PAD + (1.0 - fy) * _PLOT

    width = _PLOT + 2 * _PAD + _LEGEND_W
    height = _PLOT + 2 * _PAD
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    ]
    for t, value in enumerate(values):
        ix = t % res
        iy = t // res
        frac = 0.5 if vspan == 0.0 else (float(value) - vmin) / vspan
        x = _PAD + ix * cell
        y = _PAD + (res - 1 - iy) * cell
        parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{cell:.2f}" height="{cell:.2f}" '
            f'fill="{_ramp(frac)}"/>'
        )
    for row in emb:
        cx, cy = to_px(row)
        parts.append(
            f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="2.5" fill="#202020" '
            f'stroke="#ffffff" stroke-width="0.6" fill-opacity="0.85"/>'
        )
    lx = _PLOT + 2 * _PAD + 14
    parts.append(f'<text x="{lx}" y="{_PAD + 18}" font-family="monospace" '
                 f'font-size="13">field: {grid.field}</text>')
    parts.append(f'<text x="{lx}" y="{_PAD + 40}" font-family="monospace" '
                 f'font-size="13">max {format(vmax, ".4g")}</text>')
    parts.append(f'<text x="{lx}" y="{_PAD + 62}" font-family="monospace" '
                 f'font-size="13">min {format(vmin, ".4g")}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
