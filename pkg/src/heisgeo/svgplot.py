"""Minimal self-contained SVG line plots (no external assets, no matplotlib)."""

from __future__ import annotations

from html import escape

import numpy as np

WIDTH, HEIGHT, PAD = 480, 360, 48


def _ticks(lo, hi, count=5):
    return np.linspace(lo, hi, count)


def line_plot(series, title="", xlabel="", ylabel="", equal_aspect=False) -> str:
    """Render ``series`` (a list of ``(x, y)`` array pairs) as one SVG document."""
    xs = np.concatenate([np.asarray(x, dtype=float) for x, _ in series])
    ys = np.concatenate([np.asarray(y, dtype=float) for _, y in series])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    w, h = WIDTH - 2 * PAD, HEIGHT - 2 * PAD
    sx, sy = w / (x1 - x0), h / (y1 - y0)
    if equal_aspect:
        s = min(sx, sy)
        sx = sy = s
        cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
        x0, x1 = cx - w / (2 * s), cx + w / (2 * s)
        y0, y1 = cy - h / (2 * s), cy + h / (2 * s)

    def px(x):
        return PAD + (np.asarray(x) - x0) * sx

    def py(y):
        return HEIGHT - PAD - (np.asarray(y) - y0) * sy

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{PAD}" y="{PAD}" width="{w}" height="{h}" fill="none" stroke="#444"/>',
    ]
    for tx in _ticks(x0, x1):
        out.append(f'<text x="{px(tx):.2f}" y="{HEIGHT - PAD + 14}" text-anchor="middle">{tx:.3g}</text>')
    for ty in _ticks(y0, y1):
        out.append(f'<text x="{PAD - 4}" y="{py(ty) + 4:.2f}" text-anchor="end">{ty:.3g}</text>')
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    for k, (x, y) in enumerate(series):
        pts = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(px(x), py(y)))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{colors[k % len(colors)]}" stroke-width="1.5"/>')
    out.append(f'<text x="{WIDTH / 2}" y="{PAD / 2}" text-anchor="middle" font-size="13">{escape(title)}</text>')
    out.append(f'<text x="{WIDTH / 2}" y="{HEIGHT - 8}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="12" y="{HEIGHT / 2}" text-anchor="middle" '
        f'transform="rotate(-90 12 {HEIGHT / 2})">{escape(ylabel)}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def planar_projection_svg(points, title="planar projection") -> str:
    points = np.asarray(points, dtype=float)
    return line_plot([(points[:, 0], points[:, 1])], title, "x", "y", equal_aspect=True)


def height_svg(t, points, title="height z(t)") -> str:
    points = np.asarray(points, dtype=float)
    return line_plot([(t, points[:, 2])], title, "t", "z")
