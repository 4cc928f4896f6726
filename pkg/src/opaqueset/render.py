"""Static SVG drawing of a scene: domain outline plus direction-coloured segments."""
from __future__ import annotations

import colorsys
import math

import numpy as np

from .constructions import SceneSpec


def segment_color(angle: float) -> str:
    """Hue from ``2 alpha mod 2 pi``, so antiparallel directions share a colour."""
    hue = (2.0 * angle % (2.0 * math.pi)) / (2.0 * math.pi)
    r, g, b = colorsys.hsv_to_rgb(hue, 0.85, 0.85)
    return "#%02x%02x%02x" % (round(255 * r), round(255 * g), round(255 * b))


def render_svg(scene: SceneSpec, size: int = 480, margin: float = 0.05) -> str:
    pts = np.vstack([scene.domain.vertices, scene.segments.endpoints.reshape(-1, 2)])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    scale = size * (1.0 - 2.0 * margin) / span
    pad = size * margin

    def xy(p):
        # SVG y grows downward.
        return pad + (p[0] - lo[0]) * scale, size - pad - (p[1] - lo[1]) * scale

    poly = " ".join("%.4f,%.4f" % xy(v) for v in scene.domain.vertices)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f"<title>{scene.name}</title>",
        f'<polygon points="{poly}" fill="none" stroke="#444444" stroke-width="1" '
        'stroke-dasharray="4,3"/>',
    ]
    for seg, angle in zip(scene.segments.endpoints, scene.segments.angles):
        (x1, y1), (x2, y2) = xy(seg[0]), xy(seg[1])
        lines.append(f'<line x1="{x1:.4f}" y1="{y1:.4f}" x2="{x2:.4f}" y2="{y2:.4f}" '
                     f'stroke="{segment_color(angle)}" stroke-width="2.5" stroke-linecap="round"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
