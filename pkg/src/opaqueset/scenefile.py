"""Scene documents (JSON) and flat report documents.

A scene document looks like::

    {
      "format": "opaque-scene/1",
      "name": "square-two-sides",
      "domain": {"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]},
      "opaque_set": [[[0, 0], [1, 0]], [[0, 1], [1, 1]]],
      "metadata": {}
    }

``domain`` may instead name a parametric shape, e.g.
``{"shape": "rectangle", "width": 1, "height": 0.01}``. Floats are written
with Python's shortest round-trip repr, so parse(dump(scene)) is exact.
"""
from __future__ import annotations

import json
import math
from typing import Any

from .constructions import SceneSpec, equilateral_triangle, rectangle, regular_polygon, unit_square
from .errors import SceneFormatError, ValidationError
from .geometry import ConvexPolygon, SegmentSet

FORMAT = "opaque-scene/1"

SHAPES = {
    "unit-square": (lambda: unit_square(), ()),
    "rectangle": (lambda width, height: rectangle(width, height), ("width", "height")),
    "regular-polygon": (lambda sides, radius=1.0, phase=0.0: regular_polygon(int(sides), radius, phase),
                        ("sides",)),
    "equilateral-triangle": (lambda side=1.0: equilateral_triangle(side), ()),
}


def _point(value: Any, where: str) -> tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2:
        raise SceneFormatError(f"{where}: expected [x, y]")
    out = []
    for k, c in enumerate(value):
        if isinstance(c, bool) or not isinstance(c, (int, float)):
            raise SceneFormatError(f"{where}[{k}]: expected a number, got {c!r}")
        if not math.isfinite(c):
            raise SceneFormatError(f"{where}[{k}]: coordinate is not finite")
        out.append(float(c))
    return out[0], out[1]


def _domain(doc: Any) -> ConvexPolygon:
    if not isinstance(doc, dict):
        raise SceneFormatError("domain: expected an object")
    try:
        if "vertices" in doc:
            verts = doc["vertices"]
            if not isinstance(verts, list):
                raise SceneFormatError("domain.vertices: expected a list of points")
            return ConvexPolygon([_point(v, f"domain.vertices[{i}]") for i, v in enumerate(verts)])
        if "shape" in doc:
            shape = doc["shape"]
            if shape not in SHAPES:
                raise SceneFormatError(f"domain.shape: unknown shape {shape!r}; known: {sorted(SHAPES)}")
            build, required = SHAPES[shape]
            params = {k: v for k, v in doc.items() if k != "shape"}
            missing = [k for k in required if k not in params]
            if missing:
                raise SceneFormatError(f"domain.{missing[0]}: required for shape {shape!r}")
            try:
                return build(**params)
            except TypeError as exc:
                raise SceneFormatError(f"domain: bad parameters for {shape!r}: {exc}") from None
    except ValidationError as exc:
        raise SceneFormatError(f"domain: {exc}") from None
    raise SceneFormatError("domain: needs either 'vertices' or 'shape'")


def parse_scene(text: str) -> SceneSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise SceneFormatError("top level: expected an object")
    fmt = doc.get("format", FORMAT)
    if fmt != FORMAT:
        raise SceneFormatError(f"format: unsupported {fmt!r}, expected {FORMAT!r}")
    if "domain" not in doc:
        raise SceneFormatError("domain: missing")
    domain = _domain(doc["domain"])
    raw = doc.get("opaque_set")
    if not isinstance(raw, list):
        raise SceneFormatError("opaque_set: expected a list of segments")
    segs = []
    for i, s in enumerate(raw):
        if not isinstance(s, list) or len(s) != 2:
            raise SceneFormatError(f"opaque_set[{i}]: expected [[x, y], [x, y]]")
        segs.append((_point(s[0], f"opaque_set[{i}][0]"), _point(s[1], f"opaque_set[{i}][1]")))
    try:
        segments = SegmentSet(segs)
    except ValidationError as exc:
        raise SceneFormatError(f"opaque_set: {exc}") from None
    name = doc.get("name", "scene")
    if not isinstance(name, str):
        raise SceneFormatError("name: expected a string")
    return SceneSpec(name, domain, segments)


def dump_scene(scene: SceneSpec, metadata: dict | None = None) -> str:
    doc = {
        "format": FORMAT,
        "name": scene.name,
        "domain": {"vertices": scene.domain.vertices.tolist()},
        "opaque_set": scene.segments.endpoints.tolist(),
        "metadata": metadata or {},
    }
    return json.dumps(doc, indent=1) + "\n"


def format_value(value) -> str:
    """Report scalar formatting: floats at 17 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return "%.17g" % value
    return str(value)


def dump_report(flat: dict) -> str:
    """One ``key = value`` line per entry, in insertion order."""
    return "".join(f"{k} = {format_value(v)}\n" for k, v in flat.items())


def parse_report(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        if line.strip():
            key, _, value = line.partition(" = ")
            out[key] = value
    return out
