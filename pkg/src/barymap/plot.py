"""Deterministic static SVG rendering of a map and unit barycenters.

The output is plain SVG 1.1 text with no scripts, no external references and
no randomness: byte-identical inputs give byte-identical documents. Every
category and every unit marker carries a stable id derived from its label or
unit id plus its position in the input order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import isfinite, sqrt
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

from .core import Point2D
from .errors import DataError
from .map_io import OverlayMap, UnitKind

CATEGORY_FILL = "#9aa7b1"
CATEGORY_STROKE = "#5b6770"
KIND_COLORS: Mapping[UnitKind, str] = {
    UnitKind.PANEL_MEMBER: "#d62728",
    UnitKind.RESEARCH_GROUP: "#1f77b4",
    UnitKind.OTHER: "#2ca02c",
}


@dataclass(frozen=True)
class PlotSpec:
    """Canvas geometry and styling knobs.

    category_volumes, when given, scales category circle areas by volume
    (radius runs from base_radius up to max_radius at the largest volume).
    """

    width: int = 900
    height: int = 700
    margin: float = 48.0
    base_radius: float = 4.0
    max_radius: float = 16.0
    marker_radius: float = 7.0
    show_labels: bool = False
    category_volumes: Mapping[int, float] | None = None

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(
                f"canvas must have positive size, got {self.width}x{self.height}"
            )
        if self.margin < 0 or not isfinite(self.margin):
            raise ValueError(f"margin must be finite and >= 0, got {self.margin}")
        if 2 * self.margin >= min(self.width, self.height):
            raise ValueError(
                f"margin {self.margin} leaves no drawing area on a "
                f"{self.width}x{self.height} canvas"
            )
        for name in ("base_radius", "max_radius", "marker_radius"):
            value = getattr(self, name)
            if not (isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value}")


@dataclass(frozen=True)
class CanvasTransform:
    """Affine map-to-canvas transform with the y axis flipped."""

    x_min: float
    x_span: float
    y_min: float
    y_span: float
    width: int
    height: int
    margin: float

    def to_canvas(self, x: float, y: float) -> tuple[float, float]:
        px = self.margin + (x - self.x_min) / self.x_span * (
            self.width - 2 * self.margin
        )
        py = self.height - self.margin - (y - self.y_min) / self.y_span * (
            self.height - 2 * self.margin
        )
        return px, py

    def to_map(self, px: float, py: float) -> tuple[float, float]:
        x = self.x_min + (px - self.margin) / (self.width - 2 * self.margin) * (
            self.x_span
        )
        y = self.y_min + (self.height - self.margin - py) / (
            self.height - 2 * self.margin
        ) * self.y_span
        return x, y


def canvas_transform(overlay_map: OverlayMap, spec: PlotSpec) -> CanvasTransform:
    """Viewport = category bounding box; a degenerate axis is expanded
    symmetrically so the transform stays invertible."""
    xs = [c.x for c in overlay_map.categories]
    ys = [c.y for c in overlay_map.categories]
    x_min, x_max = min(xs), max(xs)
    y_min, y_max = min(ys), max(ys)
    if x_max == x_min:
        x_min, x_max = x_min - 0.5, x_max + 0.5
    if y_max == y_min:
        y_min, y_max = y_min - 0.5, y_max + 0.5
    return CanvasTransform(
        x_min=x_min,
        x_span=x_max - x_min,
        y_min=y_min,
        y_span=y_max - y_min,
        width=spec.width,
        height=spec.height,
        margin=spec.margin,
    )


def _num(value: float) -> str:
    return repr(float(value))


def _slug(text: str) -> str:
    cleaned = re.sub(r"[^A-Za-z0-9_.-]+", "-", text).strip("-")
    return cleaned or "x"


def _category_radius(spec: PlotSpec, index: int, volume_max: float) -> float:
    if spec.category_volumes is None or volume_max <= 0:
        return spec.base_radius
    volume = spec.category_volumes.get(index, 0.0)
    if volume <= 0:
        return spec.base_radius
    return spec.base_radius + (spec.max_radius - spec.base_radius) * sqrt(
        volume / volume_max
    )


def _marker(kind: UnitKind, radius: float, color: str) -> str:
    r = radius
    if kind is UnitKind.PANEL_MEMBER:
        return f'<circle r="{_num(r)}" fill="{color}"/>'
    if kind is UnitKind.RESEARCH_GROUP:
        return (
            f'<rect x="{_num(-r)}" y="{_num(-r)}" width="{_num(2 * r)}" '
            f'height="{_num(2 * r)}" fill="{color}"/>'
        )
    points = f"0,{_num(-r)} {_num(r)},0 0,{_num(r)} {_num(-r)},0"
    return f'<polygon points="{points}" fill="{color}"/>'


def render_overlay_svg(
    overlay_map: OverlayMap,
    barycenters: Sequence[tuple[str, UnitKind, Point2D]] = (),
    spec: PlotSpec = PlotSpec(),
) -> str:
    """Render categories plus unit barycenter markers as an SVG document."""
    transform = canvas_transform(overlay_map, spec)
    volume_max = 0.0
    if spec.category_volumes:
        volume_max = max(spec.category_volumes.values())

    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{spec.width}" height="{spec.height}" '
        f'viewBox="0 0 {spec.width} {spec.height}">',
        f'<rect width="{spec.width}" height="{spec.height}" fill="#ffffff"/>',
        '<g class="categories">',
    ]
    for category in overlay_map.categories:
        px, py = transform.to_canvas(category.x, category.y)
        radius = _category_radius(spec, category.index, volume_max)
        element_id = f"cat-{category.index}-{_slug(category.label)}"
        parts.append(
            f'<circle id="{element_id}" class="category" cx="{_num(px)}" '
            f'cy="{_num(py)}" r="{_num(radius)}" fill="{CATEGORY_FILL}" '
            f'fill-opacity="0.6" stroke="{CATEGORY_STROKE}" stroke-width="0.5">'
            f"<title>{escape(category.label)}</title></circle>"
        )
        if spec.show_labels:
            parts.append(
                f'<text x="{_num(px)}" y="{_num(py - radius - 2.0)}" '
                f'font-size="9" text-anchor="middle" fill="{CATEGORY_STROKE}">'
                f"{escape(category.label)}</text>"
            )
    parts.append("</g>")

    parts.append('<g class="units">')
    for position, (unit_id, kind, point) in enumerate(barycenters):
        if not isinstance(kind, UnitKind):
            raise DataError(f"unit {unit_id!r}: kind must be a UnitKind")
        px, py = transform.to_canvas(point.c1, point.c2)
        element_id = f"unit-{position}-{_slug(unit_id)}"
        color = KIND_COLORS[kind]
        parts.append(
            f'<g id="{element_id}" class="unit unit-{kind.value}" '
            f'transform="translate({_num(px)},{_num(py)})">'
            f"{_marker(kind, spec.marker_radius, color)}"
            f"<title>{escape(unit_id)}</title></g>"
        )
        if spec.show_labels:
            parts.append(
                f'<text x="{_num(px + spec.marker_radius + 2.0)}" '
                f'y="{_num(py)}" font-size="10" fill="{color}">'
                f"{escape(unit_id)}</text>"
            )
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
