"""Deterministic SVG output for fingerprints and fingerprint strips.

All coordinates are written with four decimals so that the same input
produces byte-identical documents on every platform.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import escape

from rhythmprint.errors import CountMismatch, RhythmWarning
from rhythmprint.fingerprint import (
    DEFAULT_PALETTE,
    Arc,
    Fingerprint,
    Palette,
    Skeleton,
    arc_start_angles,
    build_skeleton,
    color_for,
)
from rhythmprint.score_ingest import RawScore

__all__ = [
    "RenderSpec",
    "PlacementAnchor",
    "render_fingerprint",
    "render_strip",
    "export_anchors",
    "sector_path",
    "polar_point",
    "strip_shape",
]

MIN_DIAMETER_PX = 40
LABEL_HEIGHT_PX = 14
MEASURES_PER_SYSTEM = 4
SKELETON_STROKE = "#bdbdbd"
ARC_STROKE = "#ffffff"
_FULL_CIRCLE_EPS = 1e-9


@dataclass(frozen=True)
class RenderSpec:
    fingerprint_diameter_px: int = 120
    strip_columns: int = 8
    margin_px: int = 4
    palette: Palette = DEFAULT_PALETTE
    background: str = "#ffffff"
    show_skeleton: bool = True

    def __post_init__(self):
        if self.fingerprint_diameter_px < MIN_DIAMETER_PX:
            raise ValueError(
                f"fingerprint diameter must be at least {MIN_DIAMETER_PX} px"
            )
        if self.strip_columns < 1:
            raise ValueError("strip_columns must be positive")
        if self.margin_px < 0:
            raise ValueError("margin_px must be non-negative")
        if not isinstance(self.palette, Palette):
            object.__setattr__(self, "palette", Palette.from_list(self.palette))

    @property
    def cell_px(self) -> int:
        return self.fingerprint_diameter_px + 2 * self.margin_px


@dataclass(frozen=True)
class PlacementAnchor:
    measure_number: int
    system_index: int
    x_fraction: float
    y_fraction: float


def _fmt(value: float) -> str:
    text = f"{value:.4f}"
    return "0.0000" if text == "-0.0000" else text


def polar_point(cx: float, cy: float, radius: float, angle_deg: float) -> tuple[float, float]:
    """Point at ``angle_deg`` clockwise from twelve o'clock."""
    theta = math.radians(angle_deg)
    return cx + radius * math.sin(theta), cy - radius * math.cos(theta)


def sector_path(
    cx: float, cy: float, r_in: float, r_out: float, start_deg: float, extent_deg: float
) -> str:
    """SVG path data for an annulus sector.

    A full turn is drawn as two half-turn arc commands per edge because a
    single arc command with coincident end points draws nothing.
    """
    def pt(r, a):
        x, y = polar_point(cx, cy, r, a)
        return f"{_fmt(x)} {_fmt(y)}"

    ro, ri = _fmt(r_out), _fmt(r_in)
    if extent_deg >= 360 - _FULL_CIRCLE_EPS:
        mid = start_deg + 180
        d = (
            f"M {pt(r_out, start_deg)} A {ro} {ro} 0 0 1 {pt(r_out, mid)} "
            f"A {ro} {ro} 0 0 1 {pt(r_out, start_deg)} Z"
        )
        if r_in > 0:
            d += (
                f" M {pt(r_in, start_deg)} A {ri} {ri} 0 0 0 {pt(r_in, mid)} "
                f"A {ri} {ri} 0 0 0 {pt(r_in, start_deg)} Z"
            )
        return d
    end = start_deg + extent_deg
    large = 1 if extent_deg > 180 else 0
    d = f"M {pt(r_out, start_deg)} A {ro} {ro} 0 {large} 1 {pt(r_out, end)} "
    if r_in > 0:
        d += f"L {pt(r_in, end)} A {ri} {ri} 0 {large} 0 {pt(r_in, start_deg)} Z"
    else:
        d += f"L {_fmt(cx)} {_fmt(cy)} Z"
    return d


def _skeleton_cells(sk: Skeleton, cx: float, cy: float, radius: float, span: float) -> list[str]:
    lines = []
    for disk in sk.disks:
        for start in arc_start_angles(disk.disk_index):
            unused = start >= span - _FULL_CIRCLE_EPS
            cls = "cell unused" if unused else "cell"
            extra = ' stroke-opacity="0.35"' if unused else ""
            d = sector_path(
                cx, cy, disk.inner_radius * radius, disk.outer_radius * radius,
                start, disk.arc_extent_deg,
            )
            lines.append(f'<path class="{cls}" data-disk="{disk.disk_index}" d="{d}"{extra}/>')
    return lines


def _arc_element(arc: Arc, sk: Skeleton, cx: float, cy: float, radius: float, palette: Palette) -> str:
    disk = sk.disk(arc.disk_index)
    d = sector_path(
        cx, cy, disk.inner_radius * radius, disk.outer_radius * radius,
        arc.start_deg, arc.extent_deg,
    )
    kind, rank = arc.color_id
    fill = color_for(arc.is_rest, rank, palette)
    rule = ' fill-rule="evenodd"' if arc.extent_deg >= 360 - _FULL_CIRCLE_EPS else ""
    return (
        f'<path class="arc {kind}" data-disk="{arc.disk_index}" '
        f'data-start="{_fmt(arc.start_deg)}" data-extent="{_fmt(arc.extent_deg)}" '
        f'fill="{fill}"{rule} d="{d}"/>'
    )


def _fingerprint_body(fp: Fingerprint, spec: RenderSpec, sk: Skeleton, ox: float, oy: float) -> list[str]:
    radius = spec.fingerprint_diameter_px / 2
    cx = ox + spec.margin_px + radius
    cy = oy + spec.margin_px + radius
    lines = []
    span = fp.angular_span_deg
    if spec.show_skeleton:
        lines.append(f'<g class="skeleton" fill="none" stroke="{SKELETON_STROKE}" stroke-width="0.5">')
        lines.extend(_skeleton_cells(sk, cx, cy, radius, span))
        lines.append("</g>")
    elif span < 360 - _FULL_CIRCLE_EPS:
        outer = sk.disks[-1].outer_radius * radius
        inner = sk.disks[0].inner_radius * radius
        d = sector_path(cx, cy, inner, outer, span, 360 - span)
        lines.append(
            f'<path class="unused" fill="none" stroke="{SKELETON_STROKE}" '
            f'stroke-opacity="0.35" stroke-width="0.5" d="{d}"/>'
        )
    lines.append(f'<g class="arcs" stroke="{ARC_STROKE}" stroke-width="0.5">')
    for arc in fp.sorted_arcs():
        lines.append(_arc_element(arc, sk, cx, cy, radius, spec.palette))
    lines.append("</g>")
    return lines


def _document(width: float, height: float, title: str, body: list[str], background: str) -> bytes:
    w, h = _fmt(width), _fmt(height)
    lines = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="{background}"/>',
        *body,
        "</svg>",
    ]
    return ("\n".join(lines) + "\n").encode("utf-8")


def render_fingerprint(fp: Fingerprint, spec: RenderSpec = RenderSpec(), sk: Skeleton | None = None) -> bytes:
    """One fingerprint as a standalone SVG 1.1 document."""
    sk = sk or build_skeleton()
    size = spec.cell_px
    body = _fingerprint_body(fp, spec, sk, 0, 0)
    return _document(size, size, f"Measure {fp.measure_number}", body, spec.background)


def strip_shape(n: int, columns: int) -> tuple[int, int]:
    """(rows, columns) of the grid holding ``n`` fingerprints."""
    if n == 0:
        return 0, 0
    return math.ceil(n / columns), min(n, columns)


def render_strip(fps: Sequence[Fingerprint], spec: RenderSpec = RenderSpec(), sk: Skeleton | None = None) -> bytes:
    """Fingerprints on a grid in measure order, each labeled with its number."""
    sk = sk or build_skeleton()
    if not fps:
        warnings.warn("render_strip called with no fingerprints", RhythmWarning, stacklevel=2)
    rows, cols = strip_shape(len(fps), spec.strip_columns)
    cell_w = spec.cell_px
    cell_h = spec.cell_px + LABEL_HEIGHT_PX
    body = []
    for k, fp in enumerate(fps):
        row, col = divmod(k, spec.strip_columns)
        ox, oy = col * cell_w, row * cell_h
        body.append(
            f'<g class="measure" id="m{fp.measure_number}" '
            f'data-row="{row}" data-col="{col}">'
        )
        body.extend(_fingerprint_body(fp, spec, sk, ox, oy))
        body.append(
            f'<text x="{_fmt(ox + cell_w / 2)}" y="{_fmt(oy + spec.cell_px + LABEL_HEIGHT_PX - 3)}" '
            f'font-family="sans-serif" font-size="10" text-anchor="middle">{fp.measure_number}</text>'
        )
        body.append("</g>")
    return _document(cols * cell_w, rows * cell_h, "Rhythmic fingerprints", body, spec.background)


def export_anchors(
    score: RawScore, fps: Sequence[Fingerprint], measures_per_system: int = MEASURES_PER_SYSTEM
) -> dict:
    """Placement anchors for overlaying fingerprints on an engraved score.

    Measures flow left to right, ``measures_per_system`` to a system; each
    anchor is the center of its measure's slot as a fraction of the page.
    """
    numbers = [m.number for m in score.parts[0].measures] if score.parts else []
    if len(fps) != len(numbers):
        raise CountMismatch(
            f"{len(fps)} fingerprints for a score of {len(numbers)} measures"
        )
    systems = max(1, math.ceil(len(numbers) / measures_per_system))
    anchors = []
    for k, number in enumerate(numbers):
        system, col = divmod(k, measures_per_system)
        anchors.append(
            PlacementAnchor(
                measure_number=number,
                system_index=system,
                x_fraction=(col + 0.5) / measures_per_system,
                y_fraction=(system + 0.5) / systems,
            )
        )
    return {
        "schema": 1,
        "measures_per_system": measures_per_system,
        "anchors": [vars(a) for a in anchors],
    }
