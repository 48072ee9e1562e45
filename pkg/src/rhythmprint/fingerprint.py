"""Radial fingerprint geometry: skeleton disks, arcs and their colors.

Angles are in degrees, measured clockwise from twelve o'clock. One full
traversal of the circle is one whole note (4 quarter lengths), so a tatum
slot spans 360/32 = 11.25 degrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from rhythmprint.errors import ArcOverflow, DiskOutOfRange, PaletteError, RankOutOfRange
from rhythmprint.rhythm_core import (
    DISKS,
    MAX_DISK,
    MIN_DISK,
    MeasureRhythm,
    RhythmEvent,
    duration,
)

__all__ = [
    "CIRCUMFERENCE_DEG",
    "TACTUS",
    "SLOT_DEG",
    "DiskSpec",
    "Skeleton",
    "Arc",
    "Fingerprint",
    "Palette",
    "DEFAULT_PALETTE",
    "relative_luminance",
    "arc_count",
    "build_skeleton",
    "arc_start_angles",
    "build_fingerprint",
    "color_for",
]

CIRCUMFERENCE_DEG = 360.0
TACTUS = 4
SLOT_DEG = CIRCUMFERENCE_DEG / 32
INNER_RADIUS = 0.15
OUTER_RADIUS = 1.0
_EPS = 1e-9


def arc_count(i: int) -> int:
    """Number of arcs on disk ``i``: the tactus divided by the layer duration."""
    count = TACTUS / duration(i)
    return int(count)


@dataclass(frozen=True)
class DiskSpec:
    disk_index: int
    arc_count: int
    inner_radius: float
    outer_radius: float

    @property
    def arc_extent_deg(self) -> float:
        return CIRCUMFERENCE_DEG / self.arc_count

    @property
    def rank(self) -> int:
        return MAX_DISK - self.disk_index


@dataclass(frozen=True)
class Skeleton:
    disks: tuple[DiskSpec, ...]
    circumference_deg: float = CIRCUMFERENCE_DEG
    tactus: int = TACTUS

    def disk(self, i: int) -> DiskSpec:
        for spec in self.disks:
            if spec.disk_index == i:
                return spec
        raise DiskOutOfRange(f"disk index {i} outside [{MIN_DISK}, {MAX_DISK}]")


def build_skeleton(inner_radius: float = INNER_RADIUS, outer_radius: float = OUTER_RADIUS) -> Skeleton:
    """Six equally thick rings, whole-note disk innermost."""
    thickness = (outer_radius - inner_radius) / len(DISKS)
    disks = []
    for ring, i in enumerate(DISKS):
        lo = inner_radius + ring * thickness
        hi = outer_radius if ring == len(DISKS) - 1 else lo + thickness
        disks.append(DiskSpec(i, arc_count(i), lo, hi))
    return Skeleton(disks=tuple(disks))


def arc_start_angles(i: int) -> tuple[float, ...]:
    """Evenly spaced arc starts on disk ``i``, beginning at top center."""
    n = arc_count(i)
    return tuple(k * CIRCUMFERENCE_DEG / n for k in range(n))


def relative_luminance(color: str) -> float:
    """WCAG relative luminance of a ``#rrggbb`` color."""
    color = color.lstrip("#")
    channels = []
    for k in range(0, 6, 2):
        c = int(color[k : k + 2], 16) / 255
        channels.append(c / 12.92 if c <= 0.03928 else ((c + 0.055) / 1.055) ** 2.4)
    r, g, b = channels
    return 0.2126 * r + 0.7152 * g + 0.0722 * b


def _normalize_hex(color: str) -> str:
    text = color.strip().lower()
    if not text.startswith("#"):
        text = "#" + text
    if len(text) == 4:
        text = "#" + "".join(ch * 2 for ch in text[1:])
    try:
        int(text[1:], 16)
    except ValueError:
        raise PaletteError(f"not a hex color: {color!r}") from None
    if len(text) != 7:
        raise PaletteError(f"not a hex color: {color!r}")
    return text


@dataclass(frozen=True)
class Palette:
    """Six note colors and six rest colors, each ordered dark to light."""

    notes: tuple[str, ...]
    rests: tuple[str, ...]

    def __post_init__(self):
        for name in ("notes", "rests"):
            scale = tuple(_normalize_hex(c) for c in getattr(self, name))
            if len(scale) != len(DISKS):
                raise PaletteError(f"{name} scale needs {len(DISKS)} colors, got {len(scale)}")
            lum = [relative_luminance(c) for c in scale]
            if any(b <= a for a, b in zip(lum, lum[1:])):
                raise PaletteError(f"{name} scale is not strictly increasing in lightness")
            object.__setattr__(self, name, scale)

    @classmethod
    def from_list(cls, colors: Sequence[str]) -> "Palette":
        colors = list(colors)
        if len(colors) != 2 * len(DISKS):
            raise PaletteError(f"palette needs 12 colors (6 note + 6 rest), got {len(colors)}")
        return cls(notes=tuple(colors[:6]), rests=tuple(colors[6:]))

    def to_list(self) -> list[str]:
        return list(self.notes) + list(self.rests)


# warm scale for sound, cool scale for silence
DEFAULT_PALETTE = Palette(
    notes=("#7f2704", "#a63603", "#d94801", "#f16913", "#fd8d3c", "#fdae6b"),
    rests=("#08306b", "#08519c", "#2171b5", "#4292c6", "#6baed6", "#9ecae1"),
)


def color_for(is_rest: bool, rank: int, palette: Palette = DEFAULT_PALETTE) -> str:
    if not 0 <= rank < len(DISKS):
        raise RankOutOfRange(f"rank {rank} outside [0, {len(DISKS) - 1}]")
    return (palette.rests if is_rest else palette.notes)[rank]


@dataclass(frozen=True)
class Arc:
    disk_index: int
    start_deg: float
    extent_deg: float
    is_rest: bool

    @property
    def rank(self) -> int:
        return MAX_DISK - self.disk_index

    @property
    def color_id(self) -> tuple[str, int]:
        return ("rest" if self.is_rest else "note", self.rank)

    @property
    def end_deg(self) -> float:
        return self.start_deg + self.extent_deg

    @property
    def sort_key(self) -> tuple:
        return (-self.disk_index, self.start_deg, self.extent_deg, self.is_rest)


@dataclass(frozen=True, eq=False)
class Fingerprint:
    """Arcs of one measure. Equality and hashing look at the arcs only,
    so identical rhythms in different measures compare equal."""

    measure_number: int
    angular_span_deg: float
    arcs: frozenset[Arc] = field(default_factory=frozenset)

    def __eq__(self, other):
        if not isinstance(other, Fingerprint):
            return NotImplemented
        return self.arcs == other.arcs

    def __hash__(self):
        return hash(self.arcs)

    def sorted_arcs(self) -> list[Arc]:
        """Arcs in drawing order: disk descending, then start angle."""
        return sorted(self.arcs, key=lambda a: a.sort_key)

    def arcs_on(self, disk_index: int) -> list[Arc]:
        return [a for a in self.sorted_arcs() if a.disk_index == disk_index]


def _arc_for(event: RhythmEvent) -> Arc:
    return Arc(
        disk_index=event.disk_index,
        start_deg=event.onset_slot * SLOT_DEG,
        extent_deg=float(90 * event.duration_ql),
        is_rest=event.is_rest,
    )


def build_fingerprint(m: MeasureRhythm, sk: Skeleton | None = None) -> Fingerprint:
    """Turn a resolved measure into arcs on the skeleton.

    Raises :class:`ArcOverflow` if an arc would run past the measure's
    angular span (e.g. a half note starting on the last beat of 3/4).
    """
    sk = sk or build_skeleton()
    span = m.angular_span_deg
    arcs = []
    for event in m.events:
        sk.disk(event.disk_index)
        arc = _arc_for(event)
        if arc.start_deg < -_EPS or arc.end_deg > span + _EPS:
            raise ArcOverflow(
                f"measure {m.measure_number}: arc on disk {arc.disk_index} from "
                f"{arc.start_deg:g} to {arc.end_deg:g} degrees exceeds the "
                f"{span:g}-degree span"
            )
        arcs.append(arc)
    return Fingerprint(m.measure_number, span, frozenset(arcs))
