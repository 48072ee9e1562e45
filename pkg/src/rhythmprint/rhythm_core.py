"""Quantization onto the 32nd-note tatum grid and rhythm-tree disk assignment.

Disk indices follow the rhythm tree: disk ``i`` holds notes of duration
``2**i`` quarter lengths, from the whole note (``i = 2``) down to the 32nd
note (``i = -3``).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from rhythmprint.errors import DiskOutOfRange, RhythmWarning, UnsupportedTimeSignature
from rhythmprint.score_ingest import RawEvent, RawMeasure, RawScore, merge_ties_within_measure

__all__ = [
    "MIN_DISK",
    "MAX_DISK",
    "DISKS",
    "TatumGrid",
    "RhythmEvent",
    "MeasureRhythm",
    "duration",
    "dotted_duration",
    "classify_event",
    "resolve_measure",
    "quantize_measure",
    "quantize_score",
]

MIN_DISK = -3
MAX_DISK = 2
DISKS = tuple(range(MAX_DISK, MIN_DISK - 1, -1))  # innermost first
RATIO = 2


def duration(i: int) -> Fraction:
    """Duration in quarter lengths of the rhythm-tree layer ``i``.

    >>> duration(2), duration(-3)
    (Fraction(4, 1), Fraction(1, 8))
    """
    if not MIN_DISK <= i <= MAX_DISK:
        raise DiskOutOfRange(f"disk index {i} outside [{MIN_DISK}, {MAX_DISK}]")
    return Fraction(RATIO) ** i


def dotted_duration(i: int, n: int) -> Fraction:
    """Duration of a note on layer ``i`` extended by ``n`` dots."""
    if n < 0:
        raise ValueError("dot count must be non-negative")
    if not MIN_DISK <= i <= MAX_DISK or i - n < MIN_DISK:
        raise DiskOutOfRange(
            f"{n} dot(s) on disk {i} refine below the tatum (disk {i - n})"
        )
    return sum((duration(i - k) for k in range(n + 1)), Fraction(0))


@dataclass(frozen=True)
class TatumGrid:
    slots_per_whole: int = 32

    def __post_init__(self):
        if self.slots_per_whole <= 0 or self.slots_per_whole & (self.slots_per_whole - 1):
            raise ValueError("slots_per_whole must be a positive power of two")

    @property
    def slot_duration_ql(self) -> Fraction:
        return Fraction(4, self.slots_per_whole)

    @property
    def min_disk(self) -> int:
        return -int(math.log2(self.slots_per_whole // 4))

    def slots(self, ql: Fraction) -> Fraction:
        return ql / self.slot_duration_ql


DEFAULT_GRID = TatumGrid()


@dataclass(frozen=True, order=True)
class RhythmEvent:
    onset_slot: int
    disk_index: int
    is_rest: bool = False
    dots: int = 0
    voice: int = 1
    quantization_error_ql: Fraction = Fraction(0)

    @property
    def base_disk(self) -> int:
        """Layer of the undotted note value; dotted notes sit one disk inward."""
        return self.disk_index - 1 if self.dots else self.disk_index

    @property
    def duration_ql(self) -> Fraction:
        """Duration as represented on the grid (not the raw duration)."""
        if self.dots:
            return dotted_duration(self.base_disk, self.dots)
        return duration(self.disk_index)

    @property
    def length_slots(self) -> int:
        return int(self.duration_ql * 8)

    @property
    def key(self) -> tuple[int, int]:
        return self.disk_index, self.onset_slot


@dataclass(frozen=True)
class MeasureRhythm:
    measure_number: int
    time_signature: tuple[int, int]
    events: tuple[RhythmEvent, ...] = field(default=())

    @property
    def capacity_ql(self) -> Fraction:
        beats, beat_unit = self.time_signature
        return Fraction(beats * 4, beat_unit)

    @property
    def angular_span_deg(self) -> float:
        return float(90 * self.capacity_ql)

    @property
    def length_slots(self) -> int:
        return int(self.capacity_ql * 8)


def _dotted_match(value: Fraction, dots: int) -> int | None:
    """Base layer ``i`` with ``dotted_duration(i, dots) == value``, if any."""
    for i in DISKS:
        if i - dots < MIN_DISK:
            continue
        if dotted_duration(i, dots) == value:
            return i
    return None


def classify_event(
    e: RawEvent, grid: TatumGrid = DEFAULT_GRID, measure_number: int | None = None
) -> RhythmEvent | None:
    """Place one raw event on the tatum grid and the rhythm tree.

    Returns ``None`` when the event is shorter than half a tatum slot and
    is dropped. Every lossy step (snapping a tuplet, clamping an overlong
    event, ignoring a dot that does not fit) issues a ``RhythmWarning``.
    """
    where = f"measure {measure_number}: " if measure_number is not None else ""
    if e.duration_ql <= 0:
        raise ValueError("event duration must be positive")
    tatum = grid.slot_duration_ql
    if e.duration_ql < tatum / 2:
        warnings.warn(
            f"{where}event at {e.onset_ql} ql shorter than half a tatum dropped",
            RhythmWarning,
            stacklevel=2,
        )
        return None

    onset_slot = round(grid.slots(e.onset_ql))  # Fraction rounds half to even
    onset_error = abs(e.onset_ql - onset_slot * tatum)

    dots = 0
    dotted_base = _dotted_match(e.duration_ql, e.dots) if e.dots else None
    if dotted_base is not None and dotted_base < MAX_DISK:
        dots = e.dots
        disk = dotted_base + 1
        represented = e.duration_ql
    else:
        if e.dots and dotted_base is None:
            warnings.warn(
                f"{where}dotted event of {e.duration_ql} ql does not match a dotted "
                "value on the grid; treated as undotted",
                RhythmWarning,
                stacklevel=2,
            )
        if e.duration_ql > duration(MAX_DISK):
            warnings.warn(
                f"{where}event of {e.duration_ql} ql exceeds a whole note; clamped",
                RhythmWarning,
                stacklevel=2,
            )
            disk = MAX_DISK
        else:
            disk = max(grid.min_disk, MIN_DISK, math.floor(math.log2(e.duration_ql)))
            # log2 of a Fraction can land a hair below an exact power of two
            while disk < MAX_DISK and duration(disk + 1) <= e.duration_ql:
                disk += 1
            while disk > MIN_DISK and duration(disk) > e.duration_ql:
                disk -= 1
        represented = duration(disk)

    error = onset_error + abs(e.duration_ql - represented)
    if error and e.tuplet_ratio is not None:
        warnings.warn(
            f"{where}tuplet {e.tuplet_ratio[0]}:{e.tuplet_ratio[1]} at {e.onset_ql} ql "
            f"snapped to the grid (error {error} ql)",
            RhythmWarning,
            stacklevel=2,
        )
    elif error and e.duration_ql <= duration(MAX_DISK):
        warnings.warn(
            f"{where}event at {e.onset_ql} ql of {e.duration_ql} ql snapped "
            f"to the grid (error {error} ql)",
            RhythmWarning,
            stacklevel=2,
        )
    return RhythmEvent(
        onset_slot=onset_slot,
        disk_index=disk,
        is_rest=e.is_rest,
        dots=dots,
        voice=e.voice,
        quantization_error_ql=error,
    )


def _survivor(group: list[RhythmEvent]) -> RhythmEvent:
    notes = [ev for ev in group if not ev.is_rest]
    pool = notes or group
    # deterministic pick: most dots, then lowest voice, then smallest error
    return min(pool, key=lambda ev: (-ev.dots, ev.voice, ev.quantization_error_ql))


def resolve_measure(
    events: Iterable[RhythmEvent],
    sig: tuple[int, int],
    measure_number: int = 0,
) -> MeasureRhythm:
    """Aggregate simultaneous events into one per (disk, onset slot).

    Notes win over rests; several notes (or several rests) collapse into
    one, since multiplicity does not change the perceived rhythm.
    """
    capacity = Fraction(sig[0] * 4, sig[1])
    if capacity > 4:
        raise UnsupportedTimeSignature(
            f"measure {measure_number}: {sig[0]}/{sig[1]} lasts {capacity} quarter "
            "lengths, more than the one whole note a single traversal of the "
            "fingerprint circle can show"
        )
    groups: dict[tuple[int, int], list[RhythmEvent]] = {}
    for ev in events:
        groups.setdefault(ev.key, []).append(ev)
    resolved = sorted(
        (_survivor(g) for g in groups.values()),
        key=lambda ev: (-ev.disk_index, ev.onset_slot),
    )
    return MeasureRhythm(
        measure_number=measure_number, time_signature=tuple(sig), events=tuple(resolved)
    )


def quantize_measure(
    measures: RawMeasure | Sequence[RawMeasure], grid: TatumGrid = DEFAULT_GRID
) -> MeasureRhythm:
    """Merge ties, classify and resolve one measure across one or more parts."""
    if isinstance(measures, RawMeasure):
        measures = [measures]
    first = measures[0]
    rhythm_events = []
    for raw in measures:
        for e in merge_ties_within_measure(raw).events:
            ev = classify_event(e, grid, measure_number=raw.number)
            if ev is not None:
                rhythm_events.append(ev)
    return resolve_measure(rhythm_events, first.time_signature, first.number)


def quantize_score(score: RawScore, grid: TatumGrid = DEFAULT_GRID) -> list[MeasureRhythm]:
    """One resolved :class:`MeasureRhythm` per measure, all parts combined."""
    return [quantize_measure(score.measures_at(k), grid) for k in range(score.measure_count)]
