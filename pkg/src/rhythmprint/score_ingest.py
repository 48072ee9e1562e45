"""Read the rhythm-relevant subset of partwise MusicXML.

Only onsets, durations, rests, voices, dots, ties, chords and tuplet ratios
survive parsing. Pitch, layout and everything else is skipped.
"""

from __future__ import annotations

import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from rhythmprint.errors import (
    CompressedMusicXML,
    InconsistentParts,
    MalformedXml,
    MissingDivisions,
    NegativeCursor,
    RhythmWarning,
    UnsupportedRoot,
    UnsupportedTimeSignature,
)

__all__ = [
    "RawEvent",
    "RawMeasure",
    "RawPart",
    "RawScore",
    "parse_musicxml",
    "read_musicxml",
    "merge_ties_within_measure",
]

TIE_KINDS = ("none", "start", "stop", "continue")
DEFAULT_TIME_SIGNATURE = (4, 4)


@dataclass(frozen=True)
class RawEvent:
    onset_ql: Fraction
    duration_ql: Fraction
    is_rest: bool
    voice: int = 1
    dots: int = 0
    tie: str = "none"
    chord_member: bool = False
    tuplet_ratio: tuple[int, int] | None = None
    continuation: bool = False

    @property
    def end_ql(self) -> Fraction:
        return self.onset_ql + self.duration_ql


@dataclass(frozen=True)
class RawMeasure:
    number: int
    time_signature: tuple[int, int]
    divisions: int
    events: tuple[RawEvent, ...] = ()

    @property
    def capacity_ql(self) -> Fraction:
        beats, beat_unit = self.time_signature
        return Fraction(beats * 4, beat_unit)


@dataclass(frozen=True)
class RawPart:
    part_id: str
    measures: tuple[RawMeasure, ...]


@dataclass(frozen=True)
class RawScore:
    parts: tuple[RawPart, ...]
    work_title: str = ""
    source_path: str = ""

    @property
    def measure_count(self) -> int:
        return len(self.parts[0].measures) if self.parts else 0

    def measures_at(self, index: int) -> list[RawMeasure]:
        """The measure at position ``index`` in every part."""
        return [part.measures[index] for part in self.parts]


def _warn(message: str) -> None:
    warnings.warn(message, RhythmWarning, stacklevel=3)


def _int_text(elem: ET.Element | None, default: int | None = None) -> int | None:
    if elem is None or elem.text is None:
        return default
    try:
        return int(elem.text.strip())
    except ValueError:
        return default


def _parse_time(time_elem: ET.Element) -> tuple[int, int] | None:
    if time_elem.find("senza-misura") is not None:
        return None
    beats_elems = time_elem.findall("beats")
    unit_elems = time_elem.findall("beat-type")
    if not beats_elems or not unit_elems:
        return None
    if len(beats_elems) > 1:
        _warn("composite time signature: only the first beats/beat-type pair is used")
    # additive numerators such as "3+2"
    beats = sum(int(b) for b in beats_elems[0].text.strip().split("+"))
    beat_unit = int(unit_elems[0].text.strip())
    if beat_unit <= 0 or beat_unit & (beat_unit - 1):
        raise UnsupportedTimeSignature(
            f"beat unit {beat_unit} is not a power of two"
        )
    return beats, beat_unit


def _tie_kind(note: ET.Element) -> str:
    types = {t.get("type") for t in note.findall("tie")}
    if not types:
        types = {t.get("type") for t in note.findall("notations/tied")}
    types.discard(None)
    if "continue" in types or {"start", "stop"} <= types:
        return "continue"
    if "start" in types:
        return "start"
    if "stop" in types:
        return "stop"
    return "none"


def _tuplet_ratio(note: ET.Element) -> tuple[int, int] | None:
    tm = note.find("time-modification")
    if tm is None:
        return None
    actual = _int_text(tm.find("actual-notes"))
    normal = _int_text(tm.find("normal-notes"))
    if not actual or not normal:
        return None
    return actual, normal


def _voice(note: ET.Element) -> int:
    return _int_text(note.find("voice"), 1) or 1


def _measure_number(raw: str | None, previous: int) -> int:
    try:
        number = int(raw) if raw is not None else previous + 1
    except ValueError:
        number = previous + 1
    if number <= previous:
        _warn(f"measure number {raw!r} is not increasing; renumbered to {previous + 1}")
        number = previous + 1
    return number


def _parse_part(part: ET.Element) -> RawPart:
    part_id = part.get("id", "")
    divisions: int | None = None
    time_signature: tuple[int, int] | None = None
    warned_default_time = False
    measures = []
    previous_number = -1

    for measure in part.findall("measure"):
        number = _measure_number(measure.get("number"), previous_number)
        previous_number = number
        cursor = Fraction(0)  # quarter lengths
        last_onset = Fraction(0)
        events: list[RawEvent] = []

        for child in measure:
            tag = child.tag
            if tag == "attributes":
                div = _int_text(child.find("divisions"))
                if div is not None:
                    if div <= 0:
                        raise MissingDivisions(
                            f"measure {number}: divisions must be positive, got {div}"
                        )
                    divisions = div
                time_elem = child.find("time")
                if time_elem is not None:
                    parsed = _parse_time(time_elem)
                    if parsed is not None:
                        time_signature = parsed
            elif tag in ("backup", "forward"):
                if divisions is None:
                    raise MissingDivisions(f"measure {number}: {tag} before divisions")
                amount = Fraction(_int_text(child.find("duration"), 0), divisions)
                cursor = cursor - amount if tag == "backup" else cursor + amount
                if cursor < 0:
                    raise NegativeCursor(
                        f"measure {number}: backup moves before the measure start"
                    )
            elif tag == "note":
                if child.find("grace") is not None:
                    _warn(f"measure {number}: grace note dropped")
                    continue
                if divisions is None:
                    raise MissingDivisions(
                        f"measure {number}: note encountered before any <divisions>"
                    )
                raw_duration = _int_text(child.find("duration"))
                if not raw_duration or raw_duration <= 0:
                    _warn(f"measure {number}: note without positive duration dropped")
                    continue
                duration = Fraction(raw_duration, divisions)
                is_chord = child.find("chord") is not None
                onset = last_onset if is_chord else cursor
                events.append(
                    RawEvent(
                        onset_ql=onset,
                        duration_ql=duration,
                        is_rest=child.find("rest") is not None,
                        voice=_voice(child),
                        dots=len(child.findall("dot")),
                        tie=_tie_kind(child),
                        chord_member=is_chord,
                        tuplet_ratio=_tuplet_ratio(child),
                    )
                )
                if not is_chord:
                    last_onset = cursor
                    cursor += duration

        if time_signature is None:
            time_signature = DEFAULT_TIME_SIGNATURE
            if not warned_default_time:
                _warn(f"part {part_id!r}: no time signature, assuming 4/4")
                warned_default_time = True
        if divisions is None:
            if events:
                raise MissingDivisions(f"measure {number}: no divisions declared")
            divisions = 1

        capacity = Fraction(time_signature[0] * 4, time_signature[1])
        slack = Fraction(1, divisions)
        for event in events:
            if event.end_ql > capacity + slack:
                _warn(
                    f"measure {number}: event at {event.onset_ql} ql runs past "
                    f"the measure capacity of {capacity} ql"
                )
                break

        measures.append(
            RawMeasure(
                number=number,
                time_signature=time_signature,
                divisions=divisions,
                events=tuple(events),
            )
        )
    return RawPart(part_id=part_id, measures=tuple(measures))


def parse_musicxml(data: bytes, source_path: str = "") -> RawScore:
    """Parse an uncompressed score-partwise MusicXML document.

    Every ``<note>`` (except grace notes, dropped with a ``RhythmWarning``)
    becomes a :class:`RawEvent` whose onset is measured in quarter lengths
    from the start of its measure. ``<backup>`` and ``<forward>`` move the
    onset cursor; ``<chord/>`` members reuse the previous note's onset.
    """
    if data[:2] == b"PK":
        raise CompressedMusicXML(
            "compressed .mxl archives are not supported; extract the inner .xml file"
        )
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedXml(f"not well-formed XML: {exc}") from None
    if root.tag != "score-partwise":
        raise UnsupportedRoot(f"expected <score-partwise>, found <{root.tag}>")

    parts = tuple(_parse_part(p) for p in root.findall("part"))
    ids = [p.part_id for p in parts]
    if len(set(ids)) != len(ids):
        raise InconsistentParts(f"duplicate part ids: {ids}")
    counts = {len(p.measures) for p in parts}
    if len(counts) > 1:
        raise InconsistentParts(f"parts have differing measure counts: {sorted(counts)}")

    title = root.findtext("work/work-title") or root.findtext("movement-title") or ""
    return RawScore(parts=parts, work_title=title.strip(), source_path=source_path)


def read_musicxml(path: str | Path) -> RawScore:
    path = Path(path)
    if path.suffix.lower() == ".mxl":
        raise CompressedMusicXML(
            f"{path.name}: compressed .mxl archives are not supported; "
            "extract the inner .xml file"
        )
    return parse_musicxml(path.read_bytes(), source_path=str(path))


def _infer_dots(duration: Fraction) -> int:
    """Dots needed to spell ``duration`` as one dotted power-of-two note."""
    for dots in range(4):
        base = duration * 2**dots / (2 ** (dots + 1) - 1)
        if base.numerator == 1 or base.denominator == 1:
            value = base.numerator if base.denominator == 1 else base.denominator
            if value & (value - 1) == 0:
                return dots
    return 0


def merge_ties_within_measure(m: RawMeasure) -> RawMeasure:
    """Fuse tie chains that start and end inside ``m`` into single events.

    A chain member is matched by voice and by starting exactly where the
    previous member ends. Stops arriving at onset 0 without a partner are
    continuations from the previous measure and are flagged as such; any
    other unmatched stop raises a ``RhythmWarning`` and is kept unchanged.
    """
    order = sorted(range(len(m.events)), key=lambda k: (m.events[k].onset_ql, k))
    merged: dict[int, RawEvent] = {}
    chain_len: dict[int, int] = {}
    open_chains: dict[tuple[int, Fraction], list[int]] = {}
    absorbed: set[int] = set()

    for k in order:
        event = m.events[k]
        if event.tie in ("stop", "continue"):
            heads = open_chains.get((event.voice, event.onset_ql))
            if heads:
                head = heads.pop(0)
                current = merged[head]
                merged[head] = replace(
                    current,
                    duration_ql=current.duration_ql + event.duration_ql,
                    tie="start" if event.tie == "continue" else _closed_tie(current),
                )
                chain_len[head] += 1
                absorbed.add(k)
                if event.tie == "continue":
                    open_chains.setdefault((event.voice, merged[head].end_ql), []).append(head)
                continue
            if event.onset_ql == 0:
                event = replace(event, continuation=True)
            else:
                warnings.warn(
                    f"measure {m.number}: dangling tie in voice {event.voice} "
                    f"at {event.onset_ql} ql",
                    RhythmWarning,
                    stacklevel=2,
                )
        merged[k] = event
        chain_len[k] = 1
        if event.tie in ("start", "continue"):
            open_chains.setdefault((event.voice, event.end_ql), []).append(k)

    events = []
    for k in range(len(m.events)):
        if k in absorbed:
            continue
        event = merged[k]
        if chain_len[k] > 1:
            event = replace(event, dots=_infer_dots(event.duration_ql))
        events.append(event)
    return replace(m, events=tuple(events))


def _closed_tie(head: RawEvent) -> str:
    # a chain opened here is now complete; a chain carried in from the
    # previous measure keeps its stop marker
    return "stop" if head.continuation else "none"
