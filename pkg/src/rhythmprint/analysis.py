"""Rhythm metrics and recurrent-pattern structure labeling."""

from __future__ import annotations

import math
import statistics
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Sequence

from rhythmprint.errors import EmptyInput
from rhythmprint.fingerprint import SLOT_DEG, Fingerprint
from rhythmprint.rhythm_core import DISKS, MAX_DISK, MeasureRhythm

__all__ = [
    "OnsetProfile",
    "ComplexityReport",
    "StructureLabeling",
    "onset_profile",
    "onset_profile_from_fingerprint",
    "evenness",
    "hierarchy_entropy",
    "complexity",
    "complexity_from_fingerprint",
    "detect_patterns",
    "compare_scores",
    "disk_histogram",
]


@dataclass(frozen=True)
class OnsetProfile:
    measure_number: int
    onsets: tuple[int, ...]
    iois: tuple[int, ...]
    length_slots: int


@dataclass(frozen=True)
class ComplexityReport:
    measure_number: int
    disks_used: int
    hierarchy_entropy: float
    evenness: float


@dataclass(frozen=True)
class StructureLabeling:
    labels: tuple[str, ...]
    segments: tuple[tuple[int, int, str], ...]

    @property
    def form(self) -> str:
        return "".join(self.labels)


def _cyclic_iois(onsets: Sequence[int], length: int) -> tuple[int, ...]:
    if len(onsets) < 2:
        return ()
    gaps = [b - a for a, b in zip(onsets, onsets[1:])]
    gaps.append(onsets[0] + length - onsets[-1])
    return tuple(gaps)


def onset_profile(m: MeasureRhythm) -> OnsetProfile:
    """Note onsets (rests excluded, one per slot) and their cyclic IOIs."""
    onsets = tuple(sorted({ev.onset_slot for ev in m.events if not ev.is_rest}))
    return OnsetProfile(m.measure_number, onsets, _cyclic_iois(onsets, m.length_slots), m.length_slots)


def onset_profile_from_fingerprint(fp: Fingerprint) -> OnsetProfile:
    length = round(fp.angular_span_deg / SLOT_DEG)
    onsets = tuple(sorted({round(a.start_deg / SLOT_DEG) for a in fp.arcs if not a.is_rest}))
    return OnsetProfile(fp.measure_number, onsets, _cyclic_iois(onsets, length), length)


def evenness(p: OnsetProfile) -> float:
    """1 minus the coefficient of variation of the cyclic IOIs, floored at 0.

    Exactly 1.0 when all IOIs are equal or there are fewer than two onsets.
    """
    iois = p.iois
    if len(iois) < 2 or len(set(iois)) == 1:
        return 1.0
    cv = statistics.stdev(iois) / statistics.fmean(iois)
    return max(0.0, 1.0 - cv)


def hierarchy_entropy(disk_indices: Sequence[int]) -> float:
    """Shannon entropy (bits) of how events spread over the rhythm-tree disks."""
    counts = Counter(disk_indices)
    total = sum(counts.values())
    if total == 0:
        return 0.0
    h = -sum(c / total * math.log2(c / total) for c in counts.values())
    return h + 0.0  # turn -0.0 into 0.0


def complexity(m: MeasureRhythm) -> ComplexityReport:
    note_disks = [ev.disk_index for ev in m.events if not ev.is_rest]
    return ComplexityReport(
        measure_number=m.measure_number,
        disks_used=len(set(note_disks)),
        hierarchy_entropy=hierarchy_entropy(note_disks),
        evenness=evenness(onset_profile(m)),
    )


def complexity_from_fingerprint(fp: Fingerprint) -> ComplexityReport:
    note_disks = [a.disk_index for a in fp.arcs if not a.is_rest]
    return ComplexityReport(
        measure_number=fp.measure_number,
        disks_used=len(set(note_disks)),
        hierarchy_entropy=hierarchy_entropy(note_disks),
        evenness=evenness(onset_profile_from_fingerprint(fp)),
    )


def _letters(k: int) -> str:
    # A..Z, AA, AB, ...
    out = ""
    k += 1
    while k:
        k, rem = divmod(k - 1, 26)
        out = chr(ord("A") + rem) + out
    return out


def _canonical_ids(items: Sequence[Hashable]) -> list[int]:
    seen: dict[Hashable, int] = {}
    return [seen.setdefault(item, len(seen)) for item in items]


def _occurrences(ids: list[int], covered: list[bool], start: int, length: int) -> list[int]:
    """Leftmost non-overlapping uncovered occurrences of ids[start:start+length]."""
    pattern = ids[start : start + length]
    found = []
    k = 0
    n = len(ids)
    while k + length <= n:
        if not any(covered[k : k + length]) and ids[k : k + length] == pattern:
            found.append(k)
            k += length
        else:
            k += 1
    return found


def _primitive_root(block: list[int]) -> int:
    """Length of the shortest ``u`` with ``block == u * k``."""
    n = len(block)
    for p in range(1, n + 1):
        if n % p == 0 and block[:p] * (n // p) == block:
            return p
    return n


def _runs(block: list[int]) -> list[int]:
    lengths = []
    for k, item in enumerate(block):
        if k and item == block[k - 1]:
            lengths[-1] += 1
        else:
            lengths.append(1)
    return lengths


def _repeat_segments(ids: list[int], min_len: int) -> list[tuple[int, int]]:
    """Greedy longest-first, leftmost-first extraction of repeated blocks.

    Returns (start, length) spans covering every position exactly once;
    positions outside any repeat come back as length-1 spans.
    """
    n = len(ids)
    covered = [False] * n
    spans: list[tuple[int, int]] = []
    for length in range(n // 2, min_len - 1, -1):
        start = 0
        while start + length <= n:
            if any(covered[start : start + length]):
                start += 1
                continue
            occ = _occurrences(ids, covered, start, length)
            if len(occ) >= 2:
                for k in occ:
                    spans.append((k, length))
                    for j in range(k, k + length):
                        covered[j] = True
            start += 1
    spans.extend((k, 1) for k in range(n) if not covered[k])
    return sorted(spans)


def _refine(ids: list[int], start: int, length: int) -> list[tuple[int, int]]:
    """Split a repeated block into its sections.

    A block that is a power of a shorter unit is cut into copies of that
    unit; each piece is then cut into runs of identical measures.
    """
    block = ids[start : start + length]
    period = _primitive_root(block)
    pieces = []
    for p in range(start, start + length, period):
        offset = p
        for run in _runs(ids[p : p + period]):
            pieces.append((offset, run))
            offset += run
    return pieces


def detect_patterns(
    fps: Sequence[Hashable], min_len: int = 2, measure_numbers: Sequence[int] | None = None
) -> StructureLabeling:
    """Label a measure sequence with letters by recurrent exact repeats.

    Measures are first reduced to ids by fingerprint equality. Repeated
    blocks of at least ``min_len`` measures are taken greedily, longest
    first and leftmost first, without overlap. Each repeated block is then
    split into its sections (copies of its shortest period, then runs of
    identical measures); leftover measures become one-measure segments.
    Sections with identical content share a letter; letters are handed out
    in order of first appearance.
    """
    if min_len < 1:
        raise ValueError("min_len must be at least 1")
    if measure_numbers is None:
        measure_numbers = [getattr(fp, "measure_number", k + 1) for k, fp in enumerate(fps)]
    ids = _canonical_ids(list(fps))
    pieces: list[tuple[int, int]] = []
    for start, length in _repeat_segments(ids, min_len):
        if length == 1:
            pieces.append((start, 1))
        else:
            pieces.extend(_refine(ids, start, length))

    names: dict[tuple[int, ...], str] = {}
    labels = []
    segments = []
    for start, length in pieces:
        content = tuple(ids[start : start + length])
        label = names.setdefault(content, _letters(len(names)))
        labels.append(label)
        segments.append((measure_numbers[start], measure_numbers[start + length - 1], label))
    return StructureLabeling(tuple(labels), tuple(segments))


def disk_histogram(fps: Sequence[Fingerprint]) -> list[float]:
    """Share of arcs per color rank (0 = whole-note disk, 5 = 32nd disk)."""
    counts = [0] * len(DISKS)
    for fp in fps:
        for arc in fp.arcs:
            counts[MAX_DISK - arc.disk_index] += 1
    total = sum(counts)
    return [c / total if total else 0.0 for c in counts]


def _score_summary(fps: Sequence[Fingerprint]) -> dict:
    reports = [complexity_from_fingerprint(fp) for fp in fps]
    return {
        "measures": len(fps),
        "mean_entropy": statistics.fmean(r.hierarchy_entropy for r in reports),
        "mean_evenness": statistics.fmean(r.evenness for r in reports),
        "disk_histogram": disk_histogram(fps),
    }


def compare_scores(a: Sequence[Fingerprint], b: Sequence[Fingerprint]) -> dict:
    """Side-by-side metrics for two scores plus their measure-wise agreement.

    The match fraction compares the common prefix position by position.
    """
    if not a or not b:
        raise EmptyInput("compare_scores needs two non-empty scores")
    n = min(len(a), len(b))
    matches = sum(1 for x, y in zip(a[:n], b[:n]) if x == y)
    return {
        "a": _score_summary(a),
        "b": _score_summary(b),
        "aligned_measures": n,
        "match_fraction": matches / n,
    }
