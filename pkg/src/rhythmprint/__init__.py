"""Rhythmic fingerprints for symbolic music.

Parse MusicXML, quantize each measure onto a 32nd-note grid, lay the
rhythm out on concentric rhythm-tree disks, render SVG and analyze
evenness, complexity and recurrent structure.
"""

from rhythmprint.analysis import (
    ComplexityReport,
    OnsetProfile,
    StructureLabeling,
    compare_scores,
    complexity,
    detect_patterns,
    evenness,
    onset_profile,
)
from rhythmprint.fingerprint import (
    DEFAULT_PALETTE,
    Arc,
    Fingerprint,
    Palette,
    Skeleton,
    arc_start_angles,
    build_fingerprint,
    build_skeleton,
    color_for,
)
from rhythmprint.render_svg import RenderSpec, export_anchors, render_fingerprint, render_strip
from rhythmprint.rhythm_core import (
    MeasureRhythm,
    RhythmEvent,
    TatumGrid,
    classify_event,
    dotted_duration,
    duration,
    quantize_measure,
    quantize_score,
    resolve_measure,
)
from rhythmprint.score_ingest import (
    RawEvent,
    RawMeasure,
    RawPart,
    RawScore,
    merge_ties_within_measure,
    parse_musicxml,
    read_musicxml,
)

__version__ = "0.1.0"
