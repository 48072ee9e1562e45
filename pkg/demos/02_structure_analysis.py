"""
Finding musical form from repeated fingerprints
===============================================

Parse a 64-measure score, build one fingerprint per measure and label the
recurring sections.
"""

# %%
from pathlib import Path

from rhythmprint import (
    RenderSpec,
    build_fingerprint,
    detect_patterns,
    quantize_score,
    read_musicxml,
    render_strip,
)

HERE = Path(__file__).resolve().parent
score = read_musicxml(HERE.parent / "tests" / "fixtures" / "form_abab_cdcd.xml")
measures = quantize_score(score)
print(len(measures), "measures in", measures[0].time_signature)

# %%
# Fingerprints compare equal when their arcs are equal, regardless of the
# measure they came from. That equality is all pattern detection needs.
fps = [build_fingerprint(m) for m in measures]
labeling = detect_patterns(fps, min_len=2)
print("form:", labeling.form)
for start, end, label in labeling.segments:
    print(f"  {label}: measures {start}-{end}")

# %%
# A strip lays the fingerprints out in reading order for distant reading.
Path("form_strip.svg").write_bytes(render_strip(fps, RenderSpec(fingerprint_diameter_px=60)))
