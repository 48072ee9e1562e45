"""
Evenness, complexity and comparing two scores
=============================================
"""

# %%
from pathlib import Path

from rhythmprint import (
    build_fingerprint,
    compare_scores,
    complexity,
    onset_profile,
    quantize_score,
    read_musicxml,
    resolve_measure,
    RhythmEvent,
)

# %%
# Four quarters: equal inter-onset intervals, a single disk in use.
plain = resolve_measure([RhythmEvent(s, 0) for s in (0, 8, 16, 24)], (4, 4))
# Half, two eighths, quarter: uneven onsets spread over three disks.
mixed = resolve_measure(
    [RhythmEvent(0, 1), RhythmEvent(16, -1), RhythmEvent(20, -1), RhythmEvent(24, 0)], (4, 4)
)
for name, m in [("plain", plain), ("mixed", mixed)]:
    r = complexity(m)
    print(f"{name}: IOIs {onset_profile(m).iois}  entropy {r.hierarchy_entropy:.3f}  evenness {r.evenness:.3f}")

# %%
# Disk histograms show where the rhythmic mass sits: inner disks for long
# values, outer disks for short ones.
fixtures = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
a = [build_fingerprint(m) for m in quantize_score(read_musicxml(fixtures / "uniform_quarters.xml"))]
b = [build_fingerprint(m) for m in quantize_score(read_musicxml(fixtures / "variant_prefix.xml"))]
report = compare_scores(a, b)
print("match fraction:", report["match_fraction"])
print("histogram a:", [round(x, 2) for x in report["a"]["disk_histogram"]])
print("histogram b:", [round(x, 2) for x in report["b"]["disk_histogram"]])
