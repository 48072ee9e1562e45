"""
Drawing a single rhythmic fingerprint
=====================================

Build the three-voice measure from scratch, look at the arcs it produces
and write it out as SVG.
"""

# %%
# Each event sits on a 32nd-note grid (32 slots per whole note) and on the
# rhythm-tree disk matching its duration: disk 2 is the whole note, disk -3
# the 32nd note.
from pathlib import Path

from rhythmprint import RhythmEvent, build_fingerprint, render_fingerprint, resolve_measure

events = [
    RhythmEvent(onset_slot=0, disk_index=2, voice=3),                 # whole note
    RhythmEvent(onset_slot=0, disk_index=1, is_rest=True, voice=2),   # half rest
    RhythmEvent(onset_slot=16, disk_index=1, is_rest=True, voice=2),  # half rest
    RhythmEvent(onset_slot=0, disk_index=1, voice=1),                 # half note
    RhythmEvent(onset_slot=16, disk_index=0, voice=1),                # quarter
    RhythmEvent(onset_slot=24, disk_index=-2, voice=1),               # 16th
    RhythmEvent(onset_slot=26, disk_index=-2, voice=1),               # 16th
    RhythmEvent(onset_slot=28, disk_index=-1, is_rest=True, voice=1), # eighth rest
]

# %%
# The half note and the half rest both claim the first arc of disk 1; the
# note wins.
measure = resolve_measure(events, (4, 4), measure_number=1)
for ev in measure.events:
    print(f"disk {ev.disk_index:+d}  slot {ev.onset_slot:2d}  {'rest' if ev.is_rest else 'note'}")

# %%
# Arcs start at ``slot * 11.25`` degrees clockwise from twelve o'clock and
# span ``90 * duration`` degrees.
fp = build_fingerprint(measure)
for arc in fp.sorted_arcs():
    print(arc)

out = Path("fingerprint_demo.svg")
out.write_bytes(render_fingerprint(fp))
print("wrote", out)
