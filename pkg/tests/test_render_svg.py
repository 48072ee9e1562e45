import json
import math
import os
import random
import re
import xml.etree.ElementTree as ET
from importlib import resources

import jsonschema
import pytest
from hypothesis import given, settings, strategies as st

from conftest import GOLDEN, SIGNATURES, random_measure_events, sig_slots
from rhythmprint.errors import CountMismatch, RhythmWarning
from rhythmprint.fingerprint import build_fingerprint, build_skeleton
from rhythmprint.render_svg import (
    RenderSpec,
    export_anchors,
    polar_point,
    render_fingerprint,
    render_strip,
    strip_shape,
)
from rhythmprint.rhythm_core import RhythmEvent, quantize_measure, quantize_score, resolve_measure
from rhythmprint.score_ingest import read_musicxml

SVG = "{http://www.w3.org/2000/svg}"
NUMBER = re.compile(r"-?\d+\.\d+")


def fp_of(events, sig=(4, 4), number=1):
    return build_fingerprint(resolve_measure(events, sig, number))


def arc_paths(svg_bytes):
    root = ET.fromstring(svg_bytes)
    return [p for p in root.iter(SVG + "path") if "arc" in p.get("class", "").split()]


def cell_paths(svg_bytes):
    root = ET.fromstring(svg_bytes)
    return [p for p in root.iter(SVG + "path") if "cell" in p.get("class", "").split()]


def test_whole_note_single_full_annulus():
    svg = render_fingerprint(fp_of([RhythmEvent(0, 2)]), RenderSpec(show_skeleton=False))
    (path,) = arc_paths(svg)
    d = path.get("d")
    # two half-turn arc commands on the outer edge and two on the inner edge
    assert d.count("A ") == 4
    assert d.count("M ") == 2
    assert path.get("fill-rule") == "evenodd"
    assert path.get("data-disk") == "2"


def test_empty_fingerprint_draws_skeleton_only():
    svg = render_fingerprint(fp_of([]), RenderSpec(show_skeleton=True))
    assert arc_paths(svg) == []
    assert len(cell_paths(svg)) == 1 + 2 + 4 + 8 + 16 + 32


def test_short_measure_marks_unused_cells():
    svg = render_fingerprint(fp_of([], sig=(3, 4)))
    cells = cell_paths(svg)
    unused = [c for c in cells if "unused" in c.get("class")]
    # whole-note cell starts at 0 and stays "used"; outer disks lose their last quarter
    assert len(unused) == 0 + 0 + 1 + 2 + 4 + 8


def test_short_measure_without_skeleton_outlines_unused_sector():
    svg = render_fingerprint(fp_of([], sig=(3, 4)), RenderSpec(show_skeleton=False))
    root = ET.fromstring(svg)
    assert [p.get("class") for p in root.iter(SVG + "path")] == ["unused"]


def test_render_twice_identical():
    fp = fp_of([RhythmEvent(0, 1), RhythmEvent(16, 0, is_rest=True), RhythmEvent(24, -1)])
    assert render_fingerprint(fp) == render_fingerprint(fp)


def test_arc_order_and_colors(fixture_path):
    score = read_musicxml(fixture_path("fig3_three_voices.xml"))
    fp = build_fingerprint(quantize_measure(score.measures_at(0)))
    spec = RenderSpec()
    paths = arc_paths(render_fingerprint(fp, spec))
    keys = [(int(p.get("data-disk")), float(p.get("data-start"))) for p in paths]
    assert keys == sorted(keys, key=lambda k: (-k[0], k[1]))
    rest_half = next(p for p in paths if p.get("data-disk") == "1" and "rest" in p.get("class"))
    assert rest_half.get("fill") == spec.palette.rests[1]


def test_diameter_floor():
    with pytest.raises(ValueError):
        RenderSpec(fingerprint_diameter_px=39)


@settings(max_examples=60)
@given(st.integers(0, 2**32), st.sampled_from(SIGNATURES), st.integers(40, 300))
def test_well_formed_and_start_points_on_outer_circle(seed, sig, diameter):
    events = random_measure_events(random.Random(seed), sig_slots(sig))
    fp = fp_of(events, sig)
    spec = RenderSpec(fingerprint_diameter_px=diameter)
    svg = render_fingerprint(fp, spec)
    text = svg.decode()
    assert "nan" not in text.lower() and "inf" not in text.lower()
    sk = build_skeleton()
    radius = diameter / 2
    center = spec.margin_px + radius
    for path in arc_paths(svg):
        disk = sk.disk(int(path.get("data-disk")))
        x, y = (float(v) for v in NUMBER.findall(path.get("d"))[:2])
        ex, ey = polar_point(center, center, disk.outer_radius * radius, float(path.get("data-start")))
        assert abs(x - round(ex, 4)) < 1e-6 and abs(y - round(ey, 4)) < 1e-6


def test_polar_point_orientation():
    # 0 degrees is twelve o'clock, 90 degrees is three o'clock
    x, y = polar_point(0, 0, 1, 0)
    assert (x, y) == pytest.approx((0, -1))
    x, y = polar_point(0, 0, 1, 90)
    assert (x, y) == pytest.approx((1, 0))


# strips


def grid_cells(svg_bytes):
    root = ET.fromstring(svg_bytes)
    return [(int(g.get("data-row")), int(g.get("data-col"))) for g in root.iter(SVG + "g")
            if g.get("class") == "measure"]


def test_strip_64_is_8_by_8(fixture_path):
    fps = [build_fingerprint(m) for m in quantize_score(read_musicxml(fixture_path("form_abab_cdcd.xml")))]
    svg = render_strip(fps, RenderSpec(strip_columns=8))
    cells = grid_cells(svg)
    assert len(cells) == 64
    assert {r for r, _ in cells} == set(range(8)) and {c for _, c in cells} == set(range(8))
    labels = [t.text for t in ET.fromstring(svg).iter(SVG + "text")]
    assert labels == [str(k) for k in range(1, 65)]


def test_strip_single():
    svg = render_strip([fp_of([RhythmEvent(0, 2)])])
    assert grid_cells(svg) == [(0, 0)]
    assert strip_shape(1, 8) == (1, 1)


def test_strip_empty_warns():
    with pytest.warns(RhythmWarning):
        svg = render_strip([])
    root = ET.fromstring(svg)
    assert root.get("width") == "0.0000" and root.get("height") == "0.0000"


@pytest.mark.parametrize("n, cols, shape", [(64, 8, (8, 8)), (9, 8, (2, 8)), (3, 8, (1, 3)), (0, 8, (0, 0))])
def test_strip_shape(n, cols, shape):
    assert strip_shape(n, cols) == shape


# anchors


def anchor_schema():
    return json.loads(resources.files("rhythmprint").joinpath("schemas/anchors.schema.json").read_text())


def test_anchors_eight_measures(fixture_path):
    score = read_musicxml(fixture_path("uniform_quarters.xml"))
    fps = [build_fingerprint(m) for m in quantize_score(score)]
    doc = export_anchors(score, fps)
    jsonschema.validate(doc, anchor_schema())
    anchors = doc["anchors"]
    assert [a["system_index"] for a in anchors] == [0] * 4 + [1] * 4
    assert {a["x_fraction"] for a in anchors} == {0.125, 0.375, 0.625, 0.875}
    assert len({a["measure_number"] for a in anchors}) == 8
    assert all(0 <= a["y_fraction"] <= 1 for a in anchors)


def test_anchor_single(fixture_path):
    score = read_musicxml(fixture_path("four_quarters.xml"))
    doc = export_anchors(score, [build_fingerprint(m) for m in quantize_score(score)])
    assert doc["anchors"] == [
        {"measure_number": 1, "system_index": 0, "x_fraction": 0.125, "y_fraction": 0.5}
    ]


def test_anchor_count_mismatch(fixture_path):
    score = read_musicxml(fixture_path("uniform_quarters.xml"))
    with pytest.raises(CountMismatch):
        export_anchors(score, [])


# golden files; regenerate with RHYTHMPRINT_UPDATE_GOLDEN=1


def golden_cases(fixture_dir):
    fig3 = read_musicxml(fixture_dir / "fig3_three_voices.xml")
    form = read_musicxml(fixture_dir / "form_abab_cdcd.xml")
    form_fps = [build_fingerprint(m) for m in quantize_score(form)]
    return {
        "whole_note.svg": render_fingerprint(fp_of([RhythmEvent(0, 2)])),
        "fig3.svg": render_fingerprint(build_fingerprint(quantize_measure(fig3.measures_at(0)))),
        "empty_three_four.svg": render_fingerprint(fp_of([], sig=(3, 4)), RenderSpec(show_skeleton=False)),
        "strip_first_16.svg": render_strip(form_fps[:16], RenderSpec(fingerprint_diameter_px=60, strip_columns=4)),
    }


@pytest.mark.parametrize("name", ["whole_note.svg", "fig3.svg", "empty_three_four.svg", "strip_first_16.svg"])
def test_golden(name, fixture_path):
    rendered = golden_cases(fixture_path("x").parent)[name]
    golden = GOLDEN / name
    if os.environ.get("RHYTHMPRINT_UPDATE_GOLDEN"):
        golden.write_bytes(rendered)
    assert golden.exists(), f"missing golden file {golden}"
    assert rendered == golden.read_bytes()
