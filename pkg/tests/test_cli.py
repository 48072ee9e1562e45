import hashlib
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from rhythmprint.cli import load_config, main
from rhythmprint.errors import ConfigError
from rhythmprint.fingerprint import DEFAULT_PALETTE


def schema(name):
    return json.loads(resources.files("rhythmprint").joinpath(f"schemas/{name}.schema.json").read_text())


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_extract_four_quarters(capsys, fixture_path):
    code, doc = run_json(capsys, ["extract", str(fixture_path("four_quarters.xml"))])
    assert code == 0
    jsonschema.validate(doc, schema("extract"))
    (m,) = doc["measures"]
    assert [e["disk"] for e in m["events"]] == [0, 0, 0, 0]
    assert [e["slot"] for e in m["events"]] == [0, 8, 16, 24]
    assert not any(e["is_rest"] for e in m["events"])
    assert doc["schema"] == 1


def test_extract_five_four_exit_3(capsys, fixture_path):
    assert main(["extract", str(fixture_path("five_four.xml"))]) == 3
    assert "whole note" in capsys.readouterr().err


def test_extract_empty_measure(capsys, fixture_path):
    code, doc = run_json(capsys, ["extract", str(fixture_path("empty_measure.xml"))])
    assert code == 0 and all(m["events"] == [] for m in doc["measures"])


def test_extract_warnings_in_document(capsys, fixture_path):
    code, doc = run_json(capsys, ["--quiet", "extract", str(fixture_path("triplets.xml"))])
    assert code == 0
    assert len(doc["warnings"]) == 3 and all("tuplet" in w for w in doc["warnings"])
    assert capsys.readouterr().err == ""


def test_extract_to_file(tmp_path, fixture_path, capsys):
    out = tmp_path / "rhythm.json"
    assert main(["extract", str(fixture_path("dots.xml")), "-o", str(out)]) == 0
    assert capsys.readouterr().out == ""
    jsonschema.validate(json.loads(out.read_text()), schema("extract"))


@pytest.mark.parametrize("name", ["malformed.xml", "timewise.xml", "does_not_exist.xml"])
def test_parse_errors_exit_2(name, fixture_path, capsys):
    assert main(["extract", str(fixture_path(name))]) == 2
    assert capsys.readouterr().err.startswith("rhythmprint:")


def test_render_strip(tmp_path, fixture_path):
    code = main(["--quiet", "render", str(fixture_path("form_abab_cdcd.xml")),
                 "--strip", "--columns", "8", "--output-dir", str(tmp_path)])
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["strip.svg"]


def test_render_single_measure(tmp_path, fixture_path):
    code = main(["render", str(fixture_path("form_abab_cdcd.xml")), "--measure", "7",
                 "--output-dir", str(tmp_path), "--quiet"])
    assert code == 0
    assert [p.name for p in tmp_path.iterdir()] == ["fp_7.svg"]


def test_render_all_measures_and_anchors(tmp_path, fixture_path):
    code = main(["--quiet", "--output-dir", str(tmp_path), "render",
                 str(fixture_path("uniform_quarters.xml")), "--anchors"])
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == sorted([f"fp_{k}.svg" for k in range(1, 9)] + ["anchors.json"])
    jsonschema.validate(json.loads((tmp_path / "anchors.json").read_text()), schema("anchors"))


def digests(directory):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(directory.iterdir())}


def test_render_rerun_identical(tmp_path, fixture_path):
    runs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main(["--quiet", "render", str(fixture_path("fig3_three_voices.xml")),
                     "--strip", "--measure", "1", "--anchors", "--output-dir", str(out)]) == 0
        runs.append(digests(out))
    assert runs[0] == runs[1] and len(runs[0]) == 3


def test_render_unwritable_output(tmp_path, fixture_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code = main(["--quiet", "render", str(fixture_path("four_quarters.xml")),
                 "--output-dir", str(blocker / "sub")])
    assert code == 4


def test_render_unknown_measure(tmp_path, fixture_path):
    assert main(["--quiet", "render", str(fixture_path("four_quarters.xml")),
                 "--measure", "9", "--output-dir", str(tmp_path)]) == 2


def test_analyze_form(capsys, fixture_path):
    code, doc = run_json(capsys, ["analyze", str(fixture_path("form_abab_cdcd.xml")), "--min-len", "2"])
    assert code == 0
    jsonschema.validate(doc, schema("analyze"))
    assert doc["structure"]["form"] == "ABABCDCD"


def test_analyze_uniform(capsys, fixture_path):
    code, doc = run_json(capsys, ["analyze", str(fixture_path("uniform_quarters.xml"))])
    form = doc["structure"]["form"]
    assert code == 0 and set(form) == {"A"} and len(form) == 8
    assert all(m["evenness"] == 1.0 for m in doc["measures"])


def test_analyze_compare_self(capsys, fixture_path):
    path = str(fixture_path("form_abab_cdcd.xml"))
    code, doc = run_json(capsys, ["analyze", path, "--compare", path])
    assert code == 0
    jsonschema.validate(doc, schema("analyze"))
    assert doc["comparison"]["match_fraction"] == 1.0


def test_analyze_compare_empty_exit_5(capsys, tmp_path, fixture_path):
    empty = tmp_path / "empty.xml"
    empty.write_text('<score-partwise><part-list/><part id="P1"/></score-partwise>')
    assert main(["analyze", str(fixture_path("four_quarters.xml")), "--compare", str(empty)]) == 5


def test_analyze_output_file_prints_form(capsys, tmp_path, fixture_path):
    out = tmp_path / "analysis.json"
    assert main(["analyze", str(fixture_path("form_abab_cdcd.xml")), "-o", str(out)]) == 0
    assert capsys.readouterr().out.strip() == "ABABCDCD"
    jsonschema.validate(json.loads(out.read_text()), schema("analyze"))


# config


def test_config_roundtrip(tmp_path):
    cfg_path = tmp_path / "rp.conf"
    cfg_path.write_text(
        "# comment\n"
        f"palette = {', '.join(DEFAULT_PALETTE.to_list())}\n"
        "diameter_px = 80\nstrip_columns = 4\nmin_pattern_len = 3\ntatum_slots = 32\n"
        f"output_dir = {tmp_path / 'out'}\n"
    )
    cfg = load_config(cfg_path)
    assert cfg.diameter_px == 80 and cfg.strip_columns == 4 and cfg.min_pattern_len == 3
    assert cfg.palette == DEFAULT_PALETTE.to_list()
    assert cfg.output_dir == tmp_path / "out"


@pytest.mark.parametrize(
    "text, match",
    [
        ("colour = red\n", "'colour'"),
        ("tatum_slots = 64\n", "fixed at 32"),
        ("diameter_px = big\n", "diameter_px"),
        ("palette = #000000\n", "palette"),
        ("no equals sign\n", "key = value"),
    ],
)
def test_config_errors(tmp_path, text, match):
    cfg_path = tmp_path / "bad.conf"
    cfg_path.write_text(text)
    with pytest.raises(ConfigError, match=match):
        load_config(cfg_path)


def test_config_from_env(tmp_path, fixture_path, monkeypatch):
    cfg_path = tmp_path / "rp.conf"
    cfg_path.write_text(f"output_dir = {tmp_path / 'from_env'}\n")
    monkeypatch.setenv("RHYTHMPRINT_CONFIG", str(cfg_path))
    assert main(["--quiet", "render", str(fixture_path("four_quarters.xml"))]) == 0
    assert (tmp_path / "from_env" / "fp_1.svg").exists()


def test_bad_config_exit_2(tmp_path, fixture_path, capsys):
    cfg_path = tmp_path / "bad.conf"
    cfg_path.write_text("bogus = 1\n")
    assert main(["--config", str(cfg_path), "extract", str(fixture_path("four_quarters.xml"))]) == 2
    assert "bogus" in capsys.readouterr().err


def test_module_entry_point(fixture_path):
    proc = subprocess.run(
        [sys.executable, "-m", "rhythmprint", "analyze", str(fixture_path("form_abab_cdcd.xml"))],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["structure"]["form"] == "ABABCDCD"
