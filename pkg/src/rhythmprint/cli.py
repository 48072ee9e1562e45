"""Command-line interface: ``rhythmprint extract|render|analyze``.

Exit codes:
  0  success
  2  unreadable or invalid input (MusicXML, config)
  3  unsupported time signature (longer than a whole note)
  4  output directory not writable
  5  ``analyze --compare`` with an empty score
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

from rhythmprint.analysis import compare_scores, complexity, detect_patterns
from rhythmprint.errors import (
    ArcOverflow,
    ConfigError,
    EmptyInput,
    MusicXMLError,
    PaletteError,
    RhythmWarning,
    UnsupportedTimeSignature,
)
from rhythmprint.fingerprint import Palette, build_fingerprint, build_skeleton
from rhythmprint.render_svg import RenderSpec, export_anchors, render_fingerprint, render_strip
from rhythmprint.rhythm_core import MeasureRhythm, quantize_score
from rhythmprint.score_ingest import RawScore, read_musicxml

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_TIME_SIGNATURE = 3
EXIT_OUTPUT = 4
EXIT_EMPTY = 5

CONFIG_ENV = "RHYTHMPRINT_CONFIG"
SCHEMA_VERSION = 1
MAX_RENDER_WORKERS = 4


class OutputError(Exception):
    pass


@dataclass
class Config:
    palette: list[str] | None = None
    diameter_px: int = 120
    strip_columns: int = 8
    min_pattern_len: int = 2
    tatum_slots: int = 32
    output_dir: Path = field(default_factory=lambda: Path("."))

    def validate(self) -> None:
        if self.palette is not None:
            try:
                Palette.from_list(self.palette)
            except PaletteError as exc:
                raise ConfigError(f"palette: {exc}") from None
        if self.diameter_px < 40:
            raise ConfigError("diameter_px must be at least 40")
        if self.strip_columns < 1:
            raise ConfigError("strip_columns must be positive")
        if self.min_pattern_len < 1:
            raise ConfigError("min_pattern_len must be positive")
        if self.tatum_slots != 32:
            raise ConfigError("tatum_slots is fixed at 32 in this version")


def load_config(path: str | Path | None) -> Config:
    """Read a ``key = value`` config file; lines starting with ``#`` are comments."""
    cfg = Config()
    if path is None:
        return cfg
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    known = {f.name for f in fields(Config)}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            if key == "palette":
                setattr(cfg, key, [c.strip() for c in value.split(",") if c.strip()])
            elif key == "output_dir":
                setattr(cfg, key, Path(value))
            else:
                setattr(cfg, key, int(value))
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from None
    cfg.validate()
    return cfg


def measure_to_json(m: MeasureRhythm) -> dict:
    return {
        "number": m.measure_number,
        "time_signature": list(m.time_signature),
        "capacity_ql": float(m.capacity_ql),
        "angular_span_deg": m.angular_span_deg,
        "events": [
            {
                "slot": ev.onset_slot,
                "disk": ev.disk_index,
                "is_rest": ev.is_rest,
                "dots": ev.dots,
                "voice": ev.voice,
                "quantization_error_ql": float(ev.quantization_error_ql),
            }
            for ev in m.events
        ],
    }


def _load(path: str) -> tuple[RawScore, list[MeasureRhythm]]:
    try:
        score = read_musicxml(path)
    except OSError as exc:
        raise MusicXMLError(f"cannot read {path}: {exc}") from None
    return score, quantize_score(score)


def _dump(doc: dict, output: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if output:
        try:
            Path(output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OutputError(f"cannot write {output}: {exc}") from None
    else:
        sys.stdout.write(text)


def cmd_extract(args, cfg: Config, collected: "_WarningLog") -> int:
    score, measures = _load(args.input)
    doc = {
        "schema": SCHEMA_VERSION,
        "source": score.source_path,
        "title": score.work_title,
        "parts": [p.part_id for p in score.parts],
        "measures": [measure_to_json(m) for m in measures],
        "warnings": collected.messages(),
    }
    _dump(doc, args.output)
    return EXIT_OK


def _writable_dir(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = path / ".rhythmprint-write-test"
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        raise OutputError(f"output directory {path} is not writable: {exc}") from None
    return path


def cmd_render(args, cfg: Config, collected: "_WarningLog") -> int:
    score, measures = _load(args.input)
    out_dir = _writable_dir(Path(args.output_dir) if args.output_dir else cfg.output_dir)
    spec = RenderSpec(
        fingerprint_diameter_px=args.diameter or cfg.diameter_px,
        strip_columns=args.columns or cfg.strip_columns,
        palette=Palette.from_list(cfg.palette) if cfg.palette else RenderSpec().palette,
        show_skeleton=not args.no_skeleton,
    )
    sk = build_skeleton()
    fps = [build_fingerprint(m, sk) for m in measures]

    files: list[tuple[str, bytes]] = []
    if args.strip:
        files.append(("strip.svg", render_strip(fps, spec, sk)))
    if args.measure or not args.strip:
        wanted = set(args.measure or [])
        chosen = [fp for fp in fps if not wanted or fp.measure_number in wanted]
        missing = wanted - {fp.measure_number for fp in chosen}
        if missing:
            raise MusicXMLError(f"no such measure(s): {sorted(missing)}")
        with ThreadPoolExecutor(max_workers=MAX_RENDER_WORKERS) as pool:
            docs = list(pool.map(lambda fp: render_fingerprint(fp, spec, sk), chosen))
        files.extend((f"fp_{fp.measure_number}.svg", doc) for fp, doc in zip(chosen, docs))
    if args.anchors:
        anchors = export_anchors(score, fps)
        files.append(("anchors.json", (json.dumps(anchors, indent=2) + "\n").encode("utf-8")))

    # single writer keeps the output order deterministic
    for name, data in files:
        try:
            (out_dir / name).write_bytes(data)
        except OSError as exc:
            raise OutputError(f"cannot write {out_dir / name}: {exc}") from None
        if not args.quiet:
            print(out_dir / name, file=sys.stderr)
    return EXIT_OK


def cmd_analyze(args, cfg: Config, collected: "_WarningLog") -> int:
    score, measures = _load(args.input)
    sk = build_skeleton()
    fps = [build_fingerprint(m, sk) for m in measures]
    min_len = args.min_len or cfg.min_pattern_len
    labeling = detect_patterns(fps, min_len)
    doc = {
        "schema": SCHEMA_VERSION,
        "source": score.source_path,
        "min_pattern_len": min_len,
        "measures": [
            {
                "number": r.measure_number,
                "disks_used": r.disks_used,
                "hierarchy_entropy": r.hierarchy_entropy,
                "evenness": r.evenness,
            }
            for r in map(complexity, measures)
        ],
        "structure": {
            "form": labeling.form,
            "labels": list(labeling.labels),
            "segments": [
                {"start_measure": s, "end_measure": e, "label": lab}
                for s, e, lab in labeling.segments
            ],
        },
        "warnings": collected.messages(),
    }
    if args.compare:
        _, other = _load(args.compare)
        other_fps = [build_fingerprint(m, sk) for m in other]
        doc["comparison"] = compare_scores(fps, other_fps)
    _dump(doc, args.output)
    if args.output:
        print(labeling.form)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="config file (key = value)")
    common.add_argument("--output-dir", default=argparse.SUPPRESS)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="rhythmprint", description="Rhythmic fingerprints from MusicXML."
    )
    parser.add_argument("--config", default=None, help="config file (key = value)")
    parser.add_argument("--output-dir", default=None)
    parser.add_argument("--quiet", action="store_true", default=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", parents=[common], help="per-measure rhythm events as JSON")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("render", parents=[common], help="fingerprint SVGs, strip, anchors")
    p.add_argument("input")
    p.add_argument("--strip", action="store_true", help="write strip.svg")
    p.add_argument("--columns", type=int, help="fingerprints per strip row")
    p.add_argument("--anchors", action="store_true", help="write anchors.json")
    p.add_argument("--measure", type=int, action="append", help="only this measure (repeatable)")
    p.add_argument("--diameter", type=int, help="fingerprint diameter in px")
    p.add_argument("--no-skeleton", action="store_true", help="omit the empty grid")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("analyze", parents=[common], help="complexity, evenness and form")
    p.add_argument("input")
    p.add_argument("--min-len", type=int, help="shortest repeated block, in measures")
    p.add_argument("--compare", metavar="SECOND_FILE")
    p.add_argument("-o", "--output", help="write JSON here; the form string goes to stdout")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    def fail(code: int, message: str) -> int:
        print(f"rhythmprint: {message}", file=sys.stderr)
        return code

    try:
        cfg = load_config(args.config or os.environ.get(CONFIG_ENV))
    except ConfigError as exc:
        return fail(EXIT_INPUT, str(exc))

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RhythmWarning)
        collected = _WarningLog(caught)
        try:
            code = args.func(args, cfg, collected)
        except UnsupportedTimeSignature as exc:
            code = fail(EXIT_TIME_SIGNATURE, str(exc))
        except (MusicXMLError, ArcOverflow, PaletteError) as exc:
            code = fail(EXIT_INPUT, str(exc))
        except OutputError as exc:
            code = fail(EXIT_OUTPUT, str(exc))
        except EmptyInput as exc:
            code = fail(EXIT_EMPTY, str(exc))
    if not args.quiet:
        for message in collected.messages():
            print(f"warning: {message}", file=sys.stderr)
    return code


class _WarningLog:
    """Live view of the RhythmWarnings recorded so far."""

    def __init__(self, records: list):
        self._records = records

    def messages(self) -> list[str]:
        return [str(w.message) for w in self._records if issubclass(w.category, RhythmWarning)]


if __name__ == "__main__":
    sys.exit(main())
