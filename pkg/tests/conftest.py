import random
from fractions import Fraction
from pathlib import Path

import pytest

from rhythmprint.rhythm_core import RhythmEvent

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def fixture_path():
    def _path(name):
        return FIXTURES / name

    return _path


def random_voice(rng: random.Random, length_slots: int, voice: int, rest_prob: float = 0.3):
    """One voice filling ``length_slots`` with grid-aligned power-of-two values."""
    events = []
    cursor = 0
    while cursor < length_slots:
        choices = [
            i for i in range(-3, 3)
            if 2 ** (i + 3) <= length_slots - cursor and cursor % 2 ** (i + 3) == 0
        ]
        i = rng.choice(choices)
        events.append(
            RhythmEvent(
                onset_slot=cursor,
                disk_index=i,
                is_rest=rng.random() < rest_prob,
                voice=voice,
            )
        )
        cursor += 2 ** (i + 3)
    return events


def random_measure_events(rng: random.Random, length_slots: int, max_voices: int = 4):
    events = []
    for v in range(1, rng.randint(1, max_voices) + 1):
        events.extend(random_voice(rng, length_slots, v))
    rng.shuffle(events)
    return events


SIGNATURES = [(4, 4), (3, 4), (2, 4), (2, 2), (6, 8), (3, 8)]


def sig_slots(sig):
    return int(Fraction(sig[0] * 4, sig[1]) * 8)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_runtest_logreport(report):
    marker = "tests/test_acceptance.py::test_criterion_"
    if report.when == "call" and report.nodeid.startswith(marker):
        name = report.nodeid[len(marker):]
        previous = ACCEPTANCE_RESULTS.get(name.split("[")[0], (True, ""))[0]
        ACCEPTANCE_RESULTS[name.split("[")[0]] = (previous and report.passed, report.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda n: int(n.split("_")[0])):
        ok, _ = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {name}")
