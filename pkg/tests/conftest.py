import numpy as np
import pytest

from burstlab.spikes import SpikeTrain
from burstlab.synth import GeneratorSpec, generate, superpose

DAY = 24 * 3600
HOUR = 3600


def debate_day(seed=7, rush_hours=(19, 20, 21), rate=0.05, day_start=0):
    """Poisson background over one day with fully saturated rush hours."""
    background = generate(GeneratorSpec("poisson", rate=rate, duration=DAY, seed=seed,
                                        start=day_start, tag="ledebat"))
    rush = [generate(GeneratorSpec("saturated", duration=HOUR, start=day_start + h * HOUR,
                                   tag="ledebat")) for h in rush_hours]
    return superpose("ledebat", background, *rush)


@pytest.fixture
def debate_train():
    return debate_day()


def write_events_csv(path, trains):
    """Event log (timestamp,tag) holding every spike of `trains` once."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("timestamp,tag\n")
        for train in trains:
            for t in train.times.tolist():
                fh.write(f"{t},{train.tag}\n")
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def train(times, tag="a"):
    return SpikeTrain(tag, times)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE):
        terminalreporter.write_line(line)
