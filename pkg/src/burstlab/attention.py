"""
Windowed LV series and collective-attention episodes.

The analysis range ``[t0, t1)`` is tiled into tumbling windows of
``window_length`` seconds aligned to ``t0``; the last window is truncated
at ``t1``. Each window reports its spike count and the LV of the spikes
inside it (undefined below 3 spikes). Episodes are maximal runs of
consecutive windows whose LV is defined and below a threshold.

Detection near the ends of the range is less reliable: a run cut by the
range boundary may fall below ``min_windows`` in one sub-range while
qualifying in the whole.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError
from .lv import local_variation
from .nullmodel import merge
from .spikes import SpikeTrain

__all__ = [
    "DEFAULT_WINDOW",
    "DEFAULT_THRESHOLD",
    "DEFAULT_MIN_WINDOWS",
    "Window",
    "LvSeries",
    "AttentionEpisode",
    "window_starts",
    "lv_series",
    "hourly_counts",
    "union_counts",
    "topic_train",
    "detect_episodes",
    "write_series_csv",
    "write_episodes_csv",
    "write_counts_csv",
]

DEFAULT_WINDOW = 3600
DEFAULT_THRESHOLD = 0.3
DEFAULT_MIN_WINDOWS = 2
MIN_WINDOW_LENGTH = 10


@dataclass(frozen=True)
class Window:
    start: int
    end: int
    n_spikes: int
    lv: float | None


@dataclass(frozen=True)
class LvSeries:
    tag: str
    window_length: int
    range_start: int
    range_end: int
    windows: tuple[Window, ...]

    @property
    def lv_values(self) -> list[float | None]:
        return [w.lv for w in self.windows]

    @property
    def counts(self) -> list[int]:
        return [w.n_spikes for w in self.windows]


@dataclass(frozen=True)
class AttentionEpisode:
    tag: str
    start: int
    end: int
    min_lv: float
    peak_count: int
    n_windows: int


def window_starts(t0: int, t1: int, window_length: int) -> np.ndarray:
    if not t0 < t1:
        raise ConfigurationError(f"inverted or empty range [{t0}, {t1})")
    if window_length < MIN_WINDOW_LENGTH:
        raise ConfigurationError(f"window length must be >= {MIN_WINDOW_LENGTH} s, got {window_length}")
    return np.arange(t0, t1, window_length, dtype=np.int64)


def _window_bounds(train: SpikeTrain, t0: int, t1: int, window_length: int):
    starts = window_starts(t0, t1, window_length)
    ends = np.minimum(starts + window_length, t1)
    lo = np.searchsorted(train.times, starts, side="left")
    hi = np.searchsorted(train.times, ends, side="left")
    return starts, ends, lo, hi


def lv_series(train: SpikeTrain, time_range: tuple[int, int],
              window_length: int = DEFAULT_WINDOW) -> LvSeries:
    """LV(t) of `train` over tumbling windows.

    A window holding fewer than 3 spikes gets ``lv=None``; its count is
    still reported. Window LV is exactly ``local_variation`` of the train
    sliced to that window.
    """
    t0, t1 = (int(v) for v in time_range)
    starts, ends, lo, hi = _window_bounds(train, t0, t1, window_length)
    times = train.times
    windows = []
    for s, e, a, b in zip(starts.tolist(), ends.tolist(), lo.tolist(), hi.tolist()):
        n = b - a
        lv = local_variation(np.diff(times[a:b])).lv if n >= 3 else None
        windows.append(Window(s, e, n, lv))
    return LvSeries(train.tag, int(window_length), t0, t1, tuple(windows))


def hourly_counts(train: SpikeTrain, time_range: tuple[int, int],
                  window_length: int = DEFAULT_WINDOW) -> list[tuple[int, int]]:
    """Spike count per tumbling window as ``(window_start, n_spikes)``."""
    t0, t1 = (int(v) for v in time_range)
    starts, _, lo, hi = _window_bounds(train, t0, t1, window_length)
    return list(zip(starts.tolist(), (hi - lo).tolist()))


def union_counts(trains: Iterable[SpikeTrain], time_range: tuple[int, int],
                 window_length: int = DEFAULT_WINDOW) -> list[tuple[int, int]]:
    """Per-window counts summed over several tags.

    Spikes of different tags in the same second are all counted.
    """
    t0, t1 = (int(v) for v in time_range)
    starts = window_starts(t0, t1, window_length)
    total = np.zeros(starts.size, dtype=np.int64)
    for train in trains:
        total += np.asarray([n for _, n in hourly_counts(train, (t0, t1), window_length)],
                            dtype=np.int64)
    return list(zip(starts.tolist(), total.tolist()))


def topic_train(trains: Iterable[SpikeTrain], tag: str = "topic") -> SpikeTrain:
    """Merged train of several tags (one spike per second), for a
    single LV(t) over a whole topic."""
    trains = list(trains)
    return SpikeTrain(tag, merge(trains).times, raw_count=sum(t.raw_count for t in trains))


def detect_episodes(series: LvSeries, threshold: float = DEFAULT_THRESHOLD,
                    min_windows: int = DEFAULT_MIN_WINDOWS) -> list[AttentionEpisode]:
    """Runs of at least `min_windows` consecutive windows with ``lv < threshold``.

    Windows with undefined LV end a run.
    """
    if min_windows < 1:
        raise ConfigurationError("min_windows must be >= 1")
    episodes = []
    run: list[Window] = []

    def close():
        if len(run) >= min_windows:
            episodes.append(AttentionEpisode(
                tag=series.tag,
                start=run[0].start,
                end=run[-1].end,
                min_lv=min(w.lv for w in run),
                peak_count=max(w.n_spikes for w in run),
                n_windows=len(run),
            ))

    for w in series.windows:
        if w.lv is not None and w.lv < threshold:
            run.append(w)
        else:
            close()
            run = []
    close()
    return episodes


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def write_series_csv(series: Sequence[LvSeries], out) -> None:
    """``tag,window_start,n_spikes,lv`` rows; empty lv when undefined."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["tag", "window_start", "n_spikes", "lv"])
    for s in sorted(series, key=lambda s: s.tag):
        for w in s.windows:
            writer.writerow([s.tag, w.start, w.n_spikes, "" if w.lv is None else _fmt(w.lv)])


def write_episodes_csv(episodes: Sequence[AttentionEpisode], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["tag", "start", "end", "min_lv", "peak_count"])
    for e in sorted(episodes, key=lambda e: (e.tag, e.start)):
        writer.writerow([e.tag, e.start, e.end, _fmt(e.min_lv), e.peak_count])


def write_counts_csv(counts: Sequence[tuple[int, int]], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["window_start", "n_spikes"])
    writer.writerows(counts)
