"""
Spike-train value type and inter-spike-interval helpers.

A :class:`SpikeTrain` holds one tag's spike times at one-second resolution:
a strictly increasing, read-only ``int64`` array. Trains are never mutated;
every operation returns a new value, so trains can be shared freely between
threads.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .errors import ConfigurationError, InsufficientSpikesError, InvariantViolationError

__all__ = ["SpikeTrain", "IsiSequence", "isi", "slice_train", "write_trains_csv"]


def _frozen_int_array(values) -> np.ndarray:
    arr = np.array(values, dtype=np.int64, copy=True).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class SpikeTrain:
    """Strictly increasing integer spike times of one tag.

    Parameters
    ----------
    tag : str
        Label of the train.
    times : array_like of int
        Spike times in whole seconds, strictly increasing.
    raw_count : int, optional
        Number of events seen before one-second deduplication. Defaults to
        the number of spikes.
    """

    tag: str
    times: np.ndarray
    raw_count: int = field(default=-1)

    def __post_init__(self):
        times = self.times
        if isinstance(times, np.ndarray) and times.dtype.kind == "f":
            if not np.all(np.floor(times) == times):
                raise InvariantViolationError(
                    f"train {self.tag!r}: spike times must be whole seconds")
        times = _frozen_int_array(times)
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise InvariantViolationError(
                f"train {self.tag!r}: spike times must be strictly increasing")
        object.__setattr__(self, "times", times)
        raw = times.size if self.raw_count < 0 else int(self.raw_count)
        if raw < times.size:
            raise InvariantViolationError(
                f"train {self.tag!r}: raw_count {raw} < popularity {times.size}")
        object.__setattr__(self, "raw_count", raw)

    @property
    def popularity(self) -> int:
        """Number of spikes p."""
        return int(self.times.size)

    def __len__(self):
        return int(self.times.size)

    def __eq__(self, other):
        if not isinstance(other, SpikeTrain):
            return NotImplemented
        return (self.tag == other.tag and self.raw_count == other.raw_count
                and np.array_equal(self.times, other.times))

    def __hash__(self):
        return hash((self.tag, self.raw_count, self.times.tobytes()))

    def __repr__(self):
        head = ", ".join(str(t) for t in self.times[:5])
        more = ", ..." if self.times.size > 5 else ""
        return f"SpikeTrain(tag={self.tag!r}, p={self.popularity}, times=[{head}{more}])"


@dataclass(frozen=True, eq=False)
class IsiSequence:
    """Consecutive inter-spike intervals of a train (length N-1)."""

    intervals: np.ndarray
    tag: str | None = None

    def __post_init__(self):
        arr = np.array(self.intervals, copy=True).reshape(-1)
        arr.flags.writeable = False
        object.__setattr__(self, "intervals", arr)

    def __len__(self):
        return int(self.intervals.size)

    def __eq__(self, other):
        if not isinstance(other, IsiSequence):
            return NotImplemented
        return np.array_equal(self.intervals, other.intervals)


def isi(train: SpikeTrain) -> IsiSequence:
    """Inter-spike intervals ``times[k+1] - times[k]`` of `train`.

    Raises
    ------
    InsufficientSpikesError
        If the train has fewer than two spikes.
    """
    n = train.popularity
    if n < 2:
        raise InsufficientSpikesError(
            f"train {train.tag!r} has {n} spike(s); intervals need at least 2",
            tag=train.tag, n_spikes=n)
    return IsiSequence(np.diff(train.times), tag=train.tag)


def slice_train(train: SpikeTrain, start: int, end: int) -> SpikeTrain:
    """Sub-train of spikes with ``start <= t < end``.

    ``raw_count`` of the result equals its popularity; pre-dedup counts are
    not tracked per window.
    """
    if not start < end:
        raise ConfigurationError(f"inverted window [{start}, {end})")
    lo, hi = np.searchsorted(train.times, [start, end], side="left")
    return SpikeTrain(train.tag, train.times[lo:hi])


def write_trains_csv(trains: Iterable[SpikeTrain], out: TextIO) -> None:
    """Write trains as ``tag,timestamp`` rows sorted by tag then time."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["tag", "timestamp"])
    for train in sorted(trains, key=lambda tr: tr.tag):
        tag = train.tag
        writer.writerows((tag, t) for t in train.times.tolist())
