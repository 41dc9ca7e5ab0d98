"""
Event-log ingestion: parse ``(timestamp, tag)`` logs and assemble per-tag
spike trains at one-second resolution.

Two input formats are understood:

``csv``
    UTF-8 with a header naming the columns ``timestamp`` and ``tag`` (in
    either order, so exported train files re-ingest directly).
``jsonl``
    One object per line with an integer field ``t`` and a string field
    ``tag``.

Malformed lines never abort a run. They are collected as :class:`Reject`
entries (line number and reason) in the caller's rejects sink.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from array import array
from collections.abc import Sequence
from dataclasses import dataclass
from typing import BinaryIO, Iterable

import numpy as np

from .errors import ConfigurationError, DataError, InvariantViolationError
from .spikes import SpikeTrain

__all__ = [
    "FORMATS",
    "EventRecord",
    "EventTable",
    "Reject",
    "CorpusStats",
    "parse_events",
    "load_events",
    "build_trains",
    "write_rejects_csv",
]

logger = logging.getLogger(__name__)

FORMATS = ("csv", "jsonl")


@dataclass(frozen=True)
class EventRecord:
    """One raw observation: integer epoch second and tag as read."""

    timestamp: int
    tag: str

    def __post_init__(self):
        if isinstance(self.timestamp, bool) or not isinstance(self.timestamp, (int, np.integer)):
            raise InvariantViolationError(f"timestamp must be an integer, got {self.timestamp!r}")
        if self.timestamp < 0:
            raise InvariantViolationError(f"timestamp must be >= 0, got {self.timestamp}")
        if not isinstance(self.tag, str) or not self.tag.strip():
            raise InvariantViolationError("tag must be non-empty text")
        object.__setattr__(self, "timestamp", int(self.timestamp))


@dataclass(frozen=True)
class Reject:
    line: int
    reason: str


@dataclass(frozen=True)
class CorpusStats:
    """Reconciliation counts of one ingestion.

    ``duplicates_collapsed`` equals ``events_in_range`` minus the summed
    popularity of all trains.
    """

    total_events: int = 0
    unique_tags: int = 0
    events_in_range: int = 0
    duplicates_collapsed: int = 0

    def as_dict(self):
        return {
            "total_events": self.total_events,
            "unique_tags": self.unique_tags,
            "events_in_range": self.events_in_range,
            "duplicates_collapsed": self.duplicates_collapsed,
        }


class EventTable(Sequence):
    """Column-oriented, read-only sequence of :class:`EventRecord`.

    Tags are interned: ``codes[i]`` indexes into ``tags``. Indexing yields
    ``EventRecord`` values, so the table behaves like a list of records
    while keeping millions of events in two integer arrays.
    """

    def __init__(self, times, codes, tags):
        self.times = np.asarray(times, dtype=np.int64)
        self.codes = np.asarray(codes, dtype=np.int64)
        self.tags = list(tags)
        if self.times.shape != self.codes.shape:
            raise ValueError("times and codes must have equal length")

    @classmethod
    def from_records(cls, records: Iterable[EventRecord]) -> "EventTable":
        if isinstance(records, EventTable):
            return records
        index: dict[str, int] = {}
        times = array("q")
        codes = array("q")
        for rec in records:
            code = index.get(rec.tag)
            if code is None:
                code = index[rec.tag] = len(index)
            times.append(rec.timestamp)
            codes.append(code)
        return cls(np.frombuffer(times, dtype=np.int64), np.frombuffer(codes, dtype=np.int64), index)

    @classmethod
    def concat(cls, tables: Sequence["EventTable"]) -> "EventTable":
        index: dict[str, int] = {}
        all_times, all_codes = [], []
        for table in tables:
            remap = np.empty(len(table.tags), dtype=np.int64)
            for i, tag in enumerate(table.tags):
                code = index.get(tag)
                if code is None:
                    code = index[tag] = len(index)
                remap[i] = code
            all_times.append(table.times)
            all_codes.append(remap[table.codes] if table.codes.size else table.codes)
        if not all_times:
            return cls([], [], [])
        return cls(np.concatenate(all_times), np.concatenate(all_codes), index)

    def __len__(self):
        return int(self.times.size)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return EventRecord(int(self.times[i]), self.tags[self.codes[i]])

    def __repr__(self):
        return f"EventTable(n_events={len(self)}, n_tags={len(self.tags)})"


def _open_text(source) -> io.TextIOBase:
    if isinstance(source, (str, os.PathLike)):
        try:
            return open(source, "r", encoding="utf-8-sig", newline="")
        except OSError as exc:
            raise DataError(f"cannot read input {os.fspath(source)!r}: {exc}") from exc
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8-sig", newline="")


def _parse_timestamp(text: str):
    """Return ``(value, None)`` or ``(None, reason)``."""
    s = text.strip()
    if s.isascii() and s.isdigit():
        return int(s), None
    if s.startswith("-") and s[1:].isascii() and s[1:].isdigit():
        return None, f"negative timestamp {s!r}"
    return None, f"non-integer timestamp {s!r}"


def _parse_csv(text, rejects, intern, times, codes):
    reader = csv.reader(text)
    try:
        header = next(reader)
    except StopIteration:
        return
    header = [h.strip() for h in header]
    if "timestamp" not in header or "tag" not in header:
        raise DataError(f"CSV header must name 'timestamp' and 'tag', got {header!r}")
    ti, gi = header.index("timestamp"), header.index("tag")
    width = len(header)
    append_t, append_c = times.append, codes.append
    for row in reader:
        if not row:
            continue
        if len(row) != width:
            rejects.append(Reject(reader.line_num, f"expected {width} fields, got {len(row)}"))
            continue
        ts = row[ti]
        if ts.isdigit() and ts.isascii():
            value = int(ts)
        else:
            value, reason = _parse_timestamp(ts)
            if reason:
                rejects.append(Reject(reader.line_num, reason))
                continue
        tag = row[gi]
        code = intern.get(tag)
        if code is None:
            if not tag.strip():
                rejects.append(Reject(reader.line_num, "empty tag"))
                continue
            code = intern[tag] = len(intern)
        append_t(value)
        append_c(code)


def _parse_jsonl(text, rejects, intern, times, codes):
    for lineno, line in enumerate(text, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            rejects.append(Reject(lineno, f"invalid JSON: {exc.msg}"))
            continue
        if not isinstance(obj, dict):
            rejects.append(Reject(lineno, "line is not a JSON object"))
            continue
        t = obj.get("t")
        tag = obj.get("tag")
        if isinstance(t, bool) or not isinstance(t, int):
            rejects.append(Reject(lineno, f"non-integer timestamp {t!r}"))
            continue
        if t < 0:
            rejects.append(Reject(lineno, f"negative timestamp {t}"))
            continue
        if not isinstance(tag, str) or not tag.strip():
            rejects.append(Reject(lineno, "empty tag"))
            continue
        code = intern.get(tag)
        if code is None:
            code = intern[tag] = len(intern)
        times.append(t)
        codes.append(code)


def parse_events(source: BinaryIO | str | os.PathLike, fmt: str = "csv",
                 rejects: list | None = None) -> EventTable:
    """Parse an event log into an :class:`EventTable` in file order.

    Parameters
    ----------
    source : binary file object or path
        UTF-8 encoded log.
    fmt : {'csv', 'jsonl'}
        Input format.
    rejects : list, optional
        Sink receiving one :class:`Reject` per malformed line. When omitted,
        rejected lines are only summarized in the log.

    Raises
    ------
    ConfigurationError
        Unknown `fmt`.
    DataError
        Unreadable source, invalid UTF-8, or a CSV header without the
        required columns.
    """
    if fmt not in FORMATS:
        raise ConfigurationError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    sink = [] if rejects is None else rejects
    n_before = len(sink)
    intern: dict[str, int] = {}
    times, codes = array("q"), array("q")
    text = _open_text(source)
    try:
        if fmt == "csv":
            _parse_csv(text, sink, intern, times, codes)
        else:
            _parse_jsonl(text, sink, intern, times, codes)
    except UnicodeDecodeError as exc:
        raise DataError(f"input is not valid UTF-8: {exc}") from exc
    except OSError as exc:
        raise DataError(f"cannot read input: {exc}") from exc
    finally:
        if isinstance(source, (str, os.PathLike)):
            text.close()
        elif text is not source:
            text.detach()
    n_rejected = len(sink) - n_before
    if n_rejected and rejects is None:
        logger.warning("%d malformed line(s) rejected", n_rejected)
    return EventTable(np.frombuffer(times, dtype=np.int64),
                      np.frombuffer(codes, dtype=np.int64), intern)


def load_events(paths: Sequence[str | os.PathLike], fmt: str = "csv",
                rejects: list | None = None) -> EventTable:
    """Parse and concatenate several logs.

    With more than one path, reject reasons are prefixed by the file name.
    """
    tables = []
    for path in paths:
        if not os.path.exists(path):
            raise DataError(f"input not found: {os.fspath(path)}")
        local: list[Reject] = []
        tables.append(parse_events(path, fmt, local))
        if rejects is not None:
            if len(paths) > 1:
                local = [Reject(r.line, f"{os.fspath(path)}: {r.reason}") for r in local]
            rejects.extend(local)
    return EventTable.concat(tables)


def build_trains(events, time_range: tuple[int, int] | None = None):
    """Group events into per-tag spike trains with one spike per second.

    Parameters
    ----------
    events : EventTable or iterable of EventRecord
        Records in any order.
    time_range : (int, int), optional
        Half-open ``[start, end)`` filter applied before grouping.

    Returns
    -------
    trains : dict of str to SpikeTrain
        Keyed and ordered by tag. Deduplication is per tag: two tags used in
        the same second each keep their spike.
    stats : CorpusStats
    """
    table = EventTable.from_records(events)
    times, codes = table.times, table.codes
    total = int(times.size)
    if time_range is not None:
        start, end = time_range
        if not start < end:
            raise ConfigurationError(f"inverted range [{start}, {end})")
        mask = (times >= start) & (times < end)
        times, codes = times[mask], codes[mask]
    n_in = int(times.size)
    if n_in == 0:
        return {}, CorpusStats(total_events=total)

    order = np.lexsort((times, codes))
    t, c = times[order], codes[order]
    keep = np.ones(n_in, dtype=bool)
    keep[1:] = (np.diff(c) != 0) | (np.diff(t) != 0)
    raw = np.bincount(c, minlength=len(table.tags))
    tu, cu = t[keep], c[keep]
    bounds = np.flatnonzero(np.diff(cu)) + 1
    starts = np.concatenate(([0], bounds))
    stops = np.concatenate((bounds, [cu.size]))

    tags = table.tags
    trains = {}
    for lo, hi in zip(starts.tolist(), stops.tolist()):
        code = int(cu[lo])
        tag = tags[code]
        trains[tag] = SpikeTrain(tag, tu[lo:hi], raw_count=int(raw[code]))
    trains = dict(sorted(trains.items()))
    stats = CorpusStats(
        total_events=total,
        unique_tags=len(trains),
        events_in_range=n_in,
        duplicates_collapsed=n_in - int(tu.size),
    )
    return trains, stats


def write_rejects_csv(rejects: Iterable[Reject], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["line", "reason"])
    for r in rejects:
        writer.writerow([r.line, r.reason])
