"""
Local variation of inter-spike intervals.

For N spikes with intervals ``d_1 .. d_{N-1}``::

    LV = 3 / (N - 2) * sum_{k=1}^{N-2} ((d_{k+1} - d_k) / (d_{k+1} + d_k)) ** 2

LV is 0 for a perfectly regular train, 1 on average for a Poisson process
and approaches 3 for extremely bursty trains. Each summand depends only on
the ratio of two neighbouring intervals, so LV is insensitive to slow
changes of the event rate.

Summation uses :func:`math.fsum` (exactly rounded), so the result does not
depend on how the terms were chunked or ordered.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InsufficientSpikesError, InvariantViolationError
from .spikes import IsiSequence, SpikeTrain

__all__ = [
    "LvResult",
    "LV_CLASSES",
    "local_variation",
    "lv_terms",
    "train_lv",
    "batch_lv",
    "classify",
    "write_lv_csv",
]

LV_CLASSES = ("regular", "poisson_like", "bursty")
DEFAULT_LOW_CUT = 0.5
DEFAULT_HIGH_CUT = 1.5


@dataclass(frozen=True)
class LvResult:
    lv: float
    terms: int
    n_spikes: int


def _intervals(intervals) -> np.ndarray:
    if isinstance(intervals, IsiSequence):
        intervals = intervals.intervals
    arr = np.asarray(intervals)
    if arr.ndim != 1:
        raise ValueError("intervals must be one-dimensional")
    if arr.dtype.kind not in "iuf":
        arr = arr.astype(np.float64)
    return arr


def lv_terms(intervals) -> np.ndarray:
    """Per-spike summands ``((b - a) / (b + a)) ** 2`` for neighbouring
    intervals ``(a, b)``; one value per interior spike."""
    d = _intervals(intervals)
    if d.size and not np.all(d > 0):
        raise InvariantViolationError("all intervals must be positive")
    a, b = d[:-1], d[1:]
    if d.dtype.kind in "iu":
        # integer numerator and denominator are exact, so the quotient is
        # the correctly rounded ratio (keeps scaling by integers bit-exact)
        num = (b - a).astype(np.float64)
        den = (b + a).astype(np.float64)
    else:
        num, den = b - a, b + a
    return (num / den) ** 2


def local_variation(intervals) -> LvResult:
    """Local variation of a sequence of inter-spike intervals.

    Parameters
    ----------
    intervals : IsiSequence or array_like
        Positive intervals, at least two (three spikes).

    Returns
    -------
    LvResult

    Raises
    ------
    InsufficientSpikesError
        Fewer than two intervals; LV is undefined.
    InvariantViolationError
        An interval is zero or negative.
    """
    d = _intervals(intervals)
    if d.size < 2:
        tag = getattr(intervals, "tag", None)
        raise InsufficientSpikesError(
            f"local variation needs at least 2 intervals (3 spikes), got {d.size}",
            tag=tag, n_spikes=d.size + 1)
    terms = lv_terms(d)
    n_terms = int(terms.size)
    value = 3.0 * math.fsum(terms.tolist()) / n_terms
    return LvResult(lv=value, terms=n_terms, n_spikes=n_terms + 2)


def train_lv(train: SpikeTrain) -> LvResult | None:
    """LV of a whole train, or ``None`` when it has fewer than 3 spikes."""
    if train.popularity < 3:
        return None
    return local_variation(np.diff(train.times))


def classify(lv: float, low_cut: float = DEFAULT_LOW_CUT,
             high_cut: float = DEFAULT_HIGH_CUT) -> str:
    """Interpretation band of an LV value.

    ``regular`` below `low_cut`, ``bursty`` above `high_cut`, otherwise
    ``poisson_like`` (both cuts inclusive).
    """
    if not low_cut <= high_cut:
        raise ValueError(f"low_cut {low_cut} exceeds high_cut {high_cut}")
    if not (0.0 <= lv < 3.0):
        raise InvariantViolationError(f"LV must lie in [0, 3), got {lv!r}")
    if lv < low_cut:
        return "regular"
    if lv > high_cut:
        return "bursty"
    return "poisson_like"


def batch_lv(trains: Iterable[SpikeTrain], threads: int = 1) -> list[LvResult | None]:
    """:func:`train_lv` over many trains, in input order.

    Results do not depend on `threads`; each value is computed independently.
    """
    trains = list(trains)
    if threads > 1 and len(trains) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(train_lv, trains, chunksize=256))
    return [train_lv(t) for t in trains]


def write_lv_csv(trains: Iterable[SpikeTrain], results: Iterable[LvResult | None], out,
                 low_cut: float = DEFAULT_LOW_CUT, high_cut: float = DEFAULT_HIGH_CUT) -> None:
    """Per-train rows ``tag,popularity,n_spikes,lv,class`` sorted by tag.

    Undefined LV is written as an empty field with class ``undefined``.
    """
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["tag", "popularity", "n_spikes", "lv", "class"])
    rows = sorted(zip(trains, results), key=lambda pair: pair[0].tag)
    for train, res in rows:
        if res is None:
            writer.writerow([train.tag, train.popularity, train.popularity, "", "undefined"])
        else:
            writer.writerow([train.tag, train.popularity, res.n_spikes,
                             format(res.lv, ".9g"), classify(res.lv, low_cut, high_cut)])
