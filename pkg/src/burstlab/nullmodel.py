"""
Randomized surrogate trains.

All spikes of a corpus are pooled into one merged train (distinct seconds
only). A surrogate for a train of popularity ``p`` is ``p`` distinct times
drawn uniformly without replacement from that pool, which keeps the
corpus-wide activity profile but removes any temporal correlation inside
the original train.

Draws use a partial Fisher-Yates shuffle over the index array
``0 .. M-1`` of the merged train, driven by :class:`~burstlab.rng.Xoshiro256StarStar`.
Step ``i`` (for ``i < p``) swaps position ``i`` with ``i + bounded(M - i)``;
the first ``p`` positions are the selection. Only touched positions are
materialised, so a draw costs O(p) regardless of ``M``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InfeasibleSampleError
from .rng import Xoshiro256StarStar, derive_seed
from .spikes import SpikeTrain

__all__ = [
    "MergedTrain",
    "merge",
    "sample_indices",
    "sample_surrogate",
    "surrogate_ensemble",
    "surrogate_tag",
]


@dataclass(frozen=True, eq=False)
class MergedTrain:
    """Sorted distinct spike seconds of a whole corpus."""

    times: np.ndarray

    def __post_init__(self):
        arr = np.array(self.times, dtype=np.int64, copy=True).reshape(-1)
        if arr.size > 1 and not np.all(np.diff(arr) > 0):
            raise ValueError("merged times must be strictly increasing")
        arr.flags.writeable = False
        object.__setattr__(self, "times", arr)

    def __len__(self):
        return int(self.times.size)

    def __eq__(self, other):
        if not isinstance(other, MergedTrain):
            return NotImplemented
        return np.array_equal(self.times, other.times)


def merge(trains: Iterable[SpikeTrain]) -> MergedTrain:
    """Union of all spike times, one spike per second across tags."""
    arrays = [tr.times for tr in trains]
    if not arrays:
        return MergedTrain(np.empty(0, dtype=np.int64))
    return MergedTrain(np.unique(np.concatenate(arrays)))


def sample_indices(m: int, p: int, seed: int) -> list[int]:
    """First `p` entries of a partial Fisher-Yates shuffle of ``range(m)``."""
    if p < 0:
        raise ValueError("p must be non-negative")
    if p > m:
        raise InfeasibleSampleError(f"cannot draw {p} distinct spikes from a pool of {m}")
    rng = Xoshiro256StarStar(seed)
    bounded = rng.bounded
    moved: dict[int, int] = {}
    get = moved.get
    out = []
    for i in range(p):
        j = i + bounded(m - i)
        vj = get(j, j)
        moved[j] = get(i, i)
        out.append(vj)
    return out


def sample_surrogate(merged: MergedTrain, p: int, seed: int, tag: str | None = None) -> SpikeTrain:
    """Surrogate train of `p` distinct spike times drawn from `merged`.

    Parameters
    ----------
    merged : MergedTrain
        Sampling pool.
    p : int
        Popularity of the surrogate, ``0 <= p <= len(merged)``.
    seed : int
        64-bit seed. Equal ``(merged, p, seed)`` give equal output everywhere.
    tag : str, optional
        Label of the result; defaults to ``surrogate:<p>``.

    Raises
    ------
    InfeasibleSampleError
        If `p` exceeds the pool size.
    """
    idx = sample_indices(len(merged), p, seed)
    times = np.sort(merged.times[np.asarray(idx, dtype=np.int64)]) if idx else np.empty(0, np.int64)
    return SpikeTrain(tag if tag is not None else f"surrogate:{p}", times)


def surrogate_tag(p: int, replica: int) -> str:
    return f"surrogate:{p}:{replica}"


def surrogate_ensemble(merged: MergedTrain, p_list: Sequence[int], replicas: int,
                       master_seed: int, threads: int = 1) -> list[SpikeTrain]:
    """`replicas` surrogates for every popularity in `p_list`.

    Each cell ``(p, r)`` is sampled with ``derive_seed(master_seed, p, r)``,
    so the ensemble does not depend on the order or threading of the work.
    Output order follows `p_list`, then replica index; tags are
    ``surrogate:<p>:<replica>``.
    """
    if replicas < 0:
        raise ValueError("replicas must be non-negative")
    m = len(merged)
    for p in p_list:
        if p > m:
            raise InfeasibleSampleError(f"cannot draw {p} distinct spikes from a pool of {m}")
    cells = [(int(p), r) for p in p_list for r in range(replicas)]

    def draw(cell):
        p, r = cell
        return sample_surrogate(merged, p, derive_seed(master_seed, p, r), surrogate_tag(p, r))

    if threads > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(draw, cells))
    return [draw(c) for c in cells]
