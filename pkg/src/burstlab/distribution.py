"""
Popularity-binned LV densities.

Per-train LV values are grouped by popularity into half-open bins
``[e_k, e_{k+1})`` and histogrammed on uniform cells over ``[0, 3]``.
Aggregation keeps integer counts and the raw LV values until the very
end, so partial accumulators merged in any order give exactly the serial
result.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError
from .lv import LvResult

__all__ = [
    "DEFAULT_LV_BINS",
    "PopularityBinning",
    "LvDensity",
    "DensityAccumulator",
    "density",
    "write_density_csv",
]

logger = logging.getLogger(__name__)

DEFAULT_LV_BINS = 30
LV_MAX = 3.0


@dataclass(frozen=True)
class PopularityBinning:
    """Strictly increasing popularity edges; bin k is ``[edges[k], edges[k+1])``."""

    edges: tuple[int, ...]

    def __post_init__(self):
        edges = tuple(int(e) for e in self.edges)
        if len(edges) < 2:
            raise ConfigurationError("popularity binning needs at least two edges")
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise ConfigurationError(f"popularity edges must be strictly increasing: {edges}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def decades(cls, max_popularity: int) -> "PopularityBinning":
        """Decade bins 1-9, 10-99, ... wide enough to hold `max_popularity`."""
        edges = [1, 10]
        while edges[-1] <= max_popularity:
            edges.append(edges[-1] * 10)
        return cls(tuple(edges))

    @property
    def n_bins(self) -> int:
        return len(self.edges) - 1

    def bin_of(self, popularity: int) -> int | None:
        k = int(np.searchsorted(self.edges, popularity, side="right")) - 1
        if 0 <= k < self.n_bins:
            return k
        return None

    def bounds(self, k: int) -> tuple[int, int]:
        return self.edges[k], self.edges[k + 1]


@dataclass(frozen=True, eq=False)
class LvDensity:
    """Normalized LV histogram of one popularity bin.

    `mean_lv` and `peak_lv` are ``None`` when the bin only holds trains
    with undefined LV.
    """

    bin: int
    pop_lo: int
    pop_hi: int
    lv_edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    n_trains: int
    excluded: int
    mean_lv: float | None
    peak_lv: float | None
    peak_index: int | None

    @property
    def cell_width(self) -> float:
        return float(self.lv_edges[1] - self.lv_edges[0])


class DensityAccumulator:
    """Mergeable per-bin LV counts.

    >>> acc = DensityAccumulator(PopularityBinning((1, 10)), lv_bins=30)
    >>> acc.add(5, LvResult(0.95, 3, 5))
    >>> [d.n_trains for d in acc.finalize()]
    [1]
    """

    def __init__(self, binning: PopularityBinning, lv_bins: int = DEFAULT_LV_BINS):
        if lv_bins < 3:
            raise ConfigurationError(f"lv_bins must be >= 3, got {lv_bins}")
        self.binning = binning
        self.lv_bins = lv_bins
        self.lv_edges = np.linspace(0.0, LV_MAX, lv_bins + 1)
        self.counts = np.zeros((binning.n_bins, lv_bins), dtype=np.int64)
        self.values: list[list[float]] = [[] for _ in range(binning.n_bins)]
        self.excluded = np.zeros(binning.n_bins, dtype=np.int64)
        self.out_of_range = 0

    def _cell(self, lv: float) -> int:
        k = int(lv * self.lv_bins / LV_MAX)
        return min(max(k, 0), self.lv_bins - 1)

    def add(self, popularity: int, result: LvResult | float | None) -> None:
        k = self.binning.bin_of(popularity)
        if k is None:
            self.out_of_range += 1
            return
        if result is None:
            self.excluded[k] += 1
            return
        lv = result.lv if isinstance(result, LvResult) else float(result)
        self.counts[k, self._cell(lv)] += 1
        self.values[k].append(lv)

    def update(self, results: Iterable[tuple[int, LvResult | float | None]]) -> "DensityAccumulator":
        for popularity, result in results:
            self.add(popularity, result)
        return self

    def merge(self, other: "DensityAccumulator") -> "DensityAccumulator":
        if other.binning != self.binning or other.lv_bins != self.lv_bins:
            raise ValueError("cannot merge accumulators with different binnings")
        out = DensityAccumulator(self.binning, self.lv_bins)
        out.counts = self.counts + other.counts
        out.values = [a + b for a, b in zip(self.values, other.values)]
        out.excluded = self.excluded + other.excluded
        out.out_of_range = self.out_of_range + other.out_of_range
        return out

    def finalize(self) -> list[LvDensity]:
        width = LV_MAX / self.lv_bins
        out = []
        for k in range(self.binning.n_bins):
            n = int(self.counts[k].sum())
            excluded = int(self.excluded[k])
            if n == 0 and excluded == 0:
                continue
            counts = self.counts[k].copy()
            if n:
                dens = counts / (n * width)
                peak = int(np.argmax(counts))
                mean = math.fsum(self.values[k]) / n
                peak_lv = float(0.5 * (self.lv_edges[peak] + self.lv_edges[peak + 1]))
            else:
                dens = np.zeros(self.lv_bins)
                peak, mean, peak_lv = None, None, None
            lo, hi = self.binning.bounds(k)
            out.append(LvDensity(
                bin=k, pop_lo=lo, pop_hi=hi, lv_edges=self.lv_edges.copy(),
                counts=counts, density=dens, n_trains=n, excluded=excluded,
                mean_lv=mean, peak_lv=peak_lv, peak_index=peak))
        if not any(d.n_trains for d in out):
            logger.warning("no trains with defined LV in any popularity bin "
                           "(%d excluded, %d outside the bins)",
                           int(self.excluded.sum()), self.out_of_range)
        return out


def density(results: Iterable[tuple[int, LvResult | float | None]],
            binning: PopularityBinning | None = None,
            lv_bins: int = DEFAULT_LV_BINS) -> list[LvDensity]:
    """Probability density of LV per popularity bin.

    Parameters
    ----------
    results : iterable of (popularity, LvResult or None)
        ``None`` marks a train with fewer than 3 spikes; it is counted in
        the bin's ``excluded`` total instead of the histogram.
    binning : PopularityBinning, optional
        Defaults to decades of the largest popularity seen.
    lv_bins : int
        Number of uniform LV cells over ``[0, 3]``.

    Returns
    -------
    list of LvDensity
        One entry per popularity bin that received any train, in bin order.
        Each density integrates to 1 when ``n_trains > 0``.
    """
    results = list(results)
    if binning is None:
        max_p = max((p for p, _ in results), default=1)
        binning = PopularityBinning.decades(max_p)
    return DensityAccumulator(binning, lv_bins).update(results).finalize()


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def write_density_csv(densities: Sequence[LvDensity], out) -> None:
    """One row per (popularity bin, LV cell)."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["pop_bin_lo", "pop_bin_hi", "lv_cell_lo", "lv_cell_hi",
                     "density", "n_trains", "excluded"])
    for d in densities:
        for j in range(d.counts.size):
            writer.writerow([d.pop_lo, d.pop_hi, _fmt(d.lv_edges[j]), _fmt(d.lv_edges[j + 1]),
                             _fmt(d.density[j]), d.n_trains, d.excluded])
