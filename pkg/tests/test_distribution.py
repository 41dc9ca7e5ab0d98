import io
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from burstlab.distribution import (DensityAccumulator, PopularityBinning, density,
                                   write_density_csv)
from burstlab.errors import ConfigurationError
from burstlab.lv import LvResult, train_lv
from burstlab.nullmodel import merge, surrogate_ensemble
from burstlab.synth import GeneratorSpec, generate

results_strategy = st.lists(
    st.tuples(st.integers(1, 5000),
              st.one_of(st.none(), st.floats(0, 2.999999, allow_nan=False))),
    max_size=200)


def _lv(x):
    return None if x is None else LvResult(x, 1, 3)


def test_degenerate_pile_up():
    out = density([(50, LvResult(0.0, 48, 50))] * 100, PopularityBinning((10, 100)), lv_bins=30)
    assert len(out) == 1
    d = out[0]
    assert d.counts[0] == 100 and d.counts[1:].sum() == 0
    assert d.density[0] * d.cell_width == pytest.approx(1.0)
    assert d.mean_lv == 0.0
    assert d.peak_index == 0 and d.peak_lv == pytest.approx(0.05)


def test_decade_binning():
    b = PopularityBinning.decades(180946)
    assert b.edges == (1, 10, 100, 1000, 10_000, 100_000, 1_000_000)
    assert b.bin_of(9) == 0 and b.bin_of(10) == 1 and b.bin_of(0) is None
    assert PopularityBinning.decades(10).edges == (1, 10, 100)


@pytest.mark.parametrize("edges", [(5,), (10, 10), (10, 5)])
def test_bad_edges(edges):
    with pytest.raises(ConfigurationError):
        PopularityBinning(edges)


def test_lv_bins_minimum():
    with pytest.raises(ConfigurationError):
        density([], PopularityBinning((1, 10)), lv_bins=2)


def test_excluded_counted_per_bin():
    out = density([(2, None), (2, None), (5, LvResult(1.0, 3, 5)), (50, None)],
                  PopularityBinning((1, 10, 100)))
    assert [(d.pop_lo, d.n_trains, d.excluded) for d in out] == [(1, 1, 2), (10, 0, 1)]
    assert out[1].mean_lv is None and out[1].density.sum() == 0


def test_empty_results_diagnostic(caplog):
    assert density([(1, None)], PopularityBinning((10, 100))) == []
    assert "no trains with defined LV" in caplog.text


@given(results_strategy)
def test_normalization(results):
    for d in density([(p, _lv(x)) for p, x in results], PopularityBinning((1, 10, 100, 10_000))):
        if d.n_trains:
            assert abs(float(np.sum(d.density * d.cell_width)) - 1.0) <= 1e-9
            assert 0.0 <= d.mean_lv < 3.0


@given(results_strategy, st.randoms(use_true_random=False))
def test_permutation_invariant(results, rnd):
    binning = PopularityBinning((1, 10, 100, 10_000))
    items = [(p, _lv(x)) for p, x in results]
    shuffled = items[:]
    rnd.shuffle(shuffled)
    a, b = density(items, binning), density(shuffled, binning)
    assert [(d.bin, d.counts.tolist(), d.mean_lv, d.excluded) for d in a] == \
           [(d.bin, d.counts.tolist(), d.mean_lv, d.excluded) for d in b]


@given(results_strategy, st.integers(0, 200))
def test_partial_merge_equals_serial(results, cut):
    binning = PopularityBinning((1, 10, 100, 10_000))
    items = [(p, _lv(x)) for p, x in results]
    serial = DensityAccumulator(binning).update(items).finalize()
    left = DensityAccumulator(binning).update(items[:cut])
    right = DensityAccumulator(binning).update(items[cut:])
    merged = right.merge(left).finalize()
    assert [(d.counts.tolist(), d.density.tolist(), d.mean_lv) for d in serial] == \
           [(d.counts.tolist(), d.density.tolist(), d.mean_lv) for d in merged]


def _corpus(seed0=0):
    high = [generate(GeneratorSpec("gamma", rate=1e-5, shape=4.0, n_spikes=2000, seed=seed0 + s,
                                   tag=f"h{s}")) for s in range(30)]
    rnd = random.Random(seed0)
    low = [generate(GeneratorSpec("gamma", rate=1e-5, shape=0.5, n_spikes=rnd.randrange(30, 100),
                                  seed=seed0 + 1000 + s, tag=f"l{s}")) for s in range(300)]
    return high + low


def test_peak_shift_and_surrogate_flattening():
    corpus = _corpus()
    binning = PopularityBinning((10, 100, 1000, 10_000))
    real = {d.pop_lo: d for d in density([(t.popularity, train_lv(t)) for t in corpus], binning)}
    assert real[1000].peak_index < real[10].peak_index
    assert real[1000].mean_lv == pytest.approx(1 / 3, abs=0.05)
    assert real[10].mean_lv == pytest.approx(1.5, abs=0.1)

    merged = merge(corpus)
    surrogates = []
    for p in sorted({t.popularity for t in corpus}):
        k = sum(t.popularity == p for t in corpus)
        surrogates += surrogate_ensemble(merged, [p], k, master_seed=11)
    sur = {d.pop_lo: d for d in density([(t.popularity, train_lv(t)) for t in surrogates], binning)}
    for lo in (10, 1000):
        assert sur[lo].mean_lv == pytest.approx(1.0, abs=0.05)


def test_density_csv_layout():
    out = density([(5, LvResult(1.05, 3, 5))], PopularityBinning((1, 10)), lv_bins=3)
    buf = io.StringIO()
    write_density_csv(out, buf)
    assert buf.getvalue().splitlines() == [
        "pop_bin_lo,pop_bin_hi,lv_cell_lo,lv_cell_hi,density,n_trains,excluded",
        "1,10,0,1,0,1,0",
        "1,10,1,2,1,1,0",
        "1,10,2,3,0,1,0",
    ]
