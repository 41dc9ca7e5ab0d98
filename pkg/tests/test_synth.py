import warnings

import numpy as np
import pytest

from burstlab.errors import ConfigurationError, QuantizationWarning
from burstlab.lv import train_lv
from burstlab.synth import GeneratorSpec, generate, parse_config, simulate, superpose

from oracles import gamma_lv_quadrature, lv_exact


def test_saturated_hour():
    tr = generate(GeneratorSpec("saturated", duration=3600))
    assert tr.popularity == 3600
    assert np.all(np.diff(tr.times) == 1)
    assert train_lv(tr).lv == 0.0


def test_alternating_five_spikes():
    tr = generate(GeneratorSpec("alternating", isi_pair=(1, 1000), n_spikes=5))
    assert tr.times.tolist() == [0, 1, 1001, 1002, 2002]
    assert train_lv(tr).lv == pytest.approx(float(lv_exact([1, 1000, 1, 1000])), rel=1e-15)


@pytest.mark.parametrize("duration, expected", [(1, [0]), (2, [0, 1]), (1001, [0, 1]),
                                                (1002, [0, 1, 1001]), (2003, [0, 1, 1001, 1002, 2002])])
def test_alternating_by_duration(duration, expected):
    tr = generate(GeneratorSpec("alternating", isi_pair=(1, 1000), duration=duration))
    assert tr.times.tolist() == expected


def test_start_offset():
    tr = generate(GeneratorSpec("saturated", n_spikes=3, start=100))
    assert tr.times.tolist() == [100, 101, 102]


@pytest.mark.parametrize("kwargs", [
    dict(kind="poisson", n_spikes=10),
    dict(kind="poisson", rate=0.0, n_spikes=10),
    dict(kind="poisson", rate=-1.0, n_spikes=10),
    dict(kind="poisson", rate=0.1, shape=2.0, n_spikes=10),
    dict(kind="gamma", rate=0.1, n_spikes=10),
    dict(kind="gamma", rate=0.1, shape=0.0, n_spikes=10),
    dict(kind="alternating", n_spikes=10),
    dict(kind="alternating", isi_pair=(0, 3), n_spikes=10),
    dict(kind="alternating", isi_pair=(1, 3), rate=1.0, n_spikes=10),
    dict(kind="saturated", rate=1.0, duration=10),
    dict(kind="saturated"),
    dict(kind="saturated", duration=10, n_spikes=10),
    dict(kind="weird", n_spikes=1),
])
def test_invalid_specs(kwargs):
    with pytest.raises(ConfigurationError):
        GeneratorSpec(**kwargs)


def test_deterministic_per_seed():
    spec = GeneratorSpec("gamma", rate=0.01, shape=2.0, n_spikes=500, seed=3)
    assert generate(spec) == generate(spec)
    other = GeneratorSpec("gamma", rate=0.01, shape=2.0, n_spikes=500, seed=4)
    assert generate(spec) != generate(other)


@pytest.mark.parametrize("kind, shape", [("poisson", None), ("gamma", 0.5), ("gamma", 4.0)])
def test_exact_size_after_collisions(kind, shape):
    res = simulate(GeneratorSpec(kind, rate=0.3, shape=shape, n_spikes=2000, seed=1))
    assert res.train.popularity == 2000
    assert res.n_drawn >= 2000
    assert np.all(np.diff(res.train.times) > 0)


def test_duration_mode_stays_in_range():
    tr = generate(GeneratorSpec("poisson", rate=0.05, duration=86400, start=1000, seed=2))
    assert tr.times.min() >= 1000 and tr.times.max() < 87400
    assert tr.popularity == pytest.approx(0.05 * 86400, rel=0.05)


def test_high_rate_warns():
    spec = GeneratorSpec("poisson", rate=5.0, n_spikes=200, seed=0)
    res = simulate(spec)
    assert res.collapsed_fraction > 0.5
    assert res.warnings
    with pytest.warns(QuantizationWarning):
        generate(spec)


def test_low_rate_no_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        generate(GeneratorSpec("poisson", rate=0.01, n_spikes=1000, seed=0))


@pytest.mark.slow
def test_poisson_grand_mean():
    lvs = [train_lv(generate(GeneratorSpec("poisson", rate=0.01, n_spikes=10_000, seed=s))).lv
           for s in range(100)]
    assert np.mean(lvs) == pytest.approx(1.0, abs=0.02)


@pytest.mark.slow
def test_gamma_two_grand_mean():
    lvs = [train_lv(generate(GeneratorSpec("gamma", rate=0.01, shape=2.0, n_spikes=10_000,
                                           seed=s))).lv for s in range(100)]
    assert np.mean(lvs) == pytest.approx(gamma_lv_quadrature(2.0), abs=0.03)
    assert np.mean(lvs) == pytest.approx(0.600, abs=0.03)


def test_superpose_union():
    a = generate(GeneratorSpec("saturated", n_spikes=3))
    b = generate(GeneratorSpec("alternating", isi_pair=(2, 5), n_spikes=3, start=1))
    assert superpose("u", a, b).times.tolist() == [0, 1, 2, 3, 8]


def test_parse_config():
    spec = parse_config("""
        # debate background
        kind = gamma
        rate = 0.01
        shape = 2
        n-spikes = 100
        seed = 9
    """)
    assert spec == GeneratorSpec("gamma", rate=0.01, shape=2.0, n_spikes=100, seed=9)
    assert parse_config("kind=alternating\nisi_pair = 1, 1000\nn_spikes=5").isi_pair == (1, 1000)


@pytest.mark.parametrize("text", ["rate = 1", "kind = poisson\nbogus = 1", "kind poisson",
                                  "kind = poisson\nrate = fast\nn_spikes = 1"])
def test_parse_config_errors(text):
    with pytest.raises(ConfigurationError):
        parse_config(text)
