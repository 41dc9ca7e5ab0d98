import io

import numpy as np
import pytest
from hypothesis import given, strategies as st

from burstlab.errors import ConfigurationError, InsufficientSpikesError, InvariantViolationError
from burstlab.spikes import IsiSequence, SpikeTrain, isi, slice_train, write_trains_csv

increasing = st.lists(st.integers(0, 10**9), min_size=0, max_size=200, unique=True).map(sorted)


def test_isi_unit_spacing():
    assert isi(SpikeTrain("a", [0, 1, 2, 3])).intervals.tolist() == [1, 1, 1]


def test_isi_subtraction():
    out = isi(SpikeTrain("a", [0, 1, 1001, 1002, 2002]))
    assert out.intervals.tolist() == [1, 1000, 1, 1000]


def test_isi_single_spike_names_tag():
    with pytest.raises(InsufficientSpikesError, match="lonely"):
        isi(SpikeTrain("lonely", [7]))


def test_train_rejects_unsorted_and_duplicates():
    with pytest.raises(InvariantViolationError):
        SpikeTrain("a", [3, 2])
    with pytest.raises(InvariantViolationError):
        SpikeTrain("a", [2, 2])


def test_train_rejects_fractional_seconds():
    with pytest.raises(InvariantViolationError):
        SpikeTrain("a", np.array([1.5, 2.0]))


def test_train_is_immutable():
    tr = SpikeTrain("a", [1, 2, 3])
    with pytest.raises(ValueError):
        tr.times[0] = 9
    with pytest.raises(AttributeError):
        tr.tag = "b"


def test_raw_count_defaults_and_bounds():
    assert SpikeTrain("a", [1, 2]).raw_count == 2
    assert SpikeTrain("a", [1, 2], raw_count=5).raw_count == 5
    with pytest.raises(InvariantViolationError):
        SpikeTrain("a", [1, 2], raw_count=1)


def test_slice_half_open():
    tr = SpikeTrain("x", [0, 1, 2, 3600, 3601])
    assert slice_train(tr, 0, 3600).times.tolist() == [0, 1, 2]
    assert slice_train(tr, 5, 6).popularity == 0
    assert slice_train(SpikeTrain("x", [5]), 5, 6).times.tolist() == [5]
    assert slice_train(tr, 0, 3600).tag == "x"


def test_slice_inverted_window():
    with pytest.raises(ConfigurationError):
        slice_train(SpikeTrain("x", [1]), 5, 5)


@given(increasing)
def test_isi_cumsum_reconstructs(times):
    if len(times) < 2:
        return
    tr = SpikeTrain("a", times)
    d = isi(tr).intervals
    assert np.all(d >= 1)
    assert d.sum() == times[-1] - times[0]
    rebuilt = np.concatenate(([times[0]], times[0] + np.cumsum(d)))
    assert rebuilt.tolist() == times


@given(increasing, st.integers(0, 10**9), st.integers(1, 10**8),
       st.integers(0, 10**9), st.integers(1, 10**8))
def test_slice_composition(times, a0, alen, b0, blen):
    tr = SpikeTrain("a", times)
    a1, b1 = a0 + alen, b0 + blen
    lo, hi = max(a0, b0), min(a1, b1)
    nested = slice_train(slice_train(tr, a0, a1), b0, b1)
    if lo < hi:
        assert nested == slice_train(tr, lo, hi)
    else:
        assert nested.popularity == 0


def test_isi_sequence_equality():
    assert IsiSequence([1, 2]) == IsiSequence(np.array([1, 2]))


def test_train_csv_sorted_by_tag_then_time():
    buf = io.StringIO()
    write_trains_csv([SpikeTrain("b", [1, 4]), SpikeTrain("a", [9])], buf)
    assert buf.getvalue() == "tag,timestamp\na,9\nb,1\nb,4\n"
