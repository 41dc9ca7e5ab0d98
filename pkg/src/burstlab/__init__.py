"""
burstlab: local variation (LV) analysis of tagged event streams.

Event logs of ``(timestamp, tag)`` pairs become per-tag spike trains at
one-second resolution. The package then measures their temporal structure
with the local variation of inter-spike intervals, compares it against
surrogate trains resampled from the merged corpus, builds LV densities per
popularity class, and tracks LV over tumbling windows to flag periods of
collective attention.
"""

from .attention import (AttentionEpisode, LvSeries, detect_episodes, hourly_counts, lv_series,
                        topic_train, union_counts)
from .distribution import LvDensity, PopularityBinning, density
from .errors import (BurstlabError, ConfigurationError, DataError, InfeasibleSampleError,
                     InsufficientSpikesError, InvariantViolationError, QuantizationWarning)
from .ingest import CorpusStats, EventRecord, EventTable, Reject, build_trains, parse_events
from .lv import LvResult, batch_lv, classify, local_variation, train_lv
from .nullmodel import MergedTrain, merge, sample_surrogate, surrogate_ensemble
from .spikes import IsiSequence, SpikeTrain, isi, slice_train
from .synth import GeneratorSpec, generate, simulate, superpose

__version__ = "0.1.0"
