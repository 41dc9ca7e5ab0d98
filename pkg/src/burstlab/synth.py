"""
Synthetic spike trains with known LV statistics.

Four kinds are available:

``poisson``
    Renewal train with exponential intervals of mean ``1 / rate``.
``gamma``
    Renewal train with Gamma(shape, scale = 1 / (shape * rate)) intervals;
    the expected LV is ``3 / (2 * shape + 1)``.
``alternating``
    Deterministic intervals cycling through ``isi_pair``.
``saturated``
    One spike every second.

Continuous event times are accumulated in real time starting at ``start``,
floored to whole seconds and same-second collisions are dropped, which is
exactly what ingestion does to real logs. Random kinds draw from numpy's
``Generator(PCG64(seed))``: exponentials via ``standard_exponential``
(ziggurat) and Gamma deviates via ``standard_gamma`` (Marsaglia-Tsang).
Streams are stable for a given numpy version only; cross-version checks
compare statistics.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import ConfigurationError, QuantizationWarning
from .spikes import SpikeTrain

__all__ = ["KINDS", "GeneratorSpec", "SynthResult", "simulate", "generate", "superpose",
           "parse_config"]

KINDS = ("poisson", "gamma", "alternating", "saturated")

_REQUIRED = {
    "poisson": {"rate"},
    "gamma": {"rate", "shape"},
    "alternating": {"isi_pair"},
    "saturated": set(),
}
_OPTIONAL_BY_KIND = {"rate", "shape", "isi_pair"}

COLLAPSE_WARN_FRACTION = 0.5


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of one synthetic train.

    Exactly one of `duration` (seconds) or `n_spikes` sets the size. Only
    the parameters used by `kind` may be given; the rest must stay ``None``.
    """

    kind: str
    rate: float | None = None
    shape: float | None = None
    isi_pair: tuple[int, int] | None = None
    duration: int | None = None
    n_spikes: int | None = None
    seed: int = 0
    start: int = 0
    tag: str = "synthetic"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown generator kind {self.kind!r}; expected one of {KINDS}")
        given = {name for name in _OPTIONAL_BY_KIND if getattr(self, name) is not None}
        missing = _REQUIRED[self.kind] - given
        extra = given - _REQUIRED[self.kind]
        if missing:
            raise ConfigurationError(f"{self.kind} generator requires {sorted(missing)}")
        if extra:
            raise ConfigurationError(f"{self.kind} generator does not take {sorted(extra)}")
        if (self.duration is None) == (self.n_spikes is None):
            raise ConfigurationError("give exactly one of duration or n_spikes")
        if self.duration is not None and self.duration <= 0:
            raise ConfigurationError("duration must be positive")
        if self.n_spikes is not None and self.n_spikes < 0:
            raise ConfigurationError("n_spikes must be non-negative")
        if self.rate is not None and not self.rate > 0:
            raise ConfigurationError(f"rate must be positive, got {self.rate}")
        if self.shape is not None and not self.shape > 0:
            raise ConfigurationError(f"shape must be positive, got {self.shape}")
        if self.isi_pair is not None:
            pair = tuple(int(v) for v in self.isi_pair)
            if len(pair) != 2 or min(pair) < 1 or pair != tuple(self.isi_pair):
                raise ConfigurationError(f"isi_pair must be two positive integers, got {self.isi_pair}")
            object.__setattr__(self, "isi_pair", pair)
        if self.start < 0:
            raise ConfigurationError("start must be non-negative")


@dataclass(frozen=True)
class SynthResult:
    train: SpikeTrain
    n_drawn: int
    n_collapsed: int
    warnings: tuple[str, ...] = field(default=())

    @property
    def collapsed_fraction(self) -> float:
        return self.n_collapsed / self.n_drawn if self.n_drawn else 0.0


def _renewal(spec: GeneratorSpec):
    """Quantized renewal train; returns (times, n_drawn)."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    if spec.kind == "poisson":
        def draw(n):
            return rng.standard_exponential(n) / spec.rate
    else:
        scale = 1.0 / (spec.shape * spec.rate)

        def draw(n):
            return rng.standard_gamma(spec.shape, n) * scale

    mean_isi = 1.0 / spec.rate
    t_last = float(spec.start)
    chunks: list[np.ndarray] = []
    have = 0
    drawn = 0
    last_sec = None
    end = None if spec.duration is None else spec.start + spec.duration
    while True:
        if end is None:
            need = spec.n_spikes - have
            if need <= 0:
                break
            batch = max(int(need * 1.05) + 16, 64)
        else:
            if t_last >= end:
                break
            batch = max(int((end - t_last) / mean_isi * 1.05) + 16, 64)
        real = t_last + np.cumsum(draw(batch))
        t_last = float(real[-1])
        if end is not None:
            real = real[real < end]
        secs = np.floor(real).astype(np.int64)
        keep = np.ones(secs.size, dtype=bool)
        keep[1:] = secs[1:] != secs[:-1]
        if last_sec is not None and secs.size:
            keep[0] = secs[0] != last_sec
        distinct = secs[keep]
        if end is None and have + distinct.size > spec.n_spikes:
            # stop at the n-th distinct second; later draws never happened
            cut = spec.n_spikes - have
            drawn += int(np.flatnonzero(keep)[cut])
            distinct = distinct[:cut]
        else:
            drawn += int(secs.size)
        if secs.size:
            last_sec = int(secs[-1])
        chunks.append(distinct)
        have += int(distinct.size)
    times = np.concatenate(chunks) if chunks else np.empty(0, np.int64)
    return times, drawn


def simulate(spec: GeneratorSpec) -> SynthResult:
    """Generate a train plus quantization bookkeeping."""
    if spec.kind in ("poisson", "gamma"):
        times, drawn = _renewal(spec)
    elif spec.kind == "alternating":
        a, b = spec.isi_pair
        if spec.n_spikes is not None:
            n = spec.n_spikes
        else:
            # spikes at start + k*(a+b) and start + k*(a+b) + a
            period = a + b
            full, rem = divmod(spec.duration, period)
            n = 2 * full + (1 if rem > 0 else 0) + (1 if rem > a else 0)
        steps = np.tile(np.array([a, b], dtype=np.int64), n // 2 + 1)[: max(n - 1, 0)]
        times = spec.start + np.concatenate(([0], np.cumsum(steps)))[:n]
        drawn = n
    else:
        n = spec.n_spikes if spec.n_spikes is not None else spec.duration
        times = spec.start + np.arange(n, dtype=np.int64)
        drawn = n
    train = SpikeTrain(spec.tag, times)
    collapsed = drawn - train.popularity
    notes = []
    if drawn and collapsed / drawn > COLLAPSE_WARN_FRACTION:
        notes.append(
            f"one-second quantization dropped {collapsed} of {drawn} spikes; "
            f"rate {spec.rate} is too high for 1 s resolution")
    return SynthResult(train, drawn, collapsed, tuple(notes))


def generate(spec: GeneratorSpec) -> SpikeTrain:
    """Generate the train described by `spec`.

    Emits :class:`~burstlab.errors.QuantizationWarning` when more than half
    of the drawn spikes collapsed onto occupied seconds.
    """
    result = simulate(spec)
    for note in result.warnings:
        warnings.warn(note, QuantizationWarning, stacklevel=2)
    return result.train


def superpose(tag: str, *trains: SpikeTrain) -> SpikeTrain:
    """Union of several trains as one train (one spike per second)."""
    if not trains:
        return SpikeTrain(tag, [])
    times = np.unique(np.concatenate([tr.times for tr in trains]))
    return SpikeTrain(tag, times, raw_count=sum(tr.raw_count for tr in trains))


_FIELD_TYPES = {
    "kind": str,
    "rate": float,
    "shape": float,
    "duration": int,
    "n_spikes": int,
    "seed": int,
    "start": int,
    "tag": str,
}


def parse_config(text: str) -> GeneratorSpec:
    """Build a spec from ``key = value`` lines.

    Blank lines and ``#`` comments are ignored. ``isi_pair`` takes two
    comma-separated integers, e.g. ``isi_pair = 1, 1000``.
    """
    values = {}
    known = {f.name for f in fields(GeneratorSpec)}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        try:
            if key == "isi_pair":
                values[key] = tuple(int(v) for v in value.split(","))
            else:
                values[key] = _FIELD_TYPES[key](value)
        except ValueError as exc:
            raise ConfigurationError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    if "kind" not in values:
        raise ConfigurationError("config must set kind")
    return GeneratorSpec(**values)
