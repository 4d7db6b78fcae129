"""Uniformly sampled series, event annotations and synthetic waveforms."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    ContainsGaps,
    DegenerateEvent,
    EmptyInput,
    NonUniformSampling,
    OffsetBeforeOnset,
    OutOfBounds,
    SpecDoesNotFit,
)


def _frozen(a, dtype):
    arr = np.array(a, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """One scalar channel sampled at ``rate_hz``.

    ``valid_mask`` is False where the sample is missing (blink, dropout);
    such samples hold NaN.
    """

    samples: np.ndarray
    rate_hz: float
    start_time_ms: float = 0.0
    valid_mask: np.ndarray = field(default=None)
    units: str = "deg"

    def __post_init__(self):
        samples = _frozen(self.samples, np.float64)
        if samples.size < 1:
            raise EmptyInput("a series needs at least one sample")
        if not (self.rate_hz > 0 and math.isfinite(self.rate_hz)):
            raise ValueError(f"rate_hz must be positive, got {self.rate_hz}")
        if self.valid_mask is None:
            mask = np.isfinite(samples)
        else:
            mask = _frozen(self.valid_mask, bool)
            if mask.shape != samples.shape:
                raise ValueError("valid_mask and samples differ in length")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "valid_mask", _frozen(mask, bool))
        object.__setattr__(self, "rate_hz", float(self.rate_hz))
        object.__setattr__(self, "start_time_ms", float(self.start_time_ms))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def times_ms(self):
        return self.start_time_ms + 1000.0 * np.arange(len(self)) / self.rate_hz

    @property
    def is_contiguous(self):
        return bool(self.valid_mask.all())

    def require_contiguous(self):
        if not self.is_contiguous:
            bad = int(np.flatnonzero(~self.valid_mask)[0])
            raise ContainsGaps(f"series has a masked sample at index {bad}")

    def replace_samples(self, samples, valid_mask=None, units=None):
        """Same timing, new values."""
        return TimeSeries(
            samples,
            self.rate_hz,
            self.start_time_ms,
            self.valid_mask if valid_mask is None else valid_mask,
            self.units if units is None else units,
        )

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.rate_hz == other.rate_hz
            and self.start_time_ms == other.start_time_ms
            and self.units == other.units
            and np.array_equal(self.valid_mask, other.valid_mask)
            and np.array_equal(self.samples, other.samples, equal_nan=True)
        )


class EventLabel(str, enum.Enum):
    SACCADE = "saccade"
    MICROSACCADE = "microsaccade"
    CATCH_UP_SACCADE = "catch-up-saccade"
    OTHER = "other"


@dataclass(frozen=True)
class SaccadeEvent:
    onset_index: int
    offset_index: int
    label: EventLabel = EventLabel.SACCADE

    def __post_init__(self):
        if self.onset_index < 0:
            raise OutOfBounds(f"negative onset index {self.onset_index}")
        if self.offset_index == self.onset_index:
            raise DegenerateEvent(f"onset and offset coincide at {self.onset_index}")
        if self.offset_index < self.onset_index:
            raise OffsetBeforeOnset(f"offset {self.offset_index} precedes onset {self.onset_index}")
        object.__setattr__(self, "onset_index", int(self.onset_index))
        object.__setattr__(self, "offset_index", int(self.offset_index))
        object.__setattr__(self, "label", EventLabel(self.label))

    def check_within(self, n):
        if self.offset_index >= n:
            raise OutOfBounds(f"event offset {self.offset_index} beyond series of length {n}")

    def shifted(self, delta):
        return SaccadeEvent(self.onset_index + delta, self.offset_index + delta, self.label)


@dataclass(frozen=True)
class SyntheticSaccadeSpec:
    amplitude_deg: float
    duration_ms: float
    onset_ms: float
    baseline_deg: float = 0.0


class SyntheticSaccade(NamedTuple):
    series: TimeSeries
    event: SaccadeEvent
    peak_velocity_dps: float


def validate_series(raw, expected_rate_hz, tolerance=0.01):
    """Build a :class:`TimeSeries` from ``(t_ms, value)`` pairs.

    ``value`` may be None or NaN for a missing sample. Every inter-sample
    interval must be within ``tolerance`` (relative) of ``1000/expected_rate_hz``.
    """
    pairs = list(raw)
    if len(pairs) < 2:
        raise EmptyInput("need at least two timestamp/value pairs")
    t = np.array([p[0] for p in pairs], dtype=np.float64)
    v = np.array([np.nan if p[1] is None else p[1] for p in pairs], dtype=np.float64)
    dt = np.diff(t)
    if np.any(dt <= 0):
        i = int(np.flatnonzero(dt <= 0)[0])
        raise NonUniformSampling(f"timestamps not strictly increasing at index {i + 1}")
    nominal = 1000.0 / expected_rate_hz
    dev = np.abs(dt - nominal) / nominal
    if np.any(dev > tolerance):
        i = int(np.argmax(dev))
        raise NonUniformSampling(
            f"interval {dt[i]:g} ms at index {i + 1} deviates {dev[i]:.3g} from {nominal:g} ms"
        )
    return TimeSeries(v, expected_rate_hz, t[0], np.isfinite(v))


def extract_window(ts: TimeSeries, start_index: int, end_index: int) -> TimeSeries:
    """Inclusive slice ``[start_index, end_index]`` keeping the time base."""
    if not (0 <= start_index <= end_index < len(ts)):
        raise OutOfBounds(
            f"window [{start_index}, {end_index}] outside series of length {len(ts)}"
        )
    sl = slice(start_index, end_index + 1)
    return TimeSeries(
        ts.samples[sl],
        ts.rate_hz,
        ts.start_time_ms + 1000.0 * start_index / ts.rate_hz,
        ts.valid_mask[sl],
        ts.units,
    )


def gen_sine(freq_hz, amplitude, phase_rad, rate_hz, n_samples) -> TimeSeries:
    if rate_hz <= 0 or n_samples < 1 or freq_hz < 0:
        raise ValueError("need rate_hz > 0, n_samples >= 1 and freq_hz >= 0")
    i = np.arange(n_samples)
    return TimeSeries(amplitude * np.sin(2 * np.pi * freq_hz * i / rate_hz + phase_rad), rate_hz)


def _logistic(x):
    return 1.0 / (1.0 + np.exp(-x))


def logistic_profile(u, steepness):
    """Logistic rescaled so that it runs exactly from 0 at u=0 to 1 at u=1."""
    u = np.clip(u, 0.0, 1.0)
    lo = _logistic(-steepness / 2)
    hi = _logistic(steepness / 2)
    return (_logistic(steepness * (u - 0.5)) - lo) / (hi - lo)


def logistic_peak_velocity(amplitude_deg, duration_ms, steepness):
    """Maximum of the profile derivative in deg/s (reached mid-saccade)."""
    span = _logistic(steepness / 2) - _logistic(-steepness / 2)
    return abs(amplitude_deg) * steepness / (4.0 * span) / (duration_ms / 1000.0)


def gen_synthetic_saccade(
    spec: SyntheticSaccadeSpec, rate_hz: float, total_ms: float, steepness: float = 5.0
) -> SyntheticSaccade:
    """Logistic position step with exact plateaus outside the event.

    The annotated onset is the last sample at or before ``onset_ms`` and the
    offset is the first sample at or after ``onset_ms + duration_ms``.
    """
    if spec.duration_ms <= 0:
        raise SpecDoesNotFit("duration must be positive")
    n = int(round(total_ms * rate_hz / 1000.0))
    end_ms = spec.onset_ms + spec.duration_ms
    onset = math.floor(spec.onset_ms * rate_hz / 1000.0 + 1e-9)
    offset = math.ceil(end_ms * rate_hz / 1000.0 - 1e-9)
    if spec.onset_ms < 0 or end_ms > total_ms or offset > n - 1 or offset <= onset:
        raise SpecDoesNotFit(
            f"saccade [{spec.onset_ms}, {end_ms}] ms does not fit in {n} samples at {rate_hz} Hz"
        )
    t = 1000.0 * np.arange(n) / rate_hz
    u = (t - spec.onset_ms) / spec.duration_ms
    x = spec.baseline_deg + spec.amplitude_deg * logistic_profile(u, steepness)
    peak = logistic_peak_velocity(spec.amplitude_deg, spec.duration_ms, steepness)
    return SyntheticSaccade(TimeSeries(x, rate_hz), SaccadeEvent(onset, offset), peak)

