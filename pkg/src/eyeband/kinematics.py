"""Savitzky-Golay velocity, saccade snippets and main-sequence features."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    ContainsGaps,
    InvalidOrder,
    InvalidWindow,
    SeriesTooShort,
    SnippetOutOfBounds,
)
from .signal import SaccadeEvent, TimeSeries, extract_window

SG_WINDOW = 7
SG_ORDER = 2
SNIPPET_PAD_MS = 200.0


@dataclass(frozen=True)
class SaccadeFeatures:
    amplitude_deg: float
    peak_velocity_dps: float
    event: SaccadeEvent


def savgol_derivative_kernel(window: int, poly_order: int, deriv: int = 1) -> np.ndarray:
    """Weights ``w`` of the centered least-squares polynomial derivative.

    The estimate at sample ``i`` is ``sum(w[k] * x[i - h + k])`` with
    ``h = window // 2`` and unit sample spacing, i.e. the weights are applied
    by correlation, not flipped.
    """
    if window < 3 or window % 2 == 0:
        raise InvalidWindow(f"window must be odd and >= 3, got {window}")
    if not 0 <= poly_order < window:
        raise InvalidOrder(f"poly_order must be in [0, {window}), got {poly_order}")
    if not 0 <= deriv <= poly_order:
        raise InvalidOrder(f"deriv must be in [0, {poly_order}], got {deriv}")
    h = window // 2
    return np.array([float(w) for w in _exact_weights(h, poly_order, deriv)])


def _exact_weights(h, poly_order, deriv):
    """Row ``deriv`` of ``(V^T V)^-1 V^T`` in rational arithmetic, times ``deriv!``."""
    ks = range(-h, h + 1)
    m = poly_order + 1
    gram = [[Fraction(sum(k ** (i + j) for k in ks)) for j in range(m)] for i in range(m)]
    rhs = [Fraction(int(i == deriv)) for i in range(m)]
    # solve gram @ c = e_deriv by Gauss-Jordan; gram is symmetric positive definite
    aug = [row[:] + [r] for row, r in zip(gram, rhs)]
    for col in range(m):
        piv = aug[col][col]
        aug[col] = [v / piv for v in aug[col]]
        for r in range(m):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    c = [aug[i][m] for i in range(m)]
    scale = math.factorial(deriv)
    return [scale * sum(c[j] * k ** j for j in range(m)) for k in ks]


def velocity_array(x, rate_hz, window=SG_WINDOW, poly_order=SG_ORDER):
    """Velocity in units/s; the half-window at each end is NaN."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] < window:
        raise SeriesTooShort(f"need at least {window} samples, got {x.shape[-1]}")
    w = savgol_derivative_kernel(window, poly_order, 1)
    h = window // 2
    n = x.shape[-1]
    # first-derivative weights are antisymmetric: sum w[h+k] * (x[i+k] - x[i-k])
    acc = np.zeros(x.shape[:-1] + (n - 2 * h,))
    for k in range(1, h + 1):
        acc += w[h + k] * (x[..., h + k:n - h + k] - x[..., h - k:n - h - k])
    out = np.full(x.shape, np.nan)
    out[..., h:n - h] = rate_hz * acc
    return out


def velocity(ts: TimeSeries, window: int = SG_WINDOW, poly_order: int = SG_ORDER) -> TimeSeries:
    ts.require_contiguous()
    v = velocity_array(ts.samples, ts.rate_hz, window, poly_order)
    return ts.replace_samples(v, valid_mask=np.isfinite(v), units=f"{ts.units}/s")


def pad_samples(pad_ms, rate_hz):
    return int(round(pad_ms * rate_hz / 1000.0))


def extract_snippet(ts: TimeSeries, event: SaccadeEvent, pad_ms: float = SNIPPET_PAD_MS) -> TimeSeries:
    """Window from ``pad_ms`` before onset to ``pad_ms`` after offset."""
    pad = pad_samples(pad_ms, ts.rate_hz)
    start, end = event.onset_index - pad, event.offset_index + pad
    if start < 0 or end >= len(ts):
        raise SnippetOutOfBounds(
            f"snippet [{start}, {end}] for event {event.onset_index}-{event.offset_index} "
            f"leaves the recording of length {len(ts)}"
        )
    snip = extract_window(ts, start, end)
    if not snip.is_contiguous:
        raise ContainsGaps(f"snippet [{start}, {end}] touches masked samples")
    return snip


def snippet_event(event: SaccadeEvent, pad_ms: float, rate_hz: float) -> SaccadeEvent:
    """``event`` re-indexed relative to its snippet start."""
    return event.shifted(pad_samples(pad_ms, rate_hz) - event.onset_index)


def features_from_arrays(position, vel, event: SaccadeEvent) -> SaccadeFeatures:
    on, off = event.onset_index, event.offset_index
    if off >= len(position):
        raise SnippetOutOfBounds(f"event offset {off} beyond snippet of length {len(position)}")
    span = np.abs(vel[on:off + 1])
    span = span[np.isfinite(span)]
    if span.size == 0:
        raise SeriesTooShort("no valid velocity samples inside the event")
    amp = abs(float(position[off]) - float(position[on]))
    return SaccadeFeatures(amp, float(span.max()), event)


def saccade_features(
    snippet: TimeSeries, event: SaccadeEvent, window: int = SG_WINDOW, poly_order: int = SG_ORDER
) -> SaccadeFeatures:
    """Absolute amplitude and peak absolute velocity between onset and offset.

    ``event`` indexes into ``snippet``.
    """
    event.check_within(len(snippet))
    v = velocity(snippet, window, poly_order)
    return features_from_arrays(snippet.samples, v.samples, event)


def detect_saccades(vel: TimeSeries, threshold_dps: float, min_duration_ms: float) -> list:
    """Maximal runs of ``|velocity| > threshold_dps`` lasting at least ``min_duration_ms``.

    A run of ``k`` samples lasts ``k * 1000 / rate_hz`` ms. Invalid samples
    break runs.
    """
    above = np.zeros(len(vel) + 2, dtype=bool)
    with np.errstate(invalid="ignore"):
        above[1:-1] = vel.valid_mask & (np.abs(vel.samples) > threshold_dps)
    edges = np.diff(above.astype(np.int8))
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1) - 1
    min_len = max(2, math.ceil(min_duration_ms * vel.rate_hz / 1000.0 - 1e-9))
    return [
        SaccadeEvent(int(a), int(b))
        for a, b in zip(starts, stops)
        if b - a + 1 >= min_len
    ]
