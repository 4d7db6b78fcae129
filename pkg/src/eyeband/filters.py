"""Butterworth band filters applied forward and backward (zero phase).

Designs go analog prototype -> prewarped edge frequencies -> bilinear
transform, and are realized as a cascade of second-order sections. A
direct-form polynomial of order 7 at a normalized cutoff of 0.05 loses too
many digits to be usable.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import InvalidCutoff, InvalidOrder, OutOfBand, SeriesTooShort
from .signal import TimeSeries

PAPER_ORDER = 7


class FilterKind(str, enum.Enum):
    LOWPASS = "lowpass"
    HIGHPASS = "highpass"
    BANDPASS = "bandpass"


@dataclass(frozen=True)
class FilterSpec:
    kind: FilterKind
    rate_hz: float
    cutoff_low_hz: Optional[float] = None
    cutoff_high_hz: Optional[float] = None
    order: int = PAPER_ORDER

    def __post_init__(self):
        object.__setattr__(self, "kind", FilterKind(self.kind))
        if not isinstance(self.order, (int, np.integer)) or self.order < 1:
            raise InvalidOrder(f"order must be a positive integer, got {self.order!r}")
        nyq = self.rate_hz / 2.0
        edges = {
            FilterKind.LOWPASS: ("cutoff_high_hz",),
            FilterKind.HIGHPASS: ("cutoff_low_hz",),
            FilterKind.BANDPASS: ("cutoff_low_hz", "cutoff_high_hz"),
        }[self.kind]
        for name in edges:
            f = getattr(self, name)
            if f is None or not (0.0 < f < nyq):
                raise InvalidCutoff(f"{name}={f} must lie strictly inside (0, {nyq:g}) Hz")
        if self.kind is FilterKind.BANDPASS and not self.cutoff_low_hz < self.cutoff_high_hz:
            raise InvalidCutoff("bandpass needs cutoff_low_hz < cutoff_high_hz")

    @classmethod
    def lowpass(cls, cutoff_hz, rate_hz, order=PAPER_ORDER):
        return cls(FilterKind.LOWPASS, rate_hz, cutoff_high_hz=cutoff_hz, order=order)

    @classmethod
    def highpass(cls, cutoff_hz, rate_hz, order=PAPER_ORDER):
        return cls(FilterKind.HIGHPASS, rate_hz, cutoff_low_hz=cutoff_hz, order=order)

    @classmethod
    def bandpass(cls, low_hz, high_hz, rate_hz, order=PAPER_ORDER):
        return cls(FilterKind.BANDPASS, rate_hz, cutoff_low_hz=low_hz, cutoff_high_hz=high_hz,
                   order=order)

    @property
    def label(self):
        if self.kind is FilterKind.LOWPASS:
            return f"lowpass-{self.cutoff_high_hz:g}"
        if self.kind is FilterKind.HIGHPASS:
            return f"highpass-{self.cutoff_low_hz:g}"
        return f"bandpass-{self.cutoff_low_hz:g}-{self.cutoff_high_hz:g}"


@dataclass(frozen=True, eq=False)
class FilterStages:
    """Realized cascade.

    ``sections`` has one row ``(b0, b1, b2, 1, a1, a2)`` per biquad; a
    first-order section has ``b2 = a2 = 0``. The cascade output is scaled by
    ``overall_gain``.
    """

    sections: np.ndarray
    overall_gain: float
    spec: FilterSpec

    @property
    def rate_hz(self):
        return self.spec.rate_hz

    @property
    def sos(self):
        """Sections with the overall gain folded into the first numerator."""
        out = np.array(self.sections, dtype=np.float64)
        out[0, :3] *= self.overall_gain
        return out

    @property
    def poles(self):
        roots = []
        for _, _, _, _, a1, a2 in self.sections:
            roots.extend(np.roots([1.0, a1, a2]) if a2 != 0.0 else np.roots([1.0, a1]))
        return np.asarray(roots)

    def transfer(self, z):
        """Complex single-pass response at points ``z`` of the z-plane."""
        z = np.asarray(z, dtype=np.complex128)
        zi = 1.0 / z
        h = np.full(z.shape, self.overall_gain, dtype=np.complex128)
        for b0, b1, b2, _, a1, a2 in self.sections:
            h *= (b0 + b1 * zi + b2 * zi * zi) / (1.0 + a1 * zi + a2 * zi * zi)
        return h

    @property
    def pad_length(self):
        return 3 * (2 * self.spec.order + 1)


def _prewarp(f_hz, rate_hz):
    return math.tan(math.pi * f_hz / rate_hz)


def _analog_poles(spec: FilterSpec):
    n = spec.order
    k = np.arange(1, n + 1)
    proto = np.exp(1j * np.pi * (2 * k + n - 1) / (2 * n))
    if spec.kind is FilterKind.LOWPASS:
        return _prewarp(spec.cutoff_high_hz, spec.rate_hz) * proto
    if spec.kind is FilterKind.HIGHPASS:
        return _prewarp(spec.cutoff_low_hz, spec.rate_hz) / proto
    lo = _prewarp(spec.cutoff_low_hz, spec.rate_hz)
    hi = _prewarp(spec.cutoff_high_hz, spec.rate_hz)
    half = proto * (hi - lo) / 2.0
    root = np.sqrt(half * half - lo * hi + 0j)
    return np.concatenate([half + root, half - root])


def _pair_poles(zp):
    tol = 1e-12
    upper = [p for p in zp if p.imag > tol]
    real = sorted(p.real for p in zp if abs(p.imag) <= tol)
    dens = [(1.0, -2.0 * p.real, abs(p) ** 2) for p in upper]
    radii = [abs(p) for p in upper]
    while len(real) >= 2:
        r1, r2 = real.pop(0), real.pop(0)
        dens.append((1.0, -(r1 + r2), r1 * r2))
        radii.append(max(abs(r1), abs(r2)))
    if real:
        r = real.pop()
        dens.append((1.0, -r, 0.0))
        radii.append(abs(r))
    order = np.argsort(radii, kind="stable")
    return [dens[i] for i in order]


_NUMERATORS = {
    FilterKind.LOWPASS: ((1.0, 2.0, 1.0), (1.0, 1.0, 0.0)),
    FilterKind.HIGHPASS: ((1.0, -2.0, 1.0), (1.0, -1.0, 0.0)),
    FilterKind.BANDPASS: ((1.0, 0.0, -1.0), None),
}


def _reference_point(spec: FilterSpec):
    if spec.kind is FilterKind.LOWPASS:
        return 1.0 + 0j
    if spec.kind is FilterKind.HIGHPASS:
        return -1.0 + 0j
    center = math.sqrt(_prewarp(spec.cutoff_low_hz, spec.rate_hz)
                       * _prewarp(spec.cutoff_high_hz, spec.rate_hz))
    return np.exp(2j * math.atan(center))


@functools.lru_cache(maxsize=256)
def design_filter(spec: FilterSpec) -> FilterStages:
    """Digital Butterworth cascade whose single-pass gain is 1/sqrt(2) at each edge."""
    s_poles = _analog_poles(spec)
    if np.any(s_poles.real >= 0):
        raise InvalidCutoff(f"{spec.label}: analog prototype is not stable")
    z_poles = (1.0 + s_poles) / (1.0 - s_poles)
    biquad_num, first_num = _NUMERATORS[spec.kind]
    rows = []
    for den in _pair_poles(z_poles):
        num = first_num if den[2] == 0.0 else biquad_num
        rows.append(num + den)
    sections = np.array(rows, dtype=np.float64)
    unscaled = FilterStages(sections, 1.0, spec)
    h_ref = complex(unscaled.transfer(_reference_point(spec)))
    gain = math.copysign(1.0 / abs(h_ref), h_ref.real)
    sections.setflags(write=False)
    return FilterStages(sections, gain, spec)


def frequency_response(stages: FilterStages, freq_hz, zero_phase=True):
    """Magnitude of the cascade at ``freq_hz`` (scalar or array).

    With ``zero_phase`` the forward-backward magnitude is returned, i.e.
    the single-pass magnitude squared.
    """
    f = np.asarray(freq_hz, dtype=np.float64)
    nyq = stages.rate_hz / 2.0
    if np.any(f < 0) or np.any(f > nyq):
        raise OutOfBand(f"frequencies must lie in [0, {nyq:g}] Hz")
    mag = np.abs(stages.transfer(np.exp(2j * np.pi * f / stages.rate_hz)))
    if zero_phase:
        mag = mag * mag
    return float(mag) if mag.ndim == 0 else mag


def _steady_state(sos):
    """Delay-line state of each section for a unit-step input at steady state."""
    zi = np.empty((sos.shape[0], 2))
    level = 1.0
    for s, (b0, b1, b2, _, a1, a2) in enumerate(sos):
        g = (b0 + b1 + b2) / (1.0 + a1 + a2)
        zi[s] = ((g - b0) * level, (b2 - a2 * g) * level)
        level *= g
    return zi


def _odd_extend(x, n):
    left = 2.0 * x[:, :1] - x[:, n:0:-1]
    right = 2.0 * x[:, -1:] - x[:, -2:-n - 2:-1]
    return np.concatenate([left, x, right], axis=1)


def zero_phase_filter(stages: FilterStages, x):
    """Forward-backward filtering of a 1-D array or of each row of a 2-D array."""
    x = np.asarray(x, dtype=np.float64)
    one_d = x.ndim == 1
    rows = np.atleast_2d(x)
    pad = stages.pad_length
    if rows.shape[1] <= pad:
        raise SeriesTooShort(
            f"{stages.spec.label} needs more than {pad} samples, got {rows.shape[1]}"
        )
    sos = stages.sos
    zi = _steady_state(sos)
    ext = _odd_extend(rows, pad)
    fwd = kernels.sosfilt_rows(sos, ext, zi[None, :, :] * ext[:, :1, None])
    rev = np.ascontiguousarray(fwd[:, ::-1])
    back = kernels.sosfilt_rows(sos, rev, zi[None, :, :] * rev[:, :1, None])
    out = back[:, ::-1][:, pad:-pad]
    return out[0] if one_d else np.ascontiguousarray(out)


def zero_phase_filter_many(stages: FilterStages, arrays: Sequence[np.ndarray]):
    """Filter a ragged collection, batching equal-length arrays together."""
    out = [None] * len(arrays)
    by_len = {}
    for i, a in enumerate(arrays):
        by_len.setdefault(len(a), []).append(i)
    for idx in by_len.values():
        block = zero_phase_filter(stages, np.stack([np.asarray(arrays[i], float) for i in idx]))
        for row, i in zip(block, idx):
            out[i] = row
    return out


def apply_zero_phase(stages: FilterStages, ts: TimeSeries) -> TimeSeries:
    ts.require_contiguous()
    if ts.rate_hz != stages.rate_hz:
        raise InvalidCutoff(
            f"filter designed for {stages.rate_hz:g} Hz applied to a {ts.rate_hz:g} Hz series"
        )
    return ts.replace_samples(zero_phase_filter(stages, ts.samples))


@dataclass(frozen=True)
class BandSpec:
    name: str
    high_hz: float
    low_hz: Optional[float] = None

    def __post_init__(self):
        if self.low_hz is not None and not self.low_hz < self.high_hz:
            raise InvalidCutoff(f"band {self.name}: low edge must be below high edge")

    def filter_spec(self, rate_hz, order=PAPER_ORDER):
        if self.low_hz is None:
            return FilterSpec.lowpass(self.high_hz, rate_hz, order)
        return FilterSpec.bandpass(self.low_hz, self.high_hz, rate_hz, order)


DEFAULT_BANDS = (
    BandSpec("0-25", 25.0),
    BandSpec("26-50", 50.0, 26.0),
    BandSpec("51-75", 75.0, 51.0),
    BandSpec("76-100", 100.0, 76.0),
    BandSpec("101-125", 125.0, 101.0),
    BandSpec("126-150", 150.0, 126.0),
)

DEFAULT_LOWPASS_CUTOFFS = (25.0, 50.0, 75.0, 100.0, 125.0, 150.0)


def parse_bands(text):
    """Parse ``"0-25,26-50,..."``; a leading 0 edge means low-pass."""
    bands = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        lo, _, hi = item.partition("-")
        if not hi:
            raise InvalidCutoff(f"band {item!r} is not of the form LOW-HIGH")
        lo_f, hi_f = float(lo), float(hi)
        bands.append(BandSpec(item, hi_f, None if lo_f == 0 else lo_f))
    if not bands:
        raise InvalidCutoff("empty band list")
    return tuple(bands)


def decompose_bands(ts: TimeSeries, bands=DEFAULT_BANDS, order=PAPER_ORDER):
    """One zero-phase filtered copy of ``ts`` per band, in band order."""
    ts.require_contiguous()
    return [
        apply_zero_phase(design_filter(b.filter_spec(ts.rate_hz, order)), ts) for b in bands
    ]


def decompose_many(arrays, rate_hz, bands=DEFAULT_BANDS, order=PAPER_ORDER):
    """Band decomposition of many raw arrays; returns ``[array][band]``."""
    per_band = [
        zero_phase_filter_many(design_filter(b.filter_spec(rate_hz, order)), arrays)
        for b in bands
    ]
    return [list(rows) for rows in zip(*per_band)]
