"""How well do raw samples capture a sinusoid's amplitude?"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NonPositiveFrequency, SeriesTooShort, SubNyquist
from .signal import TimeSeries

DEFAULT_TRIALS = 1000
PERIODS = 100
SUMMARY_KEYS = ("min", "q25", "median", "q75", "max")


class Domain(str, enum.Enum):
    FREQUENCY = "frequency"
    TIME = "time"


SAMPLES_PER_CYCLE = {Domain.FREQUENCY: 2.0, Domain.TIME: 10.0}


def estimate_amplitude(ts) -> float:
    """Half the peak-to-peak range of the samples."""
    x = ts.samples if isinstance(ts, TimeSeries) else np.asarray(ts, dtype=np.float64)
    if x.shape[0] < 2:
        raise SeriesTooShort("amplitude estimate needs at least two samples")
    return 0.5 * float(np.max(x) - np.min(x))


@dataclass(frozen=True)
class SamplingSweepResult:
    samples_per_period: tuple
    summaries: tuple  # one dict per N with SUMMARY_KEYS
    trials: int
    seed: int
    freq_hz: float = 1.0

    def column(self, key):
        return np.array([s[key] for s in self.summaries])

    @property
    def iqr(self):
        return self.column("q75") - self.column("q25")

    def to_dict(self):
        return {
            "samples_per_period": list(self.samples_per_period),
            "summaries": [dict(s) for s in self.summaries],
            "trials": self.trials,
            "seed": self.seed,
            "freq_hz": self.freq_hz,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            tuple(d["samples_per_period"]),
            tuple(dict(s) for s in d["summaries"]),
            int(d["trials"]),
            int(d["seed"]),
            float(d["freq_hz"]),
        )


def sample_count(samples_per_period):
    return max(2, int(round(PERIODS * samples_per_period)))


def sweep_sampling(freq_hz, samples_per_period, trials=DEFAULT_TRIALS, seed=0) -> SamplingSweepResult:
    """Amplitude estimates of unit sines with random phase, per samples-per-period N.

    Each trial samples ``PERIODS`` whole periods at ``N * freq_hz``. The
    phase of trial ``k`` for the ``j``-th N comes from a generator seeded
    with ``(seed, j)``, so results do not depend on evaluation order.
    """
    if freq_hz <= 0:
        raise NonPositiveFrequency(f"frequency must be positive, got {freq_hz}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ns = [float(n) for n in samples_per_period]
    for n in ns:
        if n < 2:
            raise SubNyquist(f"{n:g} samples per period is below the Nyquist limit of 2")
    summaries = []
    for j, n in enumerate(ns):
        phases = np.random.default_rng([seed, j]).uniform(0.0, 2.0 * np.pi, trials)
        # samples depend only on the ratio rate/freq, so freq_hz drops out here
        est = kernels.sine_half_range(n, phases, sample_count(n))
        q = np.quantile(est, [0.0, 0.25, 0.5, 0.75, 1.0])
        summaries.append(dict(zip(SUMMARY_KEYS, (float(v) for v in q))))
    return SamplingSweepResult(tuple(ns), tuple(summaries), int(trials), int(seed), float(freq_hz))


def min_sampling_rate(max_signal_freq_hz, analysis_domain="time") -> float:
    """Two samples per cycle for spectral work, ten for time-domain work."""
    if not max_signal_freq_hz > 0:
        raise NonPositiveFrequency(f"frequency must be positive, got {max_signal_freq_hz}")
    return SAMPLES_PER_CYCLE[Domain(analysis_domain)] * float(max_signal_freq_hz)
