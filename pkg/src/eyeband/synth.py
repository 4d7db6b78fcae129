"""Synthetic annotated recordings for demos and end-to-end checks."""

from __future__ import annotations

import numpy as np

from .filters import FilterSpec, design_filter, zero_phase_filter
from .signal import SaccadeEvent, TimeSeries, logistic_profile


def main_sequence_duration_ms(amplitude_deg):
    """Classic linear duration rule, 2.2 ms/deg + 21 ms."""
    return 2.2 * np.abs(amplitude_deg) + 21.0


def bandlimited_noise(n, rate_hz, rms, max_freq_hz, rng):
    """White Gaussian noise low-passed at ``max_freq_hz`` and scaled to ``rms``."""
    if rms == 0:
        return np.zeros(n)
    white = rng.standard_normal(n)
    shaped = zero_phase_filter(design_filter(FilterSpec.lowpass(max_freq_hz, rate_hz)), white)
    return shaped * (rms / np.sqrt(np.mean(shaped ** 2)))


def saccade_corpus(
    n_saccades=500,
    amplitude_range=(0.5, 25.0),
    rate_hz=1000.0,
    fixation_ms=400.0,
    duration_jitter=0.15,
    noise_rms_deg=0.005,
    noise_max_hz=150.0,
    steepness=5.0,
    seed=0,
):
    """Horizontal trace with ``n_saccades`` logistic saccades between fixations.

    Amplitudes are log-uniform over ``amplitude_range``; durations follow
    :func:`main_sequence_duration_ms` times a lognormal jitter, which gives
    the peak-velocity scatter of real data. Directions alternate toward the
    screen center so the trace stays bounded.
    """
    rng = np.random.default_rng(seed)
    lo, hi = amplitude_range
    amps = np.exp(rng.uniform(np.log(lo), np.log(hi), n_saccades))
    durs = main_sequence_duration_ms(amps) * np.exp(duration_jitter * rng.standard_normal(n_saccades))
    step_ms = 1000.0 / rate_hz
    fix_n = int(round(fixation_ms / step_ms))
    pieces, events = [], []
    pos, cursor = 0.0, 0
    for amp, dur in zip(amps, durs):
        sign = -1.0 if pos > 0 else 1.0
        n_sac = int(np.ceil(dur / step_ms))
        u = np.arange(n_sac + 1) * step_ms / dur
        traj = pos + sign * amp * logistic_profile(u, steepness)
        pieces.append(np.full(fix_n, pos))
        pieces.append(traj)
        onset = cursor + fix_n
        events.append(SaccadeEvent(onset, onset + n_sac))
        cursor = onset + n_sac + 1
        pos = float(traj[-1])
    pieces.append(np.full(fix_n, pos))
    x = np.concatenate(pieces)
    x = x + bandlimited_noise(x.shape[0], rate_hz, noise_rms_deg, noise_max_hz, rng)
    return TimeSeries(x, rate_hz), events
