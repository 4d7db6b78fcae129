"""Hot inner loops.

Each kernel exists twice: a loop-style version compiled with numba and a
numpy version that vectorizes across rows instead. ``sosfilt_rows`` and
``sine_half_range`` dispatch on :data:`eyeband._accel.USE_NUMBA`; the
explicit ``*_numba`` / ``*_numpy`` names are kept public for testing and
benchmarking.
"""

import numpy as np

from . import _accel


def _sosfilt_loops(sos, x, zi):
    n_rows, n_t = x.shape
    n_sec = sos.shape[0]
    y = np.empty_like(x)
    z = zi.copy()
    for r in range(n_rows):
        for t in range(n_t):
            v = x[r, t]
            for s in range(n_sec):
                b0 = sos[s, 0]
                b1 = sos[s, 1]
                b2 = sos[s, 2]
                a1 = sos[s, 4]
                a2 = sos[s, 5]
                out = b0 * v + z[r, s, 0]
                z[r, s, 0] = b1 * v - a1 * out + z[r, s, 1]
                z[r, s, 1] = b2 * v - a2 * out
                v = out
            y[r, t] = v
    return y


sosfilt_numba = _accel.njit(_sosfilt_loops)


# below this many rows, per-sample numpy calls cost more than plain floats
SCALAR_ROWS = 12


def _sosfilt_scalar(sos, x, zi):
    coeffs = [(r[0], r[1], r[2], r[4], r[5]) for r in sos.tolist()]
    y = np.empty_like(x)
    for r in range(x.shape[0]):
        state = zi[r].tolist()
        out_row = []
        for v in x[r].tolist():
            for s, (b0, b1, b2, a1, a2) in enumerate(coeffs):
                z = state[s]
                out = b0 * v + z[0]
                z[0] = b1 * v - a1 * out + z[1]
                z[1] = b2 * v - a2 * out
                v = out
            out_row.append(v)
        y[r] = out_row
    return y


def sosfilt_numpy(sos, x, zi):
    """Cascade of transposed direct-form II biquads without numba.

    Vectorized across rows; small batches fall back to a float loop.
    """
    n_rows, n_t = x.shape
    if n_rows <= SCALAR_ROWS:
        return _sosfilt_scalar(sos, x, zi)
    y = np.empty_like(x)
    z0 = zi[:, :, 0].copy()
    z1 = zi[:, :, 1].copy()
    b0, b1, b2 = sos[:, 0], sos[:, 1], sos[:, 2]
    a1, a2 = sos[:, 4], sos[:, 5]
    for t in range(n_t):
        v = x[:, t]
        for s in range(sos.shape[0]):
            out = b0[s] * v + z0[:, s]
            z0[:, s] = b1[s] * v - a1[s] * out + z1[:, s]
            z1[:, s] = b2[s] * v - a2[s] * out
            v = out
        y[:, t] = v
    return y


def sosfilt_rows(sos, x, zi=None):
    """Filter every row of ``x`` through the second-order-section cascade.

    Parameters
    ----------
    sos : (n_sections, 6) array
        Rows ``b0, b1, b2, 1, a1, a2``.
    x : (n_rows, n_t) array
    zi : (n_rows, n_sections, 2) array, optional
        Initial delay-line state; zeros when omitted.
    """
    sos = np.ascontiguousarray(sos, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("x must be 2-D (rows, time)")
    if zi is None:
        zi = np.zeros((x.shape[0], sos.shape[0], 2))
    zi = np.ascontiguousarray(zi, dtype=np.float64)
    if _accel.USE_NUMBA:
        return sosfilt_numba(sos, x, zi)
    return sosfilt_numpy(sos, x, zi)


def _half_range_loops(samples_per_period, phases, n_samples):
    out = np.empty(phases.shape[0])
    step = 2.0 * np.pi / samples_per_period
    for k in range(phases.shape[0]):
        lo = np.inf
        hi = -np.inf
        for i in range(n_samples):
            v = np.sin(step * i + phases[k])
            if v < lo:
                lo = v
            if v > hi:
                hi = v
        out[k] = 0.5 * (hi - lo)
    return out


sine_half_range_numba = _accel.njit(_half_range_loops)


def sine_half_range_numpy(samples_per_period, phases, n_samples, chunk_elems=2_000_000):
    phases = np.asarray(phases, dtype=np.float64)
    out = np.empty(phases.shape[0])
    arg = (2.0 * np.pi / samples_per_period) * np.arange(n_samples)
    rows = max(1, chunk_elems // max(n_samples, 1))
    for start in range(0, phases.shape[0], rows):
        block = np.sin(arg[None, :] + phases[start:start + rows, None])
        out[start:start + rows] = 0.5 * (block.max(axis=1) - block.min(axis=1))
    return out


def sine_half_range(samples_per_period, phases, n_samples):
    """Half peak-to-peak of ``sin(2*pi*i/N + phase)`` for i < n_samples, per phase."""
    phases = np.ascontiguousarray(phases, dtype=np.float64)
    if _accel.USE_NUMBA:
        return sine_half_range_numba(float(samples_per_period), phases, int(n_samples))
    return sine_half_range_numpy(samples_per_period, phases, n_samples)
