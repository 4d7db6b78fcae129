"""Compare the numba kernels with the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Also times the ``mainseq`` pipeline end to end under each backend.
"""

import argparse
from time import perf_counter

import numpy as np

from eyeband import _accel, kernels
from eyeband.filters import FilterSpec, design_filter


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = perf_counter()
        fn()
        times.append(perf_counter() - t0)
    return min(times)


def row(name, t_numba, t_numpy):
    print(f"{name:42s} numba {t_numba * 1e3:9.2f} ms   numpy {t_numpy * 1e3:9.2f} ms   "
          f"x{t_numpy / t_numba:7.1f}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    sos = design_filter(FilterSpec.bandpass(26, 50, 1000.0)).sos

    for rows, n in ((1, 100_000), (64, 500), (512, 500)):
        x = rng.standard_normal((rows, n))
        zi = np.zeros((rows, sos.shape[0], 2))
        kernels.sosfilt_numba(sos, x, zi)  # compile outside the timing
        row(f"sosfilt {rows} x {n}",
            best_of(lambda: kernels.sosfilt_numba(sos, x, zi), args.repeat),
            best_of(lambda: kernels.sosfilt_numpy(sos, x, zi), args.repeat))

    phases = rng.uniform(0, 2 * np.pi, 1000)
    for n_per in (10.0, 1000.0):
        n = int(100 * n_per)
        kernels.sine_half_range_numba(n_per, phases, n)
        row(f"sine half-range 1000 trials, N={n_per:g}",
            best_of(lambda: kernels.sine_half_range_numba(n_per, phases, n), args.repeat),
            best_of(lambda: kernels.sine_half_range_numpy(n_per, phases, n), args.repeat))

    from eyeband.pipeline import mainseq_analysis
    from eyeband.synth import saccade_corpus
    ts, events = saccade_corpus(n_saccades=200, seed=1)
    timings = {}
    for flag in (True, False):
        _accel.USE_NUMBA = flag
        mainseq_analysis(ts, events[:5])
        timings[flag] = best_of(lambda: mainseq_analysis(ts, events), max(1, args.repeat // 2))
    _accel.USE_NUMBA = _accel.HAVE_NUMBA
    row("mainseq pipeline, 200 saccades x 7 conditions", timings[True], timings[False])


if __name__ == "__main__":
    main()
