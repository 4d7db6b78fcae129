"""Exit criteria, one test per criterion (8 is split in two).

Run ``pytest tests/test_acceptance.py -v``; the terminal summary lists a
PASS/FAIL line per criterion.
"""

import math
import os
from pathlib import Path

import numpy as np
import pytest

from eyeband.cli import main
from eyeband.filters import (
    DEFAULT_BANDS,
    FilterSpec,
    decompose_bands,
    decompose_many,
    design_filter,
    frequency_response,
    zero_phase_filter,
)
from eyeband.kinematics import savgol_derivative_kernel, velocity
from eyeband.report import AnalysisReport
from eyeband.sampling import sweep_sampling
from eyeband.signal import TimeSeries, gen_sine
from eyeband.statfit import fit_exponential, fit_power_law, incremental_pvaf, paired_t_test, t_cdf

from conftest import two_tone

RATE = 1000.0


def test_criterion_1_filter_correctness():
    lp25 = design_filter(FilterSpec.lowpass(25, RATE))
    assert frequency_response(lp25, 25.0) == pytest.approx(0.5, abs=1e-3)
    assert np.all(frequency_response(lp25, np.arange(0, 15.01, 0.1)) >= 0.999)
    assert frequency_response(lp25, 75.0) <= 1e-6
    for fc in range(5, 451):
        for spec in (FilterSpec.lowpass(fc, RATE), FilterSpec.highpass(fc, RATE)):
            assert np.abs(design_filter(spec).poles).max() < 1.0, spec.label
    for b in DEFAULT_BANDS:
        assert np.abs(design_filter(b.filter_spec(RATE)).poles).max() < 1.0


def test_criterion_2_zero_phase():
    lp25 = design_filter(FilterSpec.lowpass(25, RATE))
    x = gen_sine(10, 1.0, 0.4, RATE, 2000).samples
    y = zero_phase_filter(lp25, x)
    mid = slice(300, 1700)
    lags = np.arange(-25, 26)
    xc = [float(np.dot(y[mid], x[300 + k:1700 + k])) for k in lags]
    assert lags[int(np.argmax(xc))] == 0
    r = np.random.default_rng(7).standard_normal(2400)
    a = zero_phase_filter(lp25, r)
    b = zero_phase_filter(lp25, r[::-1])[::-1]
    assert np.max(np.abs(a[900:-900] - b[900:-900])) <= 1e-9


def test_criterion_3_savgol():
    np.testing.assert_allclose(savgol_derivative_kernel(7, 2, 1), np.arange(-3, 4) / 28,
                               rtol=0, atol=1e-15)
    t = np.arange(1, 1001) / RATE
    for coeffs in ((0.0, 0.0, 1.0), (2.5, -40.0, 300.0), (-1.0, 7.0, -0.5)):
        x = coeffs[0] + coeffs[1] * t + coeffs[2] * t * t
        v = velocity(TimeSeries(x, RATE)).samples[3:-3]
        d = coeffs[1] + 2 * coeffs[2] * t[3:-3]
        assert np.max(np.abs(v - d) / np.maximum(np.abs(d), 1e-300)) <= 1e-9


def test_criterion_4_pvaf():
    ts = TimeSeries(two_tone(1000), RATE)
    pv = incremental_pvaf(ts, decompose_bands(ts))
    assert pv[0] == pytest.approx(99.01, abs=0.2)
    assert pv[4] == pytest.approx(0.99, abs=0.2)
    rng = np.random.default_rng(99)
    arrays = []
    for _ in range(200):
        n = int(rng.integers(300, 700))
        t = np.arange(n) / RATE
        x = rng.normal() + rng.standard_normal(n) * rng.uniform(0, 0.2)
        for _ in range(int(rng.integers(1, 5))):
            x = x + rng.uniform(0.01, 2) * np.sin(2 * np.pi * rng.uniform(1, 200) * t
                                                  + rng.uniform(0, 2 * np.pi))
        arrays.append(x)
    for x, parts in zip(arrays, decompose_many(arrays, RATE)):
        row = np.array(incremental_pvaf(x, parts))
        assert row.sum() <= 100 + 1e-6
        assert np.all(row >= -1e-9)


def test_criterion_5_main_sequence_fits():
    amps = np.geomspace(0.5, 25, 50)
    f = fit_power_law(np.column_stack([amps, 2 * amps ** 1.5]))
    assert abs(f.coeffs[0] - 2) <= 1e-8 and abs(f.coeffs[1] - 1.5) <= 1e-8
    e = fit_exponential(np.column_stack([amps, 600 * (1 - np.exp(-amps / 8))]))
    assert abs(e.coeffs[0] / 600 - 1) <= 1e-6 and abs(e.coeffs[1] / 8 - 1) <= 1e-6
    rng = np.random.default_rng(500)
    hits = np.zeros(2)
    for _ in range(500):
        x = rng.uniform(0.5, 25, 1000)
        y = 30 * x ** 0.6 * (1 + 0.1 * rng.standard_normal(1000))
        fit = fit_power_law(np.column_stack([x, y]))
        hits += [fit.ci95[0][0] <= 30 <= fit.ci95[0][1], fit.ci95[1][0] <= 0.6 <= fit.ci95[1][1]]
    coverage = hits / 500
    print(f"coverage a={coverage[0]:.3f} b={coverage[1]:.3f}")
    assert np.all(coverage >= 0.93)


def test_criterion_6_t_test():
    import mpmath
    r = paired_t_test([1, 2, 3], [0, 0, 0])
    assert round(r.t, 4) == 3.4641 and r.df == 2
    mpmath.mp.dps = 30
    for df in (1, 2, 6, 20, 100):
        nu = mpmath.mpf(df)
        c = mpmath.gamma((nu + 1) / 2) / (mpmath.sqrt(nu * mpmath.pi) * mpmath.gamma(nu / 2))
        for t in (0.0, 1.0, 3.4641, 4.09, 10.0):
            tail = mpmath.quad(lambda u: c * (1 + u * u / nu) ** (-(nu + 1) / 2), [t, mpmath.inf])
            assert abs(float(2 * t_cdf(-t, df)) - float(2 * tail)) <= 1e-6
    assert abs(paired_t_test([1, 2, 3], [0, 0, 0]).p_two_tailed
               - float(2 * t_cdf(-r.t, 2))) <= 1e-15


def test_criterion_7_synthetic_figure8(tmp_path):
    rec, ev, out = tmp_path / "rec.csv", tmp_path / "ev.csv", tmp_path / "mainseq.json"
    assert main(["synth-corpus", str(rec), str(ev), "--n", "500", "--amin", "0.5",
                 "--amax", "25", "--noise-max-hz", "150", "--seed", "0"]) == 0
    assert main(["mainseq", str(rec), str(ev), "--out", str(out)]) == 0
    rep = AnalysisReport.from_json(out.read_text()).payload
    flags = {o.condition_label: o.flags for o in rep.overlap}
    for c in ("lowpass-75", "lowpass-100", "lowpass-125", "lowpass-150"):
        assert flags[c] == {"a": "not-distinct", "b": "not-distinct"}, (c, flags[c])
    lp25 = next(d for d in rep.differences if d["condition_label"] == "lowpass-25")
    diff = np.asarray(lp25["diff"])
    amps = np.asarray(lp25["amplitudes"])
    assert np.all(diff[amps <= 2.0] > 0)
    print("lowpass-25 crossovers:", lp25["crossovers"])


def test_criterion_8a_sampling_sweep():
    r = sweep_sampling(75, [10, 12, 15, 20, 50, 100], trials=1000, seed=0)
    assert np.all(r.column("median") >= 0.98)
    worst = sweep_sampling(75, [10], trials=20_000, seed=1).summaries[0]["min"]
    assert worst >= math.cos(math.pi / 10) - 1e-6
    for argv, want in ((["min-rate", "--freq", "75", "--domain", "time"], "750"),
                       (["min-rate", "--freq", "150", "--domain", "frequency"], "300")):
        import io
        import contextlib
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            assert main(argv) == 0
        assert buf.getvalue().strip() == want


def test_criterion_8b_iqr_strictly_increasing_as_n_drops():
    # evaluated with enough trials that the quantiles reflect the estimator's
    # actual distribution rather than seed luck
    r = sweep_sampling(75, [20, 10, 5, 3, 2], trials=200_000, seed=0)
    iqr = r.iqr
    print("IQR for N = 20, 10, 5, 3, 2:", np.round(iqr, 5))
    assert np.all(np.diff(iqr) > 0)


DATASET = os.environ.get("EYEBAND_DATASET")


@pytest.mark.skipif(not DATASET, reason="set EYEBAND_DATASET to a directory with recording.csv "
                                        "and events.csv to reproduce the published fits")
def test_criterion_9_published_dataset(tmp_path):
    root = Path(DATASET)
    out = tmp_path / "m.json"
    assert main(["mainseq", str(root / "recording.csv"), str(root / "events.csv"),
                 "--out", str(out)]) == 0
    rep = AnalysisReport.from_json(out.read_text()).payload
    power = [f for f in rep.fits if f.model.value == "power_law"]
    assert len(power) == 7
    for f in power:
        assert 0.88 <= f.adj_r2 <= 0.95
    assert rep.model_ttest.t == pytest.approx(4.09, abs=0.05) and rep.model_ttest.df == 6
