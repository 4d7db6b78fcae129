import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eyeband.errors import (
    DegenerateEvent,
    EmptyInput,
    NonUniformSampling,
    OffsetBeforeOnset,
    OutOfBounds,
    SpecDoesNotFit,
)
from eyeband.signal import (
    SaccadeEvent,
    SyntheticSaccadeSpec,
    TimeSeries,
    extract_window,
    gen_sine,
    gen_synthetic_saccade,
    logistic_profile,
    validate_series,
)


def test_validate_uniform():
    ts = validate_series([(float(i), 0.1 * i) for i in range(1000)], 1000.0)
    assert len(ts) == 1000
    assert ts.valid_mask.all()
    assert ts.start_time_ms == 0.0


def test_validate_missing_value_masked():
    raw = [(0.0, 1.0), (1.0, None), (2.0, 3.0), (3.0, float("nan"))]
    ts = validate_series(raw, 1000.0)
    assert ts.valid_mask.tolist() == [True, False, True, False]
    assert not ts.is_contiguous


def test_validate_alternating_spacing_rejected():
    t = np.cumsum([0] + [1 if i % 2 else 2 for i in range(20)])
    with pytest.raises(NonUniformSampling):
        validate_series([(float(v), 0.0) for v in t], 1000.0, tolerance=0.01)


def test_validate_errors():
    with pytest.raises(EmptyInput):
        validate_series([(0.0, 1.0)], 1000.0)
    with pytest.raises(NonUniformSampling):
        validate_series([(0.0, 1.0), (0.0, 2.0)], 1000.0)


def test_series_is_immutable():
    ts = TimeSeries([1.0, 2.0], 10.0)
    with pytest.raises(ValueError):
        ts.samples[0] = 5.0


def test_time_of_sample():
    ts = TimeSeries(np.zeros(5), 250.0, start_time_ms=10.0)
    np.testing.assert_allclose(ts.times_ms, [10, 14, 18, 22, 26])


def test_extract_window_identity_and_shift():
    ts = TimeSeries(np.arange(10.0), 100.0, start_time_ms=5.0)
    assert extract_window(ts, 0, 9) == ts
    w = extract_window(ts, 2, 5)
    assert len(w) == 4
    assert w.samples.tolist() == [2, 3, 4, 5]
    assert w.start_time_ms == pytest.approx(5.0 + 1000 * 2 / 100)
    assert w.rate_hz == 100.0
    with pytest.raises(OutOfBounds):
        extract_window(ts, 0, 10)
    with pytest.raises(OutOfBounds):
        extract_window(ts, 4, 3)


@given(st.integers(1, 60), st.data())
def test_extract_window_composes(n, data):
    ts = TimeSeries(np.arange(float(n)), 1000.0, start_time_ms=3.0)
    a = data.draw(st.integers(0, n - 1))
    b = data.draw(st.integers(a, n - 1))
    c = data.draw(st.integers(0, b - a))
    d = data.draw(st.integers(c, b - a))
    twice = extract_window(extract_window(ts, a, b), c, d)
    once = extract_window(ts, a + c, a + d)
    np.testing.assert_array_equal(twice.samples, once.samples)
    assert twice.start_time_ms == pytest.approx(once.start_time_ms, abs=1e-9)


def test_gen_sine_examples():
    np.testing.assert_allclose(gen_sine(0, 1, np.pi / 2, 1000, 50).samples, 1.0)
    s = gen_sine(75, 1, 0.0, 750, 31).samples
    # 10 samples per period: sample i and i+10 coincide
    np.testing.assert_allclose(s[10:30], s[0:20], atol=1e-12)
    assert not np.allclose(s[5:15], s[0:10])
    x = gen_sine(37.3, 1, 1.1, 1000, 5000).samples
    assert np.all(np.abs(x) <= 1.0)


def test_gen_sine_rms():
    x = gen_sine(math.sqrt(2) * 10, 2.5, 0.4, 1000 * math.pi, 100_000).samples
    rms = np.sqrt(np.mean(x ** 2))
    assert abs(rms / (2.5 / math.sqrt(2)) - 1) < 1e-3


def test_event_validation():
    with pytest.raises(DegenerateEvent):
        SaccadeEvent(5, 5)
    with pytest.raises(OffsetBeforeOnset):
        SaccadeEvent(5, 4)
    with pytest.raises(OutOfBounds):
        SaccadeEvent(-1, 4)
    assert SaccadeEvent(1, 2, "microsaccade").label.value == "microsaccade"


def test_synthetic_zero_amplitude():
    s = gen_synthetic_saccade(SyntheticSaccadeSpec(0.0, 40, 100, 2.0), 1000, 300)
    np.testing.assert_array_equal(s.series.samples, 2.0)
    assert s.peak_velocity_dps == 0.0


@pytest.mark.parametrize("amp", [10.0, -5.0, 0.7])
def test_synthetic_plateaus_and_amplitude(amp):
    spec = SyntheticSaccadeSpec(amp, 50, 300, 1.5)
    s = gen_synthetic_saccade(spec, 1000, 800)
    x = s.series.samples
    on, off = s.event.onset_index, s.event.offset_index
    np.testing.assert_array_equal(x[:on + 1], 1.5)
    np.testing.assert_allclose(x[off:], 1.5 + amp, rtol=0, atol=1e-12)
    assert abs((x[off] - x[on]) - amp) <= 1e-6 * abs(amp)
    d = np.diff(x[on:off + 1])
    assert np.all(d * np.sign(amp) > 0)


def test_synthetic_peak_velocity_matches_dense_derivative():
    # oracle: central differences of the profile on a 1 us grid
    amp, dur = 10.0, 50.0
    s = gen_synthetic_saccade(SyntheticSaccadeSpec(amp, dur, 300), 1000, 800)
    u = np.linspace(0, 1, 50_001)
    pos = amp * logistic_profile(u, 5.0)
    dt = dur / 1000.0 / 50_000
    vel = np.gradient(pos, dt)
    assert s.peak_velocity_dps == pytest.approx(vel.max(), rel=1e-6)


def test_synthetic_does_not_fit():
    with pytest.raises(SpecDoesNotFit):
        gen_synthetic_saccade(SyntheticSaccadeSpec(5, 50, 480), 1000, 500)
    with pytest.raises(SpecDoesNotFit):
        gen_synthetic_saccade(SyntheticSaccadeSpec(5, 0, 10), 1000, 500)
