"""Feature path: filter response, windowing, FFT convention, band peaks.

The filter oracle evaluates H(z) section by section at z = exp(j 2 pi f/fs)
directly from the designed coefficients, independently of the streaming
(time-domain) implementation. The FFT oracle is the correlation-sum DFT.
"""

import numpy as np
import pytest

from pieeg.dsp import (
    BandpassFilter,
    FilterSpec,
    SlidingWindow,
    WindowSpec,
    band_peak,
    bandpass,
    design_bandpass,
    fft_amplitude,
)
from pieeg.errors import ConfigurationError, EmptyBandError, StreamIntegrityError

RATE = 250
SPEC = FilterSpec(1.0, 30.0, order=4)


def oracle_gain(sos: np.ndarray, f_hz: float, rate: float) -> float:
    """|H| at f from the section polynomials; no scipy frequency-response call."""
    z = np.exp(2j * np.pi * f_hz / rate)
    h = 1.0 + 0j
    for b0, b1, b2, a0, a1, a2 in sos:
        h *= (b0 + b1 / z + b2 / z**2) / (a0 + a1 / z + a2 / z**2)
    return abs(h)


def measured_steady_state_gain(spec: FilterSpec, f_hz: float, rate: int) -> float:
    t = np.arange(rate * 30) / rate
    y = bandpass(np.sin(2 * np.pi * f_hz * t), spec, rate)
    tail = y[-5 * rate :]  # 5 s holds an integer number of cycles for f >= 0.2
    t_tail = t[-5 * rate :]
    # quadrature demodulation recovers the amplitude exactly for a pure tone
    return 2 * abs(np.mean(tail * np.exp(-2j * np.pi * f_hz * t_tail)))


def test_dc_is_rejected():
    y = bandpass(np.ones(5 * RATE), SPEC, RATE)
    assert np.max(np.abs(y[-RATE:])) < 1e-3


def test_midband_gain_near_unity():
    sos = design_bandpass(SPEC, RATE)
    analytic = oracle_gain(sos, 10.0, RATE)
    assert abs(analytic - 1.0) < 0.05
    measured = measured_steady_state_gain(SPEC, 10.0, RATE)
    assert measured == pytest.approx(analytic, rel=1e-3)


def test_60hz_attenuated_at_least_20db():
    sos = design_bandpass(SPEC, RATE)
    analytic = oracle_gain(sos, 60.0, RATE)
    assert analytic <= 10 ** (-20 / 20)
    measured = measured_steady_state_gain(SPEC, 60.0, RATE)
    assert measured == pytest.approx(analytic, rel=1e-2)


def test_subsonic_attenuated():
    sos = design_bandpass(SPEC, RATE)
    assert oracle_gain(sos, 0.1, RATE) <= 10 ** (-20 / 20)


def test_cutoff_above_nyquist_rejected():
    with pytest.raises(ConfigurationError):
        design_bandpass(FilterSpec(1.0, 130.0), RATE)


def test_filter_spec_validation():
    with pytest.raises(ConfigurationError):
        FilterSpec(30.0, 1.0)
    with pytest.raises(ConfigurationError):
        FilterSpec(1.0, 30.0, order=3)
    with pytest.raises(ConfigurationError):
        FilterSpec(1.0, 30.0, design="chebyshev")


def test_streaming_is_chunk_invariant():
    rng = np.random.default_rng(20)
    x = rng.normal(size=4000)
    whole = bandpass(x, SPEC, RATE)
    filt = BandpassFilter(SPEC, RATE)
    parts = np.concatenate([filt.process(piece) for piece in np.array_split(x, 13)])
    np.testing.assert_array_equal(whole, parts)


def test_impulse_response_decays_below_1e9_within_30s():
    x = np.zeros(30 * RATE)
    x[0] = 1.0
    y = bandpass(x, SPEC, RATE)
    assert abs(y[-1]) < 1e-9
    assert np.max(np.abs(y[-RATE:])) < 1e-9


def test_window_emission_counts():
    spec = WindowSpec(length_samples=256, hop_samples=64)
    win = SlidingWindow(spec)
    t = np.arange(1000, dtype=np.int64) * 4_000_000

    first = win.push(t[:256], np.arange(256.0))
    assert len(first) == 1
    t_end, data = first[0]
    assert t_end == int(t[255])
    assert len(data) == 256

    second = win.push(t[256:320], np.arange(256.0, 320.0))
    assert len(second) == 1
    # 192 samples shared with the first window
    np.testing.assert_array_equal(second[0][1][:192], np.arange(64.0, 256.0))

    assert win.push(t[320:383], np.zeros(63)) == []


def test_window_chunk_invariance():
    spec = WindowSpec(length_samples=50, hop_samples=13)
    t = np.arange(500, dtype=np.int64)
    x = np.random.default_rng(21).normal(size=500)

    w1 = SlidingWindow(spec)
    all_at_once = w1.push(t, x)
    w2 = SlidingWindow(spec)
    dribbled = []
    for i in range(0, 500, 7):
        dribbled.extend(w2.push(t[i : i + 7], x[i : i + 7]))
    assert len(all_at_once) == len(dribbled) == (500 - 50) // 13 + 1
    for (ta, wa), (tb, wb) in zip(all_at_once, dribbled):
        assert ta == tb
        np.testing.assert_array_equal(wa, wb)


def test_window_rejects_non_monotone_timestamps():
    win = SlidingWindow(WindowSpec(length_samples=8, hop_samples=4))
    win.push(np.arange(4, dtype=np.int64), np.zeros(4))
    with pytest.raises(StreamIntegrityError):
        win.push(np.arange(4, dtype=np.int64), np.zeros(4))  # restarts at 0
    fresh = SlidingWindow(WindowSpec(length_samples=8, hop_samples=4))
    with pytest.raises(StreamIntegrityError):
        fresh.push(np.array([5, 4, 6], dtype=np.int64), np.zeros(3))


def _dft_oracle_amplitude(x: np.ndarray, k: int) -> float:
    n = len(x)
    coeff = np.sum(x * np.exp(-2j * np.pi * k * np.arange(n) / n))
    scale = n if k in (0, n // 2) and n % 2 == 0 or k == 0 else n / 2
    return abs(coeff) / scale


def test_fft_zero_window():
    frame = fft_amplitude(np.zeros(250), rate=RATE)
    assert frame.amplitudes_uv.shape == (126,)
    assert not np.any(frame.amplitudes_uv)
    assert frame.bin_hz == 1.0


def test_fft_exact_bin_tone_convention():
    t = np.arange(250) / RATE
    x = 100.0 * np.sin(2 * np.pi * 5.0 * t)
    frame = fft_amplitude(x, rate=RATE)
    assert frame.amplitudes_uv[5] == pytest.approx(100.0, rel=1e-3)
    others = np.delete(frame.amplitudes_uv, 5)
    assert np.max(others) < 1.0
    # correlation-sum DFT agrees
    assert frame.amplitudes_uv[5] == pytest.approx(_dft_oracle_amplitude(x, 5), rel=1e-9)


def test_fft_dc_not_doubled():
    frame = fft_amplitude(np.full(250, 7.0), rate=RATE)
    assert frame.amplitudes_uv[0] == pytest.approx(7.0, rel=1e-9)


def test_fft_nyquist_not_doubled():
    x = 3.0 * np.cos(np.pi * np.arange(256))  # alternating +3/-3
    frame = fft_amplitude(x, rate=256)
    assert frame.amplitudes_uv[-1] == pytest.approx(3.0, rel=1e-9)


def test_fft_hann_taper_amplitude_corrected():
    t = np.arange(250) / RATE
    x = 100.0 * np.sin(2 * np.pi * 5.0 * t)
    frame = fft_amplitude(x, taper="hann", rate=RATE)
    assert frame.amplitudes_uv[5] == pytest.approx(100.0, rel=1e-6)


def test_fft_linearity():
    rng = np.random.default_rng(22)
    x = rng.normal(size=300)
    a = fft_amplitude(x, rate=RATE).amplitudes_uv
    b = fft_amplitude(2.5 * x, rate=RATE).amplitudes_uv
    np.testing.assert_allclose(b, 2.5 * a, rtol=1e-9)


def test_parseval_identity():
    rng = np.random.default_rng(23)
    for _ in range(5):
        n = 250
        x = rng.normal(size=n)
        amps = fft_amplitude(x, rate=RATE).amplitudes_uv
        # invert the single-sided convention back to spectral energy:
        # |X0| = n*a0, |Xnyq| = n*anyq, |Xk| = n*ak/2 elsewhere
        energy = n * amps[0] ** 2 + (n / 2) * np.sum(amps[1:-1] ** 2) + n * amps[-1] ** 2
        assert energy == pytest.approx(np.sum(x**2), rel=1e-6)


def test_band_peak_zero_spectrum_reports_lowest_bin():
    frame = fft_amplitude(np.zeros(250), rate=RATE)
    peak_hz, peak_uv = band_peak(frame, 3.0, 7.0)
    assert (peak_hz, peak_uv) == (3.0, 0.0)


def test_band_peak_finds_tone():
    t = np.arange(250) / RATE
    frame = fft_amplitude(100.0 * np.sin(2 * np.pi * 5.0 * t), rate=RATE)
    peak_hz, peak_uv = band_peak(frame, 3.0, 7.0)
    assert peak_hz == 5.0
    assert peak_uv == pytest.approx(100.0, rel=1e-3)
    # out-of-band leakage is tiny for an exact-bin tone
    _, low_peak = band_peak(frame, 1.0, 3.0)
    assert low_peak < 1.0


def test_band_peak_endpoints_inclusive():
    t = np.arange(250) / RATE
    frame = fft_amplitude(50.0 * np.sin(2 * np.pi * 3.0 * t), rate=RATE)
    peak_hz, peak_uv = band_peak(frame, 3.0, 7.0)
    assert peak_hz == 3.0
    assert peak_uv == pytest.approx(50.0, rel=1e-3)
    frame7 = fft_amplitude(50.0 * np.sin(2 * np.pi * 7.0 * t), rate=RATE)
    assert band_peak(frame7, 3.0, 7.0)[0] == 7.0


def test_band_peak_tie_breaks_low():
    frame = fft_amplitude(np.zeros(250), rate=RATE)
    amps = frame.amplitudes_uv.copy()
    amps[4] = amps[6] = 5.0
    tied = type(frame)(t_end_ns=0, bin_hz=frame.bin_hz, amplitudes_uv=amps)
    assert band_peak(tied, 3.0, 7.0)[0] == 4.0


def test_band_peak_monotone_under_band_inclusion():
    rng = np.random.default_rng(24)
    for _ in range(20):
        frame = fft_amplitude(rng.normal(size=250), rate=RATE)
        full = band_peak(frame, 0.0, RATE / 2)[1]
        a = rng.uniform(0, 100)
        b = a + rng.uniform(1, 20)
        try:
            sub = band_peak(frame, a, min(b, RATE / 2))[1]
        except EmptyBandError:
            continue
        assert full >= sub


def test_band_peak_empty_band():
    frame = fft_amplitude(np.zeros(250), rate=RATE)
    with pytest.raises(EmptyBandError):
        band_peak(frame, 3.2, 3.8)


def test_low_frequency_tone_barely_leaks_into_blink_band():
    # end-to-end shape: a 0.3 Hz tone (drift-like) must not register in
    # 3-7 Hz compared with a same-amplitude 5 Hz tone
    t = np.arange(30 * RATE) / RATE
    spec = WindowSpec(length_samples=RATE, hop_samples=RATE)

    def in_band_peak(f_hz: float) -> float:
        y = bandpass(100.0 * np.sin(2 * np.pi * f_hz * t), SPEC, RATE)
        peaks = []
        win = SlidingWindow(spec)
        emitted = win.push(np.arange(len(y), dtype=np.int64), y)
        for _, data in emitted[20:]:  # steady state only
            frame = fft_amplitude(data, rate=RATE)
            peaks.append(band_peak(frame, 3.0, 7.0)[1])
        return max(peaks)

    assert in_band_peak(0.3) < 0.05 * in_band_peak(5.0)
