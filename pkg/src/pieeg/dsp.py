"""Streaming feature path: bandpass filter, sliding windows, amplitude spectra.

The analysis trace is a single channel in microvolts. It runs through a
causal Butterworth bandpass (second-order sections with carried state, so
results do not depend on chunk boundaries), then a sliding window, then a
single-sided amplitude FFT.

Amplitude convention: a pure sinusoid of peak amplitude A uV at an exact bin
frequency yields A uV in that bin (taper coherent gain corrected; the DC and
Nyquist bins are not doubled). ``order`` in FilterSpec is the Butterworth
design order applied at each band edge, giving ``order`` second-order
sections for a bandpass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sp_signal

from .errors import ConfigurationError, EmptyBandError, StreamIntegrityError

TAPERS = ("rectangular", "hann")


@dataclass(frozen=True)
class FilterSpec:
    low_hz: float = 1.0
    high_hz: float = 30.0
    order: int = 4
    design: str = "butterworth"

    def __post_init__(self) -> None:
        if self.design != "butterworth":
            raise ConfigurationError(f"unsupported filter design {self.design!r}")
        if not (0 < self.low_hz < self.high_hz):
            raise ConfigurationError(
                f"need 0 < low_hz < high_hz, got {self.low_hz}..{self.high_hz}"
            )
        if self.order < 2 or self.order % 2 != 0:
            raise ConfigurationError(f"order must be even and >= 2, got {self.order}")

    def validate_for_rate(self, rate: int) -> None:
        if self.high_hz >= rate / 2:
            raise ConfigurationError(
                f"high_hz {self.high_hz} must be below Nyquist {rate / 2}"
            )


@dataclass(frozen=True)
class WindowSpec:
    length_samples: int
    hop_samples: int
    taper: str = "rectangular"

    def __post_init__(self) -> None:
        if self.length_samples < 2:
            raise ConfigurationError(
                f"length_samples must be >= 2, got {self.length_samples}"
            )
        if not (1 <= self.hop_samples <= self.length_samples):
            raise ConfigurationError(
                f"hop_samples must be in [1, length], got {self.hop_samples}"
            )
        if self.taper not in TAPERS:
            raise ConfigurationError(f"taper must be one of {TAPERS}, got {self.taper!r}")

    @classmethod
    def seconds(cls, rate: int, length_s: float = 1.0, hop_s: float = 0.25,
                taper: str = "rectangular") -> "WindowSpec":
        """Window sized in seconds at a given sample rate (defaults 1 s / 0.25 s)."""
        return cls(
            length_samples=int(round(length_s * rate)),
            hop_samples=int(round(hop_s * rate)),
            taper=taper,
        )


@dataclass(frozen=True)
class SpectrumFrame:
    """Single-sided amplitude spectrum of one analysis window, in microvolts."""

    t_end_ns: int
    bin_hz: float
    amplitudes_uv: np.ndarray

    @property
    def frequencies_hz(self) -> np.ndarray:
        return np.arange(len(self.amplitudes_uv)) * self.bin_hz


def design_bandpass(spec: FilterSpec, rate: int) -> np.ndarray:
    """Butterworth bandpass as second-order sections for the given rate."""
    spec.validate_for_rate(rate)
    return sp_signal.butter(
        spec.order,
        [spec.low_hz, spec.high_hz],
        btype="bandpass",
        output="sos",
        fs=rate,
    )


class BandpassFilter:
    """Causal streaming bandpass; state carries across process() calls."""

    def __init__(self, spec: FilterSpec, rate: int):
        self.spec = spec
        self.rate = rate
        self._sos = design_bandpass(spec, rate)
        self._zi = np.zeros((self._sos.shape[0], 2))

    def process(self, samples: np.ndarray) -> np.ndarray:
        if len(samples) == 0:
            return np.asarray(samples, dtype=np.float64)
        out, self._zi = sp_signal.sosfilt(self._sos, samples, zi=self._zi)
        return out

    def reset(self) -> None:
        self._zi = np.zeros((self._sos.shape[0], 2))


def bandpass(samples: np.ndarray, spec: FilterSpec, rate: int) -> np.ndarray:
    """One-shot causal filtering of a whole array (fresh state)."""
    return BandpassFilter(spec, rate).process(np.asarray(samples, dtype=np.float64))


class SlidingWindow:
    """Chunk-fed sliding window: emits one window every hop once primed.

    Windows end at absolute sample indices length-1, length-1+hop, ... so the
    schedule is independent of how the stream was chunked and no sample is
    ever dropped.
    """

    def __init__(self, spec: WindowSpec):
        self.spec = spec
        self._buf = np.empty(0)
        self._t = np.empty(0, dtype=np.int64)
        self._last_t: int | None = None

    def push(self, t_ns: np.ndarray, samples: np.ndarray) -> list[tuple[int, np.ndarray]]:
        """Feed a chunk; returns [(t_end_ns, window array), ...] emitted now."""
        t_ns = np.asarray(t_ns, dtype=np.int64)
        samples = np.asarray(samples, dtype=np.float64)
        if len(t_ns) != len(samples):
            raise ConfigurationError("timestamp and sample counts differ")
        if len(t_ns) == 0:
            return []
        if len(t_ns) > 1 and np.any(np.diff(t_ns) <= 0):
            raise StreamIntegrityError("chunk timestamps are not strictly increasing")
        if self._last_t is not None and int(t_ns[0]) <= self._last_t:
            raise StreamIntegrityError(
                f"timestamp {int(t_ns[0])} does not advance past {self._last_t}"
            )
        self._last_t = int(t_ns[-1])

        self._buf = np.concatenate([self._buf, samples])
        self._t = np.concatenate([self._t, t_ns])

        length, hop = self.spec.length_samples, self.spec.hop_samples
        out = []
        while len(self._buf) >= length:
            out.append((int(self._t[length - 1]), self._buf[:length].copy()))
            self._buf = self._buf[hop:]
            self._t = self._t[hop:]
        return out


def _taper_window(taper: str, n: int) -> np.ndarray:
    if taper == "rectangular":
        return np.ones(n)
    # periodic Hann: amplitude-exact at exact-bin frequencies
    return 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(n) / n)


def fft_amplitude(
    window_uv: np.ndarray,
    taper: str = "rectangular",
    rate: int = 250,
    t_end_ns: int = 0,
) -> SpectrumFrame:
    """Single-sided amplitude spectrum with the A-uV-tone -> A-uV-bin convention."""
    x = np.asarray(window_uv, dtype=np.float64)
    n = len(x)
    if taper not in TAPERS:
        raise ConfigurationError(f"taper must be one of {TAPERS}, got {taper!r}")
    w = _taper_window(taper, n)
    spectrum = np.fft.rfft(x * w)
    scale = float(np.sum(w))
    amps = np.abs(spectrum) * (2.0 / scale)
    amps[0] /= 2.0
    if n % 2 == 0:
        amps[-1] /= 2.0
    return SpectrumFrame(t_end_ns=t_end_ns, bin_hz=rate / n, amplitudes_uv=amps)


def band_peak(spectrum: SpectrumFrame, low_hz: float, high_hz: float) -> tuple[float, float]:
    """Maximum amplitude over bins whose center lies in [low_hz, high_hz].

    Both endpoints are inclusive; ties break toward the lower frequency.
    Returns (peak_hz, peak_uv).
    """
    if not (0 <= low_hz < high_hz):
        raise ConfigurationError(f"need 0 <= low < high, got {low_hz}..{high_hz}")
    bin_hz = spectrum.bin_hz
    eps = bin_hz * 1e-9
    lo = max(0, int(np.ceil((low_hz - eps) / bin_hz)))
    hi = min(len(spectrum.amplitudes_uv) - 1, int(np.floor((high_hz + eps) / bin_hz)))
    if lo > hi:
        raise EmptyBandError(
            f"band [{low_hz}, {high_hz}] Hz contains no bin centers at "
            f"{bin_hz} Hz resolution"
        )
    seg = spectrum.amplitudes_uv[lo : hi + 1]
    j = int(np.argmax(seg))  # first maximum = lowest frequency on ties
    return (lo + j) * bin_hz, float(seg[j])
