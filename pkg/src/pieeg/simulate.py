"""Deterministic synthetic EEG: background noise plus scripted blink artifacts.

Stands in for the scalp and acquisition hardware during desk testing. Output
is bit-reproducible: the same arguments (seed included) always produce the
same frame stream, and every scripted blink is reported on a ground-truth
label track carried out-of-band.

Blink artifacts are raised-cosine pulses. The pulse center is snapped to the
nearest sample instant so the scripted peak amplitude lands exactly on one
sample; without snapping a 0.3 s pulse at 250 SPS can miss its peak by ~2 LSB.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import ConfigurationError
from .frames import DeviceConfig, RawChunk, encode_frames, volts_to_raw

MAX_BLINK_RATE_HZ = 8.0
_PINK_OCTAVES = 16


@dataclass(frozen=True)
class BlinkEvent:
    onset_s: float
    duration_s: float
    amplitude_uv: float

    def __post_init__(self) -> None:
        if self.onset_s < 0:
            raise ConfigurationError(f"onset_s must be >= 0, got {self.onset_s}")
        if not (self.duration_s > 0):
            raise ConfigurationError(f"duration_s must be > 0, got {self.duration_s}")
        if self.amplitude_uv < 0:
            raise ConfigurationError(
                f"amplitude_uv must be >= 0, got {self.amplitude_uv}"
            )


@dataclass(frozen=True)
class BlinkScript:
    """Scripted blink events plus per-channel artifact gains.

    The artifact appears on all channels, scaled by ``channel_gains``.
    """

    events: tuple[BlinkEvent, ...] = ()
    channel_gains: tuple[float, ...] = (1.0,) * 8

    def __post_init__(self) -> None:
        onsets = [e.onset_s for e in self.events]
        if any(b <= a for a, b in zip(onsets, onsets[1:])):
            raise ConfigurationError("event onsets must be strictly increasing")
        if len(self.channel_gains) != 8:
            raise ConfigurationError("channel_gains must have 8 entries")
        if any(g < 0 for g in self.channel_gains):
            raise ConfigurationError("channel_gains must all be >= 0")


@dataclass(frozen=True)
class NoiseModel:
    """Background model: white + pink floor, optional mains tone, RNG seed."""

    white_rms_uv: float = 0.8
    pink_rms_uv: float = 2.0
    mains_hz: float = 0.0
    mains_amplitude_uv: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("white_rms_uv", "pink_rms_uv", "mains_amplitude_uv"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0")
        if self.mains_hz not in (0, 50, 60):
            raise ConfigurationError(
                f"mains_hz must be 0 (off), 50 or 60, got {self.mains_hz}"
            )


@dataclass(frozen=True)
class BlinkLabel:
    """Ground truth for one scripted blink (scripted onset, not snapped)."""

    onset_s: float
    onset_sample: int
    onset_ns: int
    duration_s: float
    amplitude_uv: float


class Simulation:
    """A fully generated run: quantized frames plus the label track.

    Owned by a single consumer; iterate ``chunks()`` to pull frames.
    """

    def __init__(
        self,
        device: DeviceConfig,
        codes: np.ndarray,
        labels: tuple[BlinkLabel, ...],
    ):
        self.device = device
        self._codes = codes
        self.labels = labels
        n = len(codes)
        self._t_ns = np.arange(n, dtype=np.int64) * device.sample_period_ns
        self._status = np.zeros(n, dtype=np.uint32)

    @property
    def n_samples(self) -> int:
        return len(self._codes)

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.device.sample_rate_sps

    def chunks(self, chunk_samples: int = 4096) -> Iterator[RawChunk]:
        for start in range(0, self.n_samples, chunk_samples):
            end = min(start + chunk_samples, self.n_samples)
            yield RawChunk(
                t_ns=self._t_ns[start:end],
                status=self._status[start:end],
                codes=self._codes[start:end],
            )

    def frame_bytes(self) -> bytes:
        """The whole run in 27-byte wire form (for byte-level comparisons)."""
        return encode_frames(self._status, self._codes)


def _pink_noise_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    """Many-octave summation pink noise, normalized to unit RMS."""
    octaves = min(_PINK_OCTAVES, max(1, int(np.ceil(np.log2(max(n, 2))))))
    total = np.zeros(n)
    for m in range(octaves):
        step = 1 << m
        vals = rng.normal(0.0, 1.0, (n + step - 1) // step)
        total += np.repeat(vals, step)[:n]
    rms = float(np.sqrt(np.mean(total * total)))
    if rms > 0:
        total /= rms
    return total


def _blink_track(
    script: BlinkScript, n: int, rate: int
) -> tuple[np.ndarray, tuple[BlinkLabel, ...]]:
    track = np.zeros(n)
    labels = []
    period_ns = 1_000_000_000 // rate
    for ev in script.events:
        center = int(round((ev.onset_s + ev.duration_s / 2) * rate))
        half = max(1, int(round(ev.duration_s * rate / 2)))
        idx = np.arange(max(0, center - half), min(n, center + half + 1))
        track[idx] += ev.amplitude_uv * 0.5 * (1 + np.cos(np.pi * (idx - center) / half))
        onset_sample = int(round(ev.onset_s * rate))
        labels.append(
            BlinkLabel(
                onset_s=ev.onset_s,
                onset_sample=onset_sample,
                onset_ns=onset_sample * period_ns,
                duration_s=ev.duration_s,
                amplitude_uv=ev.amplitude_uv,
            )
        )
    return track, tuple(labels)


def generate(
    duration_s: float,
    device: DeviceConfig,
    script: BlinkScript,
    noise: NoiseModel,
) -> Simulation:
    """Generate ``duration_s * sample_rate`` frames of noise plus blinks.

    The signal is built in microvolts, scaled per channel, then quantized
    through the code grid of ``device``. A pure function of its arguments.
    """
    if not (duration_s > 0):
        raise ConfigurationError(f"duration_s must be > 0, got {duration_s}")
    rate = device.sample_rate_sps
    n = int(round(duration_s * rate))

    late = [ev.onset_s for ev in script.events if ev.onset_s + ev.duration_s > duration_s]
    if late:
        raise ConfigurationError(
            f"script events extend beyond duration {duration_s} s: onsets {late}"
        )

    track, labels = _blink_track(script, n, rate)
    uv = track[:, None] * np.asarray(script.channel_gains)[None, :]

    if noise.white_rms_uv > 0 or noise.pink_rms_uv > 0 or noise.mains_amplitude_uv > 0:
        rng = np.random.default_rng(noise.seed)
        if noise.white_rms_uv > 0:
            uv = uv + rng.normal(0.0, noise.white_rms_uv, (n, 8))
        if noise.pink_rms_uv > 0:
            for ch in range(8):
                uv[:, ch] += noise.pink_rms_uv * _pink_noise_unit(rng, n)
        if noise.mains_amplitude_uv > 0 and noise.mains_hz > 0:
            t = np.arange(n) / rate
            uv += (noise.mains_amplitude_uv * np.sin(2 * np.pi * noise.mains_hz * t))[
                :, None
            ]

    codes = volts_to_raw(uv * 1e-6, device)
    return Simulation(device=device, codes=codes, labels=labels)


def blink_rate_script(
    rate_hz: float,
    count: int,
    start_s: float = 0.0,
    amplitude_uv: float = 100.0,
) -> BlinkScript:
    """Deliberate blinking at a fixed rate: ``count`` events spaced 1/rate.

    Event duration is min(0.3 s, 0.8/rate) so pulses never collide. Rates
    above 8 Hz are rejected as physically implausible.
    """
    if not (rate_hz > 0):
        raise ConfigurationError(f"rate_hz must be > 0, got {rate_hz}")
    if count < 1:
        raise ConfigurationError(f"count must be >= 1, got {count}")
    if rate_hz > MAX_BLINK_RATE_HZ:
        raise ConfigurationError(
            f"blink rate {rate_hz} Hz is physically implausible (max {MAX_BLINK_RATE_HZ})"
        )
    duration = min(0.3, 0.8 / rate_hz)
    events = tuple(
        BlinkEvent(onset_s=start_s + k / rate_hz, duration_s=duration, amplitude_uv=amplitude_uv)
        for k in range(count)
    )
    return BlinkScript(events=events)


def save_script(script: BlinkScript, path: str | Path) -> None:
    """Write a script as ``onset_s,duration_s,amplitude_uv`` lines."""
    lines = ["# onset_s,duration_s,amplitude_uv"]
    for ev in script.events:
        lines.append(f"{ev.onset_s!r},{ev.duration_s!r},{ev.amplitude_uv!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_script(path: str | Path) -> BlinkScript:
    """Read a script file; '#' starts a comment, blank lines are skipped."""
    events = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split(",")
        if len(parts) != 3:
            raise ConfigurationError(
                f"{path}:{lineno}: expected onset_s,duration_s,amplitude_uv"
            )
        try:
            onset, duration, amplitude = (float(p) for p in parts)
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{lineno}: {exc}") from exc
        events.append(BlinkEvent(onset, duration, amplitude))
    return BlinkScript(events=tuple(events))


def save_labels(labels: tuple[BlinkLabel, ...], path: str | Path) -> None:
    """Export a label track in the same text format as scripts."""
    lines = ["# onset_s,duration_s,amplitude_uv"]
    for lab in labels:
        lines.append(f"{lab.onset_s!r},{lab.duration_s!r},{lab.amplitude_uv!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_labels(path: str | Path, rate: int) -> tuple[BlinkLabel, ...]:
    """Read a label track written by save_labels (or any script file)."""
    script = load_script(path)
    period_ns = 1_000_000_000 // rate
    labels = []
    for ev in script.events:
        onset_sample = int(round(ev.onset_s * rate))
        labels.append(
            BlinkLabel(
                onset_s=ev.onset_s,
                onset_sample=onset_sample,
                onset_ns=onset_sample * period_ns,
                duration_s=ev.duration_s,
                amplitude_uv=ev.amplitude_uv,
            )
        )
    return tuple(labels)
