"""Canonical desk-test configurations shared by the test suite and demos.

The "standard" profile is the reference detection scenario: 250 SPS at gain
24, ten 100 uV / 0.3 s blinks at 1 Hz starting at 3 s, over the default
noise floor, in a 16 s run. The "demo" profile used by the live scope makes
the blinks large enough (750 uV) that band peaks sit around 130 uV, so an
operator dragging the threshold to ~100 uV sees events fire.
"""

from __future__ import annotations

from .detect import DetectorConfig
from .frames import DeviceConfig
from .session import SessionConfig, SourceConfig
from .simulate import BlinkScript, NoiseModel, blink_rate_script

STANDARD_DURATION_S = 16.0
STANDARD_BLINKS = 10
STANDARD_BLINK_AMPLITUDE_UV = 100.0
STANDARD_BLINK_START_S = 3.0
DEMO_BLINK_AMPLITUDE_UV = 750.0

# Below the 1 s blink spacing by one hop: with the 0.25 s hop grid a
# refractory of a full second quantizes the minimum inter-event time up to
# 1.24 s, which cannot follow a 1 Hz command stream. The library default
# stays 1.0 s; the reference scenario overrides it.
STANDARD_REFRACTORY_S = 0.75


def standard_device(rate: int = 250, gain: int = 24) -> DeviceConfig:
    return DeviceConfig(
        sample_rate_sps=rate,
        gain=gain,
        metadata={
            "electrode": "Fz",
            "cmrr_db": "120",
            "internal_noise_uv": "0.4",
            "external_noise_uv": "0.8",
            "snr_db": "130",
        },
    )


def standard_script(amplitude_uv: float = STANDARD_BLINK_AMPLITUDE_UV) -> BlinkScript:
    return blink_rate_script(
        rate_hz=1.0,
        count=STANDARD_BLINKS,
        start_s=STANDARD_BLINK_START_S,
        amplitude_uv=amplitude_uv,
    )


def standard_noise(seed: int = 0) -> NoiseModel:
    return NoiseModel(white_rms_uv=0.8, pink_rms_uv=2.0, seed=seed)


def standard_detectors(
    threshold_a_uv: float | None = None,
    threshold_b_uv: float | None = None,
) -> tuple[DetectorConfig, ...]:
    """The stock bank tuned for the reference 1 Hz blink scenario."""
    return (
        DetectorConfig(
            "bandA", 3.0, 7.0,
            threshold_uv=threshold_a_uv,
            refractory_s=STANDARD_REFRACTORY_S,
            enabled=threshold_a_uv is not None,
        ),
        DetectorConfig(
            "bandB", 1.0, 3.0,
            threshold_uv=threshold_b_uv,
            refractory_s=STANDARD_REFRACTORY_S,
            enabled=threshold_b_uv is not None,
        ),
    )


def zero_noise(seed: int = 0) -> NoiseModel:
    return NoiseModel(white_rms_uv=0.0, pink_rms_uv=0.0, seed=seed)


def standard_session(
    seed: int = 0,
    noise: NoiseModel | None = None,
    detectors: tuple[DetectorConfig, ...] | None = None,
    rate: int = 250,
    gain: int = 24,
    record_path: str | None = None,
    duration_s: float = STANDARD_DURATION_S,
    amplitude_uv: float = STANDARD_BLINK_AMPLITUDE_UV,
) -> SessionConfig:
    return SessionConfig(
        device=standard_device(rate=rate, gain=gain),
        source=SourceConfig(
            kind="simulate",
            duration_s=duration_s,
            script=standard_script(amplitude_uv=amplitude_uv),
            noise=noise if noise is not None else standard_noise(seed),
        ),
        detectors=tuple(detectors) if detectors is not None else standard_detectors(),
        record_path=record_path,
    )


def demo_session(seed: int = 1, speed: float = 1.0) -> SessionConfig:
    """Looping real-time simulation for the live calibration scope."""
    return SessionConfig(
        device=standard_device(),
        source=SourceConfig(
            kind="simulate",
            duration_s=STANDARD_DURATION_S,
            script=standard_script(amplitude_uv=DEMO_BLINK_AMPLITUDE_UV),
            noise=standard_noise(seed),
            speed=speed,
            loop=True,
        ),
        detectors=standard_detectors(),
    )
