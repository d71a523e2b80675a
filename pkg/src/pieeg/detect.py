"""Band-peak threshold detectors with refractory hold-off.

A detector watches one frequency band of the spectrum stream and emits a
discrete event whenever the band peak reaches its threshold, then holds off
for the refractory period. Thresholds are per-user and never defaulted: a
fresh detector carries ``threshold_uv=None`` (uncalibrated) and must stay
disabled until a threshold is set.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .dsp import SpectrumFrame, band_peak
from .errors import ConfigurationError, StreamIntegrityError

NS_PER_S = 1_000_000_000


@dataclass(frozen=True)
class DetectorConfig:
    detector_id: str
    band_low_hz: float
    band_high_hz: float
    threshold_uv: float | None = None  # None = uncalibrated sentinel
    refractory_s: float = 1.0
    enabled: bool = False

    def validate(self) -> None:
        if not self.detector_id:
            raise ConfigurationError("detector_id must be non-empty")
        if not (0 <= self.band_low_hz < self.band_high_hz):
            raise ConfigurationError(
                f"band must satisfy 0 <= low < high, got "
                f"{self.band_low_hz}..{self.band_high_hz}"
            )
        if self.refractory_s < 0:
            raise ConfigurationError(
                f"refractory_s must be >= 0, got {self.refractory_s}"
            )
        if self.threshold_uv is not None and not (self.threshold_uv > 0):
            raise ConfigurationError(
                f"threshold_uv must be > 0, got {self.threshold_uv}"
            )
        if self.enabled and self.threshold_uv is None:
            raise ConfigurationError(
                f"detector {self.detector_id!r} cannot be enabled before "
                "a threshold is calibrated"
            )

    def to_dict(self) -> dict:
        return {
            "detector_id": self.detector_id,
            "band_low_hz": self.band_low_hz,
            "band_high_hz": self.band_high_hz,
            "threshold_uv": self.threshold_uv,
            "refractory_s": self.refractory_s,
            "enabled": self.enabled,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DetectorConfig":
        cfg = cls(
            detector_id=str(d["detector_id"]),
            band_low_hz=float(d["band_low_hz"]),
            band_high_hz=float(d["band_high_hz"]),
            threshold_uv=None if d.get("threshold_uv") is None else float(d["threshold_uv"]),
            refractory_s=float(d.get("refractory_s", 1.0)),
            enabled=bool(d.get("enabled", False)),
        )
        cfg.validate()
        return cfg


@dataclass(frozen=True)
class DetectionEvent:
    detector_id: str
    t_ns: int
    peak_hz: float
    peak_uv: float
    threshold_uv: float  # as configured at trigger time


def default_bank() -> list[DetectorConfig]:
    """The two stock detectors: bandA 3-7 Hz, bandB 1-3 Hz.

    Both ship uncalibrated and disabled; they emit nothing until a threshold
    is set and the detector enabled.
    """
    return [
        DetectorConfig("bandA", 3.0, 7.0),
        DetectorConfig("bandB", 1.0, 3.0),
    ]


class Detector:
    """Stateful evaluator for one DetectorConfig.

    Spectra must arrive in t_end_ns order while the detector is enabled. The
    refractory clock survives config updates.
    """

    def __init__(self, config: DetectorConfig):
        config.validate()
        self._config = config
        self._last_event_ns: int | None = None
        self._last_seen_ns: int | None = None

    @property
    def config(self) -> DetectorConfig:
        return self._config

    def evaluate(self, spectrum: SpectrumFrame) -> DetectionEvent | None:
        cfg = self._config
        if not cfg.enabled:
            return None
        t = int(spectrum.t_end_ns)
        if self._last_seen_ns is not None and t <= self._last_seen_ns:
            raise StreamIntegrityError(
                f"detector {cfg.detector_id!r}: spectrum at {t} ns arrived "
                f"after {self._last_seen_ns} ns"
            )
        self._last_seen_ns = t
        peak_hz, peak_uv = band_peak(spectrum, cfg.band_low_hz, cfg.band_high_hz)
        if peak_uv < cfg.threshold_uv:
            return None
        if self._last_event_ns is not None:
            if t - self._last_event_ns < int(round(cfg.refractory_s * NS_PER_S)):
                return None
        self._last_event_ns = t
        return DetectionEvent(
            detector_id=cfg.detector_id,
            t_ns=t,
            peak_hz=peak_hz,
            peak_uv=peak_uv,
            threshold_uv=cfg.threshold_uv,
        )

    def update_config(self, new_config: DetectorConfig) -> DetectorConfig:
        """Apply a new config (effective from the next spectrum).

        Invalid configs are rejected and the prior config stays active; the
        refractory clock is preserved either way. Returns the applied config.
        """
        new_config.validate()
        self._config = new_config
        return self._config

    def set_threshold(self, threshold_uv: float) -> DetectorConfig:
        return self.update_config(replace(self._config, threshold_uv=threshold_uv))

    def set_enabled(self, enabled: bool) -> DetectorConfig:
        return self.update_config(replace(self._config, enabled=enabled))
