"""Pipeline orchestration: source -> dsp -> detectors -> actuation.

One producer thread pulls frames from the source (simulator, replay file, or
hardware) and one processing thread runs the feature path, the detector
bank, and pulse dispatch. The two exchange immutable chunks through a
bounded queue; on the detection path the queue blocks the producer rather
than dropping, so every sample reaches exactly the windows the hop schedule
dictates. Configuration changes arrive through a serialized control queue
and take effect at the next spectrum.

Timestamps everywhere are data-time nanoseconds from the source, so event
logs are reproducible: a live simulation and a replay of its recording
produce identical events.
"""

from __future__ import annotations

import json
import queue
import statistics
import threading
import time
from concurrent.futures import Future
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from . import recording
from .actuate import MockPinSink, PinMap, PulseLog, default_pin_map, dispatch
from .detect import DetectionEvent, Detector, DetectorConfig, default_bank
from .dsp import BandpassFilter, FilterSpec, SlidingWindow, WindowSpec, fft_amplitude
from .errors import (
    CalibrationError,
    CalibrationInfeasibleError,
    ConfigurationError,
)
from .frames import DeviceConfig, RawChunk, raw_to_volts
from .simulate import BlinkLabel, BlinkScript, NoiseModel, load_script
from .sources import HardwareSource, ReplaySource, SimulateSource

SOURCE_KINDS = ("simulate", "replay", "hardware")
MAX_STREAM_POINTS_PER_S = 50
_QUEUE_CHUNKS = 8


@dataclass(frozen=True)
class SourceConfig:
    kind: str = "simulate"
    # simulate
    duration_s: float = 16.0
    script_path: str | None = None
    script: BlinkScript | None = None  # programmatic override of script_path
    noise: NoiseModel = field(default_factory=NoiseModel)
    speed: float = 0.0  # 0 = as fast as possible, 1.0 = recorded rate
    loop: bool = False
    # replay
    path: str | None = None
    # hardware
    spi_bus: int = 0
    spi_device: int = 0

    def validate(self) -> None:
        if self.kind not in SOURCE_KINDS:
            raise ConfigurationError(f"source kind must be one of {SOURCE_KINDS}")
        if self.speed < 0:
            raise ConfigurationError(f"speed must be >= 0, got {self.speed}")
        if self.kind == "simulate":
            if not (self.duration_s > 0):
                raise ConfigurationError("simulate source needs duration_s > 0")
            if self.script_path is not None and not Path(self.script_path).exists():
                raise ConfigurationError(f"script file not found: {self.script_path}")
        elif self.kind == "replay":
            if self.path is None:
                raise ConfigurationError("replay source needs a file path")
            if not Path(self.path).exists():
                raise ConfigurationError(f"recording not found: {self.path}")

    def resolved_script(self) -> BlinkScript:
        if self.script is not None:
            return self.script
        if self.script_path is not None:
            return load_script(self.script_path)
        return BlinkScript()

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "speed": self.speed}
        if self.kind == "simulate":
            d.update(
                duration_s=self.duration_s,
                script_path=self.script_path,
                loop=self.loop,
                noise={
                    "white_rms_uv": self.noise.white_rms_uv,
                    "pink_rms_uv": self.noise.pink_rms_uv,
                    "mains_hz": self.noise.mains_hz,
                    "mains_amplitude_uv": self.noise.mains_amplitude_uv,
                    "seed": self.noise.seed,
                },
            )
        elif self.kind == "replay":
            d["path"] = self.path
        else:
            d.update(spi_bus=self.spi_bus, spi_device=self.spi_device)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SourceConfig":
        noise = d.get("noise", {})
        cfg = cls(
            kind=str(d.get("kind", "simulate")),
            duration_s=float(d.get("duration_s", 16.0)),
            script_path=d.get("script_path"),
            noise=NoiseModel(
                white_rms_uv=float(noise.get("white_rms_uv", 0.8)),
                pink_rms_uv=float(noise.get("pink_rms_uv", 2.0)),
                mains_hz=float(noise.get("mains_hz", 0.0)),
                mains_amplitude_uv=float(noise.get("mains_amplitude_uv", 0.0)),
                seed=int(noise.get("seed", 0)),
            ),
            speed=float(d.get("speed", 0.0)),
            loop=bool(d.get("loop", False)),
            path=d.get("path"),
            spi_bus=int(d.get("spi_bus", 0)),
            spi_device=int(d.get("spi_device", 0)),
        )
        cfg.validate()
        return cfg


@dataclass(frozen=True)
class SessionConfig:
    device: DeviceConfig = field(default_factory=DeviceConfig)
    source: SourceConfig = field(default_factory=SourceConfig)
    analysis_channel: int = 0
    filter: FilterSpec = field(default_factory=FilterSpec)
    window: WindowSpec | None = None  # None -> 1 s windows, 0.25 s hop
    detectors: tuple[DetectorConfig, ...] = field(
        default_factory=lambda: tuple(default_bank())
    )
    pin_map: PinMap = field(default_factory=default_pin_map)
    record_path: str | None = None

    def resolved_window(self) -> WindowSpec:
        if self.window is not None:
            return self.window
        return WindowSpec.seconds(self.device.sample_rate_sps)

    def validate(self) -> None:
        if not (0 <= self.analysis_channel < self.device.channel_count):
            raise ConfigurationError(
                f"analysis_channel {self.analysis_channel} out of range for "
                f"{self.device.channel_count} channels"
            )
        self.source.validate()
        self.filter.validate_for_rate(self.device.sample_rate_sps)
        self.resolved_window()  # constructor validates
        ids = [d.detector_id for d in self.detectors]
        if len(set(ids)) != len(ids):
            raise ConfigurationError(f"detector ids must be unique, got {ids}")
        for det in self.detectors:
            det.validate()

    def to_dict(self) -> dict:
        w = self.resolved_window()
        return {
            "device": self.device.to_dict(),
            "source": self.source.to_dict(),
            "analysis_channel": self.analysis_channel,
            "filter": {
                "low_hz": self.filter.low_hz,
                "high_hz": self.filter.high_hz,
                "order": self.filter.order,
                "design": self.filter.design,
            },
            "window": {
                "length_samples": w.length_samples,
                "hop_samples": w.hop_samples,
                "taper": w.taper,
            },
            "detectors": [d.to_dict() for d in self.detectors],
            "pin_map": self.pin_map.to_dict(),
            "record_path": self.record_path,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SessionConfig":
        filt = d.get("filter", {})
        win = d.get("window")
        cfg = cls(
            device=DeviceConfig.from_dict(d.get("device", {})),
            source=SourceConfig.from_dict(d.get("source", {})),
            analysis_channel=int(d.get("analysis_channel", 0)),
            filter=FilterSpec(
                low_hz=float(filt.get("low_hz", 1.0)),
                high_hz=float(filt.get("high_hz", 30.0)),
                order=int(filt.get("order", 4)),
                design=str(filt.get("design", "butterworth")),
            ),
            window=None
            if win is None
            else WindowSpec(
                length_samples=int(win["length_samples"]),
                hop_samples=int(win["hop_samples"]),
                taper=str(win.get("taper", "rectangular")),
            ),
            detectors=tuple(
                DetectorConfig.from_dict(x) for x in d.get("detectors", [])
            )
            or tuple(default_bank()),
            pin_map=PinMap.from_dict(d.get("pin_map"))
            if d.get("pin_map")
            else default_pin_map(),
            record_path=d.get("record_path"),
        )
        cfg.validate()
        return cfg


@dataclass(frozen=True)
class GapMarker:
    t_ns: int
    missing_samples: int


@dataclass(frozen=True)
class MatchedDetection:
    onset_ns: int
    event_t_ns: int
    actuation_assert_ns: int
    detector_id: str

    @property
    def latency_s(self) -> float:
        return (self.event_t_ns - self.onset_ns) / 1e9


@dataclass
class LatencyReport:
    """Per-detection latency against the ground-truth label track."""

    matched: list[MatchedDetection]
    missed_onsets_ns: list[int]
    false_events: list[DetectionEvent]
    surplus_events: int
    total_blinks: int

    @property
    def detected_count(self) -> int:
        return len(self.matched)

    @property
    def median_latency_s(self) -> float | None:
        if not self.matched:
            return None
        return statistics.median(m.latency_s for m in self.matched)

    @property
    def max_latency_s(self) -> float | None:
        if not self.matched:
            return None
        return max(m.latency_s for m in self.matched)

    def summary_text(self) -> str:
        med, mx = self.median_latency_s, self.max_latency_s
        return (
            f"detected {self.detected_count}/{self.total_blinks} blinks, "
            f"{len(self.false_events)} false, "
            f"latency median {med:.3f}s max {mx:.3f}s"
            if self.matched
            else f"detected 0/{self.total_blinks} blinks, "
            f"{len(self.false_events)} false"
        )


def build_latency_report(
    events: Iterable[DetectionEvent],
    labels: Iterable[BlinkLabel],
    detector_id: str | None = None,
    match_horizon_s: float = 1.5,
    false_margin_s: float = 1.0,
) -> LatencyReport:
    """Match events to scripted blink onsets.

    An event is credited to the most recent unmatched onset no more than
    ``match_horizon_s`` before it (each onset takes its first event). Events
    matching no onset are false when no onset lies within
    ``false_margin_s`` either side, surplus otherwise.
    """
    evs = sorted(
        (e for e in events if detector_id is None or e.detector_id == detector_id),
        key=lambda e: e.t_ns,
    )
    onsets = sorted(lab.onset_ns for lab in labels)
    horizon_ns = int(match_horizon_s * 1e9)
    margin_ns = int(false_margin_s * 1e9)

    matched: dict[int, DetectionEvent] = {}
    false_events: list[DetectionEvent] = []
    surplus = 0
    for ev in evs:
        candidates = [
            i
            for i, onset in enumerate(onsets)
            if 0 <= ev.t_ns - onset <= horizon_ns and i not in matched
        ]
        if candidates:
            matched[candidates[-1]] = ev  # most recent unmatched onset
        elif onsets and min(abs(ev.t_ns - o) for o in onsets) <= margin_ns:
            surplus += 1
        else:
            false_events.append(ev)

    rows = [
        MatchedDetection(
            onset_ns=onsets[i],
            event_t_ns=ev.t_ns,
            actuation_assert_ns=ev.t_ns,  # dispatch asserts at the event time
            detector_id=ev.detector_id,
        )
        for i, ev in sorted(matched.items())
    ]
    return LatencyReport(
        matched=rows,
        missed_onsets_ns=[o for i, o in enumerate(onsets) if i not in matched],
        false_events=false_events,
        surplus_events=surplus,
        total_blinks=len(onsets),
    )


@dataclass
class SessionSummary:
    config: SessionConfig
    events: list[DetectionEvent]
    pulse_log: PulseLog
    event_counts: dict[str, int]
    gaps: list[GapMarker]
    windows_emitted: int
    samples_processed: int
    wall_seconds: float
    latency: LatencyReport | None = None


def events_to_text(events: Iterable[DetectionEvent]) -> str:
    """Canonical text form of an event log, stable for byte comparison."""
    return "".join(
        f"{e.detector_id},{e.t_ns},{e.peak_hz!r},{e.peak_uv!r},{e.threshold_uv!r}\n"
        for e in events
    )


def _build_source(config: SessionConfig):
    src = config.source
    if src.kind == "simulate":
        return SimulateSource(
            device=config.device,
            duration_s=src.duration_s,
            script=src.resolved_script(),
            noise=src.noise,
            speed=src.speed,
            loop=src.loop,
        )
    if src.kind == "replay":
        return ReplaySource(src.path, speed=src.speed, metadata=config.device.metadata)
    return HardwareSource(config.device, src.spi_bus, src.spi_device)


class Session:
    """A running pipeline instance.

    start() spawns the producer and processing threads; join() waits for the
    source to exhaust (or stop() to be called) and returns the summary.
    Control commands are serialized and applied between spectra.
    """

    def __init__(
        self,
        config: SessionConfig,
        broadcast: Callable[[dict], None] | None = None,
        sink: MockPinSink | None = None,
    ):
        config.validate()
        self.config = config
        self._source = _build_source(config)
        # replay dictates the real device parameters (rate, gain, vref)
        self.device: DeviceConfig = self._source.device
        if config.source.kind == "replay":
            self.config = replace(config, device=self.device)
            self.config.validate()
        self.window = self.config.resolved_window()
        self._broadcast = broadcast
        self._sink = sink or MockPinSink()
        self._queue: queue.Queue = queue.Queue(maxsize=_QUEUE_CHUNKS)
        self._controls: queue.Queue = queue.Queue()
        self._stop = threading.Event()
        self._paused = threading.Event()
        self._pending_source: SourceConfig | None = None
        self._seq = 0
        self._seq_lock = threading.Lock()
        self._state_lock = threading.Lock()
        self._detectors = {
            cfg.detector_id: Detector(cfg) for cfg in self.config.detectors
        }
        self._events: list[DetectionEvent] = []
        self._event_counts = {d: 0 for d in self._detectors}
        self._gaps: list[GapMarker] = []
        self._windows = 0
        self._samples = 0
        self._threads: list[threading.Thread] = []
        self._errors: list[BaseException] = []
        self._summary: SessionSummary | None = None
        self._finished = threading.Event()
        self._wall_start = 0.0

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> "Session":
        self._wall_start = time.monotonic()
        producer = threading.Thread(target=self._produce, name="pieeg-source", daemon=True)
        consumer = threading.Thread(target=self._process, name="pieeg-process", daemon=True)
        self._threads = [producer, consumer]
        producer.start()
        consumer.start()
        return self

    def stop(self) -> None:
        self._stop.set()
        self._paused.clear()
        if hasattr(self._source, "stop"):
            self._source.stop()

    def join(self, timeout: float | None = None) -> SessionSummary:
        if not self._finished.wait(timeout):
            raise TimeoutError("session did not finish in time")
        for t in self._threads:
            t.join()
        if self._errors:
            raise self._errors[0]
        assert self._summary is not None
        return self._summary

    # -- control -----------------------------------------------------------

    def set_broadcast(self, broadcast: Callable[[dict], None] | None) -> None:
        """Attach or replace the outbound message hook (call before start)."""
        self._broadcast = broadcast

    def submit_control(self, command: dict) -> Future:
        """Queue a control command; the future resolves to (ok, info_dict)."""
        fut: Future = Future()
        if self._finished.is_set():
            fut.set_result((False, {"reason": "session not running"}))
            return fut
        self._controls.put((command, fut))
        return fut

    def status_snapshot(self) -> dict:
        return {"kind": "status", "seq": self._next_seq(), "config": self._config_dict()}

    # -- internals ---------------------------------------------------------

    def _next_seq(self) -> int:
        with self._seq_lock:
            self._seq += 1
            return self._seq

    def _config_dict(self) -> dict:
        with self._state_lock:
            detector_cfgs = [d.config.to_dict() for d in self._detectors.values()]
        base = self.config.to_dict()
        base["detectors"] = detector_cfgs
        base["paused"] = self._paused.is_set()
        return base

    def _send(self, msg: dict) -> None:
        if self._broadcast is not None:
            self._broadcast(msg)

    def _produce(self) -> None:
        writer = None
        try:
            if self.config.record_path:
                writer = recording.RecordingWriter(self.config.record_path, self.device)
            last_t: int | None = None
            rebase = 0
            source = self._source
            chunks = source.chunks()
            while not self._stop.is_set():
                while self._paused.is_set() and not self._stop.is_set():
                    if self._pending_source is not None:
                        source, chunks, rebase = self._swap_source(source, last_t)
                    time.sleep(0.01)
                try:
                    chunk = next(chunks)
                except StopIteration:
                    break
                if rebase:
                    chunk = RawChunk(
                        t_ns=chunk.t_ns + rebase, status=chunk.status, codes=chunk.codes
                    )
                last_t = int(chunk.t_ns[-1])
                if writer is not None:
                    writer.write_chunk(chunk)
                self._queue.put((chunk, source.device))
        except BaseException as exc:  # surfaced on join()
            self._errors.append(exc)
            self._stop.set()
        finally:
            if writer is not None:
                writer.close()
            self._queue.put(None)

    def _swap_source(self, old_source, last_t):
        cfg = self._pending_source
        self._pending_source = None
        old_source.close()
        new_cfg = replace(self.config, source=cfg, record_path=None)
        source = _build_source(new_cfg)
        chunks = source.chunks()
        period = source.device.sample_period_ns
        rebase = (last_t + period) if last_t is not None else 0
        return source, chunks, rebase

    def _drain_controls(self) -> None:
        while True:
            try:
                command, fut = self._controls.get_nowait()
            except queue.Empty:
                return
            try:
                ok, info = self._apply_control(command)
            except Exception as exc:
                ok, info = False, {"reason": str(exc)}
            fut.set_result((ok, info))
            if ok:
                self._send(
                    {"kind": "status", "seq": self._next_seq(), "config": self._config_dict()}
                )

    def _apply_control(self, command: dict) -> tuple[bool, dict]:
        cmd = command.get("cmd")
        if cmd in ("set_threshold", "set_band", "set_refractory", "enable_detector"):
            det_id = command.get("detector_id")
            det = self._detectors.get(det_id)
            if det is None:
                return False, {"reason": f"unknown detector {det_id!r}"}
            cfg = det.config
            try:
                if cmd == "set_threshold":
                    new = replace(cfg, threshold_uv=float(command["threshold_uv"]))
                elif cmd == "set_band":
                    low = float(command["low_hz"])
                    high = float(command["high_hz"])
                    if low >= high:
                        return False, {"reason": "band rejected: low >= high"}
                    new = replace(cfg, band_low_hz=low, band_high_hz=high)
                elif cmd == "set_refractory":
                    new = replace(cfg, refractory_s=float(command["refractory_s"]))
                else:
                    new = replace(cfg, enabled=bool(command["enabled"]))
                new.validate()
            except (KeyError, TypeError, ValueError, ConfigurationError) as exc:
                return False, {"reason": str(exc)}
            with self._state_lock:
                det.update_config(new)
            return True, {"config": new.to_dict()}
        if cmd == "stop":
            self._paused.set()
            return True, {"paused": True}
        if cmd == "start":
            self._paused.clear()
            return True, {"paused": False}
        if cmd == "select_source":
            if not self._paused.is_set():
                return False, {"reason": "select_source requires a stopped source"}
            try:
                new_src = SourceConfig.from_dict(command["source"])
                if new_src.kind == "hardware":
                    return False, {"reason": "cannot switch to hardware mid-session"}
                probe = replace(self.config, source=new_src, record_path=None)
                probe.validate()
                if new_src.kind == "replay":
                    header = recording.read_header(new_src.path)
                    if header.sample_rate_sps != self.device.sample_rate_sps:
                        return False, {
                            "reason": "replay rate differs from the running session"
                        }
            except (KeyError, TypeError, ValueError, ConfigurationError) as exc:
                return False, {"reason": str(exc)}
            self._pending_source = new_src
            return True, {"source": new_src.to_dict()}
        return False, {"reason": f"unknown command {cmd!r}"}

    def _process(self) -> None:
        try:
            self._process_loop()
        except BaseException as exc:
            self._errors.append(exc)
            self._stop.set()
            # unblock the producer and drain to the sentinel
            while True:
                item = self._queue.get()
                if item is None:
                    break
        finally:
            self._finish()

    def _process_loop(self) -> None:
        rate = self.device.sample_rate_sps
        period = self.device.sample_period_ns
        bandpass = BandpassFilter(self.config.filter, rate)
        windower = SlidingWindow(self.window)
        stride = max(1, rate // MAX_STREAM_POINTS_PER_S)
        channel = self.config.analysis_channel
        last_t: int | None = None
        global_idx = 0

        while True:
            try:
                item = self._queue.get(timeout=0.05)
            except queue.Empty:
                # keep serving control commands while the source is paused/idle
                self._drain_controls()
                continue
            if item is None:
                break
            chunk, device = item
            self._drain_controls()

            t0 = int(chunk.t_ns[0])
            if last_t is not None and t0 - last_t > period:
                self._gaps.append(
                    GapMarker(t_ns=t0, missing_samples=(t0 - last_t) // period - 1)
                )
            for i in np.flatnonzero(np.diff(chunk.t_ns) > period):
                step = int(chunk.t_ns[i + 1] - chunk.t_ns[i])
                self._gaps.append(
                    GapMarker(t_ns=int(chunk.t_ns[i + 1]), missing_samples=step // period - 1)
                )
            last_t = int(chunk.t_ns[-1])

            uv = raw_to_volts(chunk.codes[:, channel], device) * 1e6
            filtered = bandpass.process(uv)
            self._samples += len(chunk)

            if self._broadcast is not None:
                offset = (-global_idx) % stride
                picked = filtered[offset::stride]
                if len(picked):
                    self._send(
                        {
                            "kind": "samples",
                            "seq": self._next_seq(),
                            "t0_ns": int(chunk.t_ns[offset]),
                            "period_ns": period * stride,
                            "uv": [round(float(v), 4) for v in picked],
                        }
                    )
            global_idx += len(chunk)

            for t_end, window in windower.push(chunk.t_ns, filtered):
                self._drain_controls()
                spectrum = fft_amplitude(
                    window, taper=self.window.taper, rate=rate, t_end_ns=t_end
                )
                self._windows += 1
                if self._broadcast is not None:
                    self._send(
                        {
                            "kind": "spectrum",
                            "seq": self._next_seq(),
                            "t_end_ns": t_end,
                            "bin_hz": spectrum.bin_hz,
                            "amplitudes_uv": [
                                round(float(a), 4) for a in spectrum.amplitudes_uv
                            ],
                        }
                    )
                for det in self._detectors.values():
                    event = det.evaluate(spectrum)
                    if event is None:
                        continue
                    self._events.append(event)
                    self._event_counts[event.detector_id] += 1
                    self._send(
                        {
                            "kind": "event",
                            "seq": self._next_seq(),
                            "detector_id": event.detector_id,
                            "t_ns": event.t_ns,
                            "peak_hz": event.peak_hz,
                            "peak_uv": event.peak_uv,
                            "threshold_uv": event.threshold_uv,
                        }
                    )
                    assert_cmd, release_cmd = dispatch(event, self.config.pin_map)
                    if self._sink.submit_pulse(assert_cmd, release_cmd):
                        self._send(
                            {
                                "kind": "pin_state",
                                "seq": self._next_seq(),
                                "pin": assert_cmd.pin,
                                "level": True,
                                "t_ns": assert_cmd.t_ns,
                            }
                        )
                for closed in self._sink.advance(t_end):
                    self._send(
                        {
                            "kind": "pin_state",
                            "seq": self._next_seq(),
                            "pin": closed.pin,
                            "level": False,
                            "t_ns": closed.release_ns,
                        }
                    )
        self._drain_controls()

    def _finish(self) -> None:
        pulse_log = self._sink.close()
        latency = None
        labels = getattr(self._source, "labels", None)
        if labels:
            latency = build_latency_report(self._events, labels)
        self._summary = SessionSummary(
            config=self.config,
            events=list(self._events),
            pulse_log=pulse_log,
            event_counts=dict(self._event_counts),
            gaps=list(self._gaps),
            windows_emitted=self._windows,
            samples_processed=self._samples,
            wall_seconds=time.monotonic() - self._wall_start,
            latency=latency,
        )
        # reject controls that arrived too late to apply
        while True:
            try:
                _, fut = self._controls.get_nowait()
            except queue.Empty:
                break
            fut.set_result((False, {"reason": "session finished"}))
        try:
            self._source.close()
        except Exception:
            pass
        self._finished.set()


def run(
    config: SessionConfig,
    broadcast: Callable[[dict], None] | None = None,
    sink: MockPinSink | None = None,
) -> SessionSummary:
    """Run a session to source exhaustion and return its summary."""
    return Session(config, broadcast=broadcast, sink=sink).start().join()


def record(
    chunks: Iterable[RawChunk],
    device: DeviceConfig,
    path: str | Path,
    session_id: int | None = None,
) -> recording.RecordingHeader:
    """Write a raw chunk stream to a recording file."""
    return recording.record(chunks, device, path, session_id)


def replay(path: str | Path, speed: float = 0.0):
    """Stream a recording back as raw chunks with its original timestamps.

    speed 0 is as fast as possible; positive values pace delivery against
    the wall clock. Header validation happens before any frame is emitted.
    """
    return ReplaySource(path, speed=speed).chunks()


# -- calibration -------------------------------------------------------------


@dataclass
class CalibrationResult:
    threshold_uv: float
    blink_median_uv: float
    noise_p99_uv: float
    blink_peaks_uv: list[float]
    noise_peaks_uv: list[float]
    band: tuple[float, float]
    margin: float


def _feature_peaks(
    chunks: Iterable[RawChunk],
    device: DeviceConfig,
    channel: int,
    filter_spec: FilterSpec,
    window_spec: WindowSpec,
    band: tuple[float, float],
) -> list[tuple[int, float]]:
    """Run the bare feature path and collect (t_end_ns, band peak) pairs."""
    from .dsp import band_peak

    bandpass = BandpassFilter(filter_spec, device.sample_rate_sps)
    windower = SlidingWindow(window_spec)
    out = []
    for chunk in chunks:
        uv = raw_to_volts(chunk.codes[:, channel], device) * 1e6
        filtered = bandpass.process(uv)
        for t_end, window in windower.push(chunk.t_ns, filtered):
            spectrum = fft_amplitude(
                window, taper=window_spec.taper, rate=device.sample_rate_sps, t_end_ns=t_end
            )
            _, peak_uv = band_peak(spectrum, band[0], band[1])
            out.append((t_end, peak_uv))
    return out


def calibrate_threshold(
    config: SessionConfig,
    band_low_hz: float,
    band_high_hz: float,
    target_margin: float = 0.5,
    labels: tuple[BlinkLabel, ...] | None = None,
    guard_s: float = 0.5,
) -> CalibrationResult:
    """Suggest a detector threshold from labeled data.

    Runs the feature path over the configured source, splits windows into
    blink windows (span contains a blink center) and noise windows (span
    clear of every blink by ``guard_s``), and returns
    noise_p99 + margin * (blink_median - noise_p99) along with both
    distributions. Needs at least one labeled blink and 5 s of non-blink
    signal.
    """
    config.validate()
    source = _build_source(replace(config, record_path=None))
    device = source.device
    if labels is None:
        labels = getattr(source, "labels", None)
    if not labels:
        raise CalibrationError("calibration needs at least one labeled blink")

    window_spec = (
        config.window
        if config.window is not None
        else WindowSpec.seconds(device.sample_rate_sps)
    )
    peaks = _feature_peaks(
        source.chunks(),
        device,
        config.analysis_channel,
        config.filter,
        window_spec,
        (band_low_hz, band_high_hz),
    )
    source.close()
    if not peaks:
        raise CalibrationError("source produced no analysis windows")

    period_ns = device.sample_period_ns
    span_ns = (window_spec.length_samples - 1) * period_ns
    guard_ns = int(guard_s * 1e9)
    blink_spans = [
        (
            lab.onset_ns,
            lab.onset_ns + int(lab.duration_s * 1e9),
        )
        for lab in labels
    ]
    centers = [(a + b) // 2 for a, b in blink_spans]

    total_ns = (peaks[-1][0] - peaks[0][0]) + window_spec.length_samples * period_ns
    merged: list[list[int]] = []
    for a, b in sorted((a - guard_ns, b + guard_ns) for a, b in blink_spans):
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    blink_ns = sum(min(b, total_ns) - max(a, 0) for a, b in merged if b > 0)
    if (total_ns - blink_ns) < 5 * 1_000_000_000:
        raise CalibrationError(
            "calibration needs at least 5 s of non-blink signal, got "
            f"{(total_ns - blink_ns) / 1e9:.1f} s"
        )

    blink_peaks, noise_peaks = [], []
    for t_end, peak in peaks:
        w_start = t_end - span_ns
        if any(w_start <= c <= t_end for c in centers):
            blink_peaks.append(peak)
        elif all(b + guard_ns < w_start or a - guard_ns > t_end for a, b in blink_spans):
            noise_peaks.append(peak)
    if not blink_peaks:
        raise CalibrationError("no analysis window contains a blink center")
    if not noise_peaks:
        raise CalibrationError("no analysis window is clear of blinks")

    blink_median = float(np.median(blink_peaks))
    noise_p99 = float(np.percentile(noise_peaks, 99))
    if blink_median <= noise_p99:
        raise CalibrationInfeasibleError(blink_median, noise_p99)
    threshold = noise_p99 + target_margin * (blink_median - noise_p99)
    return CalibrationResult(
        threshold_uv=threshold,
        blink_median_uv=blink_median,
        noise_p99_uv=noise_p99,
        blink_peaks_uv=blink_peaks,
        noise_peaks_uv=noise_peaks,
        band=(band_low_hz, band_high_hz),
        margin=target_margin,
    )


def save_event_log(events: Iterable[DetectionEvent], path: str | Path) -> None:
    Path(path).write_text(events_to_text(events))


def summary_to_json(summary: SessionSummary) -> str:
    """Human-inspectable JSON digest of a finished run."""
    d = {
        "events": [
            {
                "detector_id": e.detector_id,
                "t_ns": e.t_ns,
                "peak_hz": e.peak_hz,
                "peak_uv": e.peak_uv,
                "threshold_uv": e.threshold_uv,
            }
            for e in summary.events
        ],
        "event_counts": summary.event_counts,
        "pulses": [
            {
                "pin": iv.pin,
                "assert_ns": iv.assert_ns,
                "release_ns": iv.release_ns,
                "cause": iv.cause,
            }
            for iv in summary.pulse_log
        ],
        "gaps": [
            {"t_ns": g.t_ns, "missing_samples": g.missing_samples} for g in summary.gaps
        ],
        "windows_emitted": summary.windows_emitted,
        "samples_processed": summary.samples_processed,
        "wall_seconds": summary.wall_seconds,
    }
    if summary.latency is not None:
        rep = summary.latency
        d["latency"] = {
            "detected": rep.detected_count,
            "total_blinks": rep.total_blinks,
            "false_events": len(rep.false_events),
            "median_latency_s": rep.median_latency_s,
            "max_latency_s": rep.max_latency_s,
            "per_event": [
                {
                    "onset_ns": m.onset_ns,
                    "event_t_ns": m.event_t_ns,
                    "actuation_assert_ns": m.actuation_assert_ns,
                    "latency_s": m.latency_s,
                }
                for m in rep.matched
            ],
        }
    return json.dumps(d, indent=2)
