"""Frame sources: simulator, file replay, and the SPI hardware reader.

Every source yields RawChunk blocks with monotone timestamps. Simulator and
replay can run as fast as possible (speed 0) or paced against the wall clock
(speed multiplier); the hardware source is inherently paced by the ADC and
is exercised only by the manual smoke procedure in the README.
"""

from __future__ import annotations

import time
from typing import Iterator

import numpy as np

from . import recording
from .errors import SourceError
from .frames import DeviceConfig, RawChunk, decode_frame
from .simulate import BlinkLabel, BlinkScript, NoiseModel, Simulation, generate

_PACED_CHUNK_S = 0.05


def _pace_chunks(
    chunks: Iterator[RawChunk], period_ns: int, speed: float
) -> Iterator[RawChunk]:
    """Deliver each chunk no earlier than its recorded time says, scaled by speed."""
    start_wall = time.monotonic()
    t0: int | None = None
    for chunk in chunks:
        if t0 is None:
            t0 = int(chunk.t_ns[0])
        deadline = (int(chunk.t_ns[-1]) - t0 + period_ns) * 1e-9 / speed
        while True:
            lag = deadline - (time.monotonic() - start_wall)
            if lag <= 0:
                break
            time.sleep(min(lag, 0.05))
        yield chunk


class SimulateSource:
    """Pull-based source over a deterministic simulation."""

    def __init__(
        self,
        device: DeviceConfig,
        duration_s: float,
        script: BlinkScript,
        noise: NoiseModel,
        speed: float = 0.0,
        loop: bool = False,
        chunk_samples: int | None = None,
    ):
        self.device = device
        self.duration_s = duration_s
        self.script = script
        self.noise = noise
        self.speed = speed
        self.loop = loop
        if chunk_samples is None:
            chunk_samples = (
                max(1, int(device.sample_rate_sps * _PACED_CHUNK_S)) if speed > 0 else 4096
            )
        self.chunk_samples = chunk_samples
        self._sim = generate(duration_s, device, script, noise)

    @property
    def labels(self) -> tuple[BlinkLabel, ...]:
        return self._sim.labels

    @property
    def simulation(self) -> Simulation:
        return self._sim

    def chunks(self) -> Iterator[RawChunk]:
        span_ns = self._sim.n_samples * self.device.sample_period_ns

        def passes() -> Iterator[RawChunk]:
            sim = self._sim
            pass_idx = 0
            while True:
                offset = pass_idx * span_ns
                for chunk in sim.chunks(self.chunk_samples):
                    if offset:
                        chunk = RawChunk(
                            t_ns=chunk.t_ns + offset,
                            status=chunk.status,
                            codes=chunk.codes,
                        )
                    yield chunk
                if not self.loop:
                    return
                pass_idx += 1
                sim = generate(
                    self.duration_s,
                    self.device,
                    self.script,
                    NoiseModel(
                        white_rms_uv=self.noise.white_rms_uv,
                        pink_rms_uv=self.noise.pink_rms_uv,
                        mains_hz=self.noise.mains_hz,
                        mains_amplitude_uv=self.noise.mains_amplitude_uv,
                        seed=self.noise.seed + pass_idx,
                    ),
                )

        if self.speed > 0:
            return _pace_chunks(passes(), self.device.sample_period_ns, self.speed)
        return passes()

    def close(self) -> None:
        pass


class ReplaySource:
    """Replays a recording; timestamps come from the file, not the wall clock."""

    def __init__(self, path, speed: float = 0.0, chunk_records: int | None = None,
                 metadata: dict | None = None):
        self.path = path
        self.speed = speed
        self.header = recording.read_header(path)  # fatal before processing starts
        self.device = self.header.device_config(metadata)
        if chunk_records is None:
            chunk_records = (
                max(1, int(self.device.sample_rate_sps * _PACED_CHUNK_S))
                if speed > 0
                else 4096
            )
        self.chunk_records = chunk_records
        self.labels = None

    def chunks(self) -> Iterator[RawChunk]:
        raw = recording.read_chunks(self.path, self.chunk_records)
        if self.speed > 0:
            return _pace_chunks(raw, self.device.sample_period_ns, self.speed)
        return raw

    def close(self) -> None:
        pass


class HardwareSource:
    """Reads 27-byte frames over SPI, one per data-ready edge.

    Requires the acquisition shield on a single-board computer with spidev
    and RPi.GPIO available, and assumes the ADC is already streaming in
    read-data-continuous mode (register programming is out of scope). Not
    exercised by the automated suite; see the README smoke procedure.
    """

    DRDY_PIN = 26  # BCM numbering for the data-ready line

    def __init__(self, device: DeviceConfig, spi_bus: int = 0, spi_device: int = 0,
                 chunk_frames: int | None = None):
        try:
            import spidev  # type: ignore
            import RPi.GPIO as GPIO  # type: ignore
        except ImportError as exc:
            raise SourceError(
                "hardware source needs spidev and RPi.GPIO (run on the "
                f"single-board computer with the shield attached): {exc}"
            ) from exc
        self.device = device
        self.labels = None
        self.chunk_frames = chunk_frames or max(1, device.sample_rate_sps // 20)
        self._gpio = GPIO
        GPIO.setmode(GPIO.BCM)
        GPIO.setup(self.DRDY_PIN, GPIO.IN)
        self._spi = spidev.SpiDev()
        try:
            self._spi.open(spi_bus, spi_device)
        except OSError as exc:
            raise SourceError(f"cannot open SPI bus {spi_bus}.{spi_device}: {exc}") from exc
        self._spi.max_speed_hz = 4_000_000
        self._spi.mode = 0b01
        self._stop = False

    def stop(self) -> None:
        self._stop = True

    def chunks(self) -> Iterator[RawChunk]:
        period_ns = self.device.sample_period_ns
        n = 0
        start = time.monotonic_ns()
        while not self._stop:
            t_ns = np.empty(self.chunk_frames, dtype=np.int64)
            status = np.empty(self.chunk_frames, dtype=np.uint32)
            codes = np.empty((self.chunk_frames, 8), dtype=np.int32)
            got = 0
            while got < self.chunk_frames and not self._stop:
                deadline = time.monotonic_ns() + 200_000_000
                while self._gpio.input(self.DRDY_PIN):
                    if time.monotonic_ns() > deadline:
                        raise SourceError("data-ready line never fell (ADC not streaming?)")
                frame = decode_frame(bytes(self._spi.xfer2([0x00] * 27)), self.device)
                now = time.monotonic_ns() - start
                # timestamps snap to the sample grid; an overrun shows as a jump
                n = max(n + 1, int(round(now / period_ns)))
                t_ns[got] = n * period_ns
                status[got] = frame.status
                codes[got] = frame.channel_raw
                got += 1
            if got:
                yield RawChunk(t_ns=t_ns[:got], status=status[:got], codes=codes[:got])

    def close(self) -> None:
        self._stop = True
        self._spi.close()
        self._gpio.cleanup(self.DRDY_PIN)
