"""27-byte data frames and raw-code/voltage conversion.

Wire layout (normative, on-wire and on-disk): bytes 0-2 carry the 24-bit
status word, bytes 3+3k .. 5+3k carry channel k for k = 0..7. Every 3-byte
group is big-endian; channel groups are two's-complement signed. The status
word is preserved verbatim and never interpreted here.

Code-to-voltage scaling: volts = code * vref / (gain * 2**23), so one LSB is
vref / (gain * 2**23) and full scale is +/- vref / gain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CodeRangeError, ConfigurationError, MalformedFrameError

FRAME_BYTES = 27
CHANNEL_COUNT = 8
CODE_MIN = -(1 << 23)
CODE_MAX = (1 << 23) - 1
STATUS_MAX = (1 << 24) - 1

ALLOWED_SAMPLE_RATES = (250, 500, 1000, 2000, 4000, 8000, 16000)
ALLOWED_GAINS = (1, 2, 4, 6, 8, 12, 24)
DEFAULT_VREF_VOLTS = 4.5

NS_PER_S = 1_000_000_000


@dataclass(frozen=True)
class DeviceConfig:
    """Acquisition parameters that govern decoding and scaling.

    ``metadata`` is a free-form string map for values carried along but never
    interpreted (electrode montage, hardware noise figures, and the like).
    """

    sample_rate_sps: int = 250
    gain: int = 24
    vref_volts: float = DEFAULT_VREF_VOLTS
    channel_count: int = CHANNEL_COUNT
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.sample_rate_sps not in ALLOWED_SAMPLE_RATES:
            raise ConfigurationError(
                f"sample_rate_sps must be one of {ALLOWED_SAMPLE_RATES}, "
                f"got {self.sample_rate_sps}"
            )
        if self.gain not in ALLOWED_GAINS:
            raise ConfigurationError(
                f"gain must be one of {ALLOWED_GAINS}, got {self.gain}"
            )
        if self.channel_count != CHANNEL_COUNT:
            raise ConfigurationError(
                f"channel_count must be {CHANNEL_COUNT}, got {self.channel_count}"
            )
        if not (self.vref_volts > 0):
            raise ConfigurationError(f"vref_volts must be > 0, got {self.vref_volts}")

    @property
    def lsb_volts(self) -> float:
        return self.vref_volts / (self.gain * float(1 << 23))

    @property
    def full_scale_volts(self) -> float:
        return self.vref_volts / self.gain

    @property
    def sample_period_ns(self) -> int:
        # exact for every allowed rate (all divide 1e9)
        return NS_PER_S // self.sample_rate_sps

    def to_dict(self) -> dict:
        return {
            "sample_rate_sps": self.sample_rate_sps,
            "gain": self.gain,
            "vref_volts": self.vref_volts,
            "channel_count": self.channel_count,
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DeviceConfig":
        return cls(
            sample_rate_sps=int(d.get("sample_rate_sps", 250)),
            gain=int(d.get("gain", 24)),
            vref_volts=float(d.get("vref_volts", DEFAULT_VREF_VOLTS)),
            channel_count=int(d.get("channel_count", CHANNEL_COUNT)),
            metadata=dict(d.get("metadata", {})),
        )


@dataclass(frozen=True)
class RawFrame:
    """One decoded frame: status word plus 8 signed 24-bit channel codes."""

    status: int
    channel_raw: tuple[int, ...]

    def __post_init__(self) -> None:
        if not (0 <= self.status <= STATUS_MAX):
            raise CodeRangeError(f"status must fit 24 bits, got {self.status:#x}")
        if len(self.channel_raw) != CHANNEL_COUNT:
            raise MalformedFrameError(
                f"frame must carry {CHANNEL_COUNT} channels, got {len(self.channel_raw)}"
            )
        for k, code in enumerate(self.channel_raw):
            if not (CODE_MIN <= code <= CODE_MAX):
                raise CodeRangeError(
                    f"channel {k} code {code} outside [{CODE_MIN}, {CODE_MAX}]"
                )


@dataclass(frozen=True)
class SampleVector:
    """One timestamped frame converted to per-channel volts."""

    t_ns: int
    volts: tuple[float, ...]


@dataclass(frozen=True)
class RawChunk:
    """A timestamped block of raw frames, the unit that flows between stages.

    ``t_ns`` is (n,) int64, strictly increasing; ``status`` is (n,) uint32;
    ``codes`` is (n, 8) int32.
    """

    t_ns: np.ndarray
    status: np.ndarray
    codes: np.ndarray

    def __len__(self) -> int:
        return len(self.t_ns)

    def to_volts(self, config: "DeviceConfig") -> "SampleChunk":
        return SampleChunk(
            t_ns=self.t_ns,
            volts=raw_to_volts(self.codes.astype(np.float64), config),
        )


@dataclass(frozen=True)
class SampleChunk:
    """A timestamped block of per-channel voltage samples."""

    t_ns: np.ndarray
    volts: np.ndarray  # (n, 8) float64


def frame_to_sample(frame: RawFrame, t_ns: int, config: DeviceConfig) -> SampleVector:
    """Convert one decoded frame to per-channel volts at a given timestamp."""
    return SampleVector(
        t_ns=t_ns,
        volts=tuple(raw_to_volts(code, config) for code in frame.channel_raw),
    )


def decode_frame(buf: bytes | bytearray, config: DeviceConfig) -> RawFrame:
    """Decode one 27-byte frame. Total: any 27 bytes decode.

    Raises MalformedFrameError for any other input length, naming the
    expected and actual lengths.
    """
    data = bytes(buf)
    if len(data) != FRAME_BYTES:
        raise MalformedFrameError(
            f"frame must be exactly {FRAME_BYTES} bytes, got {len(data)}"
        )
    status = (data[0] << 16) | (data[1] << 8) | data[2]
    codes = []
    for k in range(config.channel_count):
        off = 3 + 3 * k
        value = (data[off] << 16) | (data[off + 1] << 8) | data[off + 2]
        if value & 0x800000:
            value -= 1 << 24
        codes.append(value)
    return RawFrame(status=status, channel_raw=tuple(codes))


def encode_frame(frame: RawFrame) -> bytes:
    """Encode a frame to its 27-byte wire form (inverse of decode_frame)."""
    out = bytearray(FRAME_BYTES)
    out[0] = (frame.status >> 16) & 0xFF
    out[1] = (frame.status >> 8) & 0xFF
    out[2] = frame.status & 0xFF
    for k, code in enumerate(frame.channel_raw):
        word = code & 0xFFFFFF
        off = 3 + 3 * k
        out[off] = (word >> 16) & 0xFF
        out[off + 1] = (word >> 8) & 0xFF
        out[off + 2] = word & 0xFF
    return bytes(out)


def decode_frames(buf: bytes, config: DeviceConfig) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized decode of a concatenation of 27-byte frames.

    Returns (status (n,) uint32, codes (n, 8) int32).
    """
    if len(buf) % FRAME_BYTES != 0:
        raise MalformedFrameError(
            f"stream length {len(buf)} is not a multiple of {FRAME_BYTES}"
        )
    raw = np.frombuffer(buf, dtype=np.uint8).reshape(-1, FRAME_BYTES)
    as32 = raw.astype(np.int64)
    status = (as32[:, 0] << 16) | (as32[:, 1] << 8) | as32[:, 2]
    groups = as32[:, 3:].reshape(-1, config.channel_count, 3)
    codes = (groups[:, :, 0] << 16) | (groups[:, :, 1] << 8) | groups[:, :, 2]
    codes = np.where(codes >= (1 << 23), codes - (1 << 24), codes)
    return status.astype(np.uint32), codes.astype(np.int32)


def encode_frames(status: np.ndarray, codes: np.ndarray) -> bytes:
    """Vectorized inverse of decode_frames."""
    n = len(status)
    out = np.empty((n, FRAME_BYTES), dtype=np.uint8)
    s = np.asarray(status, dtype=np.int64)
    out[:, 0] = (s >> 16) & 0xFF
    out[:, 1] = (s >> 8) & 0xFF
    out[:, 2] = s & 0xFF
    words = np.asarray(codes, dtype=np.int64) & 0xFFFFFF
    groups = out[:, 3:].reshape(n, -1, 3)
    groups[:, :, 0] = (words >> 16) & 0xFF
    groups[:, :, 1] = (words >> 8) & 0xFF
    groups[:, :, 2] = words & 0xFF
    return out.tobytes()


def raw_to_volts(code, config: DeviceConfig):
    """Convert signed 24-bit codes to volts: code * vref / (gain * 2**23).

    Accepts a scalar or an ndarray; exact at 0, strictly increasing in code.
    """
    scale = config.vref_volts / (config.gain * float(1 << 23))
    if isinstance(code, np.ndarray):
        return code * scale
    return code * scale


def volts_to_raw(volts, config: DeviceConfig):
    """Quantize volts to the nearest representable code, clamped to range.

    Rounds half to even (numpy convention); the exact inverse of
    raw_to_volts up to quantization.
    """
    scale = config.gain * float(1 << 23) / config.vref_volts
    q = np.rint(np.asarray(volts, dtype=np.float64) * scale)
    q = np.clip(q, CODE_MIN, CODE_MAX)
    if np.ndim(volts) == 0:
        return int(q)
    return q.astype(np.int32)
