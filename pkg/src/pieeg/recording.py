"""Fixed-width binary recording of raw frame streams.

Header, 32 bytes:
    magic            4s   b"PIEG"
    format_version   u8   1
    channel_count    u8
    gain             u8
    pad              u8   zero
    sample_rate_sps  u32  little-endian
    vref_microvolts  u32  little-endian
    session_id       u64  little-endian
    reserved         8s   zero

Record, 44 bytes each: t_ns u64le, status u32le, 8 x channel code i32le
(sign-extended from 24 bits). Raw codes are stored, not volts, so a
recording survives gain/vref reinterpretation losslessly. Any prefix of a
valid file is recoverable up to the last complete record.
"""

from __future__ import annotations

import io
import logging
import struct
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import RecordingFormatError
from .frames import ALLOWED_GAINS, ALLOWED_SAMPLE_RATES, DeviceConfig, RawChunk

logger = logging.getLogger(__name__)

MAGIC = b"PIEG"
FORMAT_VERSION = 1
HEADER_BYTES = 32
RECORD_BYTES = 44
_HEADER_STRUCT = struct.Struct("<4sBBBBIIQ8s")

RECORD_DTYPE = np.dtype(
    [("t_ns", "<u8"), ("status", "<u4"), ("codes", "<i4", (8,))]
)
assert RECORD_DTYPE.itemsize == RECORD_BYTES


@dataclass(frozen=True)
class RecordingHeader:
    channel_count: int
    gain: int
    sample_rate_sps: int
    vref_microvolts: int
    session_id: int
    format_version: int = FORMAT_VERSION

    @property
    def vref_volts(self) -> float:
        return self.vref_microvolts / 1e6

    def device_config(self, metadata: dict | None = None) -> DeviceConfig:
        return DeviceConfig(
            sample_rate_sps=self.sample_rate_sps,
            gain=self.gain,
            vref_volts=self.vref_volts,
            channel_count=self.channel_count,
            metadata=metadata or {},
        )

    def pack(self) -> bytes:
        return _HEADER_STRUCT.pack(
            MAGIC,
            self.format_version,
            self.channel_count,
            self.gain,
            0,
            self.sample_rate_sps,
            self.vref_microvolts,
            self.session_id,
            b"\x00" * 8,
        )

    @classmethod
    def unpack(cls, buf: bytes) -> "RecordingHeader":
        if len(buf) < HEADER_BYTES:
            raise RecordingFormatError(
                f"file too short for a header: {len(buf)} < {HEADER_BYTES} bytes"
            )
        magic, version, channels, gain, _pad, rate, vref_uv, session_id, _res = (
            _HEADER_STRUCT.unpack(buf[:HEADER_BYTES])
        )
        if magic != MAGIC:
            raise RecordingFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
        if version != FORMAT_VERSION:
            raise RecordingFormatError(
                f"unsupported format version {version}, expected {FORMAT_VERSION}"
            )
        if rate not in ALLOWED_SAMPLE_RATES:
            raise RecordingFormatError(f"header sample rate {rate} is not valid")
        if gain not in ALLOWED_GAINS:
            raise RecordingFormatError(f"header gain {gain} is not valid")
        return cls(
            channel_count=channels,
            gain=gain,
            sample_rate_sps=rate,
            vref_microvolts=vref_uv,
            session_id=session_id,
            format_version=version,
        )

    @classmethod
    def for_device(cls, device: DeviceConfig, session_id: int) -> "RecordingHeader":
        return cls(
            channel_count=device.channel_count,
            gain=device.gain,
            sample_rate_sps=device.sample_rate_sps,
            vref_microvolts=int(round(device.vref_volts * 1e6)),
            session_id=session_id,
        )


class RecordingWriter:
    """Streams raw chunks to disk; header first, flush on close."""

    def __init__(self, path: str | Path, device: DeviceConfig, session_id: int | None = None):
        if session_id is None:
            session_id = time.time_ns() & 0xFFFFFFFFFFFFFFFF
        self.header = RecordingHeader.for_device(device, session_id)
        self.path = Path(path)
        self._fh: io.BufferedWriter | None = self.path.open("wb")
        self._fh.write(self.header.pack())
        self.records_written = 0

    def write_chunk(self, chunk: RawChunk) -> None:
        if self._fh is None:
            raise RecordingFormatError("writer already closed")
        arr = np.empty(len(chunk), dtype=RECORD_DTYPE)
        arr["t_ns"] = chunk.t_ns
        arr["status"] = chunk.status
        arr["codes"] = chunk.codes
        self._fh.write(arr.tobytes())
        self.records_written += len(chunk)

    def close(self) -> None:
        if self._fh is not None:
            self._fh.flush()
            self._fh.close()
            self._fh = None

    def __enter__(self) -> "RecordingWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def record(
    chunks: Iterable[RawChunk],
    device: DeviceConfig,
    path: str | Path,
    session_id: int | None = None,
) -> RecordingHeader:
    """Write a chunk stream to a recording file and return its header."""
    with RecordingWriter(path, device, session_id) as writer:
        for chunk in chunks:
            writer.write_chunk(chunk)
        return writer.header


def read_header(path: str | Path) -> RecordingHeader:
    with Path(path).open("rb") as fh:
        return RecordingHeader.unpack(fh.read(HEADER_BYTES))


def read_chunks(path: str | Path, chunk_records: int = 4096) -> Iterator[RawChunk]:
    """Yield raw chunks from a recording; stops at the last complete record.

    A trailing partial record is logged as a warning, never an error.
    """
    p = Path(path)
    read_header(p)  # validates before any data flows
    size = p.stat().st_size
    payload = size - HEADER_BYTES
    if payload % RECORD_BYTES != 0:
        logger.warning(
            "%s: %d trailing bytes after the last complete record are ignored",
            p,
            payload % RECORD_BYTES,
        )
    total = payload // RECORD_BYTES
    with p.open("rb") as fh:
        fh.seek(HEADER_BYTES)
        remaining = total
        while remaining > 0:
            count = min(chunk_records, remaining)
            arr = np.fromfile(fh, dtype=RECORD_DTYPE, count=count)
            if len(arr) == 0:
                break
            remaining -= len(arr)
            yield RawChunk(
                t_ns=arr["t_ns"].astype(np.int64),
                status=arr["status"].copy(),
                codes=arr["codes"].copy(),
            )
