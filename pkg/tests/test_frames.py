"""Frame codec and voltage scaling.

The sign-extension oracle is int.from_bytes(..., signed=True), independent
of the codec's manual bit arithmetic; scaling checks use the closed-form
code * vref / (gain * 2**23) evaluated inline.
"""

import numpy as np
import pytest

from pieeg.errors import CodeRangeError, ConfigurationError, MalformedFrameError
from pieeg.frames import (
    ALLOWED_GAINS,
    ALLOWED_SAMPLE_RATES,
    CODE_MAX,
    CODE_MIN,
    DeviceConfig,
    RawFrame,
    decode_frame,
    decode_frames,
    encode_frame,
    encode_frames,
    raw_to_volts,
    volts_to_raw,
)

CFG = DeviceConfig()


def _oracle_code(group: bytes) -> int:
    return int.from_bytes(group, "big", signed=True)


def test_decode_zero_frame():
    frame = decode_frame(bytes(27), CFG)
    assert frame.status == 0
    assert frame.channel_raw == (0,) * 8


def test_decode_sign_extension_extremes():
    buf = bytes(3) + b"\x80\x00\x00" + b"\x7f\xff\xff" + bytes(18)
    frame = decode_frame(buf, CFG)
    assert frame.channel_raw[0] == _oracle_code(b"\x80\x00\x00") == -(2**23) == -8388608
    assert frame.channel_raw[1] == _oracle_code(b"\x7f\xff\xff") == 2**23 - 1 == 8388607


def test_decode_random_bytes_against_oracle():
    rng = np.random.default_rng(101)
    for _ in range(200):
        buf = bytes(rng.integers(0, 256, 27, dtype=np.uint8))
        frame = decode_frame(buf, CFG)
        assert frame.status == int.from_bytes(buf[:3], "big")
        for k in range(8):
            assert frame.channel_raw[k] == _oracle_code(buf[3 + 3 * k : 6 + 3 * k])


@pytest.mark.parametrize("length", [0, 1, 26, 28, 54])
def test_decode_wrong_length_names_both_lengths(length):
    with pytest.raises(MalformedFrameError) as exc:
        decode_frame(bytes(length), CFG)
    assert "27" in str(exc.value)
    assert str(length) in str(exc.value)


def test_encode_zero_frame():
    assert encode_frame(RawFrame(0, (0,) * 8)) == bytes(27)


def test_encode_minus_one_is_all_ff():
    frame = RawFrame(0, (-1,) + (0,) * 7)
    assert encode_frame(frame)[3:6] == b"\xff\xff\xff"


def test_encode_out_of_range_code_rejected():
    with pytest.raises(CodeRangeError):
        RawFrame(0, (2**23,) + (0,) * 7)
    with pytest.raises(CodeRangeError):
        RawFrame(0, (-(2**23) - 1,) + (0,) * 7)


def test_roundtrip_random_frames():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        frame = RawFrame(
            status=int(rng.integers(0, 1 << 24)),
            channel_raw=tuple(int(c) for c in rng.integers(CODE_MIN, CODE_MAX + 1, 8)),
        )
        assert decode_frame(encode_frame(frame), CFG) == frame


def test_roundtrip_random_bytes():
    # encode(decode(b)) == b for arbitrary 27-byte input
    rng = np.random.default_rng(8)
    for _ in range(1000):
        buf = bytes(rng.integers(0, 256, 27, dtype=np.uint8))
        assert encode_frame(decode_frame(buf, CFG)) == buf


def test_vectorized_codec_matches_scalar():
    rng = np.random.default_rng(9)
    frames = [
        RawFrame(
            status=int(rng.integers(0, 1 << 24)),
            channel_raw=tuple(int(c) for c in rng.integers(CODE_MIN, CODE_MAX + 1, 8)),
        )
        for _ in range(64)
    ]
    blob = b"".join(encode_frame(f) for f in frames)
    status, codes = decode_frames(blob, CFG)
    for i, f in enumerate(frames):
        assert status[i] == f.status
        assert tuple(codes[i]) == f.channel_raw
    assert encode_frames(status, codes) == blob


def test_raw_to_volts_zero_is_exact():
    for gain in ALLOWED_GAINS:
        cfg = DeviceConfig(gain=gain)
        assert raw_to_volts(0, cfg) == 0.0


def test_raw_to_volts_negative_full_scale_gain1():
    cfg = DeviceConfig(gain=1, vref_volts=4.5)
    assert raw_to_volts(-(2**23), cfg) == -4.5


def test_raw_to_volts_positive_full_scale_gain24():
    cfg = DeviceConfig(gain=24, vref_volts=4.5)
    expected = (4.5 / 24) * (1 - 2**-23)  # 0.18749997764825821
    assert raw_to_volts(2**23 - 1, cfg) == pytest.approx(expected, rel=1e-15)
    assert abs(expected - 0.1874999776) < 1e-10


def test_raw_to_volts_monotone_and_bounded():
    rng = np.random.default_rng(11)
    codes = np.sort(rng.integers(CODE_MIN, CODE_MAX + 1, 500))
    for gain in ALLOWED_GAINS:
        cfg = DeviceConfig(gain=gain)
        v = raw_to_volts(codes.astype(np.float64), cfg)
        assert np.all(np.diff(v) >= 0)
        assert np.all(np.abs(v) <= cfg.vref_volts / gain + 1e-15)


def test_raw_to_volts_scales_inverse_with_gain():
    rng = np.random.default_rng(12)
    codes = rng.integers(CODE_MIN, CODE_MAX + 1, 100)
    base = raw_to_volts(codes.astype(np.float64), DeviceConfig(gain=1))
    for gain in ALLOWED_GAINS:
        v = raw_to_volts(codes.astype(np.float64), DeviceConfig(gain=gain))
        np.testing.assert_allclose(v, base / gain, rtol=1e-12)


def test_volts_to_raw_inverts_raw_to_volts():
    rng = np.random.default_rng(13)
    codes = rng.integers(CODE_MIN, CODE_MAX + 1, 1000)
    for gain in (1, 24):
        cfg = DeviceConfig(gain=gain)
        back = volts_to_raw(raw_to_volts(codes.astype(np.float64), cfg), cfg)
        np.testing.assert_array_equal(back, codes.astype(np.int32))


def test_volts_to_raw_clamps():
    cfg = DeviceConfig(gain=1)
    assert volts_to_raw(100.0, cfg) == CODE_MAX
    assert volts_to_raw(-100.0, cfg) == CODE_MIN


def test_device_config_validation():
    with pytest.raises(ConfigurationError):
        DeviceConfig(sample_rate_sps=300)
    with pytest.raises(ConfigurationError):
        DeviceConfig(gain=3)
    with pytest.raises(ConfigurationError):
        DeviceConfig(channel_count=4)
    with pytest.raises(ConfigurationError):
        DeviceConfig(vref_volts=0.0)
    assert set(ALLOWED_SAMPLE_RATES) == {250, 500, 1000, 2000, 4000, 8000, 16000}
    assert set(ALLOWED_GAINS) == {1, 2, 4, 6, 8, 12, 24}


def test_sample_period_exact_for_all_rates():
    for rate in ALLOWED_SAMPLE_RATES:
        cfg = DeviceConfig(sample_rate_sps=rate)
        assert cfg.sample_period_ns * rate == 1_000_000_000


def test_frame_to_sample_within_full_scale():
    from pieeg.frames import frame_to_sample

    rng = np.random.default_rng(14)
    for gain in ALLOWED_GAINS:
        cfg = DeviceConfig(gain=gain)
        frame = RawFrame(
            status=0,
            channel_raw=tuple(int(c) for c in rng.integers(CODE_MIN, CODE_MAX + 1, 8)),
        )
        sample = frame_to_sample(frame, 12, cfg)
        assert sample.t_ns == 12
        assert all(abs(v) <= cfg.full_scale_volts for v in sample.volts)


def test_chunk_to_volts_shape_and_bound():
    from pieeg.frames import RawChunk

    rng = np.random.default_rng(15)
    cfg = DeviceConfig(gain=24)
    chunk = RawChunk(
        t_ns=np.arange(10, dtype=np.int64),
        status=np.zeros(10, dtype=np.uint32),
        codes=rng.integers(CODE_MIN, CODE_MAX + 1, (10, 8)).astype(np.int32),
    )
    sample_chunk = chunk.to_volts(cfg)
    assert sample_chunk.volts.shape == (10, 8)
    assert np.all(np.abs(sample_chunk.volts) <= cfg.full_scale_volts)
