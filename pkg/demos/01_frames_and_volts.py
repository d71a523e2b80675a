"""Frame codec walkthrough: wire bytes, channel codes, and voltage scaling.

Run: python demos/01_frames_and_volts.py
"""

import numpy as np

from pieeg import DeviceConfig, RawFrame, decode_frame, encode_frame, raw_to_volts

device = DeviceConfig(sample_rate_sps=250, gain=24, vref_volts=4.5)

print("A frame is 27 bytes: 3 status + 8 channels x 3 bytes, big-endian groups.")
frame = RawFrame(status=0xC00000, channel_raw=(0, 1, -1, 4474, -4474, 8388607, -8388608, 42))
wire = encode_frame(frame)
print(f"  encoded: {wire.hex(' ')}")

back = decode_frame(wire, device)
assert back == frame
print("  decode(encode(frame)) == frame")

print("\nCode -> volts at each gain (code 4474, vref 4.5 V):")
for gain in (1, 2, 4, 6, 8, 12, 24):
    cfg = DeviceConfig(gain=gain)
    volts = raw_to_volts(4474, cfg)
    print(f"  gain {gain:2d}: {volts * 1e6:10.3f} uV   (LSB = {cfg.lsb_volts * 1e9:.2f} nV)")

print("\nFull scale is +/- vref/gain; the most negative code hits it exactly:")
print(f"  gain 1 : {raw_to_volts(-(2**23), DeviceConfig(gain=1)):+.6f} V")
print(f"  gain 24: {raw_to_volts(-(2**23), DeviceConfig(gain=24)):+.6f} V")

rng = np.random.default_rng(0)
codes = rng.integers(-(2**23), 2**23, 1000)
assert all(
    decode_frame(encode_frame(RawFrame(0, tuple(int(c) for c in codes[i : i + 8]))), device)
    == RawFrame(0, tuple(int(c) for c in codes[i : i + 8]))
    for i in range(0, 80, 8)
)
print("\nRound-tripped a batch of random frames bit-exactly.")
