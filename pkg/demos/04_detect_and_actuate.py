"""Full desk pipeline: calibrate both bands, run, inspect events and pulses.

Run: python demos/04_detect_and_actuate.py
"""

from dataclasses import replace

from pieeg import presets
from pieeg.session import calibrate_threshold, run

cfg = presets.standard_session(seed=11)
print("Calibrating both detector bands on the standard 10-blink scenario...")
cal_a = calibrate_threshold(cfg, 3.0, 7.0, target_margin=0.5)
cal_b = calibrate_threshold(cfg, 1.0, 3.0, target_margin=0.5)
print(f"  bandA (3-7 Hz): noise p99 {cal_a.noise_p99_uv:.2f} uV, "
      f"blink median {cal_a.blink_median_uv:.2f} uV -> threshold {cal_a.threshold_uv:.2f} uV")
print(f"  bandB (1-3 Hz): noise p99 {cal_b.noise_p99_uv:.2f} uV, "
      f"blink median {cal_b.blink_median_uv:.2f} uV -> threshold {cal_b.threshold_uv:.2f} uV")

cfg = replace(cfg, detectors=presets.standard_detectors(
    threshold_a_uv=cal_a.threshold_uv, threshold_b_uv=cal_b.threshold_uv))
summary = run(cfg)

print(f"\nEvents: {summary.event_counts}")
for ev in summary.events[:6]:
    print(f"  {ev.detector_id} at {ev.t_ns / 1e9:6.2f} s: "
          f"{ev.peak_uv:6.2f} uV @ {ev.peak_hz:.0f} Hz (threshold {ev.threshold_uv:.2f})")
print("  ...")

print("\nPulse timeline (coalesced per pin):")
for iv in summary.pulse_log.intervals[:6]:
    print(f"  pin {iv.pin}: {iv.assert_ns / 1e9:6.2f} -> {iv.release_ns / 1e9:6.2f} s "
          f"({iv.duration_ns / 1e6:.0f} ms, {iv.cause})")
print("  ...")

report = summary.latency
print(f"\nAgainst ground truth: {report.summary_text()}")
