"""Recording format and replay determinism.

Run: python demos/05_record_replay.py
"""

import tempfile
from dataclasses import replace
from pathlib import Path

from pieeg import presets
from pieeg.recording import read_header
from pieeg.session import SourceConfig, calibrate_threshold, events_to_text, run

workdir = Path(tempfile.mkdtemp(prefix="pieeg-demo-"))
rec = workdir / "session.pieg"

cfg = presets.standard_session(seed=5, record_path=str(rec))
cal = calibrate_threshold(cfg, 3.0, 7.0)
cfg = replace(cfg, detectors=presets.standard_detectors(threshold_a_uv=cal.threshold_uv))

live = run(cfg)
header = read_header(rec)
print(f"recorded {rec.stat().st_size} bytes "
      f"(32-byte header + 44 x {live.samples_processed} records)")
print(f"header: rate {header.sample_rate_sps} SPS, gain {header.gain}, "
      f"vref {header.vref_volts} V, session {header.session_id:#x}")

replayed = run(replace(cfg, source=SourceConfig(kind="replay", path=str(rec)),
                       record_path=None))

live_log = events_to_text(live.events)
replay_log = events_to_text(replayed.events)
print(f"\nlive events:   {len(live.events)}")
print(f"replay events: {len(replayed.events)}")
print(f"event logs byte-identical: {live_log.encode() == replay_log.encode()}")
print("\nfirst lines of the shared log:")
for line in live_log.splitlines()[:3]:
    print("  " + line)
