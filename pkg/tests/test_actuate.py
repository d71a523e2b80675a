"""Event-to-pulse dispatch, coalescing, and the mock sink timeline.

The coalescing oracle is a brute-force boolean timeline at 1 ms resolution:
mark every pulse's span, then read the asserted intervals back off it.
"""

import numpy as np
import pytest

from pieeg.actuate import (
    ActuatorCommand,
    MockPinSink,
    PinAssignment,
    PinMap,
    default_pin_map,
    dispatch,
    mock_sink_timeline,
)
from pieeg.detect import DetectionEvent
from pieeg.errors import ConfigurationError, RoutingError, SequencingError

NS = 1_000_000_000
MS = 1_000_000


def event(detector_id: str, t_s: float) -> DetectionEvent:
    return DetectionEvent(detector_id, int(t_s * NS), 5.0, 120.0, 100.0)


def commands_for(events, pin_map=None):
    pin_map = pin_map or default_pin_map()
    cmds = []
    for ev in events:
        cmds.extend(dispatch(ev, pin_map))
    return sorted(cmds, key=lambda c: (c.t_ns, not c.level))


def union_oracle(pulses: list[tuple[int, int, int]]) -> list[tuple[int, int, int]]:
    """pulses: (pin, assert_ms, release_ms) -> union intervals per pin, 1 ms grid."""
    out = []
    for pin in sorted({p for p, _, _ in pulses}):
        spans = [(a, r) for p, a, r in pulses if p == pin]
        hi = max(r for _, r in spans) + 2
        line = np.zeros(hi, dtype=bool)
        for a, r in spans:
            line[a:r] = True
        edges = np.flatnonzero(np.diff(line.astype(int)))
        starts = edges[::2] + 1
        ends = edges[1::2] + 1
        out.extend((pin, int(s), int(e)) for s, e in zip(starts, ends))
    return sorted(out)


def test_dispatch_band_a_hits_pin_31():
    assert_cmd, release_cmd = dispatch(event("bandA", 1.0), default_pin_map())
    assert assert_cmd.pin == release_cmd.pin == 31
    assert assert_cmd.level and not release_cmd.level
    assert release_cmd.t_ns - assert_cmd.t_ns == 500 * MS


def test_dispatch_band_b_hits_pin_35():
    assert_cmd, _ = dispatch(event("bandB", 1.0), default_pin_map())
    assert assert_cmd.pin == 35


def test_dispatch_unmapped_detector_names_it():
    with pytest.raises(RoutingError) as exc:
        dispatch(event("bandC", 1.0), default_pin_map())
    assert "bandC" in str(exc.value)


def test_pin_map_validation():
    with pytest.raises(ConfigurationError):
        PinMap({"a": PinAssignment(31), "b": PinAssignment(31)})
    with pytest.raises(ConfigurationError):
        PinAssignment(31, pulse_ms=0)
    with pytest.raises(ConfigurationError):
        PinAssignment(31, active_level="mid")


def test_single_pulse_interval():
    log = mock_sink_timeline(commands_for([event("bandA", 1.0)]))
    assert len(log) == 1
    iv = log.intervals[0]
    assert (iv.pin, iv.assert_ns, iv.release_ns) == (31, NS, NS + 500 * MS)
    assert iv.cause == "bandA"


def test_overlapping_pulses_coalesce_to_700ms():
    log = mock_sink_timeline(commands_for([event("bandA", 1.0), event("bandA", 1.2)]))
    assert len(log) == 1
    iv = log.intervals[0]
    assert iv.duration_ns == 700 * MS
    assert iv.causes == ("bandA", "bandA")


def test_empty_stream_empty_log():
    assert len(mock_sink_timeline([])) == 0


def test_timeline_matches_brute_force_union():
    rng = np.random.default_rng(41)
    for _ in range(20):
        times = np.sort(rng.choice(np.arange(100, 5000, 10), size=8, replace=False))
        events = [event("bandA", t / 1000) for t in times] + [
            event("bandB", t / 1000 + 0.05) for t in times[:4]
        ]
        events.sort(key=lambda e: e.t_ns)
        log = mock_sink_timeline(commands_for(events))
        got = sorted(
            (iv.pin, iv.assert_ns // MS, iv.release_ns // MS) for iv in log.intervals
        )
        pin_map = default_pin_map()
        expected = union_oracle(
            [
                (pin_map[e.detector_id].pin, e.t_ns // MS, e.t_ns // MS + 500)
                for e in events
            ]
        )
        assert got == expected


def test_intervals_never_overlap_per_pin():
    rng = np.random.default_rng(42)
    times = np.sort(rng.integers(0, 20_000, 50)) / 1000
    log = mock_sink_timeline(commands_for([event("bandA", t) for t in times]))
    per_pin = [iv for iv in log.intervals if iv.pin == 31]
    for a, b in zip(per_pin, per_pin[1:]):
        assert a.release_ns < b.assert_ns


def test_causality_every_interval_traces_to_an_event():
    events = [event("bandA", 1.0), event("bandB", 1.1), event("bandA", 3.0)]
    log = mock_sink_timeline(commands_for(events))
    starts = {(e.detector_id, e.t_ns) for e in events}
    for iv in log.intervals:
        assert (iv.cause, iv.assert_ns) in starts
        assert all(c == iv.cause for c in iv.causes) or iv.pin in (31, 35)


def test_two_band_independence():
    events = [event("bandA", 1.0), event("bandB", 1.05), event("bandA", 2.5)]
    log = mock_sink_timeline(commands_for(events))
    assert all(iv.causes == tuple("bandA" for _ in iv.causes) for iv in log.query(pin=31))
    assert all(iv.causes == tuple("bandB" for _ in iv.causes) for iv in log.query(pin=35))


def test_release_before_assert_rejected():
    with pytest.raises(SequencingError):
        mock_sink_timeline([ActuatorCommand(31, False, NS, "bandA")])


def test_unreleased_pin_rejected():
    with pytest.raises(SequencingError):
        mock_sink_timeline([ActuatorCommand(31, True, NS, "bandA")])


def test_out_of_order_commands_rejected():
    cmds = [
        ActuatorCommand(31, True, 2 * NS, "bandA"),
        ActuatorCommand(31, False, NS, "bandA"),
    ]
    with pytest.raises(SequencingError):
        mock_sink_timeline(cmds)


def test_mock_sink_incremental_matches_batch():
    events = [event("bandA", 1.0), event("bandA", 1.2), event("bandA", 3.0),
              event("bandB", 1.1)]
    sink = MockPinSink()
    opened = []
    for ev in events:
        pair = dispatch(ev, default_pin_map())
        opened.append(sink.submit_pulse(*pair))
    log = sink.close()
    batch = mock_sink_timeline(commands_for(events))
    assert [(iv.pin, iv.assert_ns, iv.release_ns) for iv in log.intervals] == [
        (iv.pin, iv.assert_ns, iv.release_ns) for iv in batch.intervals
    ]
    assert opened == [True, False, True, True]  # extension does not re-assert


def test_mock_sink_advance_closes_matured():
    sink = MockPinSink()
    sink.submit_pulse(*dispatch(event("bandA", 1.0), default_pin_map()))
    assert sink.advance(int(1.2 * NS)) == []
    closed = sink.advance(int(1.6 * NS))
    assert [iv.release_ns for iv in closed] == [int(1.5 * NS)]


def test_query_and_export(tmp_path):
    events = [event("bandA", 1.0), event("bandB", 2.0)]
    log = mock_sink_timeline(commands_for(events))
    assert [iv.pin for iv in log.query(pin=35)] == [35]
    assert log.query(start_ns=int(1.9 * NS)) == log.query(pin=35)
    path = tmp_path / "pulses.txt"
    log.save(path)
    lines = path.read_text().splitlines()
    assert lines[0] == f"31,{NS},{NS + 500 * MS},bandA"
    assert lines[1].startswith("35,")
