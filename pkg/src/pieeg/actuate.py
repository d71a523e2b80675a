"""Map detection events to discrete output-pin pulses.

Pins use board numbering. Each event becomes an (assert, release) command
pair ``pulse_ms`` apart; pulses that overlap on one pin coalesce into a
single interval whose release extends to the latest deadline, so rapid
double-detections lengthen an actuation rather than dropping or retriggering
it. The mock sink records a queryable pulse timeline; driving real header
pins is an adapter with the same contract, deliberately outside this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Protocol

from .detect import DetectionEvent
from .errors import ConfigurationError, RoutingError, SequencingError

NS_PER_MS = 1_000_000


@dataclass(frozen=True)
class PinAssignment:
    pin: int
    pulse_ms: int = 500
    active_level: str = "high"

    def __post_init__(self) -> None:
        if self.pulse_ms <= 0:
            raise ConfigurationError(f"pulse_ms must be > 0, got {self.pulse_ms}")
        if self.active_level not in ("high", "low"):
            raise ConfigurationError(
                f"active_level must be 'high' or 'low', got {self.active_level!r}"
            )


@dataclass(frozen=True)
class PinMap:
    entries: Mapping[str, PinAssignment]

    def __post_init__(self) -> None:
        pins = [a.pin for a in self.entries.values()]
        if len(set(pins)) != len(pins):
            raise ConfigurationError(f"pins must be unique across entries, got {pins}")

    def __getitem__(self, detector_id: str) -> PinAssignment:
        return self.entries[detector_id]

    def to_dict(self) -> dict:
        return {
            det: {"pin": a.pin, "pulse_ms": a.pulse_ms, "active_level": a.active_level}
            for det, a in self.entries.items()
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PinMap":
        return cls(
            {
                det: PinAssignment(
                    pin=int(v["pin"]),
                    pulse_ms=int(v.get("pulse_ms", 500)),
                    active_level=str(v.get("active_level", "high")),
                )
                for det, v in d.items()
            }
        )


def default_pin_map() -> PinMap:
    """Stock mapping: bandA pulses pin 31, bandB pulses pin 35."""
    return PinMap({"bandA": PinAssignment(31), "bandB": PinAssignment(35)})


@dataclass(frozen=True)
class ActuatorCommand:
    pin: int
    level: bool
    t_ns: int
    cause: str


def dispatch(event: DetectionEvent, pin_map: PinMap) -> tuple[ActuatorCommand, ActuatorCommand]:
    """Turn one event into an (assert, release) command pair."""
    try:
        assignment = pin_map[event.detector_id]
    except KeyError:
        raise RoutingError(
            f"no pin mapped for detector {event.detector_id!r}"
        ) from None
    assert_cmd = ActuatorCommand(
        pin=assignment.pin, level=True, t_ns=event.t_ns, cause=event.detector_id
    )
    release_cmd = ActuatorCommand(
        pin=assignment.pin,
        level=False,
        t_ns=event.t_ns + assignment.pulse_ms * NS_PER_MS,
        cause=event.detector_id,
    )
    return assert_cmd, release_cmd


@dataclass(frozen=True)
class PulseInterval:
    pin: int
    assert_ns: int
    release_ns: int
    causes: tuple[str, ...]

    @property
    def cause(self) -> str:
        return self.causes[0]

    @property
    def duration_ns(self) -> int:
        return self.release_ns - self.assert_ns


@dataclass
class PulseLog:
    """Ordered pulse intervals, queryable by pin and time range."""

    intervals: list[PulseInterval] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def query(
        self,
        pin: int | None = None,
        start_ns: int | None = None,
        end_ns: int | None = None,
    ) -> list[PulseInterval]:
        out = []
        for iv in self.intervals:
            if pin is not None and iv.pin != pin:
                continue
            if start_ns is not None and iv.release_ns < start_ns:
                continue
            if end_ns is not None and iv.assert_ns > end_ns:
                continue
            out.append(iv)
        return out

    def to_text(self) -> str:
        """Export as ``pin,assert_ns,release_ns,cause`` lines."""
        return "".join(
            f"{iv.pin},{iv.assert_ns},{iv.release_ns},{iv.cause}\n"
            for iv in self.intervals
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text())


class PinSink(Protocol):
    """Contract shared by the mock sink and any physical pin adapter.

    A hardware implementation (memory-mapped pin control on a single-board
    computer) plugs in here with identical semantics; it stays outside the
    desk-scale suite.
    """

    def submit_pulse(self, assert_cmd: ActuatorCommand, release_cmd: ActuatorCommand) -> bool: ...

    def advance(self, now_ns: int) -> list[PulseInterval]: ...

    def close(self) -> PulseLog: ...


class MockPinSink:
    """Records pulses instead of driving hardware; coalesces per pin.

    ``submit_pulse`` returns True when the pin transitioned idle -> asserted
    (an extension returns False), so callers can mirror transitions to a UI.
    ``advance`` closes intervals whose deadline has passed.
    """

    def __init__(self):
        # pin -> [assert_ns, release_ns, causes, last_assert_ns]
        self._open: dict[int, list] = {}
        self._log = PulseLog()

    def submit_pulse(self, assert_cmd: ActuatorCommand, release_cmd: ActuatorCommand) -> bool:
        if assert_cmd.pin != release_cmd.pin:
            raise SequencingError("assert/release pair must target one pin")
        if release_cmd.t_ns < assert_cmd.t_ns:
            raise SequencingError(
                f"release at {release_cmd.t_ns} precedes assert at {assert_cmd.t_ns} "
                f"on pin {assert_cmd.pin}"
            )
        pin, a, r = assert_cmd.pin, assert_cmd.t_ns, release_cmd.t_ns
        state = self._open.get(pin)
        if state is not None:
            if a < state[3]:
                raise SequencingError(
                    f"pulse at {a} arrived before prior assert {state[3]} on pin {pin}"
                )
            if a <= state[1]:  # overlaps: extend to the latest deadline
                state[1] = max(state[1], r)
                state[2].append(assert_cmd.cause)
                state[3] = a
                return False
            self._close(pin)
        self._open[pin] = [a, r, [assert_cmd.cause], a]
        return True

    def _close(self, pin: int) -> PulseInterval:
        a, r, causes, _ = self._open.pop(pin)
        iv = PulseInterval(pin=pin, assert_ns=a, release_ns=r, causes=tuple(causes))
        self._log.intervals.append(iv)
        return iv

    def advance(self, now_ns: int) -> list[PulseInterval]:
        """Close every open interval whose release deadline is <= now_ns."""
        closed = []
        for pin in [p for p, s in self._open.items() if s[1] <= now_ns]:
            closed.append(self._close(pin))
        return closed

    def close(self) -> PulseLog:
        """Flush all open intervals and return the completed log."""
        for pin in list(self._open):
            self._close(pin)
        self._log.intervals.sort(key=lambda iv: (iv.assert_ns, iv.pin))
        return self._log


def mock_sink_timeline(commands: Iterable[ActuatorCommand]) -> PulseLog:
    """Fold a time-ordered command stream into a coalesced pulse log.

    Commands must be time-ordered per pin; a release with no matching assert
    raises SequencingError. Overlap is resolved by depth counting, which is
    exactly interval union.
    """
    depth: dict[int, int] = {}
    start: dict[int, int] = {}
    causes: dict[int, list[str]] = {}
    last_t: dict[int, int] = {}
    log = PulseLog()
    for cmd in commands:
        if cmd.pin in last_t and cmd.t_ns < last_t[cmd.pin]:
            raise SequencingError(
                f"command at {cmd.t_ns} out of order on pin {cmd.pin} "
                f"(last {last_t[cmd.pin]})"
            )
        last_t[cmd.pin] = cmd.t_ns
        d = depth.get(cmd.pin, 0)
        if cmd.level:
            if d == 0:
                start[cmd.pin] = cmd.t_ns
                causes[cmd.pin] = [cmd.cause]
            else:
                causes[cmd.pin].append(cmd.cause)
            depth[cmd.pin] = d + 1
        else:
            if d == 0:
                raise SequencingError(
                    f"release at {cmd.t_ns} before any assert on pin {cmd.pin}"
                )
            depth[cmd.pin] = d - 1
            if depth[cmd.pin] == 0:
                log.intervals.append(
                    PulseInterval(
                        pin=cmd.pin,
                        assert_ns=start.pop(cmd.pin),
                        release_ns=cmd.t_ns,
                        causes=tuple(causes.pop(cmd.pin)),
                    )
                )
    dangling = [pin for pin, d in depth.items() if d > 0]
    if dangling:
        raise SequencingError(f"stream ended with unreleased pins {sorted(dangling)}")
    log.intervals.sort(key=lambda iv: (iv.assert_ns, iv.pin))
    return log
