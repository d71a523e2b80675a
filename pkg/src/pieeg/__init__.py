"""Blink-controlled actuation pipeline for 8-channel biosignal acquisition.

A hardware-optional real-time chain: 27-byte frame codec, deterministic
signal simulator with ground-truth labels, streaming bandpass + FFT band-peak
features, dual-band threshold detectors, pin-pulse actuation, binary
record/replay, and a web-socket calibration server.
"""

from .actuate import (
    ActuatorCommand,
    MockPinSink,
    PinAssignment,
    PinMap,
    PinSink,
    PulseInterval,
    PulseLog,
    default_pin_map,
    dispatch,
    mock_sink_timeline,
)
from .detect import DetectionEvent, Detector, DetectorConfig, default_bank
from .dsp import (
    BandpassFilter,
    FilterSpec,
    SlidingWindow,
    SpectrumFrame,
    WindowSpec,
    band_peak,
    bandpass,
    fft_amplitude,
)
from .errors import (
    CalibrationError,
    CalibrationInfeasibleError,
    CodeRangeError,
    ConfigurationError,
    EmptyBandError,
    MalformedFrameError,
    PieegError,
    RecordingFormatError,
    RoutingError,
    SequencingError,
    SourceError,
    StreamIntegrityError,
)
from .frames import (
    DeviceConfig,
    RawChunk,
    RawFrame,
    SampleChunk,
    SampleVector,
    decode_frame,
    decode_frames,
    encode_frame,
    encode_frames,
    raw_to_volts,
    volts_to_raw,
)
from .server import StreamServer, serve
from .session import (
    CalibrationResult,
    LatencyReport,
    Session,
    SessionConfig,
    SessionSummary,
    SourceConfig,
    build_latency_report,
    calibrate_threshold,
    events_to_text,
    record,
    replay,
    run,
)
from .simulate import (
    BlinkEvent,
    BlinkLabel,
    BlinkScript,
    NoiseModel,
    Simulation,
    blink_rate_script,
    generate,
    load_script,
    save_script,
)

__version__ = "0.1.0"
