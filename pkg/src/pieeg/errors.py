"""Exception hierarchy shared across the package."""


class PieegError(Exception):
    """Base class for all package errors."""


class ConfigurationError(PieegError, ValueError):
    """A configuration value violates its contract."""


class MalformedFrameError(PieegError, ValueError):
    """A wire frame cannot be decoded (wrong length)."""


class CodeRangeError(PieegError, ValueError):
    """A channel code falls outside the signed 24-bit range."""


class StreamIntegrityError(PieegError):
    """Timestamps went backwards on a path that requires monotone order."""


class EmptyBandError(PieegError, ValueError):
    """A frequency band contains no spectrum bin centers."""


class RoutingError(PieegError):
    """A detection event names a detector with no pin mapping."""


class SequencingError(PieegError):
    """Actuator commands arrived out of order on a pin."""


class RecordingFormatError(PieegError):
    """A recording file fails header or structural validation."""


class CalibrationError(PieegError):
    """Calibration input does not meet its preconditions."""


class CalibrationInfeasibleError(CalibrationError):
    """Blink and noise peak distributions overlap too much to separate.

    Carries the two statistics so the caller can report them.
    """

    def __init__(self, blink_median_uv: float, noise_p99_uv: float):
        self.blink_median_uv = blink_median_uv
        self.noise_p99_uv = noise_p99_uv
        super().__init__(
            "calibration infeasible: blink median %.3f uV <= noise p99 %.3f uV"
            % (blink_median_uv, noise_p99_uv)
        )


class SourceError(PieegError):
    """A sample source failed to start or deliver frames."""
