"""Command line entry point.

Subcommands: simulate, replay, acquire, serve, calibrate. A JSON
configuration file mirroring SessionConfig can seed any subcommand via
--config; individual flags override it. Exit codes: 0 success,
1 configuration error, 2 source error, 3 format error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import presets, session as session_mod
from .errors import (
    CalibrationError,
    ConfigurationError,
    PieegError,
    RecordingFormatError,
    SourceError,
)
from .frames import DeviceConfig
from .server import DEFAULT_PORT, StreamServer
from .session import Session, SessionConfig, SourceConfig, calibrate_threshold, run

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOURCE = 2
EXIT_FORMAT = 3


def _parse_band(text: str) -> tuple[float, float]:
    try:
        low, high = (float(p) for p in text.split(":"))
    except ValueError:
        raise ConfigurationError(f"--band must look like LO:HI, got {text!r}") from None
    return low, high


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="JSON session config file")
    p.add_argument("--rate", type=int, help="sample rate in SPS")
    p.add_argument("--gain", type=int, help="programmable gain")
    p.add_argument("--channel", type=int, help="analysis channel index 0-7")
    p.add_argument("--band", metavar="LO:HI", help="detector band in Hz (bandA)")
    p.add_argument("--threshold", metavar="UV", type=float,
                   help="detector threshold in uV (bandA; also enables it)")
    p.add_argument("--refractory", metavar="S", type=float,
                   help="detector refractory period in seconds (bandA)")
    p.add_argument("--pin", metavar="N", type=int, help="output pin for bandA")
    p.add_argument("--record", metavar="PATH", help="record raw frames to PATH")
    p.add_argument("--script", metavar="PATH", help="blink script file")
    p.add_argument("--speed", metavar="X", type=float,
                   help="playback speed multiplier (0 = as fast as possible)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pieeg",
        description="Blink-controlled actuation pipeline: simulate, replay, "
        "acquire, serve, calibrate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the pipeline on synthetic frames")
    _add_common_flags(p)
    p.add_argument("--duration", type=float, default=None, help="seconds to simulate")
    p.add_argument("--seed", type=int, default=None, help="noise seed")
    p.add_argument("--zero-noise", action="store_true", help="disable the noise floor")
    p.add_argument("--json", action="store_true", help="print the summary as JSON")

    p = sub.add_parser("replay", help="run the pipeline on a recording")
    p.add_argument("file", help="recording file")
    _add_common_flags(p)
    p.add_argument("--json", action="store_true", help="print the summary as JSON")

    p = sub.add_parser("acquire", help="run the pipeline on shield hardware")
    _add_common_flags(p)
    p.add_argument("--spi-bus", type=int, default=0)
    p.add_argument("--spi-device", type=int, default=0)

    p = sub.add_parser("serve", help="run a live session with the scope server")
    _add_common_flags(p)
    p.add_argument("--port", type=int, default=DEFAULT_PORT)
    p.add_argument("--host", default="127.0.0.1",
                   help="bind address (loopback unless exposed deliberately)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--duration", type=float, default=None)
    p.add_argument("--loop", action="store_true", default=None,
                   help="repeat the simulation indefinitely")
    p.add_argument("--replay-file", metavar="PATH", help="serve a recording instead")

    p = sub.add_parser("calibrate", help="suggest a detector threshold")
    _add_common_flags(p)
    p.add_argument("--duration", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--replay-file", metavar="PATH",
                   help="calibrate from a recording (needs --script labels)")
    p.add_argument("--margin", type=float, default=0.5,
                   help="threshold margin between noise p99 and blink median")
    return parser


def _base_config(args: argparse.Namespace) -> SessionConfig:
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise ConfigurationError(f"config file not found: {path}")
        try:
            return SessionConfig.from_dict(json.loads(path.read_text()))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config file is not valid JSON: {exc}") from exc
    return SessionConfig()


def _apply_flags(config: SessionConfig, args: argparse.Namespace) -> SessionConfig:
    device = config.device
    if getattr(args, "rate", None) is not None or getattr(args, "gain", None) is not None:
        device = DeviceConfig(
            sample_rate_sps=args.rate or device.sample_rate_sps,
            gain=args.gain or device.gain,
            vref_volts=device.vref_volts,
            channel_count=device.channel_count,
            metadata=device.metadata,
        )
        config = replace(config, device=device)
    if getattr(args, "channel", None) is not None:
        config = replace(config, analysis_channel=args.channel)
    if getattr(args, "record", None) is not None:
        config = replace(config, record_path=args.record)

    det_updates = {}
    if getattr(args, "band", None) is not None:
        det_updates["band_low_hz"], det_updates["band_high_hz"] = _parse_band(args.band)
    if getattr(args, "threshold", None) is not None:
        det_updates["threshold_uv"] = args.threshold
        det_updates["enabled"] = True
    if getattr(args, "refractory", None) is not None:
        det_updates["refractory_s"] = args.refractory
    if det_updates:
        detectors = []
        for det in config.detectors:
            if det.detector_id == "bandA":
                det = replace(det, **det_updates)
                det.validate()
            detectors.append(det)
        config = replace(config, detectors=tuple(detectors))
    if getattr(args, "pin", None) is not None:
        entries = dict(config.pin_map.entries)
        if "bandA" in entries:
            entries["bandA"] = replace(entries["bandA"], pin=args.pin)
            config = replace(config, pin_map=type(config.pin_map)(entries))

    source = config.source
    src_updates = {}
    if getattr(args, "script", None) is not None:
        src_updates["script_path"] = args.script
    if getattr(args, "speed", None) is not None:
        src_updates["speed"] = args.speed
    if getattr(args, "duration", None) not in (None,):
        src_updates["duration_s"] = args.duration
    if src_updates:
        source = replace(source, **src_updates)
        config = replace(config, source=source)
    return config


def _print_summary(summary, as_json: bool) -> None:
    if as_json:
        print(session_mod.summary_to_json(summary))
        return
    print(
        f"processed {summary.samples_processed} samples "
        f"({summary.windows_emitted} windows) in {summary.wall_seconds:.2f}s"
    )
    for det, count in summary.event_counts.items():
        print(f"  {det}: {count} events")
    for iv in summary.pulse_log:
        print(
            f"  pin {iv.pin}: {iv.assert_ns / 1e9:.3f}s -> {iv.release_ns / 1e9:.3f}s "
            f"({iv.cause})"
        )
    if summary.gaps:
        print(f"  {len(summary.gaps)} source gaps logged")
    if summary.latency is not None:
        print("  " + summary.latency.summary_text())


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = _apply_flags(_base_config(args), args)
    source = replace(config.source, kind="simulate")
    noise = source.noise
    if args.zero_noise:
        noise = replace(noise, white_rms_uv=0.0, pink_rms_uv=0.0, mains_amplitude_uv=0.0)
    if args.seed is not None:
        noise = replace(noise, seed=args.seed)
    source = replace(source, noise=noise)
    config = replace(config, source=source)
    config.validate()
    summary = run(config)
    _print_summary(summary, args.json)
    return EXIT_OK


def _cmd_replay(args: argparse.Namespace) -> int:
    config = _apply_flags(_base_config(args), args)
    source = replace(
        config.source, kind="replay", path=args.file,
        speed=args.speed if args.speed is not None else 0.0,
    )
    config = replace(config, source=source)
    config.validate()
    summary = run(config)
    _print_summary(summary, args.json)
    return EXIT_OK


def _cmd_acquire(args: argparse.Namespace) -> int:
    config = _apply_flags(_base_config(args), args)
    source = replace(
        config.source, kind="hardware", spi_bus=args.spi_bus, spi_device=args.spi_device
    )
    config = replace(config, source=source)
    config.validate()
    session = Session(config).start()
    print("acquiring; interrupt to stop", file=sys.stderr)
    try:
        summary = session.join()
    except KeyboardInterrupt:
        session.stop()
        summary = session.join()
    _print_summary(summary, False)
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    if getattr(args, "config", None):
        config = _apply_flags(_base_config(args), args)
    elif args.replay_file:
        config = SessionConfig(
            source=SourceConfig(kind="replay", path=args.replay_file,
                                speed=args.speed if args.speed is not None else 1.0)
        )
        config = _apply_flags(config, args)
    else:
        config = presets.demo_session(seed=args.seed)
        config = _apply_flags(config, args)
        if args.loop is not None:
            config = replace(config, source=replace(config.source, loop=args.loop))
    config.validate()

    session = Session(config)
    server = StreamServer(session, host=args.host, port=args.port)
    session.set_broadcast(server.publish)
    server.start()
    session.start()
    print(f"serving ws://{args.host}:{server.port}/stream", flush=True)
    try:
        session.join()
    except KeyboardInterrupt:
        session.stop()
        session.join()
    finally:
        server.stop()
    return EXIT_OK


def _cmd_calibrate(args: argparse.Namespace) -> int:
    config = _apply_flags(_base_config(args), args)
    labels = None
    if args.replay_file:
        from .recording import read_header
        from .simulate import load_labels

        if not args.script:
            raise ConfigurationError("calibrating a recording needs --script labels")
        header = read_header(args.replay_file)
        labels = load_labels(args.script, header.sample_rate_sps)
        config = replace(
            config, source=replace(config.source, kind="replay", path=args.replay_file)
        )
    else:
        source = replace(config.source, kind="simulate")
        if args.seed is not None:
            source = replace(source, noise=presets.standard_noise(args.seed))
        if args.duration is not None:
            source = replace(source, duration_s=args.duration)
        if not source.script_path and source.script is None:
            source = replace(source, script=presets.standard_script())
        config = replace(config, source=source)
    config.validate()

    band = _parse_band(args.band) if args.band else (3.0, 7.0)
    result = calibrate_threshold(
        config, band[0], band[1], target_margin=args.margin, labels=labels
    )
    print(f"suggested threshold: {result.threshold_uv:.3f} uV")
    print(
        f"  blink windows: n={len(result.blink_peaks_uv)} "
        f"median={result.blink_median_uv:.3f} uV"
    )
    print(
        f"  noise windows: n={len(result.noise_peaks_uv)} "
        f"p99={result.noise_p99_uv:.3f} uV"
    )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "replay": _cmd_replay,
        "acquire": _cmd_acquire,
        "serve": _cmd_serve,
        "calibrate": _cmd_calibrate,
    }
    try:
        return handlers[args.command](args)
    except (ConfigurationError, CalibrationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RecordingFormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (SourceError, OSError) as exc:
        print(f"source error: {exc}", file=sys.stderr)
        return EXIT_SOURCE
    except PieegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOURCE


if __name__ == "__main__":
    sys.exit(main())
