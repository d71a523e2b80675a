"""Command line surface: subcommands, flag overrides, exit codes."""

import json

from pieeg.cli import EXIT_CONFIG, EXIT_FORMAT, EXIT_OK, EXIT_SOURCE, main
from pieeg.recording import read_header


def write_script(tmp_path, amplitude=100.0):
    path = tmp_path / "blinks.txt"
    lines = ["# onset,duration,amplitude"]
    for k in range(10):
        lines.append(f"{3.0 + k},0.3,{amplitude}")
    path.write_text("\n".join(lines) + "\n")
    return path


def test_simulate_runs_and_reports(tmp_path, capsys):
    script = write_script(tmp_path)
    rc = main([
        "simulate", "--script", str(script), "--duration", "16", "--seed", "1",
        "--threshold", "9.2", "--refractory", "0.75",
    ])
    out = capsys.readouterr().out
    assert rc == EXIT_OK
    assert "bandA" in out
    assert "detected" in out  # latency summary printed for labeled runs


def test_simulate_json_summary(tmp_path, capsys):
    script = write_script(tmp_path)
    rc = main([
        "simulate", "--script", str(script), "--duration", "16", "--seed", "1",
        "--threshold", "9.2", "--refractory", "0.75", "--json",
    ])
    assert rc == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["event_counts"]["bandA"] >= 8
    assert payload["latency"]["detected"] >= 8


def test_simulate_records_file(tmp_path, capsys):
    script = write_script(tmp_path)
    rec = tmp_path / "out.pieg"
    rc = main([
        "simulate", "--script", str(script), "--duration", "16", "--seed", "2",
        "--record", str(rec), "--rate", "500", "--gain", "12",
    ])
    assert rc == EXIT_OK
    header = read_header(rec)
    assert header.sample_rate_sps == 500
    assert header.gain == 12
    assert rec.stat().st_size == 32 + 44 * 8000


def test_replay_runs_recording(tmp_path, capsys):
    script = write_script(tmp_path)
    rec = tmp_path / "out.pieg"
    assert main([
        "simulate", "--script", str(script), "--duration", "16", "--seed", "3",
        "--record", str(rec),
    ]) == EXIT_OK
    capsys.readouterr()
    rc = main(["replay", str(rec), "--threshold", "9.2", "--refractory", "0.75"])
    out = capsys.readouterr().out
    assert rc == EXIT_OK
    assert "bandA" in out


def test_replay_missing_file_is_config_error(tmp_path, capsys):
    rc = main(["replay", str(tmp_path / "absent.pieg")])
    assert rc == EXIT_CONFIG
    assert "error" in capsys.readouterr().err


def test_replay_bad_magic_is_format_error(tmp_path, capsys):
    bad = tmp_path / "bad.pieg"
    bad.write_bytes(b"WHAT" + bytes(40))
    rc = main(["replay", str(bad)])
    assert rc == EXIT_FORMAT


def test_invalid_band_flag_is_config_error(tmp_path, capsys):
    rc = main(["simulate", "--band", "7:3", "--duration", "2"])
    assert rc == EXIT_CONFIG


def test_invalid_rate_is_config_error(capsys):
    rc = main(["simulate", "--rate", "123", "--duration", "2"])
    assert rc == EXIT_CONFIG


def test_acquire_without_hardware_is_source_error(capsys):
    rc = main(["acquire"])
    assert rc == EXIT_SOURCE
    assert "source error" in capsys.readouterr().err


def test_calibrate_prints_threshold(tmp_path, capsys):
    rc = main(["calibrate", "--seed", "1"])
    out = capsys.readouterr().out
    assert rc == EXIT_OK
    assert "suggested threshold" in out
    assert "blink windows" in out and "noise windows" in out


def test_calibrate_from_recording_needs_labels(tmp_path, capsys):
    script = write_script(tmp_path)
    rec = tmp_path / "c.pieg"
    assert main([
        "simulate", "--script", str(script), "--duration", "16", "--seed", "4",
        "--record", str(rec),
    ]) == EXIT_OK
    capsys.readouterr()
    assert main(["calibrate", "--replay-file", str(rec)]) == EXIT_CONFIG
    rc = main(["calibrate", "--replay-file", str(rec), "--script", str(script)])
    assert rc == EXIT_OK
    assert "suggested threshold" in capsys.readouterr().out


def test_config_file_drives_session(tmp_path, capsys):
    script = write_script(tmp_path)
    config = {
        "device": {"sample_rate_sps": 250, "gain": 24, "vref_volts": 4.5,
                   "channel_count": 8, "metadata": {}},
        "source": {"kind": "simulate", "duration_s": 16.0,
                   "script_path": str(script),
                   "noise": {"white_rms_uv": 0.8, "pink_rms_uv": 2.0, "seed": 1}},
        "analysis_channel": 0,
        "detectors": [
            {"detector_id": "bandA", "band_low_hz": 3.0, "band_high_hz": 7.0,
             "threshold_uv": 9.2, "refractory_s": 0.75, "enabled": True},
            {"detector_id": "bandB", "band_low_hz": 1.0, "band_high_hz": 3.0,
             "threshold_uv": None, "refractory_s": 1.0, "enabled": False},
        ],
    }
    path = tmp_path / "session.json"
    path.write_text(json.dumps(config))
    rc = main(["simulate", "--config", str(path)])
    out = capsys.readouterr().out
    assert rc == EXIT_OK
    assert "bandA" in out


def test_flags_override_config_file(tmp_path, capsys):
    path = tmp_path / "session.json"
    path.write_text(json.dumps({"source": {"kind": "simulate", "duration_s": 4.0}}))
    rc = main(["simulate", "--config", str(path), "--duration", "2", "--seed", "0"])
    out = capsys.readouterr().out
    assert rc == EXIT_OK
    assert "processed 500 samples" in out


def test_config_file_not_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{nope")
    assert main(["simulate", "--config", str(path)]) == EXIT_CONFIG


def test_missing_config_file(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "none.json")]) == EXIT_CONFIG
