/**
 * Wire protocol for the /stream endpoint.
 *
 * Inbound (server -> scope) messages carry a monotone `seq`; `status` echoes
 * the full session configuration and is the single source of truth for every
 * overlay. Outbound control messages are answered with `ack` keyed by a
 * per-connection `cmd_seq` counted in send order.
 */

export interface DetectorEcho {
  detector_id: string;
  band_low_hz: number;
  band_high_hz: number;
  threshold_uv: number | null;
  refractory_s: number;
  enabled: boolean;
}

export interface PinAssignmentEcho {
  pin: number;
  pulse_ms: number;
  active_level: "high" | "low";
}

export interface SessionConfigEcho {
  detectors: DetectorEcho[];
  pin_map: Record<string, PinAssignmentEcho>;
  window?: { length_samples: number; hop_samples: number; taper: string };
  device?: { sample_rate_sps: number; gain: number; vref_volts: number };
  paused?: boolean;
  [key: string]: unknown;
}

export interface StatusMsg {
  kind: "status";
  seq: number;
  config: SessionConfigEcho;
}

export interface SamplesMsg {
  kind: "samples";
  seq: number;
  t0_ns: number;
  period_ns: number;
  uv: number[];
}

export interface SpectrumMsg {
  kind: "spectrum";
  seq: number;
  t_end_ns: number;
  bin_hz: number;
  amplitudes_uv: number[];
}

export interface EventMsg {
  kind: "event";
  seq: number;
  detector_id: string;
  t_ns: number;
  peak_hz: number;
  peak_uv: number;
  threshold_uv: number;
}

export interface PinStateMsg {
  kind: "pin_state";
  seq: number;
  pin: number;
  level: boolean;
  t_ns: number;
}

export type ServerMsg = StatusMsg | SamplesMsg | SpectrumMsg | EventMsg | PinStateMsg;

export interface AckMsg {
  kind: "ack";
  cmd_seq: number;
  ok: boolean;
  reason?: string;
  config?: DetectorEcho;
}

export type ControlCmd =
  | { kind: "control"; cmd: "set_threshold"; detector_id: string; threshold_uv: number }
  | { kind: "control"; cmd: "set_band"; detector_id: string; low_hz: number; high_hz: number }
  | { kind: "control"; cmd: "set_refractory"; detector_id: string; refractory_s: number }
  | { kind: "control"; cmd: "enable_detector"; detector_id: string; enabled: boolean }
  | { kind: "control"; cmd: "start" }
  | { kind: "control"; cmd: "stop" };

const SERVER_KINDS = new Set(["status", "samples", "spectrum", "event", "pin_state"]);

/** Parse one raw frame off the socket; returns null for anything malformed. */
export function parseServerMessage(raw: string): ServerMsg | AckMsg | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const msg = data as Record<string, unknown>;
  if (msg.kind === "ack" && typeof msg.cmd_seq === "number" && typeof msg.ok === "boolean") {
    return msg as unknown as AckMsg;
  }
  if (typeof msg.kind !== "string" || !SERVER_KINDS.has(msg.kind)) return null;
  if (typeof msg.seq !== "number") return null;
  switch (msg.kind) {
    case "status":
      return typeof msg.config === "object" && msg.config !== null
        ? (msg as unknown as StatusMsg)
        : null;
    case "samples":
      return Array.isArray(msg.uv) && typeof msg.period_ns === "number"
        ? (msg as unknown as SamplesMsg)
        : null;
    case "spectrum":
      return Array.isArray(msg.amplitudes_uv) && typeof msg.bin_hz === "number"
        ? (msg as unknown as SpectrumMsg)
        : null;
    case "event":
      return typeof msg.detector_id === "string" && typeof msg.t_ns === "number"
        ? (msg as unknown as EventMsg)
        : null;
    case "pin_state":
      return typeof msg.pin === "number" && typeof msg.level === "boolean"
        ? (msg as unknown as PinStateMsg)
        : null;
  }
  return null;
}

export const setThreshold = (detectorId: string, thresholdUv: number): ControlCmd => ({
  kind: "control",
  cmd: "set_threshold",
  detector_id: detectorId,
  threshold_uv: thresholdUv,
});

export const setBand = (detectorId: string, lowHz: number, highHz: number): ControlCmd => ({
  kind: "control",
  cmd: "set_band",
  detector_id: detectorId,
  low_hz: lowHz,
  high_hz: highHz,
});

export const enableDetector = (detectorId: string, enabled: boolean): ControlCmd => ({
  kind: "control",
  cmd: "enable_detector",
  detector_id: detectorId,
  enabled,
});
