/**
 * Scope view state and its reducer.
 *
 * Overlays (threshold line, band shading, enabled flag) always mirror the
 * last status message from the server; a gesture only produces a control
 * command plus a transient preview, and the overlay moves when the echo
 * arrives. Rejections restore the preview-free view and surface the reason.
 */

import type {
  AckMsg,
  ControlCmd,
  DetectorEcho,
  EventMsg,
  ServerMsg,
  SessionConfigEcho,
} from "./protocol.js";

export const TRACE_SECONDS = 10;

export interface TracePoint {
  tNs: number;
  uv: number;
}

export interface SpectrumView {
  tEndNs: number;
  binHz: number;
  amplitudesUv: number[];
}

export interface PinIndicator {
  level: boolean;
  /** wall-clock ms until which the UI shows the flash (event-driven) */
  flashUntilMs: number;
}

export interface GesturePreview {
  detectorId: string;
  cmd: ControlCmd["cmd"];
  thresholdUv?: number;
  lowHz?: number;
  highHz?: number;
}

interface PendingCommand {
  cmdSeq: number;
  preview: GesturePreview | null;
}

export interface TickerEntry {
  tNs: number;
  detectorId: string;
  peakUv: number;
}

export interface ScopeState {
  connected: boolean;
  config: SessionConfigEcho | null;
  overlays: Record<string, DetectorEcho>;
  trace: TracePoint[];
  spectrum: SpectrumView | null;
  pins: Record<number, PinIndicator>;
  ticker: TickerEntry[];
  tally: { hits: number; attempts: number };
  preview: GesturePreview | null;
  pending: PendingCommand[];
  sentCommands: number;
  lastSeq: number;
  lastError: string | null;
  banner: string | null;
}

export function initialState(): ScopeState {
  return {
    connected: false,
    config: null,
    overlays: {},
    trace: [],
    spectrum: null,
    pins: { 31: { level: false, flashUntilMs: 0 }, 35: { level: false, flashUntilMs: 0 } },
    ticker: [],
    tally: { hits: 0, attempts: 0 },
    preview: null,
    pending: [],
    sentCommands: 0,
    lastSeq: 0,
    lastError: null,
    banner: null,
  };
}

/** Socket (re)opened: wipe everything derived; the snapshot rebuilds it. */
export function onConnected(state: ScopeState): ScopeState {
  return { ...initialState(), connected: true, tally: state.tally };
}

export function onDisconnected(state: ScopeState): ScopeState {
  return { ...state, connected: false, banner: "disconnected - reconnecting" };
}

function applyStatus(state: ScopeState, config: SessionConfigEcho): ScopeState {
  const overlays: Record<string, DetectorEcho> = {};
  for (const det of config.detectors ?? []) overlays[det.detector_id] = det;
  return { ...state, config, overlays, banner: null };
}

function pinForDetector(state: ScopeState, detectorId: string): number | null {
  const assignment = state.config?.pin_map?.[detectorId];
  return assignment ? assignment.pin : null;
}

function pulseMsForDetector(state: ScopeState, detectorId: string): number {
  return state.config?.pin_map?.[detectorId]?.pulse_ms ?? 500;
}

export function applyServerMessage(
  state: ScopeState,
  msg: ServerMsg,
  nowMs: number,
): ScopeState {
  if (msg.seq <= state.lastSeq && msg.kind !== "status") {
    // seq is strictly increasing per connection; tolerate only a fresh snapshot
    return state;
  }
  const next = { ...state, lastSeq: Math.max(state.lastSeq, msg.seq) };
  switch (msg.kind) {
    case "status":
      return applyStatus(next, msg.config);
    case "samples": {
      const points = msg.uv.map((uv, i) => ({ tNs: msg.t0_ns + i * msg.period_ns, uv }));
      const trace = [...state.trace, ...points];
      const horizon = points.length
        ? points[points.length - 1].tNs - TRACE_SECONDS * 1e9
        : -Infinity;
      return { ...next, trace: trace.filter((p) => p.tNs >= horizon) };
    }
    case "spectrum":
      return {
        ...next,
        spectrum: { tEndNs: msg.t_end_ns, binHz: msg.bin_hz, amplitudesUv: msg.amplitudes_uv },
      };
    case "event": {
      const ticker = [
        ...state.ticker,
        { tNs: msg.t_ns, detectorId: msg.detector_id, peakUv: msg.peak_uv },
      ].slice(-50);
      const pin = pinForDetector(state, msg.detector_id);
      const pins = { ...state.pins };
      if (pin !== null) {
        const flashUntilMs = nowMs + pulseMsForDetector(state, msg.detector_id);
        pins[pin] = { level: true, flashUntilMs };
      }
      return { ...next, ticker, pins };
    }
    case "pin_state": {
      const pins = { ...state.pins };
      const prior = pins[msg.pin] ?? { level: false, flashUntilMs: 0 };
      pins[msg.pin] = { ...prior, level: msg.level };
      return { ...next, pins };
    }
  }
}

/**
 * Record an outgoing gesture. Returns the command to put on the wire; the
 * caller must send commands in the order produced so cmd_seq matching holds.
 */
export function beginGesture(
  state: ScopeState,
  cmd: ControlCmd,
): { state: ScopeState; command: ControlCmd } {
  const cmdSeq = state.sentCommands + 1;
  let preview: GesturePreview | null = null;
  if (cmd.cmd === "set_threshold") {
    preview = { detectorId: cmd.detector_id, cmd: cmd.cmd, thresholdUv: cmd.threshold_uv };
  } else if (cmd.cmd === "set_band") {
    preview = { detectorId: cmd.detector_id, cmd: cmd.cmd, lowHz: cmd.low_hz, highHz: cmd.high_hz };
  }
  return {
    state: {
      ...state,
      sentCommands: cmdSeq,
      preview,
      pending: [...state.pending, { cmdSeq, preview }],
      lastError: null,
    },
    command: cmd,
  };
}

export function applyAck(state: ScopeState, ack: AckMsg): ScopeState {
  const pending = state.pending.filter((p) => p.cmdSeq !== ack.cmd_seq);
  const matched = state.pending.find((p) => p.cmdSeq === ack.cmd_seq);
  if (ack.ok) {
    // overlay itself moves on the status echo; just clear the preview
    const preview = state.preview === matched?.preview ? null : state.preview;
    return { ...state, pending, preview, lastError: null };
  }
  return {
    ...state,
    pending,
    preview: null, // snap back to the server-held overlay
    lastError: ack.reason ?? "rejected",
  };
}

// -- operator tally -----------------------------------------------------------

export function markHit(state: ScopeState): ScopeState {
  return { ...state, tally: { hits: state.tally.hits + 1, attempts: state.tally.attempts + 1 } };
}

export function markMiss(state: ScopeState): ScopeState {
  return { ...state, tally: { hits: state.tally.hits, attempts: state.tally.attempts + 1 } };
}

export function resetTally(state: ScopeState): ScopeState {
  return { ...state, tally: { hits: 0, attempts: 0 } };
}

/** "8/10" plus the ratio once there is at least one attempt. */
export function tallyText(state: ScopeState): string {
  const { hits, attempts } = state.tally;
  if (attempts === 0) return "0/0";
  return `${hits}/${attempts} (${((100 * hits) / attempts).toFixed(0)}%)`;
}

export function exportTally(state: ScopeState): string {
  const { hits, attempts } = state.tally;
  return `hits,attempts\n${hits},${attempts}\n`;
}
