/**
 * Scope entry point: wires socket, state, canvas, and pointer gestures.
 *
 * Dragging the threshold line or a band edge sends the matching control
 * command on release; the overlay only moves once the server echoes the new
 * configuration. Message-driven invalidation capped at 30 fps.
 */

import { ScopeConnection } from "./connection.js";
import { enableDetector, setBand, setThreshold, type AckMsg, type ServerMsg } from "./protocol.js";
import {
  applyAck,
  applyServerMessage,
  beginGesture,
  exportTally,
  initialState,
  markHit,
  markMiss,
  onConnected,
  onDisconnected,
  resetTally,
  tallyText,
  type ScopeState,
} from "./state.js";
import {
  autoMaxUv,
  drawSpectrum,
  drawTrace,
  hzForSpectrumX,
  uvForSpectrumY,
  type SpectrumLayout,
} from "./render.js";

const FRAME_MS = 1000 / 30;

let state: ScopeState = initialState();
let pinnedMaxUv: number | null = null;
let dirty = true;
let lastDraw = 0;

const canvas = document.getElementById("scope") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const banner = document.getElementById("banner")!;
const ticker = document.getElementById("ticker")!;
const tallyOut = document.getElementById("tally")!;
const errorOut = document.getElementById("error")!;
const pinLamps: Record<number, HTMLElement> = {
  31: document.getElementById("pin31")!,
  35: document.getElementById("pin35")!,
};

function invalidate(): void {
  dirty = true;
}

function update(next: ScopeState): void {
  state = next;
  invalidate();
}

const wsUrl = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/stream`;
const connection = new ScopeConnection(wsUrl, {
  onOpen: () => update(onConnected(state)),
  onClose: () => update(onDisconnected(state)),
  onServerMessage: (msg: ServerMsg) => update(applyServerMessage(state, msg, performance.now())),
  onAck: (ack: AckMsg) => update(applyAck(state, ack)),
});
connection.start();

function spectrumLayout(): SpectrumLayout {
  const pad = 8;
  const traceHeight = Math.floor(canvas.height * 0.42);
  return {
    x: pad,
    y: traceHeight + 2 * pad,
    width: canvas.width - 2 * pad,
    height: canvas.height - traceHeight - 3 * pad,
    maxUv: autoMaxUv(state, pinnedMaxUv),
  };
}

// -- gestures ------------------------------------------------------------

type Drag =
  | { kind: "threshold"; detectorId: string; uv: number }
  | { kind: "band_edge"; detectorId: string; edge: "low" | "high"; hz: number };

let drag: Drag | null = null;

function nearestThreshold(layoutY: number, layout: SpectrumLayout): string | null {
  let best: string | null = null;
  let bestDist = 12;
  for (const det of Object.values(state.overlays)) {
    if (det.threshold_uv === null) continue;
    const py =
      layout.y + layout.height * (1 - Math.min(det.threshold_uv / layout.maxUv, 1));
    const dist = Math.abs(py - layoutY);
    if (dist < bestDist) {
      best = det.detector_id;
      bestDist = dist;
    }
  }
  return best;
}

function nearestBandEdge(
  px: number,
  layout: SpectrumLayout,
): { detectorId: string; edge: "low" | "high" } | null {
  let best: { detectorId: string; edge: "low" | "high" } | null = null;
  let bestDist = 8;
  for (const det of Object.values(state.overlays)) {
    for (const edge of ["low", "high"] as const) {
      const hz = edge === "low" ? det.band_low_hz : det.band_high_hz;
      const x = layout.x + (hz / 30) * layout.width;
      const dist = Math.abs(x - px);
      if (dist < bestDist) {
        best = { detectorId: det.detector_id, edge };
        bestDist = dist;
      }
    }
  }
  return best;
}

canvas.addEventListener("pointerdown", (ev) => {
  const rect = canvas.getBoundingClientRect();
  const px = ev.clientX - rect.left;
  const py = ev.clientY - rect.top;
  const layout = spectrumLayout();
  if (py < layout.y) return;
  const threshold = nearestThreshold(py, layout);
  if (threshold !== null) {
    drag = { kind: "threshold", detectorId: threshold, uv: uvForSpectrumY(layout, py) };
    canvas.setPointerCapture(ev.pointerId);
    return;
  }
  const edge = nearestBandEdge(px, layout);
  if (edge !== null) {
    drag = { ...edge, kind: "band_edge", hz: hzForSpectrumX(layout, px) };
    canvas.setPointerCapture(ev.pointerId);
  }
});

canvas.addEventListener("pointermove", (ev) => {
  if (drag === null) return;
  const rect = canvas.getBoundingClientRect();
  const layout = spectrumLayout();
  if (drag.kind === "threshold") {
    drag.uv = uvForSpectrumY(layout, ev.clientY - rect.top);
    update({
      ...state,
      preview: { detectorId: drag.detectorId, cmd: "set_threshold", thresholdUv: drag.uv },
    });
  } else {
    drag.hz = hzForSpectrumX(layout, ev.clientX - rect.left);
    invalidate();
  }
});

canvas.addEventListener("pointerup", () => {
  if (drag === null) return;
  if (drag.kind === "threshold") {
    const { state: next, command } = beginGesture(
      state,
      setThreshold(drag.detectorId, Math.max(0.1, Math.round(drag.uv * 10) / 10)),
    );
    update(next);
    connection.send(command);
  } else {
    const det = state.overlays[drag.detectorId];
    if (det) {
      const low = drag.edge === "low" ? drag.hz : det.band_low_hz;
      const high = drag.edge === "high" ? drag.hz : det.band_high_hz;
      const { state: next, command } = beginGesture(
        state,
        setBand(drag.detectorId, Math.round(low * 10) / 10, Math.round(high * 10) / 10),
      );
      update(next);
      connection.send(command);
    }
  }
  drag = null;
});

// -- controls outside the canvas -------------------------------------------

document.getElementById("enableA")!.addEventListener("click", () => {
  const det = state.overlays["bandA"];
  const { state: next, command } = beginGesture(
    state,
    enableDetector("bandA", !(det?.enabled ?? false)),
  );
  update(next);
  connection.send(command);
});
document.getElementById("enableB")!.addEventListener("click", () => {
  const det = state.overlays["bandB"];
  const { state: next, command } = beginGesture(
    state,
    enableDetector("bandB", !(det?.enabled ?? false)),
  );
  update(next);
  connection.send(command);
});
document.getElementById("hit")!.addEventListener("click", () => update(markHit(state)));
document.getElementById("miss")!.addEventListener("click", () => update(markMiss(state)));
document.getElementById("resetTally")!.addEventListener("click", () => update(resetTally(state)));
document.getElementById("exportTally")!.addEventListener("click", () => {
  const blob = new Blob([exportTally(state)], { type: "text/plain" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = "tally.txt";
  a.click();
});
document.getElementById("pinMax")!.addEventListener("change", (ev) => {
  const raw = (ev.target as HTMLInputElement).value.trim();
  pinnedMaxUv = raw === "" ? null : Math.max(1, Number(raw));
  invalidate();
});

// -- render loop -------------------------------------------------------------

function draw(now: number): void {
  requestAnimationFrame(draw);
  const flashActive = Object.values(state.pins).some(
    (p) => p.level || p.flashUntilMs > performance.now(),
  );
  if (!dirty && !flashActive) return;
  if (now - lastDraw < FRAME_MS) return;
  lastDraw = now;
  dirty = false;

  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const pad = 8;
  drawTrace(ctx, state, pad, pad, canvas.width - 2 * pad, Math.floor(canvas.height * 0.42));
  drawSpectrum(ctx, state, spectrumLayout());

  banner.textContent = state.banner ?? (state.connected ? "" : "connecting...");
  banner.style.display = state.banner || !state.connected ? "block" : "none";
  errorOut.textContent = state.lastError ?? "";
  tallyOut.textContent = tallyText(state);
  ticker.textContent = state.ticker
    .slice(-6)
    .map((e) => `${(e.tNs / 1e9).toFixed(2)}s ${e.detectorId} ${e.peakUv.toFixed(1)}uV`)
    .join("\n");
  for (const [pin, lamp] of Object.entries(pinLamps)) {
    const ind = state.pins[Number(pin)];
    const on = ind && (ind.level || ind.flashUntilMs > performance.now());
    lamp.classList.toggle("on", Boolean(on));
  }
  const a = state.overlays["bandA"];
  const b = state.overlays["bandB"];
  document.getElementById("enableA")!.textContent =
    `bandA ${a?.enabled ? "on" : "off"}${a?.threshold_uv === null ? " (uncalibrated)" : ""}`;
  document.getElementById("enableB")!.textContent =
    `bandB ${b?.enabled ? "on" : "off"}${b?.threshold_uv === null ? " (uncalibrated)" : ""}`;
}

requestAnimationFrame(draw);
