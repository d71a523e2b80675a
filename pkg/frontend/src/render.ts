/**
 * Immediate-mode canvas rendering: filtered trace on top, spectrum below
 * with band shading ("green lines") and the draggable threshold ("red
 * line"). The spectrum x-range is fixed 0-30 Hz; y auto-scales with a
 * pinnable maximum since trace amplitude differs per person.
 */

import type { ScopeState } from "./state.js";
import { TRACE_SECONDS } from "./state.js";

export const SPECTRUM_MAX_HZ = 30;

export interface SpectrumLayout {
  x: number;
  y: number;
  width: number;
  height: number;
  maxUv: number;
}

export function spectrumYForUv(layout: SpectrumLayout, uv: number): number {
  const frac = Math.min(uv / layout.maxUv, 1);
  return layout.y + layout.height * (1 - frac);
}

export function uvForSpectrumY(layout: SpectrumLayout, y: number): number {
  const frac = 1 - (y - layout.y) / layout.height;
  return Math.max(0, Math.min(1, frac)) * layout.maxUv;
}

export function spectrumXForHz(layout: SpectrumLayout, hz: number): number {
  return layout.x + (hz / SPECTRUM_MAX_HZ) * layout.width;
}

export function hzForSpectrumX(layout: SpectrumLayout, x: number): number {
  const frac = (x - layout.x) / layout.width;
  return Math.max(0, Math.min(1, frac)) * SPECTRUM_MAX_HZ;
}

export function autoMaxUv(state: ScopeState, pinnedMax: number | null): number {
  if (pinnedMax !== null) return pinnedMax;
  let peak = 10;
  if (state.spectrum) {
    const upper = Math.ceil(SPECTRUM_MAX_HZ / state.spectrum.binHz);
    for (let i = 0; i <= upper && i < state.spectrum.amplitudesUv.length; i++) {
      peak = Math.max(peak, state.spectrum.amplitudesUv[i]);
    }
  }
  for (const det of Object.values(state.overlays)) {
    if (det.threshold_uv !== null) peak = Math.max(peak, det.threshold_uv * 1.2);
  }
  return peak * 1.1;
}

const BAND_COLORS: Record<string, string> = {
  bandA: "rgba(80, 220, 120, 0.18)",
  bandB: "rgba(120, 170, 255, 0.18)",
};

const THRESHOLD_COLORS: Record<string, string> = {
  bandA: "#ff5252",
  bandB: "#ff9e40",
};

export function colorForDetector(detectorId: string, table: Record<string, string>): string {
  return table[detectorId] ?? "#cccccc";
}

export function drawTrace(
  ctx: CanvasRenderingContext2D,
  state: ScopeState,
  x: number,
  y: number,
  width: number,
  height: number,
): void {
  ctx.save();
  ctx.fillStyle = "#10141a";
  ctx.fillRect(x, y, width, height);
  ctx.strokeStyle = "#2a3442";
  ctx.strokeRect(x, y, width, height);

  const trace = state.trace;
  if (trace.length > 1) {
    const tEnd = trace[trace.length - 1].tNs;
    const tStart = tEnd - TRACE_SECONDS * 1e9;
    let peak = 10;
    for (const p of trace) peak = Math.max(peak, Math.abs(p.uv));
    ctx.beginPath();
    ctx.strokeStyle = "#6fe3ff";
    ctx.lineWidth = 1.2;
    for (let i = 0; i < trace.length; i++) {
      const px = x + ((trace[i].tNs - tStart) / (TRACE_SECONDS * 1e9)) * width;
      const py = y + height / 2 - (trace[i].uv / peak) * (height / 2 - 4);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    }
    ctx.stroke();
    ctx.fillStyle = "#8a97a8";
    ctx.font = "11px monospace";
    ctx.fillText(`+/- ${peak.toFixed(0)} uV, last ${TRACE_SECONDS} s (filtered)`, x + 6, y + 14);
  } else {
    ctx.fillStyle = "#8a97a8";
    ctx.font = "12px monospace";
    ctx.fillText("waiting for samples...", x + 8, y + height / 2);
  }
  ctx.restore();
}

export function drawSpectrum(
  ctx: CanvasRenderingContext2D,
  state: ScopeState,
  layout: SpectrumLayout,
): void {
  const { x, y, width, height } = layout;
  ctx.save();
  ctx.fillStyle = "#10141a";
  ctx.fillRect(x, y, width, height);
  ctx.strokeStyle = "#2a3442";
  ctx.strokeRect(x, y, width, height);

  // band shading first, bars above, threshold lines on top
  for (const det of Object.values(state.overlays)) {
    ctx.fillStyle = colorForDetector(det.detector_id, BAND_COLORS);
    const x0 = spectrumXForHz(layout, det.band_low_hz);
    const x1 = spectrumXForHz(layout, det.band_high_hz);
    ctx.fillRect(x0, y, x1 - x0, height);
    ctx.strokeStyle = ctx.fillStyle.replace("0.18", "0.7");
    ctx.beginPath();
    ctx.moveTo(x0, y);
    ctx.lineTo(x0, y + height);
    ctx.moveTo(x1, y);
    ctx.lineTo(x1, y + height);
    ctx.stroke();
  }

  if (state.spectrum) {
    const { binHz, amplitudesUv } = state.spectrum;
    const bins = Math.min(Math.floor(SPECTRUM_MAX_HZ / binHz) + 1, amplitudesUv.length);
    const barWidth = Math.max(1, (width / SPECTRUM_MAX_HZ) * binHz - 2);
    ctx.fillStyle = "#d9e2ec";
    for (let i = 0; i < bins; i++) {
      const px = spectrumXForHz(layout, i * binHz);
      const py = spectrumYForUv(layout, amplitudesUv[i]);
      ctx.fillRect(px - barWidth / 2, py, barWidth, y + height - py);
    }
  }

  for (const det of Object.values(state.overlays)) {
    if (det.threshold_uv === null) continue;
    const py = spectrumYForUv(layout, det.threshold_uv);
    ctx.strokeStyle = colorForDetector(det.detector_id, THRESHOLD_COLORS);
    ctx.lineWidth = det.enabled ? 2 : 1;
    ctx.setLineDash(det.enabled ? [] : [6, 4]);
    ctx.beginPath();
    ctx.moveTo(x, py);
    ctx.lineTo(x + width, py);
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.font = "11px monospace";
    ctx.fillStyle = ctx.strokeStyle;
    ctx.fillText(`${det.detector_id} ${det.threshold_uv.toFixed(1)} uV`, x + width - 150, py - 4);
  }

  // transient drag preview (dashed): server overlay has not moved yet
  if (state.preview?.thresholdUv !== undefined) {
    const py = spectrumYForUv(layout, state.preview.thresholdUv);
    ctx.strokeStyle = "#ffffff";
    ctx.setLineDash([2, 3]);
    ctx.beginPath();
    ctx.moveTo(x, py);
    ctx.lineTo(x + width, py);
    ctx.stroke();
    ctx.setLineDash([]);
  }

  ctx.fillStyle = "#8a97a8";
  ctx.font = "11px monospace";
  ctx.fillText(`0-${SPECTRUM_MAX_HZ} Hz, full scale ${layout.maxUv.toFixed(0)} uV`, x + 6, y + 14);
  ctx.restore();
}
