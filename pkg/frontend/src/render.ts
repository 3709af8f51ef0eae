/** Dashboard drawing: pitch gauge, scrolling pitch series, top-down
 * trajectory.
 *
 * The world-to-pixel projection is exposed as pure functions so tests can
 * assert on exactly the pixels the canvas code draws.
 */

import type { TelemetryFrame } from "./protocol.js";

/** Tilt band where the controller engages (rad). */
export const ENGAGE_LIMIT = 0.17453292519943295;
/** Tilt band past which the controller gives up (rad). */
export const DISENGAGE_LIMIT = 0.7853981633974483;

export interface Point {
  x: number;
  y: number;
}

export interface Viewport {
  /** Pixels per meter. */
  scale: number;
  /** World point mapped to the canvas center, meters. */
  centerX: number;
  centerY: number;
  widthPx: number;
  heightPx: number;
}

/** Fit a set of world points into a canvas, preserving aspect ratio.
 * Degenerate paths (a single point, a straight line) still get a sane
 * scale through the minimum span. */
export function fitViewport(
  points: readonly Point[],
  widthPx: number,
  heightPx: number,
  marginPx = 24,
  minSpanM = 0.25,
): Viewport {
  let minX = 0;
  let maxX = 0;
  let minY = 0;
  let maxY = 0;
  if (points.length > 0) {
    minX = maxX = points[0].x;
    minY = maxY = points[0].y;
    for (const p of points) {
      if (p.x < minX) minX = p.x;
      if (p.x > maxX) maxX = p.x;
      if (p.y < minY) minY = p.y;
      if (p.y > maxY) maxY = p.y;
    }
  }
  const spanX = Math.max(maxX - minX, minSpanM);
  const spanY = Math.max(maxY - minY, minSpanM);
  const scale = Math.min(
    (widthPx - 2 * marginPx) / spanX,
    (heightPx - 2 * marginPx) / spanY,
  );
  return {
    scale,
    centerX: (minX + maxX) / 2,
    centerY: (minY + maxY) / 2,
    widthPx,
    heightPx,
  };
}

/** World meters to canvas pixels; +x right, +y up on screen. */
export function project(view: Viewport, xM: number, yM: number): Point {
  return {
    x: view.widthPx / 2 + (xM - view.centerX) * view.scale,
    y: view.heightPx / 2 - (yM - view.centerY) * view.scale,
  };
}

export function trajectoryPoints(frames: readonly TelemetryFrame[]): Point[] {
  return frames.map((f) => ({ x: f.posX, y: f.posY }));
}

export function statusText(frame: TelemetryFrame | null): string {
  if (frame === null) return "waiting for telemetry";
  if (frame.fallen) return "FALLEN";
  return frame.isBalancing ? "balancing" : "idle";
}

const BG = "#10141a";
const GRID = "#2a3340";
const TRACE = "#4fc3f7";
const NEEDLE = "#ffd54f";
const OK_BAND = "#2e7d3233";
const WARN_BAND = "#ff8f0022";
const TEXT = "#cfd8dc";

function clearPanel(ctx: CanvasRenderingContext2D, w: number, h: number) {
  ctx.fillStyle = BG;
  ctx.fillRect(0, 0, w, h);
}

/** Half-dial with the needle at the current pitch and shaded bands at the
 * engage/disengage limits. */
export function drawPitchGauge(
  ctx: CanvasRenderingContext2D,
  w: number,
  h: number,
  frame: TelemetryFrame | null,
): void {
  clearPanel(ctx, w, h);
  const cx = w / 2;
  const cy = h * 0.86;
  const r = Math.min(w * 0.42, h * 0.74);

  // 0 rad points straight up; positive pitch (forward lean) to the right.
  const dial = (angle: number) => -Math.PI / 2 + angle;
  const arc = (from: number, to: number, color: string) => {
    ctx.beginPath();
    ctx.moveTo(cx, cy);
    ctx.arc(cx, cy, r, dial(from), dial(to));
    ctx.closePath();
    ctx.fillStyle = color;
    ctx.fill();
  };
  arc(-DISENGAGE_LIMIT, DISENGAGE_LIMIT, WARN_BAND);
  arc(-ENGAGE_LIMIT, ENGAGE_LIMIT, OK_BAND);

  ctx.strokeStyle = GRID;
  ctx.lineWidth = 1;
  for (const band of [ENGAGE_LIMIT, DISENGAGE_LIMIT]) {
    for (const sign of [-1, 1]) {
      const a = dial(sign * band);
      ctx.beginPath();
      ctx.moveTo(cx, cy);
      ctx.lineTo(cx + r * Math.cos(a), cy + r * Math.sin(a));
      ctx.stroke();
    }
  }

  if (frame !== null) {
    const a = dial(frame.pitch);
    ctx.strokeStyle = frame.fallen ? "#ef5350" : NEEDLE;
    ctx.lineWidth = 3;
    ctx.beginPath();
    ctx.moveTo(cx, cy);
    ctx.lineTo(cx + r * 0.92 * Math.cos(a), cy + r * 0.92 * Math.sin(a));
    ctx.stroke();
  }

  ctx.fillStyle = TEXT;
  ctx.font = "12px system-ui, sans-serif";
  ctx.textAlign = "center";
  const pitchLabel = frame === null ? "--" : frame.pitch.toFixed(3);
  ctx.fillText(`pitch ${pitchLabel} rad`, cx, h - 6);
}

/** Scrolling pitch-versus-time line over the most recent window. */
export function drawPitchSeries(
  ctx: CanvasRenderingContext2D,
  w: number,
  h: number,
  frames: readonly TelemetryFrame[],
  windowS = 12,
): void {
  clearPanel(ctx, w, h);
  if (frames.length === 0) return;
  const tEnd = frames[frames.length - 1].timeUs;
  const tStart = tEnd - windowS * 1e6;
  const visible = frames.filter((f) => f.timeUs >= tStart);

  let maxAbs = ENGAGE_LIMIT;
  for (const f of visible) maxAbs = Math.max(maxAbs, Math.abs(f.pitch));
  const yOf = (pitch: number) => h / 2 - (pitch / (1.15 * maxAbs)) * (h / 2);
  const xOf = (timeUs: number) =>
    ((timeUs - tStart) / (windowS * 1e6)) * w;

  ctx.strokeStyle = GRID;
  ctx.lineWidth = 1;
  for (const band of [-ENGAGE_LIMIT, 0, ENGAGE_LIMIT]) {
    ctx.beginPath();
    ctx.moveTo(0, yOf(band));
    ctx.lineTo(w, yOf(band));
    ctx.stroke();
  }

  ctx.strokeStyle = TRACE;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  visible.forEach((f, i) => {
    const x = xOf(f.timeUs);
    const y = yOf(f.pitch);
    if (i === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
}

/** Top-down path with the robot drawn at its latest pose. */
export function drawTrajectory(
  ctx: CanvasRenderingContext2D,
  w: number,
  h: number,
  frames: readonly TelemetryFrame[],
): void {
  clearPanel(ctx, w, h);
  if (frames.length === 0) return;
  const points = trajectoryPoints(frames);
  const view = fitViewport(points, w, h);

  // Meter grid for scale.
  const gridStep = 0.1 * Math.max(1, Math.round(40 / view.scale / 0.1));
  ctx.strokeStyle = GRID;
  ctx.lineWidth = 0.5;
  const halfW = w / 2 / view.scale;
  const halfH = h / 2 / view.scale;
  const x0 = Math.floor((view.centerX - halfW) / gridStep) * gridStep;
  const y0 = Math.floor((view.centerY - halfH) / gridStep) * gridStep;
  for (let x = x0; x <= view.centerX + halfW; x += gridStep) {
    const p = project(view, x, 0);
    ctx.beginPath();
    ctx.moveTo(p.x, 0);
    ctx.lineTo(p.x, h);
    ctx.stroke();
  }
  for (let y = y0; y <= view.centerY + halfH; y += gridStep) {
    const p = project(view, 0, y);
    ctx.beginPath();
    ctx.moveTo(0, p.y);
    ctx.lineTo(w, p.y);
    ctx.stroke();
  }

  ctx.strokeStyle = TRACE;
  ctx.lineWidth = 2;
  ctx.beginPath();
  points.forEach((pt, i) => {
    const p = project(view, pt.x, pt.y);
    if (i === 0) ctx.moveTo(p.x, p.y);
    else ctx.lineTo(p.x, p.y);
  });
  ctx.stroke();

  const last = frames[frames.length - 1];
  const pose = project(view, last.posX, last.posY);
  ctx.fillStyle = last.fallen ? "#ef5350" : NEEDLE;
  ctx.beginPath();
  ctx.arc(pose.x, pose.y, 5, 0, 2 * Math.PI);
  ctx.fill();
  // Heading arrow; screen y is flipped, hence the minus.
  ctx.strokeStyle = ctx.fillStyle;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(pose.x, pose.y);
  ctx.lineTo(
    pose.x + 14 * Math.cos(last.heading),
    pose.y - 14 * Math.sin(last.heading),
  );
  ctx.stroke();

  ctx.fillStyle = TEXT;
  ctx.font = "11px system-ui, sans-serif";
  ctx.textAlign = "left";
  ctx.fillText(`grid ${gridStep.toFixed(1)} m`, 8, h - 8);
}
