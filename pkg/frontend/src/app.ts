/** Page wiring: socket, joystick, dashboard panels. */

import { Commander, DEFAULT_SETTINGS, type UiSettings } from "./commander.js";
import { VirtualJoystick } from "./joystick.js";
import { RESET_LINE } from "./protocol.js";
import {
  drawPitchGauge,
  drawPitchSeries,
  drawTrajectory,
  statusText,
} from "./render.js";
import { FrameBuffer } from "./telemetry.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function canvasPanel(
  parent: HTMLElement,
  label: string,
  width: number,
  height: number,
): CanvasRenderingContext2D {
  const wrap = el("div", "panel");
  wrap.appendChild(el("div", "panel-label", label));
  const canvas = el("canvas");
  canvas.width = width;
  canvas.height = height;
  wrap.appendChild(canvas);
  parent.appendChild(wrap);
  const ctx = canvas.getContext("2d");
  if (ctx === null) throw new Error("canvas 2d context unavailable");
  return ctx;
}

export function initApp(root: HTMLElement, settings?: Partial<UiSettings>): void {
  const params = new URLSearchParams(window.location.search);
  const cfg: UiSettings = {
    ...DEFAULT_SETTINGS,
    wsUrl: params.get("ws") ?? DEFAULT_SETTINGS.wsUrl,
    ...settings,
  };

  root.classList.add("teleop");
  const left = el("div", "column");
  const right = el("div", "column");
  root.appendChild(left);
  root.appendChild(right);

  const connState = el("div", "conn", "connecting…");
  left.appendChild(connState);
  const banner = el("div", "banner", "");
  left.appendChild(banner);

  const joystick = new VirtualJoystick((sample, held) =>
    commander.update(sample, held),
  );
  left.appendChild(joystick.element);

  const resetButton = el("button", "reset", "Reset");
  left.appendChild(resetButton);
  const counters = el("div", "counters", "");
  left.appendChild(counters);

  const gauge = canvasPanel(right, "pitch", 320, 180);
  const series = canvasPanel(right, "pitch history", 320, 140);
  const map = canvasPanel(right, "trajectory", 320, 260);

  const buffer = new FrameBuffer();
  let socket: WebSocket | null = null;
  let retryMs = 1000;
  let lastReply = "";

  const sendLine = (line: string) => {
    if (socket !== null && socket.readyState === WebSocket.OPEN) {
      socket.send(line);
    }
  };
  const commander = new Commander(sendLine, cfg);

  resetButton.addEventListener("click", () => {
    sendLine(RESET_LINE);
    buffer.clear();
  });

  function connect(): void {
    connState.textContent = `connecting to ${cfg.wsUrl}…`;
    const ws = new WebSocket(cfg.wsUrl);
    socket = ws;
    ws.onopen = () => {
      retryMs = 1000;
      connState.textContent = `connected to ${cfg.wsUrl}`;
    };
    ws.onmessage = (event) => {
      const line = String(event.data);
      if (line.startsWith("{")) {
        const prev = buffer.latest;
        if (buffer.offer(line)) {
          const now = buffer.latest;
          // A service-side reset restarts the clock; drop the old path.
          if (prev !== null && now !== null && now.timeUs < prev.timeUs) {
            const keep = now;
            buffer.clear();
            buffer.offer(JSON.stringify(keep));
          }
        }
      } else if (line.startsWith("x") || line.startsWith("err")) {
        lastReply = line;
      } else {
        buffer.offer(line); // counts as malformed
      }
    };
    ws.onclose = () => {
      if (socket !== ws) return;
      socket = null;
      connState.textContent = `disconnected, retrying in ${Math.round(retryMs / 1000)}s`;
      setTimeout(connect, retryMs);
      retryMs = Math.min(retryMs * 1.5, 10_000);
    };
    ws.onerror = () => ws.close();
  }
  connect();

  function redraw(): void {
    const latest = buffer.latest;
    drawPitchGauge(gauge, 320, 180, latest);
    drawPitchSeries(series, 320, 140, buffer.history);
    drawTrajectory(map, 320, 260, buffer.history);
    banner.textContent = statusText(latest);
    banner.classList.toggle("fallen", latest !== null && latest.fallen);
    const t = latest === null ? "-" : (latest.timeUs / 1e6).toFixed(2);
    counters.textContent =
      `t=${t}s frames=${buffer.acceptedCount} ` +
      `malformed=${buffer.malformedCount} ${lastReply}`;
  }

  function loop(): void {
    if (buffer.take() !== null) redraw();
    requestAnimationFrame(loop);
  }
  redraw();
  requestAnimationFrame(loop);
}
