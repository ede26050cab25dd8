/**
 * Browser entry point: wires the socket, reducer, bindings, camera view,
 * and strip charts to a minimal DOM.  All logic lives in the imported
 * modules; this file is glue and canvas drawing only.
 */
import { RateLimiter, channelFor, commandForKey } from "./bindings.js";
import { MM_PER_PIXEL, VIEW_SIZE_PX, renderCameraView } from "./camera.js";
import { TelemetryPlots } from "./plots.js";
import { parseServerFrame, serializeCommand } from "./schema.js";
import { ConsoleState, initialState, isStale, reduce } from "./state.js";

const PORT = new URLSearchParams(location.search).get("port") ?? "8765";
const TARGET = { lateralMm: 0, verticalMm: 30 };

let state: ConsoleState = initialState();
const plots = new TelemetryPlots();
const limiter = new RateLimiter();
let rotationThrottle = 0;
let feedThrottle = 0;

const ws = new WebSocket(`ws://${location.hostname || "127.0.0.1"}:${PORT}`);
ws.onopen = () => (state = reduce(state, { kind: "socket", status: "connected" }));
ws.onclose = () => (state = reduce(state, { kind: "socket", status: "disconnected" }));
ws.onmessage = (ev) => {
  const frame = parseServerFrame(String(ev.data));
  state = reduce(state, { kind: "frame", frame, nowMs: Date.now() });
  if (frame.kind === "telemetry") plots.ingest(frame.telemetry);
};

window.addEventListener("keydown", (ev) => {
  if (state.telemetry === null) return;
  const cmd = commandForKey(ev.key, {
    telemetry: state.telemetry,
    rotationThrottle,
    feedThrottle,
  });
  if (cmd === null || !limiter.allow(channelFor(cmd), Date.now())) return;
  ws.send(serializeCommand(cmd));
  if (cmd.type === "rotation_throttle") rotationThrottle = cmd.value;
  if (cmd.type === "feed_throttle") feedThrottle = cmd.value;
});

function drawStrip(ctx: CanvasRenderingContext2D, ys: number[], label: string) {
  const { width: w, height: h } = ctx.canvas;
  ctx.clearRect(0, 0, w, h);
  if (ys.length > 1) {
    const lo = Math.min(...ys);
    const hi = Math.max(...ys, lo + 1e-9);
    ctx.beginPath();
    ys.forEach((y, i) => {
      const px = (i / (ys.length - 1)) * w;
      const py = h - ((y - lo) / (hi - lo)) * (h - 12) - 6;
      i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
    });
    ctx.strokeStyle = "#3a7";
    ctx.stroke();
  }
  ctx.fillStyle = "#ccc";
  ctx.fillText(`${label}: ${ys.length ? ys[ys.length - 1].toFixed(1) : "--"}`, 4, 10);
}

function render() {
  const now = Date.now();
  const t = state.telemetry;
  const status = document.getElementById("status")!;
  status.textContent = t
    ? `${state.connection} | mode ${t.mode} | θ ${t.theta_deg.toFixed(1)}° | ` +
      `depth ${t.drill_depth_mm.toFixed(1)} mm | ${t.power_w.toFixed(0)} W`
    : state.connection;

  const toasts = document.getElementById("toasts")!;
  toasts.textContent = state.toasts.slice(-3).map((x) => x.text).join("\n");

  const cam = (document.getElementById("camera") as HTMLCanvasElement).getContext("2d")!;
  const scale = cam.canvas.width / VIEW_SIZE_PX;
  cam.fillStyle = "#554";
  cam.fillRect(0, 0, cam.canvas.width, cam.canvas.height);
  const view = renderCameraView(state, TARGET, now);
  const toCanvas = (p: { u: number; v: number }) => ({
    x: cam.canvas.width / 2 + p.u * scale,
    y: cam.canvas.height / 2 - p.v * scale,
  });
  const tp = toCanvas(view.targetPx);
  cam.strokeStyle = "#fa0";
  cam.strokeRect(tp.x - 4, tp.y - 4, 8, 8);
  if (view.crossPx) {
    const cp = toCanvas(view.crossPx);
    cam.strokeStyle = view.onTarget ? "#0f0" : "#f33";
    cam.beginPath();
    cam.moveTo(cp.x - 8, cp.y);
    cam.lineTo(cp.x + 8, cp.y);
    cam.moveTo(cp.x, cp.y - 8);
    cam.lineTo(cp.x, cp.y + 8);
    cam.stroke();
  }
  if (view.displacementMm) {
    cam.fillStyle = "#fff";
    cam.fillText(
      `Δ ${view.displacementMm.lateralMm.toFixed(0)}, ` +
        `${view.displacementMm.verticalMm.toFixed(0)} mm @ ${MM_PER_PIXEL} mm/px`,
      4,
      12,
    );
  }
  if (view.stale || isStale(state, now)) {
    cam.fillStyle = "rgba(128,128,128,0.7)";
    cam.fillRect(0, 0, cam.canvas.width, cam.canvas.height);
    cam.fillStyle = "#fff";
    cam.fillText("NO SIGNAL", cam.canvas.width / 2 - 26, cam.canvas.height / 2);
  }

  for (const [id, buf] of [
    ["plot-rpm", plots.rpmMean],
    ["plot-power", plots.powerW],
    ["plot-force", plots.feedForceN],
  ] as const) {
    const ctx = (document.getElementById(id) as HTMLCanvasElement).getContext("2d")!;
    drawStrip(ctx, buf.series().map((s) => s.value), id.slice(5));
  }
  requestAnimationFrame(render);
}
requestAnimationFrame(render);
