/**
 * Console state and reducer.  Socket callbacks and input handlers only
 * dispatch events; every displayed value traces back to a telemetry field.
 */
import type { Mode, ServerFrame, Telemetry } from "./schema.js";

export type ConnectionStatus = "disconnected" | "connecting" | "connected";

/** Control groups, gated on the mode reported by telemetry. */
export const CONTROL_GROUPS = [
  "flight_ref",
  "pumps",
  "rotation_throttle",
  "feed_throttle",
  "gantry",
  "tool_power",
  "ramp_down",
] as const;
export type ControlGroup = (typeof CONTROL_GROUPS)[number];

// Mirrors the server-side guard structure so the operator sees legality
// before sending; the server remains the authority.
const ENABLED: Record<Mode, ControlGroup[]> = {
  flight: ["flight_ref", "pumps"],
  perching: ["flight_ref", "pumps", "ramp_down"],
  rotation: ["rotation_throttle"],
  manipulation: ["feed_throttle", "gantry", "tool_power"],
  detachment: [],
};

export interface Toast {
  atMs: number;
  text: string;
}

export interface ConsoleState {
  connection: ConnectionStatus;
  telemetry: Telemetry | null;
  /** wall-clock ms when the latest telemetry frame arrived */
  lastFrameAtMs: number;
  toasts: Toast[];
}

export function initialState(): ConsoleState {
  return {
    connection: "disconnected",
    telemetry: null,
    lastFrameAtMs: 0,
    toasts: [],
  };
}

export type ConsoleEvent =
  | { kind: "socket"; status: ConnectionStatus }
  | { kind: "frame"; frame: ServerFrame; nowMs: number };

const MAX_TOASTS = 20;

export function reduce(state: ConsoleState, ev: ConsoleEvent): ConsoleState {
  switch (ev.kind) {
    case "socket":
      return { ...state, connection: ev.status };
    case "frame": {
      const f = ev.frame;
      if (f.kind === "telemetry") {
        return { ...state, telemetry: f.telemetry, lastFrameAtMs: ev.nowMs };
      }
      const text =
        f.kind === "rejected"
          ? `${f.command} rejected: ${f.reason}`
          : `protocol error: ${f.message}`;
      const toasts = [...state.toasts, { atMs: ev.nowMs, text }].slice(-MAX_TOASTS);
      return { ...state, toasts };
    }
  }
}

export const STALE_AFTER_MS = 1000;

export function isStale(state: ConsoleState, nowMs: number): boolean {
  return state.telemetry === null || nowMs - state.lastFrameAtMs > STALE_AFTER_MS;
}

/** A control is live iff we are connected, fresh, and the mode allows it. */
export function controlEnabled(
  state: ConsoleState,
  group: ControlGroup,
  nowMs: number,
): boolean {
  if (state.connection !== "connected" || isStale(state, nowMs)) return false;
  return ENABLED[state.telemetry!.mode].includes(group);
}
