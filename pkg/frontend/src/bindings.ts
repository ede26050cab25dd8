/**
 * Keyboard-first input bindings.  Each key event maps to at most one
 * operator command; streams (throttle sliders, gantry jog) are rate
 * limited to 20 Hz per control so a held key cannot flood the bridge.
 *
 * Binding table:
 *   W/S/A/D     forward/back/left/right velocity (flight)
 *   R/F         climb / descend
 *   Q/E         yaw left / right
 *   P           pumps toggle           M    next mode request
 *   K           ramp rotors down       O    tool power toggle
 *   [ / ]       rotation throttle -/+  arrows  gantry jog, 1 mm per press
 *   space       all-stop (zero references)
 */
import type { Mode, OperatorCommand, Telemetry } from "./schema.js";
import { MODES } from "./schema.js";

export const MIN_COMMAND_SPACING_MS = 50; // 20 Hz per control group

export class RateLimiter {
  private last = new Map<string, number>();

  /** true if a command on this channel may be sent at `nowMs`. */
  allow(channel: string, nowMs: number): boolean {
    const prev = this.last.get(channel);
    if (prev !== undefined && nowMs - prev < MIN_COMMAND_SPACING_MS) return false;
    this.last.set(channel, nowMs);
    return true;
  }
}

export const GANTRY_STEP_M = 0.001; // 1 mm per arrow press

const VELOCITY_STEP = 0.2; // m/s per key
const THROTTLE_STEP = 0.05;

export interface InputContext {
  telemetry: Telemetry;
  rotationThrottle: number; // last commanded, echoed locally
  feedThrottle: number;
}

export function nextMode(mode: Mode): Mode {
  return MODES[(MODES.indexOf(mode) + 1) % MODES.length];
}

/**
 * Translate a key press into a command, or null when the key is unbound
 * or meaningless in the current mode.  Enablement (mode gating) is the
 * caller's job via `controlEnabled`; this stays a pure key->command map.
 */
export function commandForKey(key: string, ctx: InputContext): OperatorCommand | null {
  const t = ctx.telemetry;
  const vel = (dx: number, dy: number, dz: number): OperatorCommand => ({
    type: "set_flight_ref",
    velocity: [dx, dy, dz],
    heading: 0.0,
  });
  switch (key.toLowerCase()) {
    case "w":
      return vel(VELOCITY_STEP, 0, 0);
    case "s":
      return vel(-VELOCITY_STEP, 0, 0);
    case "a":
      return vel(0, VELOCITY_STEP, 0);
    case "d":
      return vel(0, -VELOCITY_STEP, 0);
    case "r":
      return vel(0, 0, VELOCITY_STEP);
    case "f":
      return vel(0, 0, -VELOCITY_STEP);
    case " ":
      return vel(0, 0, 0);
    case "p":
      return { type: "pumps", on: !(t.cup_pressure_kpa[0] > 0 || t.cup_pressure_kpa[1] > 0) };
    case "m":
      return { type: "set_mode", mode: nextMode(t.mode) };
    case "k":
      return { type: "ramp_down_rotors" };
    case "o":
      return { type: "tool_power", on: !t.tool_on };
    case "[":
      return {
        type: "rotation_throttle",
        value: Math.max(-1, ctx.rotationThrottle - THROTTLE_STEP),
      };
    case "]":
      return {
        type: "rotation_throttle",
        value: Math.min(1, ctx.rotationThrottle + THROTTLE_STEP),
      };
    case "arrowup":
      return { type: "gantry_target", x: t.gantry[0] - GANTRY_STEP_M, y: t.gantry[1] };
    case "arrowdown":
      return { type: "gantry_target", x: t.gantry[0] + GANTRY_STEP_M, y: t.gantry[1] };
    case "arrowleft":
      return { type: "gantry_target", x: t.gantry[0], y: t.gantry[1] + GANTRY_STEP_M };
    case "arrowright":
      return { type: "gantry_target", x: t.gantry[0], y: t.gantry[1] - GANTRY_STEP_M };
    default:
      return null;
  }
}

/** Channel used for rate limiting: one bucket per control, not per key. */
export function channelFor(cmd: OperatorCommand): string {
  return cmd.type;
}
