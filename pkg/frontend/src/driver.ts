/**
 * Scripted UI driver: completes the full perch-rotate-drill-detach mission
 * through the same console layers a human uses — ConsoleState, control
 * enablement, the rate limiter, and the command serializer.  Used by the
 * integration test to prove interactive/scripted equivalence.
 */
import { RateLimiter, channelFor } from "./bindings.js";
import type { Mode, OperatorCommand, Telemetry } from "./schema.js";
import { parseServerFrame, serializeCommand } from "./schema.js";
import {
  ConsoleState,
  ControlGroup,
  controlEnabled,
  initialState,
  reduce,
} from "./state.js";

const GANTRY_CENTER_X = 0.03;
const ROTORS_DOWN_RPM = 120;

export interface DriverResult {
  modeTrace: Mode[];
  rejectionToasts: string[];
  frames: number;
}

interface SocketLike {
  send(data: string): void;
  on(event: "message", fn: (data: unknown) => void): void;
  on(event: "open" | "close", fn: () => void): void;
}

type Phase =
  | "approach"
  | "perch"
  | "rampdown"
  | "to_rotation"
  | "rotate"
  | "to_manipulation"
  | "drill"
  | "retract"
  | "to_detachment"
  | "await_detach"
  | "done";

/**
 * Drives the mission from telemetry alone: every decision keys off fields
 * an operator can see on the console, never off simulator internals.
 */
export class MissionDriver {
  state: ConsoleState = initialState();
  phase: Phase = "approach";
  modeTrace: Mode[] = [];
  rejectionToasts: string[] = [];
  frames = 0;
  private limiter = new RateLimiter();
  private lastFlightRequest = 0;

  constructor(
    private socket: SocketLike,
    private depthGoalMm: number,
  ) {
    socket.on("open", () => {
      this.state = reduce(this.state, { kind: "socket", status: "connected" });
    });
    socket.on("message", (data) => this.onMessage(String(data)));
  }

  get done(): boolean {
    return this.phase === "done";
  }

  private send(cmd: OperatorCommand, group: ControlGroup | null, nowMs: number): boolean {
    // mode gating first (what the UI greys out), then the per-control rate cap
    if (group !== null && !controlEnabled(this.state, group, nowMs)) return false;
    if (!this.limiter.allow(channelFor(cmd), nowMs)) return false;
    this.socket.send(serializeCommand(cmd));
    return true;
  }

  private onMessage(raw: string): void {
    const nowMs = Date.now();
    const frame = parseServerFrame(raw);
    this.state = reduce(this.state, { kind: "frame", frame, nowMs });
    if (frame.kind === "rejected") {
      this.rejectionToasts.push(`${frame.command}: ${frame.reason}`);
      return;
    }
    if (frame.kind !== "telemetry") return;
    this.frames += 1;
    const t = frame.telemetry;
    if (this.modeTrace[this.modeTrace.length - 1] !== t.mode) {
      this.modeTrace.push(t.mode);
    }
    this.step(t, nowMs);
  }

  private step(t: Telemetry, nowMs: number): void {
    switch (this.phase) {
      case "approach":
        this.send({ type: "pumps", on: true }, "pumps", nowMs);
        this.send(
          { type: "set_flight_ref", velocity: [0.4, 0, 0], heading: 0 },
          "flight_ref",
          nowMs,
        );
        // rising cup pressure is the operator's contact cue
        if (t.cup_pressure_kpa[0] > 0.5 || t.cup_pressure_kpa[1] > 0.5) {
          this.phase = "perch";
        }
        break;
      case "perch":
        this.send({ type: "set_mode", mode: "perching" }, null, nowMs);
        if (t.mode === "perching" && t.attached) this.phase = "rampdown";
        break;
      case "rampdown":
        this.send({ type: "ramp_down_rotors" }, "ramp_down", nowMs);
        if (Math.max(...t.rotor_rpm.map(Math.abs)) < ROTORS_DOWN_RPM) {
          this.phase = "to_rotation";
        }
        break;
      case "to_rotation":
        // wait for the tool carriage to finish auto-centering
        if (Math.abs(t.gantry[0] - GANTRY_CENTER_X) < 1e-3) {
          this.send({ type: "set_mode", mode: "rotation" }, null, nowMs);
        }
        if (t.mode === "rotation") this.phase = "rotate";
        break;
      case "rotate":
        this.send({ type: "rotation_throttle", value: 0.3 }, "rotation_throttle", nowMs);
        if (t.theta_deg > 88.5) this.phase = "to_manipulation";
        break;
      case "to_manipulation":
        this.send({ type: "rotation_throttle", value: 0.0 }, "rotation_throttle", nowMs);
        this.send({ type: "set_mode", mode: "manipulation" }, null, nowMs);
        if (t.mode === "manipulation") this.phase = "drill";
        break;
      case "drill":
        this.send({ type: "tool_power", on: true }, "tool_power", nowMs);
        if (t.tool_on) {
          this.send(
            { type: "feed_throttle", value: 0.8, direction: "advance" },
            "feed_throttle",
            nowMs,
          );
        }
        if (t.drill_depth_mm >= this.depthGoalMm) this.phase = "retract";
        break;
      case "retract":
        this.send({ type: "tool_power", on: false }, "tool_power", nowMs);
        if (!t.tool_on) {
          this.send(
            { type: "feed_throttle", value: 0.5, direction: "retract" },
            "feed_throttle",
            nowMs,
          );
        }
        if (!t.tool_on && t.slide_mm < 1.0) this.phase = "to_detachment";
        break;
      case "to_detachment":
        this.send(
          { type: "feed_throttle", value: 0.0, direction: "advance" },
          "feed_throttle",
          nowMs,
        );
        this.send({ type: "set_mode", mode: "detachment" }, null, nowMs);
        if (t.mode === "detachment") this.phase = "await_detach";
        break;
      case "await_detach":
        // the console shows the sequence finishing: cups released, table
        // back down flat; then the operator asks for flight once a second
        if (!t.attached && t.theta_deg < 1.0 && t.hinge_lock === "locked") {
          if (nowMs - this.lastFlightRequest > 1000) {
            this.lastFlightRequest = nowMs;
            this.send({ type: "set_mode", mode: "flight" }, null, nowMs);
          }
        }
        if (t.mode === "flight") this.phase = "done";
        break;
      case "done":
        break;
    }
  }

  result(): DriverResult {
    return {
      modeTrace: this.modeTrace,
      rejectionToasts: this.rejectionToasts,
      frames: this.frames,
    };
  }
}
