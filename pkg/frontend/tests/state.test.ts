import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { parseServerFrame, type Telemetry } from "../src/schema.js";
import {
  CONTROL_GROUPS,
  controlEnabled,
  initialState,
  isStale,
  reduce,
  type ConsoleState,
} from "../src/state.js";

const fixture: Telemetry = (() => {
  const doc = JSON.parse(
    readFileSync(join(__dirname, "fixtures", "telemetry_frames.json"), "utf8"),
  )[0];
  const f = parseServerFrame(JSON.stringify(doc));
  if (f.kind !== "telemetry") throw new Error("fixture is not telemetry");
  return f.telemetry;
})();

function connectedWith(telemetry: Telemetry, nowMs = 1000): ConsoleState {
  let s = initialState();
  s = reduce(s, { kind: "socket", status: "connected" });
  s = reduce(s, { kind: "frame", frame: { kind: "telemetry", telemetry }, nowMs });
  return s;
}

describe("reducer", () => {
  it("stores telemetry and arrival time", () => {
    const s = connectedWith(fixture, 1234);
    expect(s.telemetry).toEqual(fixture);
    expect(s.lastFrameAtMs).toBe(1234);
  });

  it("turns rejections and errors into toasts", () => {
    let s = connectedWith(fixture);
    s = reduce(s, {
      kind: "frame",
      frame: { kind: "rejected", command: "ToolPower", reason: "not now" },
      nowMs: 1100,
    });
    s = reduce(s, {
      kind: "frame",
      frame: { kind: "error", message: "bad command" },
      nowMs: 1200,
    });
    expect(s.toasts.map((t) => t.text)).toEqual([
      "ToolPower rejected: not now",
      "protocol error: bad command",
    ]);
  });

  it("caps the toast list", () => {
    let s = connectedWith(fixture);
    for (let i = 0; i < 50; i++) {
      s = reduce(s, {
        kind: "frame",
        frame: { kind: "error", message: `e${i}` },
        nowMs: 1000 + i,
      });
    }
    expect(s.toasts.length).toBe(20);
    expect(s.toasts[19].text).toBe("protocol error: e49");
  });
});

describe("staleness", () => {
  it("no telemetry is stale", () => {
    expect(isStale(initialState(), 0)).toBe(true);
  });

  it("fresh under 1 s, stale after", () => {
    const s = connectedWith(fixture, 1000);
    expect(isStale(s, 1999)).toBe(false);
    expect(isStale(s, 2001)).toBe(true);
  });
});

describe("control enablement mirrors the mode guards", () => {
  const byMode: Record<string, string[]> = {
    flight: ["flight_ref", "pumps"],
    perching: ["flight_ref", "pumps", "ramp_down"],
    rotation: ["rotation_throttle"],
    manipulation: ["feed_throttle", "gantry", "tool_power"],
    detachment: [],
  };

  for (const [mode, expected] of Object.entries(byMode)) {
    it(`mode ${mode}`, () => {
      const s = connectedWith({ ...fixture, mode: mode as Telemetry["mode"] }, 1000);
      const enabled = CONTROL_GROUPS.filter((g) => controlEnabled(s, g, 1100));
      expect(enabled.sort()).toEqual([...expected].sort());
    });
  }

  it("everything disabled while stale or disconnected", () => {
    const s = connectedWith(fixture, 1000);
    for (const g of CONTROL_GROUPS) {
      expect(controlEnabled(s, g, 5000)).toBe(false);
    }
    const d = reduce(s, { kind: "socket", status: "disconnected" });
    for (const g of CONTROL_GROUPS) {
      expect(controlEnabled(d, g, 1100)).toBe(false);
    }
  });
});
