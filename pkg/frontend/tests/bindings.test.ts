import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import {
  GANTRY_STEP_M,
  MIN_COMMAND_SPACING_MS,
  RateLimiter,
  channelFor,
  commandForKey,
  nextMode,
} from "../src/bindings.js";
import { parseServerFrame, type Telemetry } from "../src/schema.js";

const telemetry: Telemetry = (() => {
  const doc = JSON.parse(
    readFileSync(join(__dirname, "fixtures", "telemetry_frames.json"), "utf8"),
  )[0];
  const f = parseServerFrame(JSON.stringify(doc));
  if (f.kind !== "telemetry") throw new Error("fixture is not telemetry");
  return f.telemetry;
})();

const ctx = { telemetry, rotationThrottle: 0.2, feedThrottle: 0 };

describe("rate limiter", () => {
  it("caps each channel at 20 Hz", () => {
    const rl = new RateLimiter();
    let sent = 0;
    for (let ms = 0; ms < 1000; ms += 5) {
      if (rl.allow("rotation_throttle", ms)) sent++;
    }
    expect(sent).toBe(1000 / MIN_COMMAND_SPACING_MS);
  });

  it("channels are independent", () => {
    const rl = new RateLimiter();
    expect(rl.allow("a", 0)).toBe(true);
    expect(rl.allow("b", 1)).toBe(true);
    expect(rl.allow("a", 10)).toBe(false);
  });
});

describe("key bindings", () => {
  it("velocity keys produce flight references", () => {
    expect(commandForKey("w", ctx)).toEqual({
      type: "set_flight_ref",
      velocity: [0.2, 0, 0],
      heading: 0,
    });
    expect(commandForKey(" ", ctx)).toEqual({
      type: "set_flight_ref",
      velocity: [0, 0, 0],
      heading: 0,
    });
  });

  it("arrow keys jog the gantry by exactly 1 mm", () => {
    const up = commandForKey("ArrowUp", ctx);
    expect(up).toEqual({
      type: "gantry_target",
      x: telemetry.gantry[0] - GANTRY_STEP_M,
      y: telemetry.gantry[1],
    });
    const left = commandForKey("ArrowLeft", ctx);
    if (left?.type !== "gantry_target") throw new Error("expected gantry command");
    expect(left.y - telemetry.gantry[1]).toBeCloseTo(0.001, 12);
  });

  it("throttle keys step and clamp", () => {
    expect(commandForKey("]", ctx)).toEqual({ type: "rotation_throttle", value: 0.25 });
    const floor = commandForKey("[", { ...ctx, rotationThrottle: -0.99 });
    if (floor?.type !== "rotation_throttle") throw new Error("expected throttle");
    expect(floor.value).toBe(-1);
  });

  it("toggles key off current telemetry, never local guesses", () => {
    expect(commandForKey("o", ctx)).toEqual({ type: "tool_power", on: true });
    expect(commandForKey("o", { ...ctx, telemetry: { ...telemetry, tool_on: true } })).toEqual({
      type: "tool_power",
      on: false,
    });
  });

  it("unbound keys map to nothing", () => {
    expect(commandForKey("z", ctx)).toBeNull();
    expect(commandForKey("Escape", ctx)).toBeNull();
  });

  it("mode key walks the phase sequence", () => {
    expect(nextMode("flight")).toBe("perching");
    expect(nextMode("detachment")).toBe("flight");
    const cmd = commandForKey("m", ctx);
    expect(cmd).toEqual({ type: "set_mode", mode: "perching" });
  });

  it("every command maps to a rate-limit channel", () => {
    for (const key of ["w", "p", "m", "k", "o", "[", "ArrowUp"]) {
      const cmd = commandForKey(key, ctx);
      expect(cmd).not.toBeNull();
      expect(channelFor(cmd!)).toBe(cmd!.type);
    }
  });
});
