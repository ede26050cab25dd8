import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import {
  CommandSchema,
  parseServerFrame,
  serializeCommand,
} from "../src/schema.js";

const frames: unknown[] = JSON.parse(
  readFileSync(join(__dirname, "fixtures", "telemetry_frames.json"), "utf8"),
);

describe("telemetry schema", () => {
  it("accepts captured simulator frames", () => {
    for (const doc of frames) {
      const f = parseServerFrame(JSON.stringify(doc));
      expect(f.kind).toBe("telemetry");
      if (f.kind === "telemetry") {
        expect(f.telemetry.v).toBe(1);
        expect(f.telemetry.mode).toBe("flight");
      }
    }
  });

  it("keeps frame time monotone in the fixture", () => {
    const ts = frames.map((d) => (d as { t: number }).t);
    for (let i = 1; i < ts.length; i++) expect(ts[i]).toBeGreaterThan(ts[i - 1]);
  });

  it("classifies error and rejection frames", () => {
    expect(parseServerFrame('{"error": "bad command"}')).toEqual({
      kind: "error",
      message: "bad command",
    });
    expect(parseServerFrame('{"rejected": "ToolPower", "reason": "nope"}')).toEqual({
      kind: "rejected",
      command: "ToolPower",
      reason: "nope",
    });
  });

  it("rejects malformed frames", () => {
    expect(() => parseServerFrame("not json")).toThrow();
    expect(() => parseServerFrame('{"something": 1}')).toThrow();
    const broken = { ...(frames[0] as object), mode: "warp" };
    expect(() => parseServerFrame(JSON.stringify(broken))).toThrow();
  });
});

describe("command schema", () => {
  it("serializes every command type", () => {
    const cmds = [
      { type: "set_flight_ref", velocity: [0.4, 0, 0], heading: 0 },
      { type: "set_mode", mode: "perching" },
      { type: "pumps", on: true },
      { type: "valves", open: false },
      { type: "rotation_throttle", value: 0.3 },
      { type: "feed_throttle", value: 0.8, direction: "advance" },
      { type: "gantry_target", x: 0.03, y: 0.0 },
      { type: "tool_power", on: true },
      { type: "ramp_down_rotors" },
    ] as const;
    for (const c of cmds) {
      const round = JSON.parse(serializeCommand(c as never));
      expect(round).toEqual(c);
    }
  });

  it("rejects out-of-range throttles and unknown types", () => {
    expect(() => serializeCommand({ type: "rotation_throttle", value: 1.5 } as never)).toThrow();
    expect(() =>
      serializeCommand({ type: "feed_throttle", value: -0.1, direction: "advance" } as never),
    ).toThrow();
    expect(CommandSchema.safeParse({ type: "warp_drive" }).success).toBe(false);
  });
});
