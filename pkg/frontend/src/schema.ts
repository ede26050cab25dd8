/**
 * Wire schema for the teleop bridge: line-delimited JSON, one telemetry
 * frame out per 20 ms, one command object in per message.  Kept in lock
 * step with the simulator's command and telemetry codecs.
 */
import { z } from "zod";

export const MODES = [
  "flight",
  "perching",
  "rotation",
  "manipulation",
  "detachment",
] as const;
export type Mode = (typeof MODES)[number];

const vec3 = z.tuple([z.number(), z.number(), z.number()]);
const vec2 = z.tuple([z.number(), z.number()]);

export const TelemetrySchema = z.object({
  v: z.literal(1),
  t: z.number(),
  mode: z.enum(MODES),
  position: vec3,
  orientation: z.tuple([z.number(), z.number(), z.number(), z.number()]),
  velocity: vec3,
  theta_deg: z.number(),
  slide_mm: z.number(),
  hinge_lock: z.enum(["locked", "released", "rotation_locked"]),
  rotor_rpm: z.tuple([z.number(), z.number(), z.number(), z.number()]),
  cup_pressure_kpa: vec2,
  attached: z.boolean(),
  gantry: vec2,
  feed_force_n: z.number(),
  power_w: z.number(),
  drill_depth_mm: z.number(),
  tool_on: z.boolean(),
  saturated: z.boolean(),
  rejection: z.string(),
});
export type Telemetry = z.infer<typeof TelemetrySchema>;

export const ErrorFrameSchema = z.object({ error: z.string() });
export const RejectionFrameSchema = z.object({
  rejected: z.string(),
  reason: z.string(),
});

export type ServerFrame =
  | { kind: "telemetry"; telemetry: Telemetry }
  | { kind: "error"; message: string }
  | { kind: "rejected"; command: string; reason: string };

/** Parse one line from the socket; throws ZodError/SyntaxError on garbage. */
export function parseServerFrame(raw: string): ServerFrame {
  const doc = JSON.parse(raw);
  if (typeof doc === "object" && doc !== null) {
    if ("t" in doc) {
      return { kind: "telemetry", telemetry: TelemetrySchema.parse(doc) };
    }
    if ("error" in doc) {
      return { kind: "error", message: ErrorFrameSchema.parse(doc).error };
    }
    if ("rejected" in doc) {
      const r = RejectionFrameSchema.parse(doc);
      return { kind: "rejected", command: r.rejected, reason: r.reason };
    }
  }
  throw new Error("unrecognized server frame");
}

export const CommandSchema = z.discriminatedUnion("type", [
  z.object({ type: z.literal("set_flight_ref"), velocity: vec3, heading: z.number() }),
  z.object({ type: z.literal("set_mode"), mode: z.enum(MODES) }),
  z.object({ type: z.literal("pumps"), on: z.boolean() }),
  z.object({ type: z.literal("valves"), open: z.boolean() }),
  z.object({ type: z.literal("rotation_throttle"), value: z.number().min(-1).max(1) }),
  z.object({
    type: z.literal("feed_throttle"),
    value: z.number().min(0).max(1),
    direction: z.enum(["advance", "retract"]),
  }),
  z.object({ type: z.literal("gantry_target"), x: z.number(), y: z.number() }),
  z.object({ type: z.literal("tool_power"), on: z.boolean() }),
  z.object({ type: z.literal("ramp_down_rotors") }),
]);
export type OperatorCommand = z.infer<typeof CommandSchema>;

export function serializeCommand(cmd: OperatorCommand): string {
  return JSON.stringify(CommandSchema.parse(cmd));
}
