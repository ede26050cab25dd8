/**
 * Live strip-chart buffers for propeller rpm, electrical power, and feed
 * force.  Fixed-capacity ring buffers keyed by sim time; the canvas layer
 * just polls `series()`.
 */
import type { Telemetry } from "./schema.js";

export interface Sample {
  t: number;
  value: number;
}

export class StripBuffer {
  private buf: Sample[] = [];

  constructor(readonly capacity: number = 500) {
    if (capacity < 1) throw new Error("capacity must be positive");
  }

  push(t: number, value: number): void {
    const last = this.buf[this.buf.length - 1];
    if (last !== undefined && t < last.t) {
      // sim restarted (new session on the same socket): start over
      this.buf = [];
    }
    this.buf.push({ t, value });
    if (this.buf.length > this.capacity) this.buf.shift();
  }

  series(): readonly Sample[] {
    return this.buf;
  }

  latest(): Sample | null {
    return this.buf[this.buf.length - 1] ?? null;
  }
}

export class TelemetryPlots {
  readonly rpmMean = new StripBuffer();
  readonly powerW = new StripBuffer();
  readonly feedForceN = new StripBuffer();
  readonly drillDepthMm = new StripBuffer();

  ingest(t: Telemetry): void {
    const rpm = t.rotor_rpm.reduce((a, b) => a + Math.abs(b), 0) / 4;
    this.rpmMean.push(t.t, rpm);
    this.powerW.push(t.t, t.power_w);
    this.feedForceN.push(t.t, t.feed_force_n);
    this.drillDepthMm.push(t.t, t.drill_depth_mm);
  }
}
