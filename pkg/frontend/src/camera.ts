/**
 * Synthetic camera view model: a wall patch in tool-workspace coordinates
 * with the laser cross and the mission target marker.  Pure data in/out;
 * rendering to canvas is a thin layer on top of `CameraView`.
 */
import type { Telemetry } from "./schema.js";
import type { ConsoleState } from "./state.js";
import { isStale } from "./state.js";

export const MM_PER_PIXEL = 4;
export const VIEW_SIZE_PX = 64; // 64 px -> 256 mm square wall patch

// body-frame arm between the hinge pivot and the body origin; the vertical
// wall coordinate of the tooltip is hinge arm minus gantry x
const HINGE_ARM_M = 0.03;

export interface WallPoint {
  lateralMm: number;
  verticalMm: number;
}

export interface CameraView {
  stale: boolean;
  /** laser cross, wall-plane mm relative to the perch point */
  cross: WallPoint | null;
  /** same point quantized to the camera grid, px relative to view center */
  crossPx: { u: number; v: number } | null;
  target: WallPoint;
  targetPx: { u: number; v: number };
  /** cross minus target, mm; null while stale */
  displacementMm: WallPoint | null;
  onTarget: boolean;
}

export function toolWallPoint(t: Telemetry): WallPoint {
  return {
    lateralMm: t.gantry[1] * 1e3,
    verticalMm: (HINGE_ARM_M - t.gantry[0]) * 1e3,
  };
}

function quantize(p: WallPoint): { u: number; v: number } {
  return {
    u: Math.floor(p.lateralMm / MM_PER_PIXEL + 0.5),
    v: Math.floor(p.verticalMm / MM_PER_PIXEL + 0.5),
  };
}

export function renderCameraView(
  state: ConsoleState,
  target: WallPoint,
  nowMs: number,
): CameraView {
  const targetPx = quantize(target);
  if (isStale(state, nowMs) || state.telemetry === null) {
    return {
      stale: true,
      cross: null,
      crossPx: null,
      target,
      targetPx,
      displacementMm: null,
      onTarget: false,
    };
  }
  const cross = toolWallPoint(state.telemetry);
  const crossPx = quantize(cross);
  const displacementMm = {
    lateralMm: cross.lateralMm - target.lateralMm,
    verticalMm: cross.verticalMm - target.verticalMm,
  };
  return {
    stale: false,
    cross,
    crossPx,
    target,
    targetPx,
    displacementMm,
    onTarget: crossPx.u === targetPx.u && crossPx.v === targetPx.v,
  };
}
