"""Gantry positioning, drill/wrench material interaction, and the
laser-cross camera observation the operator aligns with."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import Material, RobotParams

NOT_VISIBLE = None  # sentinel for a laser cross outside the camera field


@dataclass
class ToolSpec:
    kind: str = "hammer_drill"  # or "impact_wrench"
    mass: float = 2.3  # kg
    min_feed_force: float = 80.0  # N
    drill_rate_coeff: float = 2e-5  # m/(N*s)
    max_depth: float = 0.05  # m

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("tool mass must be positive")


IMPACT_WRENCH = ToolSpec(kind="impact_wrench", mass=2.0, min_feed_force=40.0, max_depth=0.06)


@dataclass
class GantryState:
    position: np.ndarray = field(default_factory=lambda: np.zeros(2))  # m, in B xy
    target: np.ndarray = field(default_factory=lambda: np.zeros(2))
    speed_limit: float = 0.05  # m/s
    backlash: float = 0.001  # m lost per direction reversal
    last_dir: np.ndarray = field(default_factory=lambda: np.zeros(2))
    backlash_debt: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float).copy()
        self.target = np.asarray(self.target, dtype=float).copy()
        self.last_dir = np.asarray(self.last_dir, dtype=float).copy()
        self.backlash_debt = np.asarray(self.backlash_debt, dtype=float).copy()


def set_gantry_target(gantry: GantryState, target, params: RobotParams) -> bool:
    """Accept a target only inside the workspace box."""
    target = np.asarray(target, dtype=float)
    lo, hi = params.gantry_bounds()
    if np.any(target < lo - 1e-12) or np.any(target > hi + 1e-12):
        return False
    gantry.target = target.copy()
    return True


def gantry_step(gantry: GantryState, dt: float) -> GantryState:
    """Rate-limited move toward the target; each axis direction reversal
    eats ``backlash`` meters of commanded travel before the stage moves."""
    max_step = gantry.speed_limit * dt
    for ax in range(2):
        err = gantry.target[ax] - gantry.position[ax]
        if err == 0.0:
            continue
        d = math.copysign(1.0, err)
        if gantry.last_dir[ax] != 0.0 and d != gantry.last_dir[ax]:
            gantry.backlash_debt[ax] = gantry.backlash
        gantry.last_dir[ax] = d
        travel = min(abs(err), max_step)
        if gantry.backlash_debt[ax] > 0.0:
            eaten = min(travel, gantry.backlash_debt[ax])
            gantry.backlash_debt[ax] -= eaten
            travel -= eaten
        gantry.position[ax] += d * travel
    return gantry


@dataclass
class SensingModel:
    laser_offset: np.ndarray = field(default_factory=lambda: np.array([-0.0065, -0.0075]))  # m
    pixel_pitch: float = 0.004  # m per pixel on the wall
    camera_resolution: tuple = (64, 64)  # px, field centered on the workspace
    pointing_noise_sigma: float = 0.0015  # m

    def __post_init__(self):
        self.laser_offset = np.asarray(self.laser_offset, dtype=float).copy()
        if self.pixel_pitch <= 0:
            raise ValueError("pixel pitch must be positive")


def observe_laser_cross(true_tool_pos, model: SensingModel, rng=None):
    """Pixel coordinate of the projected laser cross for a tool at
    ``true_tool_pos`` on the wall plane (workspace-centered coordinates).

    Returns an integer (px, py) pair, or NOT_VISIBLE outside the field.
    """
    pos = np.asarray(true_tool_pos, dtype=float) + model.laser_offset
    if rng is not None and model.pointing_noise_sigma > 0:
        pos = pos + rng.normal(0.0, model.pointing_noise_sigma, 2)
    px = np.floor(pos / model.pixel_pitch + 0.5).astype(int)
    half = np.asarray(model.camera_resolution) // 2
    if np.any(np.abs(px) > half):
        return NOT_VISIBLE
    return (int(px[0]), int(px[1]))


def pixel_to_wall(pixel, model: SensingModel) -> np.ndarray:
    return np.asarray(pixel, dtype=float) * model.pixel_pitch


def drill_step(
    feed_force: float, spec: ToolSpec, material: Material, depth: float, dt: float
) -> float:
    """Advance the hole depth: progress is proportional to feed force above
    the material/tool threshold, capped at the tool's max depth."""
    threshold = max(spec.min_feed_force, material.min_feed_force)
    rate = material.drill_rate_coeff * max(0.0, feed_force - threshold)
    return min(depth + rate * dt, spec.max_depth)


def hole_position(
    commanded,
    sensing: SensingModel | None = None,
    backlash_residual=(0.0, 0.0),
    thrust_drift=(0.0, 0.0),
    slide_jitter=(0.0, 0.0),
) -> np.ndarray:
    """Final hole position on the wall: the commanded point plus every error
    source.  The systematic term is the laser/tooltip misalignment -- the
    operator centers the cross on the target, so the tool lands displaced by
    the negative laser offset."""
    hole = np.asarray(commanded, dtype=float).copy()
    if sensing is not None:
        hole = hole - sensing.laser_offset
    return hole + np.asarray(backlash_residual) + np.asarray(thrust_drift) + np.asarray(slide_jitter)


@dataclass
class HoleRecord:
    run_id: int
    target: np.ndarray  # m, wall-plane coordinates
    hole: np.ndarray
    excluded: bool = False

    @property
    def offset(self) -> np.ndarray:
        return self.hole - self.target

    @property
    def offset_norm(self) -> float:
        return float(np.linalg.norm(self.offset))

    def csv_row(self) -> str:
        return (
            f"{self.run_id},{self.target[0]:.6f},{self.target[1]:.6f},"
            f"{self.hole[0]:.6f},{self.hole[1]:.6f},{self.offset_norm * 1e3:.3f},"
            f"{int(self.excluded)}"
        )


HOLE_CSV_HEADER = "run_id,target_x,target_y,hole_x,hole_y,offset_norm_mm,excluded"


def _error_array(records) -> np.ndarray:
    """Accept a list of HoleRecord or a raw (n, 2) error array."""
    if isinstance(records, np.ndarray):
        return records
    return np.array([r.offset for r in records if not r.excluded])


def accuracy(records) -> float:
    """Mean offset magnitude of the included holes from their targets."""
    errs = _error_array(records)
    return float(np.mean(np.linalg.norm(errs, axis=1)))


def precision(records) -> float:
    """Maximum deviation of the included hole errors from their mean error."""
    errs = _error_array(records)
    mean = errs.mean(axis=0)
    return float(np.max(np.linalg.norm(errs - mean, axis=1)))
