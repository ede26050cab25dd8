"""Seeded experiment harness.

Five studies mirror the validation campaign the platform design targets:
a feed-force/power sweep, a 30-attempt perching Monte Carlo, a 3x3
drilling accuracy/precision study, a detachment-timeline replay, and a
battery endurance estimate.  All are deterministic for a fixed seed.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .attachment import HingeLockState, SuctionCupState
from .commands import (
    FeedThrottle,
    GantryTarget,
    OperationMode,
    RotationThrottle,
    SetMode,
    ToolPower,
)
from .control import feed_max_speed
from .frames import Pose, hinge_pose_AB, rot_y, matrix_to_quat
from .mission import MissionSim
from .params import HOVER_POWER, Environment, RobotParams, total_mass
from .rotors import hover_speed, power_draw
from .tool import NOT_VISIBLE, SensingModel, accuracy, precision, pixel_to_wall

EXPERIMENT_DT = 0.004  # s; coarser than the mission default, still stable


@dataclass
class ExperimentReport:
    name: str
    seed: int | None
    records: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    passed: bool = True

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "passed": self.passed,
            "summary": self.summary,
            "records": self.records,
        }

    def write(self, out_dir):
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / f"{self.name}_report.json", "w") as f:
            json.dump(self.to_dict(), f, indent=2)
        if self.records:
            cols = list(self.records[0].keys())
            with open(out / f"{self.name}_trials.csv", "w", newline="") as f:
                w = csv.DictWriter(f, fieldnames=cols)
                w.writeheader()
                w.writerows(self.records)


def perched_sim(
    params: RobotParams | None = None,
    env: Environment | None = None,
    perch_offset=(0.0, 0.0),
    theta: float = 0.0,
    lock: HingeLockState = HingeLockState.LOCKED,
    mode: OperationMode = OperationMode.PERCHING,
    seed: int | None = None,
) -> MissionSim:
    """Build a sim already attached to the wall, skipping the approach.

    The anchor is placed at ``wall_point`` plus the given in-plane offset
    (lateral, vertical); cups sealed at full vacuum, propellers stopped.
    """
    sim = MissionSim(params=params, env=env, seed=seed)
    p, e = sim.params, sim.env
    n = np.asarray(e.wall_normal, dtype=float)
    z = np.array([0.0, 0.0, 1.0])
    y = np.cross(z, -n)
    y /= np.linalg.norm(y)
    anchor_pos = np.asarray(e.wall_point) + y * perch_offset[0] + z * perch_offset[1]
    # attachment frame: x_A into the wall, z_A up
    R_wa = np.column_stack([-n, y, z])
    sim.wall_anchor = Pose(anchor_pos, matrix_to_quat(R_wa))
    sim.perch_offset = np.array(perch_offset, dtype=float)
    sim.state.hinge_theta = theta
    sim.state.hinge_slide = 0.0
    sim.state.body_pose = sim.wall_anchor.compose(hinge_pose_AB(theta, 0.0, p.geometry))
    sim.state.body_twist = np.zeros(6)
    sim.state.rotor_speeds = np.zeros(4)
    sim.cups = (
        SuctionCupState(pressure_deficit=p.vacuum_max, contact=True, attached=True, pump_on=True),
        SuctionCupState(pressure_deficit=p.vacuum_max, contact=True, attached=True, pump_on=True),
    )
    sim.state.cup_pressures = np.full(2, p.vacuum_max)
    sim.state.attached = (True, True)
    sim.pumps_on = True
    sim.gantry.position = np.array(p.geometry.gantry_center)
    sim.gantry.target = sim.gantry.position.copy()
    sim.state.gantry_pos = sim.gantry.position.copy()
    sim.hinge_lock = HingeLockState.LOCKED
    sim.mode = mode
    if mode in (OperationMode.ROTATION, OperationMode.MANIPULATION, OperationMode.DETACHMENT):
        sim.mode_trace = [OperationMode.FLIGHT, OperationMode.PERCHING, mode]
        sim.hinge_lock = lock
    return sim


def manipulation_sim(params=None, env=None, perch_offset=(0.0, 0.0), seed=None) -> MissionSim:
    """Perched at 90 degrees, rotation-locked, ready to feed the tool."""
    return perched_sim(
        params,
        env,
        perch_offset,
        theta=math.pi / 2,
        lock=HingeLockState.ROTATION_LOCKED,
        mode=OperationMode.MANIPULATION,
        seed=seed,
    )


# ---------------------------------------------------------------------------


def run_force_power_sweep(params: RobotParams | None = None) -> ExperimentReport:
    """Feed-force and power vs propeller speed, measured on the perched
    plant with the tool pressed against the wall."""
    params = params or RobotParams()
    report = ExperimentReport("force_power_sweep", seed=None)
    w_max = feed_max_speed(MissionSim(params=params).model)
    targets = [0.0, 1000.0, 2000.0, 3000.0, w_max]
    for rpm in targets:
        sim = manipulation_sim(params=params)
        sim.state.hinge_slide = 0.10  # tool already on the wall surface
        sim.apply_command(FeedThrottle(min(rpm / w_max, 1.0), "advance"))
        sim.run(1.5, dt=EXPERIMENT_DT)  # let the propellers settle
        forces, powers = [], []
        for _ in range(int(0.5 / EXPERIMENT_DT)):
            sim.tick(EXPERIMENT_DT)
            forces.append(sim.current_feed_force())
            powers.append(sim.current_power())
        report.records.append(
            {
                "rpm": round(rpm, 1),
                "feed_force_n": round(float(np.mean(forces)), 3),
                "power_w": round(float(np.mean(powers)), 2),
            }
        )
    by_rpm = {r["rpm"]: r for r in report.records}
    max_row = report.records[-1]
    hover_w = power_draw(
        np.full(4, hover_speed(MissionSim(params=params).model, params.dry_mass)),
        MissionSim(params=params).model,
    )
    report.summary = {
        "force_at_3000_rpm_n": by_rpm[3000.0]["feed_force_n"],
        "force_at_max_rpm_n": max_row["feed_force_n"],
        "max_rpm": max_row["rpm"],
        "power_at_3000_rpm_w": by_rpm[3000.0]["power_w"],
        "hover_power_w": round(float(hover_w), 2),
        "avionics_only_w": by_rpm[0.0]["power_w"],
    }
    report.passed = (
        abs(report.summary["force_at_3000_rpm_n"] - 110.0) <= 4.0
        and abs(report.summary["force_at_max_rpm_n"] - 150.0) <= 5.0
        and abs(report.summary["power_at_3000_rpm_w"] - 2000.0) <= 200.0
        and abs(hover_w - 2000.0) <= 200.0
    )
    return report


def sample_perch_offset(rng, sigma: float, truncation: float) -> np.ndarray:
    """Docking scatter: truncated zero-mean Gaussian per axis."""
    out = np.empty(2)
    for i in range(2):
        v = rng.normal(0.0, sigma) if sigma > 0 else 0.0
        while abs(v) > truncation:
            v = rng.normal(0.0, sigma)
        out[i] = v
    return out


def run_perching_mc(
    n: int = 30,
    scatter_sigma: float = 0.05,
    seed: int = 0,
    truncation: float = 0.10,
    params: RobotParams | None = None,
) -> ExperimentReport:
    """Monte Carlo over docking scatter: does the desired tool point stay
    inside the translated gantry window after each perch?"""
    if n < 1:
        raise ValueError("need at least one trial")
    params = params or RobotParams()
    rng = np.random.default_rng(seed)
    report = ExperimentReport("perching_mc", seed=seed)
    half_lat = params.gantry_workspace[1] / 2.0  # lateral
    half_vert = params.gantry_workspace[0] / 2.0  # vertical at 90 deg
    reachable = 0
    for i in range(n):
        off = sample_perch_offset(rng, scatter_sigma, truncation)
        # the desired tool point, seen from the perched workspace, sits at -offset
        ok = abs(off[0]) <= half_lat and abs(off[1]) <= half_vert
        reachable += int(ok)
        report.records.append(
            {
                "trial": i,
                "offset_lateral_mm": round(off[0] * 1e3, 4),
                "offset_vertical_mm": round(off[1] * 1e3, 4),
                "offset_norm_mm": round(float(np.hypot(*off)) * 1e3, 4),
                "target_reachable": int(ok),
            }
        )
    offs = np.array([[r["offset_lateral_mm"], r["offset_vertical_mm"]] for r in report.records])
    report.summary = {
        "n": n,
        "scatter_sigma_mm": scatter_sigma * 1e3,
        "max_abs_offset_mm": float(np.max(np.abs(offs))) if n else 0.0,
        "reachable_fraction": reachable / n,
        "workspace_mm": [half_lat * 2e3, half_vert * 2e3],
    }
    report.passed = (
        report.summary["max_abs_offset_mm"] <= 100.0 + 1e-9
        and report.summary["reachable_fraction"] >= 0.90
    )
    return report


def drill_one_hole(
    target,
    perch_offset,
    sensing: SensingModel,
    rng,
    params: RobotParams | None = None,
    depth_goal: float = 0.02,
    feed_throttle: float = 0.85,
) -> dict:
    """One perch-rotate-aim-drill cycle, returning the hole record.

    The operator aims by jogging the gantry until the observed laser cross
    sits on the target marker, so the laser mounting offset transfers
    directly into the hole position.
    """
    sim = perched_sim(
        params, perch_offset=perch_offset, mode=OperationMode.ROTATION,
        lock=HingeLockState.RELEASED,
    )
    sim.apply_command(RotationThrottle(0.35))
    t0 = sim.state.time
    while abs(sim.state.hinge_theta - math.pi / 2) > 1e-9 and sim.state.time < t0 + 20:
        sim.tick(EXPERIMENT_DT)
    sim.apply_command(RotationThrottle(0.0))
    sim.run(0.3, dt=EXPERIMENT_DT)
    d = sim.apply_command(SetMode(OperationMode.MANIPULATION))
    if not d.accepted:
        raise RuntimeError(f"could not reach manipulation: {d.reason}")

    # aim: iterate gantry jogs until the observed cross lands on the target
    target = np.asarray(target, dtype=float)
    for _ in range(6):
        px = sim.laser_pixel(sensing, rng)
        if px is NOT_VISIBLE:
            raise RuntimeError("laser cross left the camera field while aiming")
        err = pixel_to_wall(px, sensing) - target
        if np.max(np.abs(err)) < sensing.pixel_pitch / 2.0:
            break
        g = sim.gantry.position
        # wall (lateral, vertical) -> gantry (x, y): vertical = hinge_offset - x
        want = np.array([g[0] + err[1], g[1] - err[0]])
        sim.apply_command(GantryTarget(want[0], want[1]))
        t0 = sim.state.time
        while not sim.gantry_at_target() and sim.state.time < t0 + 10:
            sim.tick(EXPERIMENT_DT)
        sim.run(0.1, dt=EXPERIMENT_DT)

    sim.apply_command(ToolPower(True))
    sim.apply_command(FeedThrottle(feed_throttle, "advance"))
    t0 = sim.state.time
    while sim.state.drill_depth < depth_goal and sim.state.time < t0 + 90:
        sim.tick(EXPERIMENT_DT)
    sim.apply_command(ToolPower(False))
    sim.apply_command(FeedThrottle(0.0, "advance"))

    hole = sim.tool_wall_position()
    if rng is not None:
        hole = hole + rng.normal(0.0, 1.0e-3, 2)  # thrust drift + slide jitter
    offset = hole - target
    return {
        "target_lateral_mm": round(target[0] * 1e3, 3),
        "target_vertical_mm": round(target[1] * 1e3, 3),
        "hole_lateral_mm": round(hole[0] * 1e3, 4),
        "hole_vertical_mm": round(hole[1] * 1e3, 4),
        "offset_norm_mm": round(float(np.linalg.norm(offset)) * 1e3, 4),
        "depth_mm": round(sim.state.drill_depth * 1e3, 2),
        "excluded": 0,
    }


def run_drilling_study(
    n_holes: int = 9,
    seed: int = 0,
    noise: bool = True,
    scatter_sigma: float = 0.05,
    params: RobotParams | None = None,
    pitch: float = 0.05,
) -> ExperimentReport:
    """3x3 hole pattern, one perch per hole; accuracy is the mean offset
    magnitude, precision the maximum deviation from the mean error."""
    params = params or RobotParams()
    rng = np.random.default_rng(seed) if noise else None
    sample_rng = np.random.default_rng(seed + 1)
    if noise:
        sensing = SensingModel()
    else:
        # deterministic limit: no pointing noise, continuous camera
        sensing = SensingModel(
            pointing_noise_sigma=0.0, pixel_pitch=1e-9, camera_resolution=(2 * 10**9, 2 * 10**9)
        )
    report = ExperimentReport("drilling_study", seed=seed)
    side = int(round(math.sqrt(n_holes)))
    targets = [
        ((c - (side - 1) / 2) * pitch, (r - (side - 1) / 2) * pitch)
        for r in range(side)
        for c in range(side)
    ][:n_holes]
    for i, tgt in enumerate(targets):
        off = sample_perch_offset(sample_rng, scatter_sigma if noise else 0.0, 0.10)
        # keep the target reachable from this perch (re-perch on bad docking)
        while abs(tgt[0] - off[0]) > 0.070 or abs(tgt[1] - off[1]) > 0.100:
            off = sample_perch_offset(sample_rng, scatter_sigma if noise else 0.0, 0.10)
        rec = drill_one_hole(tgt, off, sensing, rng, params=params)
        rec["run_id"] = i
        report.records.append(rec)

    errors = np.array(
        [
            [r["hole_lateral_mm"] - r["target_lateral_mm"], r["hole_vertical_mm"] - r["target_vertical_mm"]]
            for r in report.records
        ]
    )
    # outlier rule: anything beyond 3 sigma-equivalents of the others is a
    # slip event and excluded from the summary statistics
    norms = np.array([r["offset_norm_mm"] for r in report.records])
    med = float(np.median(norms))
    for r, nrm in zip(report.records, norms):
        if nrm > max(3.0 * med, med + 15.0):
            r["excluded"] = 1
    mask = np.array([not r["excluded"] for r in report.records])
    acc = accuracy(errors[mask])
    prec = precision(errors[mask])
    report.summary = {
        "n_holes": len(report.records),
        "n_excluded": int((~mask).sum()),
        "accuracy_mm": round(acc, 4),
        "precision_mm": round(prec, 4),
        "laser_offset_mm": [v * 1e3 for v in sensing.laser_offset] if noise else list(
            np.array(SensingModel().laser_offset) * 1e3
        ),
    }
    report.passed = 7.0 <= acc <= 13.0 and prec <= 8.0
    return report


def run_detachment_replay(params: RobotParams | None = None) -> ExperimentReport:
    """Replay the detachment sequence from a retracted manipulation pose and
    log the event ordering plus the wall-distance trace."""
    sim = manipulation_sim(params=params)
    report = ExperimentReport("detachment_replay", seed=None)
    d = sim.apply_command(SetMode(OperationMode.DETACHMENT))
    if not d.accepted:
        raise RuntimeError(d.reason)
    trace = []
    t_end = sim.state.time + 60.0
    while sim.state.time < t_end:
        sim.tick()
        trace.append((sim.state.time, max(sim.wall_gap(), 0.0), float(np.sum(np.abs(sim.state.rotor_speeds)))))
        if sim.detachment.done and trace[-1][1] > 0.3:
            break
    events = dict()
    for t, name in sim.detachment.events:
        events.setdefault(name, t)
    order = [events.get(k) for k in ("thrust_ramp", "pumps_off", "valves_open", "separation")]
    sep_t = events.get("separation")
    increasing = False
    if sep_t is not None:
        # measure from first measurable clearance; the cups release a beat
        # before the body actually pulls away from the surface
        clear = [t for t, dwall, _ in trace if t >= sep_t and dwall > 2e-4]
        if clear and clear[0] - sep_t < 1.0:
            t0c = clear[0]
            after = [(t, dwall) for t, dwall, _ in trace if t0c <= t <= t0c + 0.5]
            increasing = len(after) > 2 and all(
                b[1] > a[1] for a, b in zip(after, after[1:])
            )
    report.records = [
        {"t": round(t, 4), "wall_distance_m": round(dw, 5), "rpm_sum": round(w, 1)}
        for t, dw, w in trace[:: max(1, len(trace) // 400)]
    ]
    report.summary = {
        "events": {k: round(v, 3) for k, v in events.items()},
        "ordering_ok": all(a is not None for a in order)
        and all(a < b for a, b in zip(order, order[1:])),
        "wall_distance_increasing_after_separation": increasing,
    }
    report.passed = report.summary["ordering_ok"] and increasing
    return report


def run_endurance(
    battery_mass: float,
    specific_energy: float,
    mission_power: float = HOVER_POWER,
    added_mass_correction: bool = False,
    params: RobotParams | None = None,
) -> float:
    """Battery endurance in seconds: stored energy over mean mission power.

    With the correction enabled, hover power grows with total mass^1.5
    (momentum theory), so a heavier battery buys less than linear time.
    """
    if battery_mass <= 0 or specific_energy <= 0:
        raise ValueError("battery mass and specific energy must be positive")
    energy_j = battery_mass * specific_energy * 3600.0
    power = mission_power
    if added_mass_correction:
        params = params or RobotParams()
        m0 = params.dry_mass
        nominal_battery = 1.0
        m1 = m0 + (battery_mass - nominal_battery)
        power = mission_power * (m1 / m0) ** 1.5
    return energy_j / power


EXPERIMENTS = {
    "force_power": run_force_power_sweep,
    "perching": run_perching_mc,
    "drilling": run_drilling_study,
    "detachment": run_detachment_replay,
}


def run_experiment(name: str, seed: int = 0, out_dir=None, params=None) -> ExperimentReport:
    if name == "endurance":
        t = run_endurance(1.0, 139.0)
        report = ExperimentReport("endurance", seed=None)
        report.summary = {"battery_mass_kg": 1.0, "specific_energy_wh_per_kg": 139.0, "endurance_s": round(t, 2)}
        report.passed = abs(t - 250.0) <= 25.0
    elif name in ("force_power", "detachment"):
        report = EXPERIMENTS[name](params=params)
    elif name in ("perching", "drilling"):
        report = EXPERIMENTS[name](seed=seed, params=params)
    else:
        raise KeyError(f"unknown experiment {name!r}; choose from "
                       f"{sorted(list(EXPERIMENTS) + ['endurance'])}")
    if out_dir is not None:
        report.write(out_dir)
    return report
