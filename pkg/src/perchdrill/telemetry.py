"""Telemetry records: 50 Hz snapshots of the plant, serializable to JSON
lines (for the live socket) and to a versioned CSV log."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

TELEMETRY_PERIOD = 0.02  # s
SCHEMA_VERSION = 1

CSV_COLUMNS = [
    "t",
    "mode",
    "x",
    "y",
    "z",
    "qw",
    "qx",
    "qy",
    "qz",
    "vx",
    "vy",
    "vz",
    "theta_deg",
    "slide_mm",
    "hinge_lock",
    "w1",
    "w2",
    "w3",
    "w4",
    "p_cup1_kpa",
    "p_cup2_kpa",
    "attached",
    "gantry_x",
    "gantry_y",
    "feed_force_n",
    "power_w",
    "drill_depth_mm",
    "tool_on",
    "saturated",
    "rejection",
]


@dataclass
class TelemetryRecord:
    t: float
    mode: str
    position: np.ndarray
    orientation: np.ndarray
    velocity: np.ndarray
    theta: float
    slide: float
    hinge_lock: str
    rotor_speeds: np.ndarray
    cup_pressures: np.ndarray
    attached: bool
    gantry: np.ndarray
    feed_force: float
    power: float
    drill_depth: float
    tool_on: bool
    saturated: bool
    rejection: str = ""

    def to_dict(self) -> dict:
        return {
            "v": SCHEMA_VERSION,
            "t": round(self.t, 6),
            "mode": self.mode,
            "position": [float(v) for v in self.position],
            "orientation": [float(v) for v in self.orientation],
            "velocity": [float(v) for v in self.velocity],
            "theta_deg": math.degrees(self.theta),
            "slide_mm": self.slide * 1e3,
            "hinge_lock": self.hinge_lock,
            "rotor_rpm": [float(v) for v in self.rotor_speeds],
            "cup_pressure_kpa": [float(v) / 1e3 for v in self.cup_pressures],
            "attached": self.attached,
            "gantry": [float(v) for v in self.gantry],
            "feed_force_n": self.feed_force,
            "power_w": self.power,
            "drill_depth_mm": self.drill_depth * 1e3,
            "tool_on": self.tool_on,
            "saturated": self.saturated,
            "rejection": self.rejection,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def csv_row(self) -> list:
        d = self.to_dict()
        return (
            [d["t"], d["mode"]]
            + d["position"]
            + d["orientation"]
            + d["velocity"]
            + [d["theta_deg"], d["slide_mm"], d["hinge_lock"]]
            + d["rotor_rpm"]
            + d["cup_pressure_kpa"]
            + [
                int(d["attached"]),
                d["gantry"][0],
                d["gantry"][1],
                d["feed_force_n"],
                d["power_w"],
                d["drill_depth_mm"],
                int(d["tool_on"]),
                int(d["saturated"]),
                d["rejection"],
            ]
        )


def record_from_sim(sim) -> TelemetryRecord:
    rej = ""
    if sim.last_rejection is not None and sim.state.time - sim.last_rejection.time < TELEMETRY_PERIOD * 2:
        rej = sim.last_rejection.reason
    return TelemetryRecord(
        t=sim.state.time,
        mode=sim.mode.value,
        position=sim.state.body_pose.position.copy(),
        orientation=sim.state.body_pose.orientation.copy(),
        velocity=sim.state.body_twist[:3].copy(),
        theta=sim.state.hinge_theta,
        slide=sim.state.hinge_slide,
        hinge_lock=sim.hinge_lock.value,
        rotor_speeds=sim.state.rotor_speeds.copy(),
        cup_pressures=sim.state.cup_pressures.copy(),
        attached=all(sim.state.attached),
        gantry=sim.gantry.position.copy(),
        feed_force=sim.current_feed_force(),
        power=sim.current_power(),
        drill_depth=sim.state.drill_depth,
        tool_on=sim.tool_on,
        saturated=sim.saturated,
        rejection=rej,
    )


class TelemetryLog:
    """Collects records at the telemetry cadence and writes the CSV log."""

    def __init__(self):
        self.records: list[TelemetryRecord] = []
        self._next_t = 0.0

    def maybe_record(self, sim) -> TelemetryRecord | None:
        if sim.state.time + 1e-9 < self._next_t:
            return None
        self._next_t = sim.state.time + TELEMETRY_PERIOD
        rec = record_from_sim(sim)
        self.records.append(rec)
        return rec

    def write_csv(self, path):
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow([f"schema_v{SCHEMA_VERSION}"] + [""] * (len(CSV_COLUMNS) - 1))
            w.writerow(CSV_COLUMNS)
            for rec in self.records:
                w.writerow(rec.csv_row())
