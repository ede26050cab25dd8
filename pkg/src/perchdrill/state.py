"""Canonical simulation state shared by the dynamics, control, and mission
layers.  Pure value type; copy freely, serialize losslessly."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .frames import Pose, quat_normalize


@dataclass
class SimState:
    body_pose: Pose = field(default_factory=Pose)  # W <- B
    body_twist: np.ndarray = field(default_factory=lambda: np.zeros(6))  # [v_W, omega_B]
    hinge_theta: float = 0.0  # rad, in [0, pi/2]
    hinge_slide: float = 0.0  # m, 0 = retracted stop
    hinge_rates: np.ndarray = field(default_factory=lambda: np.zeros(2))  # [theta_dot, p_dot]
    rotor_speeds: np.ndarray = field(default_factory=lambda: np.zeros(4))  # rpm, signed
    cup_pressures: np.ndarray = field(default_factory=lambda: np.zeros(2))  # Pa deficit
    attached: tuple = (False, False)
    gantry_pos: np.ndarray = field(default_factory=lambda: np.zeros(2))  # m, in B xy
    drill_depth: float = 0.0  # m
    time: float = 0.0  # s

    def __post_init__(self):
        self.body_twist = np.asarray(self.body_twist, dtype=float).copy()
        self.hinge_rates = np.asarray(self.hinge_rates, dtype=float).copy()
        self.rotor_speeds = np.asarray(self.rotor_speeds, dtype=float).copy()
        self.cup_pressures = np.asarray(self.cup_pressures, dtype=float).copy()
        self.gantry_pos = np.asarray(self.gantry_pos, dtype=float).copy()
        self.attached = tuple(bool(a) for a in self.attached)

    def copy(self) -> "SimState":
        return SimState(
            body_pose=self.body_pose.copy(),
            body_twist=self.body_twist,
            hinge_theta=self.hinge_theta,
            hinge_slide=self.hinge_slide,
            hinge_rates=self.hinge_rates,
            rotor_speeds=self.rotor_speeds,
            cup_pressures=self.cup_pressures,
            attached=self.attached,
            gantry_pos=self.gantry_pos,
            drill_depth=self.drill_depth,
            time=self.time,
        )

    def check_invariants(self, params=None):
        if abs(np.linalg.norm(self.body_pose.orientation) - 1.0) > 1e-9:
            raise ValueError("quaternion not normalized")
        if not (-1e-12 <= self.hinge_theta <= math.pi / 2 + 1e-12):
            raise ValueError("hinge theta outside [0, pi/2]")
        if self.drill_depth < 0:
            raise ValueError("drill depth negative")
        if params is not None:
            if not (-1e-12 <= self.hinge_slide <= params.geometry.slide_travel + 1e-12):
                raise ValueError("hinge slide outside its travel")
            if np.any(np.abs(self.rotor_speeds) > params.rotor_speed_limit + 1e-9):
                raise ValueError("rotor speed beyond limit")
            if np.any(self.cup_pressures < -1e-9) or np.any(
                self.cup_pressures > params.vacuum_max + 1e-9
            ):
                raise ValueError("cup pressure out of range")
        return self

    def to_dict(self) -> dict:
        return {
            "body_pose": {
                "position": list(self.body_pose.position),
                "orientation": list(self.body_pose.orientation),
            },
            "body_twist": list(self.body_twist),
            "hinge_theta": self.hinge_theta,
            "hinge_slide": self.hinge_slide,
            "hinge_rates": list(self.hinge_rates),
            "rotor_speeds": list(self.rotor_speeds),
            "cup_pressures": list(self.cup_pressures),
            "attached": list(self.attached),
            "gantry_pos": list(self.gantry_pos),
            "drill_depth": self.drill_depth,
            "time": self.time,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimState":
        pose = Pose(
            np.array(d["body_pose"]["position"]),
            np.array(d["body_pose"]["orientation"]),
        )
        # bypass renormalization so round-trips are bit-exact
        pose.orientation = np.array(d["body_pose"]["orientation"], dtype=float)
        return cls(
            body_pose=pose,
            body_twist=np.array(d["body_twist"]),
            hinge_theta=d["hinge_theta"],
            hinge_slide=d["hinge_slide"],
            hinge_rates=np.array(d["hinge_rates"]),
            rotor_speeds=np.array(d["rotor_speeds"]),
            cup_pressures=np.array(d["cup_pressures"]),
            attached=tuple(d["attached"]),
            gantry_pos=np.array(d["gantry_pos"]),
            drill_depth=d["drill_depth"],
            time=d["time"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "SimState":
        return cls.from_dict(json.loads(s))
