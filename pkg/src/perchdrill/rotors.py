"""Rotor thrust/torque/power models and coefficient calibration.

Thrust per rotor is sign(w) * k_f * w^2 along z_B, electrical power is
k_p * |w|^3 per rotor plus a constant avionics draw.  The front pair is
reversible (used to tilt the table when perched); the back pair may only
reverse in the perched regime (tool retraction).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import AVIONICS_POWER, RobotParams


@dataclass
class RotorModel:
    k_f: float  # N/rpm^2
    k_tau: float  # N*m/rpm^2
    k_p: float  # W/rpm^3
    spin_directions: tuple
    positions: np.ndarray  # (4, 3) in B
    reversible: tuple = (True, True, False, False)
    speed_limit: float = 3600.0  # rpm
    avionics_power: float = AVIONICS_POWER

    @classmethod
    def from_params(cls, params: RobotParams) -> "RotorModel":
        return cls(
            k_f=params.rotor_thrust_coeff,
            k_tau=params.rotor_torque_coeff,
            k_p=params.rotor_power_coeff,
            spin_directions=params.geometry.rotor_spin_dirs,
            positions=np.array(params.geometry.rotor_positions, dtype=float),
            speed_limit=params.rotor_speed_limit,
        )

    def thrusts(self, speeds_rpm) -> np.ndarray:
        w = np.asarray(speeds_rpm, dtype=float)
        return np.sign(w) * self.k_f * w**2

    def saturate(self, speeds_rpm, free_flight: bool = False):
        """Clamp commands to the speed envelope.  Returns (clamped, flag)."""
        w = np.asarray(speeds_rpm, dtype=float)
        clamped = np.clip(w, -self.speed_limit, self.speed_limit)
        if free_flight:
            # reverse thrust is only usable braced against the wall
            clamped = np.maximum(clamped, 0.0)
        return clamped, bool(np.any(clamped != w))


def rotor_wrench(speeds_rpm, model: RotorModel) -> np.ndarray:
    """Total [force, torque] in B from the four rotors."""
    f = model.thrusts(speeds_rpm)
    force = np.array([0.0, 0.0, float(np.sum(f))])
    torque = np.zeros(3)
    for i in range(4):
        fi = np.array([0.0, 0.0, f[i]])
        torque += np.cross(model.positions[i], fi)
    w = np.asarray(speeds_rpm, dtype=float)
    drag = -np.asarray(model.spin_directions) * model.k_tau * w * np.abs(w)
    torque[2] += float(np.sum(drag))
    return np.concatenate([force, torque])


def power_draw(speeds_rpm, model: RotorModel) -> float:
    w = np.abs(np.asarray(speeds_rpm, dtype=float))
    return float(model.k_p * np.sum(w**3) + model.avionics_power)


def hover_speed(model: RotorModel, mass: float, gravity: float = 9.81) -> float:
    """Per-rotor rpm at which four equal thrusts carry ``mass``."""
    return float(np.sqrt(mass * gravity / (4.0 * model.k_f)))


def calibrate_rotor_coeffs(
    thrust_anchors,
    power_anchors,
    base: RotorModel | None = None,
    params: RobotParams | None = None,
) -> RotorModel:
    """Least-squares fit of k_f and k_p through measured anchor points.

    thrust_anchors: [(rpm_per_rotor, total_force_N), ...], equal speeds on
    all four rotors.  power_anchors: [(rpm 4-vector, total_W), ...], total
    includes the avionics draw.
    """
    if not thrust_anchors or not power_anchors:
        raise ValueError("need at least one thrust and one power anchor")
    if base is None:
        base = RotorModel.from_params(params or RobotParams())

    a = np.array([4.0 * rpm**2 for rpm, _ in thrust_anchors])
    b = np.array([force for _, force in thrust_anchors])
    k_f = float(np.dot(a, b) / np.dot(a, a))

    a = np.array([np.sum(np.abs(np.asarray(w, dtype=float)) ** 3) for w, _ in power_anchors])
    b = np.array([p - base.avionics_power for _, p in power_anchors])
    k_p = float(np.dot(a, b) / np.dot(a, a))

    return RotorModel(
        k_f=k_f,
        k_tau=base.k_tau,
        k_p=k_p,
        spin_directions=base.spin_directions,
        positions=base.positions.copy(),
        reversible=base.reversible,
        speed_limit=base.speed_limit,
        avionics_power=base.avionics_power,
    )
