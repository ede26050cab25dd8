"""The three control behaviors plus the detachment script.

Flight: cascaded PD (velocity -> attitude -> rate -> torque) with a mixer
for the H configuration.  Rotation: open-loop front-pair thrust tilting the
table.  Manipulation: symmetric thrust ramp for tool feed.  Detachment: an
ordered, guarded phase sequence unwinding everything back to free flight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import MAX_FEED_FORCE, RobotParams, total_mass
from .rotors import RotorModel, hover_speed

ROTATION_MAX_RPM = 3000.0  # front-pair speed at |throttle| = 1
MAX_TILT = math.radians(30.0)


@dataclass
class FlightReference:
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))  # m/s, heading frame
    heading: float = 0.0  # rad

    def __post_init__(self):
        self.velocity = np.asarray(self.velocity, dtype=float).copy()
        speed = np.linalg.norm(self.velocity)
        if speed > 2.0 + 1e-9:
            raise ValueError("operator velocity reference limited to 2 m/s")


@dataclass
class ControllerGains:
    # bandwidths kept low: the propeller lag is slow and hot attitude
    # gains make the pitch axis ring
    vel_p: float = 0.8  # velocity -> acceleration
    att_p: float = 1.8  # attitude -> body rate
    rate_p: float = 3.5  # rate -> angular acceleration
    rate_d: float = 0.3
    # provenance: "tuned" by the scripted step-response tests in-repo

    def validate(self):
        if min(self.vel_p, self.att_p, self.rate_p) < 0:
            raise ValueError("gains must be non-negative")
        return self


def mixer_matrix(model: RotorModel) -> np.ndarray:
    """Rows map per-rotor thrusts to [T, tau_x, tau_y, tau_z]."""
    A = np.zeros((4, 4))
    for i in range(4):
        x, y, _ = model.positions[i]
        A[0, i] = 1.0
        A[1, i] = y
        A[2, i] = -x
        A[3, i] = -model.spin_directions[i] * (model.k_tau / model.k_f)
    return A


def allocate(wrench_cmd, model: RotorModel, free_flight: bool = True) -> np.ndarray:
    """Invert the mixer and convert thrusts to rpm commands."""
    f = np.linalg.solve(mixer_matrix(model), np.asarray(wrench_cmd, dtype=float))
    if free_flight:
        f = np.maximum(f, 0.0)
    w = np.sqrt(np.abs(f) / model.k_f) * np.sign(f)
    w, _ = model.saturate(w, free_flight=free_flight)
    return w


@dataclass
class OdometryNoise:
    """Stand-in for the visual-inertial estimator: ground truth plus
    zero-mean noise, with the bias reset before take-off."""

    sigma_pos: float = 0.02  # m
    sigma_vel: float = 0.05  # m/s
    rng: object = None

    def corrupt(self, position, velocity):
        if self.rng is None:
            return position, velocity
        return (
            position + self.rng.normal(0.0, self.sigma_pos, 3),
            velocity + self.rng.normal(0.0, self.sigma_vel, 3),
        )


def flight_control(
    state,
    ref: FlightReference,
    gains: ControllerGains,
    params: RobotParams,
    model: RotorModel,
    tether_length: float = 0.0,
    gravity: float = 9.81,
    velocity_override=None,
) -> np.ndarray:
    """One tick of the cascade; returns four non-negative rpm commands."""
    m = total_mass(params, tether_length)
    R = state.body_pose.rotation
    vel = state.body_twist[:3] if velocity_override is None else np.asarray(velocity_override)
    omega = state.body_twist[3:]

    ch, sh = math.cos(ref.heading), math.sin(ref.heading)
    v_ref_w = np.array(
        [
            ch * ref.velocity[0] - sh * ref.velocity[1],
            sh * ref.velocity[0] + ch * ref.velocity[1],
            ref.velocity[2],
        ]
    )

    a_cmd = gains.vel_p * (v_ref_w - vel)
    f_w = m * (a_cmd + np.array([0.0, 0.0, gravity]))

    # desired attitude from the thrust direction and the heading reference
    z_des = f_w / max(np.linalg.norm(f_w), 1e-9)
    tilt = math.acos(np.clip(z_des[2], -1.0, 1.0))
    if tilt > MAX_TILT:
        # limit tilt by blending toward vertical
        a = math.sin(MAX_TILT) / max(math.sin(tilt), 1e-9)
        z_des = np.array([a * z_des[0], a * z_des[1], math.cos(MAX_TILT)])
        z_des /= np.linalg.norm(z_des)
    x_head = np.array([ch, sh, 0.0])
    y_des = np.cross(z_des, x_head)
    y_des /= max(np.linalg.norm(y_des), 1e-9)
    x_des = np.cross(y_des, z_des)
    R_des = np.column_stack([x_des, y_des, z_des])

    e_m = 0.5 * (R_des.T @ R - R.T @ R_des)
    e_att = np.array([e_m[2, 1], e_m[0, 2], e_m[1, 0]])
    rate_ref = -gains.att_p * e_att
    ang_acc = gains.rate_p * (rate_ref - omega) - gains.rate_d * omega
    torque = np.asarray(params.inertia) * ang_acc

    thrust = float(f_w @ R[:, 2])  # collective along the actual body z
    return allocate([max(thrust, 0.0), *torque], model, free_flight=True)


def rotation_control(throttle: float, regime=None) -> np.ndarray:
    """Open-loop tilt: front pair spins in reverse, back pair stays off.

    Positive throttle tilts the table up toward 90 deg; the sign extension
    (negative throttle) drives the table back down during detachment.
    """
    if regime is not None:
        from .attachment import HingeLockState

        if not regime.perched or regime.hinge_lock != HingeLockState.RELEASED:
            raise ValueError("rotation control requires the perched regime with the hinge released")
    t = float(np.clip(throttle, -1.0, 1.0))
    return np.array([-t * ROTATION_MAX_RPM, -t * ROTATION_MAX_RPM, 0.0, 0.0])


def feed_max_speed(model: RotorModel) -> float:
    """Rpm at full feed throttle: realizes the platform's 150 N ceiling."""
    return math.sqrt(MAX_FEED_FORCE / (4.0 * model.k_f))


def feed_control(throttle: float, direction: str, model: RotorModel, regime=None) -> np.ndarray:
    """Symmetric four-rotor feed; advance presses the tool into the wall,
    retract reverses all four (allowed only while perched)."""
    if direction not in ("advance", "retract"):
        raise ValueError(f"unknown feed direction: {direction!r}")
    if regime is not None:
        from .attachment import HingeLockState

        if not regime.perched or regime.hinge_lock != HingeLockState.ROTATION_LOCKED:
            raise ValueError("feed control requires the perched regime, rotation-locked")
    t = float(np.clip(throttle, 0.0, 1.0))
    w = t * feed_max_speed(model)
    sign = 1.0 if direction == "advance" else -1.0
    return np.full(4, sign * w)


# ---------------------------------------------------------------------------
# Detachment sequence

DETACHMENT_PHASES = (
    "retract",
    "release_pins",
    "rotate_back",
    "lock_hinge",
    "gantry_flight",
    "ramp_hover",
    "lean_away",
    "pumps_off",
    "valves_open",
    "separation",
)


class SequenceAbort(RuntimeError):
    def __init__(self, phase: str, reason: str):
        super().__init__(f"detachment aborted in phase {phase!r}: {reason}")
        self.phase = phase
        self.reason = reason


class DetachmentSequence:
    """Scripted unwinding from surface manipulation back to free flight.

    Drives a mission plant tick by tick; each phase applies its actions and
    advances only once its completion predicate holds.  Ordering (thrust
    ramp before pumps off before valves open before separation) is enforced
    by construction and checked by guards, not by wall-clock times.
    """

    PUMP_SPINDOWN = 0.5  # s between pumps off and the valve release

    def __init__(self):
        self.phase_idx = 0
        self.events: list[tuple[float, str]] = []
        self.done = False
        self._pumps_off_t: float | None = None

    @property
    def phase(self) -> str:
        if self.phase_idx >= len(DETACHMENT_PHASES):
            return "complete"
        return DETACHMENT_PHASES[self.phase_idx]

    def _advance(self, t):
        self.events.append((t, self.phase + "_done"))
        self.phase_idx += 1
        if self.phase_idx >= len(DETACHMENT_PHASES):
            self.done = True

    def update(self, plant) -> None:
        """Apply one tick of the sequence to the mission plant."""
        from .attachment import HingeLockState

        if self.done:
            return
        t = plant.state.time
        phase = self.phase

        if phase == "retract":
            if plant.tool_on:
                raise SequenceAbort(phase, "power tool still on")
            plant.set_feed(0.5, "retract")
            if plant.state.hinge_slide <= 1e-3:
                plant.set_feed(0.0, "retract")
                self._advance(t)
        elif phase == "release_pins":
            ok = plant.request_lock(HingeLockState.RELEASED)
            if not ok:
                raise SequenceAbort(phase, "pins would not release")
            self._advance(t)
        elif phase == "rotate_back":
            plant.set_rotation_throttle(-0.35)
            if plant.state.hinge_theta <= math.radians(0.5):
                plant.set_rotation_throttle(0.0)
                self._advance(t)
        elif phase == "lock_hinge":
            if not plant.request_lock(HingeLockState.LOCKED):
                raise SequenceAbort(phase, "pins would not lock at 0 deg")
            self._advance(t)
        elif phase == "gantry_flight":
            plant.set_gantry_target(plant.params.geometry.gantry_flight_pos, system=True)
            if plant.gantry_at_target():
                self._advance(t)
        elif phase == "ramp_hover":
            if plant.ramp_to_hover():
                self.events.append((t, "thrust_ramp"))
                self._advance(t)
        elif phase == "lean_away":
            plant.set_lean_away()
            self._advance(t)
        elif phase == "pumps_off":
            if not plant.hover_thrust_ready():
                raise SequenceAbort(phase, "hover thrust not established")
            plant.set_pumps(False)
            self.events.append((t, "pumps_off"))
            self._pumps_off_t = t
            self._advance(t)
        elif phase == "valves_open":
            if not plant.hover_thrust_ready():
                raise SequenceAbort(phase, "hover thrust not established")
            if t - self._pumps_off_t < self.PUMP_SPINDOWN:
                return
            plant.set_valves(True)
            self.events.append((t, "valves_open"))
            self._advance(t)
        elif phase == "separation":
            if not any(plant.state.attached):
                self.events.append((t, "separation"))
                self._advance(t)
