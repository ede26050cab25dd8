"""Fixed-step rigid-body dynamics in two regimes.

Free flight: 6-DOF Newton-Euler with rotor wrenches, gravity, and tether
weight, integrated semi-implicit Euler at 1 ms.

Perched: the attachment frame is anchored to the wall and the generalized
coordinates are exactly the unlocked hinge freedoms -- tilt theta about the
hinge axis and slide p along x_A -- with Coulomb friction on the slide and
inelastic travel stops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .attachment import HingeLockState
from .frames import Pose, hinge_pose_AB, quat_multiply, quat_normalize, rot_y
from .params import Environment, RobotParams, total_mass
from .rotors import RotorModel, rotor_wrench
from .state import SimState

DT_MAX = 0.005  # s
HINGE_DAMPING = 2.0  # N*m*s, viscous bearing damping (assumed)
STATIC_EPS = 1e-4  # m/s, below this the slide is treated as sticking


@dataclass
class ConstraintRegime:
    """Which dynamics apply and which hinge freedoms are active."""

    perched: bool = False
    hinge_lock: HingeLockState = HingeLockState.LOCKED
    wall_anchor: Pose | None = None  # W <- A, fixed while perched
    slide_contact_limit: float | None = None  # max p before the tool hits material

    @classmethod
    def free_flight(cls) -> "ConstraintRegime":
        return cls(perched=False, hinge_lock=HingeLockState.LOCKED)

    @classmethod
    def perched_at(cls, wall_anchor: Pose, lock: HingeLockState, contact_limit=None):
        return cls(
            perched=True, hinge_lock=lock, wall_anchor=wall_anchor, slide_contact_limit=contact_limit
        )


def com_offset_B(params: RobotParams, gantry_pos) -> np.ndarray:
    """COM shift in B caused by the tool relative to the flight trim
    position (tool parked aft centers the COM for flight)."""
    gfx, gfy = params.geometry.gantry_flight_pos
    dx = gantry_pos[0] - gfx
    dy = gantry_pos[1] - gfy
    s = params.mass_tool / params.dry_mass
    return np.array([s * dx, s * dy, 0.0])


def _advance_rotors(state: SimState, cmds, model: RotorModel, params, dt, free_flight):
    cmds, _ = model.saturate(cmds, free_flight=free_flight)
    a = math.exp(-dt / params.rotor_time_constant)
    return state.rotor_speeds * a + cmds * (1.0 - a)


def _step_free_flight(state, rotor_cmds, dt, params, env, model):
    m = total_mass(params, env.tether_deployed_length)
    speeds = _advance_rotors(state, rotor_cmds, model, params, dt, free_flight=True)
    wrench = rotor_wrench(speeds, model)
    R = state.body_pose.rotation

    force_w = R @ wrench[:3] + np.array([0.0, 0.0, -m * env.gravity])
    accel = force_w / m

    inertia = np.asarray(params.inertia, dtype=float)
    gravity_b = R.T @ np.array([0.0, 0.0, -params.dry_mass * env.gravity])
    torque = wrench[3:] + np.cross(com_offset_B(params, state.gantry_pos), gravity_b)
    tether_w = params.tether_linear_density * env.tether_deployed_length * env.gravity
    torque += np.cross(np.asarray(env.tether_attach_point), R.T @ np.array([0.0, 0.0, -tether_w]))

    omega = state.body_twist[3:]
    omega_dot = (torque - np.cross(omega, inertia * omega)) / inertia
    omega_new = omega + omega_dot * dt
    vel_new = state.body_twist[:3] + accel * dt
    pos_new = state.body_pose.position + vel_new * dt

    dq = quat_multiply(state.body_pose.orientation, np.concatenate(([0.0], omega_new)))
    q_new = quat_normalize(state.body_pose.orientation + 0.5 * dq * dt)

    out = state.copy()
    out.body_pose = Pose(pos_new, q_new)
    out.body_twist = np.concatenate([vel_new, omega_new])
    out.rotor_speeds = speeds
    out.time = state.time + dt
    return out


def hinge_generalized_forces(state, wrench_b, params, env, grav_a=None):
    """(Q_theta, Q_p): torque about the hinge axis and force along the slide
    from the rotor wrench, gravity, and tether weight.  ``grav_a`` is the
    gravity direction expressed in A (defaults to a vertical wall)."""
    g = params.geometry
    hinge = np.array([g.hinge_offset, 0.0, 0.0])
    R_ab = rot_y(state.hinge_theta)

    force_b = wrench_b[:3]
    torque_b = wrench_b[3:]
    # rotor resultant acts at the body origin with its couple; shift to hinge
    q_theta = torque_b[1] + np.cross(-hinge, force_b)[1]

    grav_a = np.array([0.0, 0.0, -env.gravity]) if grav_a is None else np.asarray(grav_a)
    grav_b = R_ab.T @ grav_a
    com = com_offset_B(params, state.gantry_pos)
    q_theta += np.cross(com - hinge, params.dry_mass * grav_b)[1]
    tether_m = params.tether_linear_density * env.tether_deployed_length
    if tether_m > 0.0:
        attach = np.asarray(env.tether_attach_point, dtype=float)
        q_theta += np.cross(attach - hinge, tether_m * grav_b)[1]

    force_a = R_ab @ force_b + (params.dry_mass + tether_m) * grav_a
    q_p = force_a[0]  # x_A component moves the slide toward the wall
    return float(q_theta), float(q_p)


def hinge_inertia(params: RobotParams, gantry_pos) -> float:
    g = params.geometry
    com = com_offset_B(params, gantry_pos)
    r = com - np.array([g.hinge_offset, 0.0, 0.0])
    return float(params.inertia[1] + params.dry_mass * (r[0] ** 2 + r[2] ** 2))


def _step_perched(state, rotor_cmds, regime, dt, params, env, model):
    if not all(state.attached):
        raise ValueError("perched regime requires both cups attached")
    g = params.geometry
    speeds = _advance_rotors(state, rotor_cmds, model, params, dt, free_flight=False)
    wrench = rotor_wrench(speeds, model)
    theta_free, p_free = regime.hinge_lock.freedoms()

    theta, p = state.hinge_theta, state.hinge_slide
    theta_dot, p_dot = state.hinge_rates
    grav_a = regime.wall_anchor.rotation.T @ np.array([0.0, 0.0, -env.gravity])
    q_theta, q_p = hinge_generalized_forces(state, wrench, params, env, grav_a=grav_a)

    if theta_free:
        inertia = hinge_inertia(params, state.gantry_pos)
        theta_ddot = (q_theta - HINGE_DAMPING * theta_dot) / inertia
        theta_dot += theta_ddot * dt
        theta += theta_dot * dt
        if theta <= 0.0:
            theta, theta_dot = 0.0, 0.0  # inelastic mechanical stop
        elif theta >= math.pi / 2:
            theta, theta_dot = math.pi / 2, 0.0
    else:
        theta_dot = 0.0

    if p_free:
        m = total_mass(params, env.tether_deployed_length)
        fric = params.slide_friction_force
        if abs(p_dot) < STATIC_EPS and abs(q_p) <= fric:
            p_dot = 0.0  # static friction holds
        else:
            drive = q_p - math.copysign(fric, p_dot if abs(p_dot) >= STATIC_EPS else q_p)
            p_dot += (drive / m) * dt
            p += p_dot * dt
        p_max = g.slide_travel
        if regime.slide_contact_limit is not None:
            p_max = min(p_max, regime.slide_contact_limit)
        if p <= 0.0:
            p, p_dot = 0.0, 0.0
        elif p >= p_max:
            p, p_dot = p_max, 0.0
    else:
        p_dot = 0.0

    pose_ab = hinge_pose_AB(theta, p, g)
    pose_wb = regime.wall_anchor.compose(pose_ab)

    out = state.copy()
    out.hinge_theta = theta
    out.hinge_slide = p
    out.hinge_rates = np.array([theta_dot, p_dot])
    out.rotor_speeds = speeds
    vel = (pose_wb.position - state.body_pose.position) / dt
    out.body_pose = pose_wb
    out.body_twist = np.concatenate([vel, [0.0, theta_dot, 0.0]])
    out.time = state.time + dt
    return out


def step(
    state: SimState,
    rotor_cmds,
    regime: ConstraintRegime,
    dt: float,
    params: RobotParams,
    env: Environment,
    model: RotorModel | None = None,
) -> SimState:
    """Advance the simulation by one fixed step."""
    if not (0.0 < dt <= DT_MAX):
        raise ValueError(f"dt must be in (0, {DT_MAX}] s")
    if model is None:
        model = RotorModel.from_params(params)
    rotor_cmds = np.asarray(rotor_cmds, dtype=float)
    if regime.perched:
        if regime.wall_anchor is None:
            raise ValueError("perched regime requires a wall anchor pose")
        return _step_perched(state, rotor_cmds, regime, dt, params, env, model)
    if regime.hinge_lock != HingeLockState.LOCKED:
        raise ValueError("free flight requires the hinge locked")
    if any(state.attached):
        raise ValueError("free flight regime inconsistent with attached cups")
    return _step_free_flight(state, rotor_cmds, dt, params, env, model)


def feed_force(state: SimState, params: RobotParams, model: RotorModel | None = None) -> float:
    """Wall-normal reaction force of the current rotor speeds when perched
    (thrust component along x_A, friction losses neglected)."""
    if model is None:
        model = RotorModel.from_params(params)
    thrust = float(np.sum(model.thrusts(state.rotor_speeds)))
    return thrust * math.sin(state.hinge_theta)
