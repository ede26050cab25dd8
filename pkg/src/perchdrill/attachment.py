"""Suction-cup adhesion with pump/valve dynamics, the friction-cone slip
check, and the three-state hinge locking mechanism."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .params import RobotParams

CONTACT_GAP = 0.002  # m, cups seal below this gap
CONTACT_SPEED = 0.5  # m/s, above this the approach bounces instead of sealing
LOCK_ANGLE_TOL = math.radians(2.0)  # pin engagement window
LOCK_SLIDE_TOL = 0.002  # m


@dataclass(frozen=True)
class SuctionCupState:
    pressure_deficit: float = 0.0  # Pa below ambient
    pump_on: bool = False
    valve_open: bool = False
    contact: bool = False
    attached: bool = False
    slip_accum: float = 0.0  # m, integrated slip displacement along the wall


class HingeLockState(Enum):
    LOCKED = "locked"
    RELEASED = "released"
    ROTATION_LOCKED = "rotation_locked"

    def freedoms(self):
        """(theta_free, p_free) allowed by the pin position."""
        return {
            HingeLockState.LOCKED: (False, False),
            HingeLockState.RELEASED: (True, True),
            HingeLockState.ROTATION_LOCKED: (False, True),
        }[self]


# Pin travel is continuous (full-in, partial, full-out), so the only legal
# transitions walk the chain LOCKED <-> ROTATION_LOCKED <-> RELEASED.
_ADJACENT = {
    HingeLockState.LOCKED: {HingeLockState.ROTATION_LOCKED, HingeLockState.RELEASED},
    HingeLockState.RELEASED: {HingeLockState.ROTATION_LOCKED, HingeLockState.LOCKED},
    HingeLockState.ROTATION_LOCKED: {HingeLockState.LOCKED, HingeLockState.RELEASED},
}
# LOCKED <-> RELEASED passes through the partial position, which is always
# mechanically possible, so adjacency is the full chain; engagement gates
# are what actually reject requests.


@dataclass
class LockDecision:
    granted: bool
    state: HingeLockState
    reason: str = ""


def set_hinge_lock(
    state: HingeLockState, request: HingeLockState, theta: float, slide: float = 0.0
) -> LockDecision:
    """Grant a pin-state request if the hinge pose lets the pins engage."""
    if request == state:
        return LockDecision(True, state)
    if request not in _ADJACENT[state]:
        return LockDecision(False, state, f"illegal transition {state.value} -> {request.value}")
    if request == HingeLockState.ROTATION_LOCKED:
        if abs(theta - math.pi / 2) > LOCK_ANGLE_TOL:
            return LockDecision(False, state, "pins cannot engage: tilt not at 90 deg")
    if request == HingeLockState.LOCKED:
        if abs(theta) > LOCK_ANGLE_TOL:
            return LockDecision(False, state, "pins cannot engage: tilt not at 0")
        if abs(slide) > LOCK_SLIDE_TOL:
            return LockDecision(False, state, "pins cannot engage: slide not at the stop")
    return LockDecision(True, request)


def update_suction(
    cups, wall_gaps, approach_speed: float, dt: float, params: RobotParams
):
    """Advance both cup states by dt.

    wall_gaps: per-cup distance to the wall surface (m).  Pump raises the
    pressure deficit first-order toward vacuum_max while sealed; an open
    valve (or loss of contact) releases it first-order toward zero.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    out = []
    for cup, gap in zip(cups, np.atleast_1d(wall_gaps)):
        contact = gap <= CONTACT_GAP and abs(approach_speed) <= CONTACT_SPEED
        p = cup.pressure_deficit
        if contact and cup.pump_on and not cup.valve_open:
            a = 1.0 - math.exp(-dt / params.pump_time_constant)
            p = p + (params.vacuum_max - p) * a
        else:
            tc = params.valve_release_time_constant if cup.valve_open else 4.0 * params.valve_release_time_constant
            if not contact:
                tc = 0.05  # seal broken: near-instant loss
            p = p * math.exp(-dt / tc)
        p = min(max(p, 0.0), params.vacuum_max)
        attached = contact and p >= params.attach_pressure_fraction * params.vacuum_max
        out.append(replace(cup, contact=bool(contact), pressure_deficit=p, attached=attached))
    return tuple(out)


@dataclass
class HoldingResult:
    normal_capacity: float  # N, total pull-off capacity
    shear_capacity: float  # N, friction-cone shear limit at this load
    shear_load: float  # N
    tension_load: float  # N (positive pulls the cups off the wall)
    slips: bool
    detaches: bool
    margin: float  # shear capacity / shear load


def holding_wrench(cups, mu: float, applied_wrench, params: RobotParams) -> HoldingResult:
    """Friction-cone check of an applied [force, torque] at the attachment
    frame (x_A into the wall).

    Normal capacity per cup is pressure * area.  The wall-parallel load must
    stay inside mu * (pressure preload + any pressing force); tension beyond
    the total capacity pulls the cups off.
    """
    if not all(c.attached for c in cups):
        raise ValueError("holding_wrench requires both cups attached")
    w = np.asarray(applied_wrench, dtype=float)
    force = w[:3]
    capacity = sum(c.pressure_deficit * params.cup_area for c in cups)
    tension = -force[0]  # load along -x_A pulls away from the wall
    press = max(force[0], 0.0)
    shear = float(np.hypot(force[1], force[2]))
    normal_total = capacity + press - max(tension, 0.0)
    shear_capacity = mu * max(normal_total, 0.0)
    detaches = tension > capacity
    slips = shear > shear_capacity or detaches
    margin = shear_capacity / shear if shear > 0 else math.inf
    return HoldingResult(
        normal_capacity=capacity,
        shear_capacity=shear_capacity,
        shear_load=shear,
        tension_load=tension,
        slips=slips,
        detaches=detaches,
        margin=margin,
    )


def integrate_slip(cup: SuctionCupState, slip_rate: float, dt: float) -> SuctionCupState:
    """Record friction-cone violation as wall-plane displacement."""
    return replace(cup, slip_accum=cup.slip_accum + slip_rate * dt)
