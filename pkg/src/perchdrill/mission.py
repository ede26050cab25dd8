"""Five-phase mission state machine and the simulation orchestrator.

The mode machine consumes operator commands, enforces the per-mode lock
table, and drives the dynamics, attachment, control, and tool modules.
Mode changes are operator-commanded and guarded; the only automatic
transitions are flag updates the operator acts on (contact detection) and
the scripted detachment sub-sequence once Detachment is entered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .attachment import (
    HingeLockState,
    SuctionCupState,
    set_hinge_lock,
    update_suction,
)
from .commands import (
    FeedThrottle,
    GantryTarget,
    OperationMode,
    OperatorCommand,
    Pumps,
    RampDownRotors,
    RotationThrottle,
    ScriptEntry,
    SetFlightRef,
    SetMode,
    ToolPower,
    Valves,
)
from .control import (
    ControllerGains,
    DetachmentSequence,
    FlightReference,
    OdometryNoise,
    SequenceAbort,
    feed_control,
    flight_control,
    rotation_control,
)
from .dynamics import ConstraintRegime, com_offset_B, feed_force, step
from .frames import Pose, hinge_pose_AB, matrix_to_quat
from .params import Environment, RobotParams
from .rotors import RotorModel, hover_speed, power_draw
from .state import SimState
from .tool import GantryState, ToolSpec, drill_step, observe_laser_cross, set_gantry_target

DT = 0.001  # s, fixed integration step
ROTORS_DOWN_RPM = 100.0  # below this the propellers count as ramped down
RAMP_TIME = 2.0  # s, thrust ramp duration (up and down)
GANTRY_TOL = 0.002  # m, "at target" tolerance

# Lock table: mode -> (theta locked, p locked, gantry locked)
_LOCK_TABLE = {
    OperationMode.FLIGHT: (True, True, True),
    OperationMode.PERCHING: (True, True, True),
    OperationMode.ROTATION: (False, False, True),
    OperationMode.MANIPULATION: (True, False, False),
}


def enforce_locks(mode: OperationMode):
    """Exact lock-table row for the four steady operation modes.  The
    detachment sequence walks its own lock schedule."""
    if mode not in _LOCK_TABLE:
        raise ValueError(f"no fixed lock row for mode {mode.value!r}")
    return _LOCK_TABLE[mode]


@dataclass
class MissionConditions:
    """Snapshot of the guard-relevant plant state."""

    pumps_on: bool = False
    contact: bool = False
    attached: bool = False
    rotors_down: bool = False
    gantry_centered: bool = False
    theta: float = 0.0
    hinge_lock: HingeLockState = HingeLockState.LOCKED
    tool_on: bool = False
    depth_goal: bool = False
    detachment_done: bool = False


@dataclass
class Decision:
    accepted: bool
    mode: OperationMode
    reason: str = ""
    lock_request: HingeLockState | None = None


def handle(mode: OperationMode, cmd: OperatorCommand, cond: MissionConditions) -> Decision:
    """Pure guard logic: decide whether a command is legal in this mode and
    what mode/lock change it implies.  Never mutates anything."""
    ok = lambda new_mode=mode, lock=None: Decision(True, new_mode, lock_request=lock)
    reject = lambda why: Decision(False, mode, reason=why)

    if isinstance(cmd, SetMode):
        target = cmd.mode
        if target == mode:
            return ok()
        if mode == OperationMode.FLIGHT and target == OperationMode.PERCHING:
            if not cond.pumps_on:
                return reject("perching requires the vacuum pumps on")
            if not cond.contact:
                return reject("perching requires both cups in wall contact")
            return ok(target)
        if mode == OperationMode.PERCHING and target == OperationMode.ROTATION:
            if not cond.attached:
                return reject("rotation requires full suction attachment")
            if not cond.rotors_down:
                return reject("ramp the propellers down before rotation")
            if not cond.gantry_centered:
                return reject("tool must be at the workspace center")
            return ok(target, lock=HingeLockState.RELEASED)
        if mode == OperationMode.ROTATION and target == OperationMode.MANIPULATION:
            if abs(cond.theta - math.pi / 2) > math.radians(2.0):
                return reject("tilt must reach 90 deg before locking")
            return ok(target, lock=HingeLockState.ROTATION_LOCKED)
        if target == OperationMode.DETACHMENT and mode in (
            OperationMode.MANIPULATION,
            OperationMode.ROTATION,
        ):
            if cond.tool_on:
                return reject("switch the power tool off before detaching")
            return ok(target)
        if mode == OperationMode.DETACHMENT and target == OperationMode.FLIGHT:
            if not cond.detachment_done:
                return reject("detachment sequence not complete")
            return ok(target)
        if mode == OperationMode.PERCHING and target == OperationMode.FLIGHT:
            if cond.attached:
                return reject("attached: detach via the detachment sequence")
            return ok(target)
        return reject(f"no transition {mode.value} -> {target.value}")

    if isinstance(cmd, SetFlightRef):
        if mode in (OperationMode.FLIGHT, OperationMode.PERCHING):
            return ok()
        return reject("velocity references only apply in flight")
    if isinstance(cmd, Pumps):
        if cmd.on:
            if mode in (OperationMode.FLIGHT, OperationMode.PERCHING):
                return ok()
            return reject("pumps are managed automatically while perched")
        if cond.attached:
            return reject("pumps off while attached would drop the robot")
        if mode == OperationMode.DETACHMENT:
            return reject("the detachment sequence controls the pumps")
        return ok()
    if isinstance(cmd, Valves):
        if cmd.open:
            if cond.attached or mode != OperationMode.FLIGHT:
                return reject("valves open only via the detachment sequence")
            return ok()
        return ok()
    if isinstance(cmd, RotationThrottle):
        if mode != OperationMode.ROTATION:
            return reject("rotation throttle only valid in rotation mode")
        return ok()
    if isinstance(cmd, FeedThrottle):
        if mode != OperationMode.MANIPULATION:
            return reject("feed throttle only valid during surface manipulation")
        return ok()
    if isinstance(cmd, GantryTarget):
        if mode != OperationMode.MANIPULATION:
            return reject("gantry is locked outside surface manipulation")
        return ok()
    if isinstance(cmd, ToolPower):
        if not cmd.on:
            return ok()
        if mode != OperationMode.MANIPULATION:
            return reject("power tool only allowed during surface manipulation")
        if cond.hinge_lock != HingeLockState.ROTATION_LOCKED:
            return reject("power tool requires the rotation-locked hinge")
        return ok()
    if isinstance(cmd, RampDownRotors):
        if mode != OperationMode.PERCHING:
            return reject("propeller ramp-down only valid while perching")
        return ok()
    return reject(f"unhandled command {type(cmd).__name__}")


@dataclass
class RejectionRecord:
    time: float
    command: OperatorCommand
    reason: str


class MissionSim:
    """Owns the full plant state and applies commands at tick boundaries."""

    def __init__(
        self,
        params: RobotParams | None = None,
        env: Environment | None = None,
        tool: ToolSpec | None = None,
        gains: ControllerGains | None = None,
        seed: int | None = None,
        odometry_noise: bool = False,
        depth_goal: float = 0.03,
        start_position=(0.0, 0.0, 1.5),
    ):
        self.params = params or RobotParams()
        self.env = env or Environment()
        self.tool = tool or ToolSpec()
        self.gains = gains or ControllerGains()
        self.model = RotorModel.from_params(self.params)
        self.rng = np.random.default_rng(seed)
        self.odometry = OdometryNoise(rng=self.rng) if odometry_noise else OdometryNoise()
        self.depth_goal = depth_goal

        m = self.params.dry_mass
        hover = hover_speed(self.model, m, self.env.gravity)
        self.hover_rpm = hover
        self.state = SimState(
            body_pose=Pose(np.array(start_position, dtype=float)),
            rotor_speeds=np.full(4, hover),
        )
        self.mode = OperationMode.FLIGHT
        self.hinge_lock = HingeLockState.LOCKED
        self.cups = (SuctionCupState(), SuctionCupState())
        self.gantry = GantryState(
            position=np.array(self.params.geometry.gantry_flight_pos),
            target=np.array(self.params.geometry.gantry_flight_pos),
            speed_limit=self.params.gantry_speed_limit,
            backlash=self.params.gantry_backlash,
        )
        self.flight_ref = FlightReference()
        self.rotation_throttle = 0.0
        self.feed_throttle = 0.0
        self.feed_direction = "advance"
        self.tool_on = False
        self.pumps_on = False
        self.valves_open = False
        self.wall_anchor: Pose | None = None
        self.perch_offset: np.ndarray | None = None  # m, wall-plane (y_A, z_A)
        self.detachment: DetachmentSequence | None = None
        self._ramp = None  # (kind, t_start, w_start)
        self._lean_ref = None
        self.events: list[tuple[float, str]] = []
        self.rejections: list[RejectionRecord] = []
        self.last_rejection: RejectionRecord | None = None
        self.saturated = False
        self.aborted: SequenceAbort | None = None
        self.mode_trace = [self.mode]

    # -- guard-relevant snapshot ------------------------------------------

    def conditions(self) -> MissionConditions:
        return MissionConditions(
            pumps_on=self.pumps_on,
            contact=all(c.contact for c in self.cups),
            attached=all(c.attached for c in self.cups),
            rotors_down=float(np.max(np.abs(self.state.rotor_speeds))) < ROTORS_DOWN_RPM,
            gantry_centered=bool(
                np.linalg.norm(self.gantry.position - np.asarray(self.params.geometry.gantry_center))
                < GANTRY_TOL
            ),
            theta=self.state.hinge_theta,
            hinge_lock=self.hinge_lock,
            tool_on=self.tool_on,
            depth_goal=self.state.drill_depth >= self.depth_goal - 1e-6,
            detachment_done=self.detachment.done if self.detachment else False,
        )

    def condition(self, name: str) -> bool:
        c = self.conditions()
        extra = {
            "contact": c.contact,
            "attached": c.attached,
            "rotors_down": c.rotors_down,
            "gantry_centered": c.gantry_centered,
            "theta_90": abs(c.theta - math.pi / 2) < math.radians(2.0),
            "theta_0": abs(c.theta) < math.radians(0.5),
            "depth_goal": c.depth_goal,
            "retracted": self.state.hinge_slide <= 1e-3,
            "detachment_done": c.detachment_done,
            "gantry_at_target": self.gantry_at_target(),
        }
        if name not in extra:
            raise ValueError(f"unknown script condition {name!r}")
        return extra[name]

    # -- command ingest ----------------------------------------------------

    def apply_command(self, cmd: OperatorCommand) -> Decision:
        decision = handle(self.mode, cmd, self.conditions())
        if not decision.accepted:
            rec = RejectionRecord(self.state.time, cmd, decision.reason)
            self.rejections.append(rec)
            self.last_rejection = rec
            return decision

        if decision.lock_request is not None:
            lock = set_hinge_lock(
                self.hinge_lock, decision.lock_request, self.state.hinge_theta, self.state.hinge_slide
            )
            if not lock.granted:
                rec = RejectionRecord(self.state.time, cmd, lock.reason)
                self.rejections.append(rec)
                self.last_rejection = rec
                return Decision(False, self.mode, lock.reason)
            self.hinge_lock = lock.state

        if isinstance(cmd, SetMode) and cmd.mode != self.mode:
            self._enter_mode(cmd.mode)
        elif isinstance(cmd, SetFlightRef):
            self.flight_ref = FlightReference(np.array(cmd.velocity), cmd.heading)
        elif isinstance(cmd, Pumps):
            self.set_pumps(cmd.on)
        elif isinstance(cmd, Valves):
            self.set_valves(cmd.open)
        elif isinstance(cmd, RotationThrottle):
            self.rotation_throttle = float(np.clip(cmd.value, -1.0, 1.0))
        elif isinstance(cmd, FeedThrottle):
            self.set_feed(cmd.value, cmd.direction)
        elif isinstance(cmd, GantryTarget):
            if not set_gantry_target(self.gantry, (cmd.x, cmd.y), self.params):
                rec = RejectionRecord(self.state.time, cmd, "gantry target outside workspace")
                self.rejections.append(rec)
                self.last_rejection = rec
                return Decision(False, self.mode, rec.reason)
        elif isinstance(cmd, ToolPower):
            self.tool_on = cmd.on and self.mode == OperationMode.MANIPULATION
        elif isinstance(cmd, RampDownRotors):
            self._ramp = ("down", self.state.time, self.state.rotor_speeds.copy())
        return decision

    def _enter_mode(self, mode: OperationMode):
        self.tool_on = False
        self.mode = mode
        self.mode_trace.append(mode)
        self.events.append((self.state.time, f"mode_{mode.value}"))
        if mode == OperationMode.PERCHING:
            self.flight_ref = FlightReference()
        elif mode == OperationMode.ROTATION:
            self.rotation_throttle = 0.0
            # tool slides to the workspace center to shift the COM for tilting
            self.gantry.target = np.array(self.params.geometry.gantry_center)
        elif mode == OperationMode.MANIPULATION:
            self.feed_throttle = 0.0
        elif mode == OperationMode.DETACHMENT:
            self.feed_throttle = 0.0
            self.detachment = DetachmentSequence()
        elif mode == OperationMode.FLIGHT:
            self._ramp = None
            self._lean_ref = None

    # -- plant interface used by the detachment sequence -------------------

    def request_lock(self, lock: HingeLockState) -> bool:
        d = set_hinge_lock(self.hinge_lock, lock, self.state.hinge_theta, self.state.hinge_slide)
        if d.granted:
            self.hinge_lock = d.state
        return d.granted

    def set_feed(self, throttle: float, direction: str):
        self.feed_throttle = float(np.clip(throttle, 0.0, 1.0))
        self.feed_direction = direction

    def set_rotation_throttle(self, value: float):
        self.rotation_throttle = float(np.clip(value, -1.0, 1.0))

    def set_gantry_target(self, target, system: bool = False):
        set_gantry_target(self.gantry, target, self.params)

    def gantry_at_target(self) -> bool:
        return bool(np.linalg.norm(self.gantry.position - self.gantry.target) < GANTRY_TOL)

    def ramp_to_hover(self) -> bool:
        if self._ramp is None or self._ramp[0] != "up":
            self._ramp = ("up", self.state.time, self.state.rotor_speeds.copy())
        return bool(np.min(self.state.rotor_speeds) > 0.98 * self.hover_rpm)

    def hover_thrust_ready(self) -> bool:
        return bool(np.min(self.state.rotor_speeds) > 0.9 * self.hover_rpm)

    def set_lean_away(self):
        # command velocity along -x_B so the body leans away from the wall
        self._lean_ref = FlightReference(np.array([-0.5, 0.0, 0.0]), self.flight_ref.heading)

    def set_pumps(self, on: bool):
        self.pumps_on = on
        self.cups = tuple(replace(c, pump_on=on) for c in self.cups)
        self.events.append((self.state.time, "pumps_on" if on else "pumps_off"))

    def set_valves(self, open_: bool):
        self.valves_open = open_
        self.cups = tuple(replace(c, valve_open=open_) for c in self.cups)
        self.events.append((self.state.time, "valves_open" if open_ else "valves_closed"))

    # -- geometry helpers --------------------------------------------------

    def _wall_n(self) -> np.ndarray:
        return np.asarray(self.env.wall_normal, dtype=float)

    def _cup_center_world(self) -> np.ndarray:
        g = self.params.geometry
        offset = np.array([g.attachment_standoff + g.hinge_offset, 0.0, 0.0])
        return self.state.body_pose.transform(offset)

    def wall_gap(self) -> float:
        n = self._wall_n()
        return float((self._cup_center_world() - np.asarray(self.env.wall_point)) @ n)

    def perched(self) -> bool:
        return self.wall_anchor is not None and all(c.attached for c in self.cups)

    def _regime(self) -> ConstraintRegime:
        if self.perched():
            g = self.params.geometry
            contact = self.state.drill_depth + g.attachment_standoff - g.tool_tip_offset[2]
            lock = self.hinge_lock
            return ConstraintRegime.perched_at(self.wall_anchor, lock, contact_limit=contact)
        return ConstraintRegime.free_flight()

    def _anchor_here(self):
        """Fix the attachment frame to the wall at the current pose."""
        T_AB = hinge_pose_AB(self.state.hinge_theta, self.state.hinge_slide, self.params.geometry)
        self.wall_anchor = self.state.body_pose.compose(T_AB.inverse())
        n = self._wall_n()
        z = np.array([0.0, 0.0, 1.0])
        y = np.cross(z, -n)
        y /= np.linalg.norm(y)
        origin = self.wall_anchor.position
        wall_pt = np.asarray(self.env.wall_point)
        lateral = float((origin - wall_pt) @ y)
        vertical = float((origin - wall_pt) @ z)
        self.perch_offset = np.array([lateral, vertical])
        self.state.body_twist = np.zeros(6)
        self.state.hinge_rates = np.zeros(2)
        self.events.append((self.state.time, "perched"))

    # -- rotor command selection ------------------------------------------

    def _ramp_cmds(self) -> np.ndarray | None:
        if self._ramp is None:
            return None
        kind, t0, w0 = self._ramp
        f = min((self.state.time - t0) / RAMP_TIME, 1.0)
        if kind == "down":
            return w0 * (1.0 - f)
        return w0 + (np.full(4, self.hover_rpm) - w0) * f

    def _rotor_commands(self) -> np.ndarray:
        mode = self.mode
        if mode in (OperationMode.FLIGHT, OperationMode.PERCHING):
            if self.perched():
                ramp = self._ramp_cmds()
                if ramp is not None:
                    return ramp
                if mode == OperationMode.PERCHING:
                    return self.state.rotor_speeds.copy()
            pos, vel = self.odometry.corrupt(
                self.state.body_pose.position, self.state.body_twist[:3]
            )
            return flight_control(
                self.state,
                self.flight_ref,
                self.gains,
                self.params,
                self.model,
                tether_length=self.env.tether_deployed_length,
                gravity=self.env.gravity,
                velocity_override=vel,
            )
        if mode == OperationMode.ROTATION:
            return rotation_control(self.rotation_throttle)
        if mode == OperationMode.MANIPULATION:
            return feed_control(self.feed_throttle, self.feed_direction, self.model)
        # Detachment: phase dependent
        seq = self.detachment
        phase = seq.phase if seq and not seq.done else "complete"
        if phase == "retract":
            return feed_control(self.feed_throttle, self.feed_direction, self.model)
        if phase in ("release_pins", "rotate_back", "lock_hinge"):
            return rotation_control(self.rotation_throttle)
        if phase == "gantry_flight":
            return np.zeros(4)
        ramp = self._ramp_cmds()
        if phase == "ramp_hover" and ramp is not None:
            return ramp
        ref = self._lean_ref or FlightReference()
        return flight_control(
            self.state,
            ref,
            self.gains,
            self.params,
            self.model,
            tether_length=self.env.tether_deployed_length,
            gravity=self.env.gravity,
        )

    # -- main loop ---------------------------------------------------------

    def tick(self, dt: float = DT):
        cmds = self._rotor_commands()
        _, self.saturated = self.model.saturate(cmds, free_flight=not self.perched())
        regime = self._regime()
        self.state = step(self.state, cmds, regime, dt, self.params, self.env, self.model)

        # non-penetration of the cup plane while flying at the wall
        if not self.perched():
            gap = self.wall_gap()
            if gap < 0.0:
                n = self._wall_n()
                self.state.body_pose.position += n * (-gap)
                v = self.state.body_twist[:3]
                vn = float(v @ n)
                if vn < 0.0:
                    self.state.body_twist[:3] = v - n * vn

        # suction; the cups ride the anchored attachment frame once perched,
        # so the geometric gap only applies while flying
        if self.perched():
            gap, approach = 0.0, 0.0
        else:
            gap = max(self.wall_gap(), 0.0)
            approach = -float(self.state.body_twist[:3] @ self._wall_n())
        was_attached = all(c.attached for c in self.cups)
        self.cups = update_suction(self.cups, [gap, gap], abs(approach), dt, self.params)
        self.state.cup_pressures = np.array([c.pressure_deficit for c in self.cups])
        self.state.attached = tuple(bool(c.attached) for c in self.cups)
        now_attached = all(c.attached for c in self.cups)
        if now_attached and self.wall_anchor is None:
            self._anchor_here()
        elif was_attached and not now_attached and self.wall_anchor is not None:
            self.wall_anchor = None
            self.events.append((self.state.time, "separated"))

        # gantry moves when the mode allows it (operator) or when a mode
        # transition repositions the tool for COM management
        seq_phase = self.detachment.phase if (self.detachment and not self.detachment.done) else ""
        gantry_active = (
            self.mode == OperationMode.MANIPULATION
            or (self.mode == OperationMode.ROTATION and not self.gantry_at_target())
            or (self.mode == OperationMode.PERCHING and all(c.attached for c in self.cups))
            or seq_phase == "gantry_flight"
        )
        if self.mode == OperationMode.PERCHING:
            self.gantry.target = np.array(self.params.geometry.gantry_center)
        if gantry_active:
            from .tool import gantry_step

            gantry_step(self.gantry, dt)
        self.state.gantry_pos = self.gantry.position.copy()

        # drilling
        if (
            self.tool_on
            and self.mode == OperationMode.MANIPULATION
            and self.hinge_lock == HingeLockState.ROTATION_LOCKED
            and self.perched()
        ):
            g = self.params.geometry
            tooltip_depth_pos = self.state.hinge_slide - (
                g.attachment_standoff - g.tool_tip_offset[2]
            )
            if tooltip_depth_pos >= self.state.drill_depth - 1e-6:
                force = feed_force(self.state, self.params, self.model)
                self.state.drill_depth = drill_step(
                    force, self.tool, self.env.material, self.state.drill_depth, dt
                )

        # detachment sequence
        if self.mode == OperationMode.DETACHMENT and self.detachment and not self.detachment.done:
            try:
                self.detachment.update(self)
            except SequenceAbort as e:
                self.aborted = e
                self.events.append((self.state.time, f"abort_{e.phase}"))
                self.mode_trace.append(OperationMode.DETACHMENT)
                raise

    def run(self, duration: float, dt: float = DT):
        n = int(round(duration / dt))
        for _ in range(n):
            self.tick(dt)

    # -- derived outputs ---------------------------------------------------

    def current_feed_force(self) -> float:
        if not self.perched():
            return 0.0
        return feed_force(self.state, self.params, self.model)

    def current_power(self) -> float:
        return power_draw(self.state.rotor_speeds, self.model)

    def laser_pixel(self, sensing, rng=None):
        wall_pos = self.tool_wall_position()
        return observe_laser_cross(wall_pos, sensing, rng)

    def tool_wall_position(self) -> np.ndarray:
        """Tooltip projected onto the wall plane, in workspace-centered
        (lateral, vertical) coordinates including the perch offset."""
        g = self.params.geometry
        lateral = self.gantry.position[1]
        # at theta = 90 deg the gantry x axis maps onto -z_A
        vertical = g.hinge_offset - self.gantry.position[0]
        base = np.array([lateral, vertical])
        if self.perch_offset is not None:
            base = base + self.perch_offset
        return base


class ScriptRunner:
    """Plays a mission script against a MissionSim."""

    def __init__(self, sim: MissionSim, entries: list[ScriptEntry]):
        self.sim = sim
        self.pending = list(entries)

    def poll(self):
        """Fire script entries strictly in order: only the head entry is
        checked, so a later condition that happens to hold early (e.g.
        "retracted" before any drilling) cannot jump the queue."""
        fired = []
        while self.pending:
            e = self.pending[0]
            if e.time is not None and self.sim.state.time < e.time:
                break
            if e.condition is not None and not self.sim.condition(e.condition):
                break
            self.pending.pop(0)
            fired.append(e)
            self.sim.apply_command(e.command)
        return fired

    def run(self, max_time: float, dt: float = DT, until_complete: bool = True):
        while self.sim.state.time < max_time:
            self.poll()
            self.sim.tick(dt)
            if until_complete and not self.pending:
                return True
        return not self.pending
