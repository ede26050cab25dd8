"""Operator command schema and the five-phase operation modes.

One schema serves mission script playback, teleop message ingest, and
recording: each command is a JSON object with a ``type`` tag.  Script lines
pair a trigger (``{"time": s}`` or ``{"cond": name}``) with a command.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class OperationMode(Enum):
    FLIGHT = "flight"
    PERCHING = "perching"
    ROTATION = "rotation"
    MANIPULATION = "manipulation"
    DETACHMENT = "detachment"


@dataclass(frozen=True)
class SetFlightRef:
    velocity: tuple = (0.0, 0.0, 0.0)  # m/s, in the heading frame
    heading: float = 0.0  # rad


@dataclass(frozen=True)
class SetMode:
    mode: OperationMode


@dataclass(frozen=True)
class Pumps:
    on: bool


@dataclass(frozen=True)
class Valves:
    open: bool


@dataclass(frozen=True)
class RotationThrottle:
    value: float  # [-1, 1]; positive tilts the table up toward 90 deg


@dataclass(frozen=True)
class FeedThrottle:
    value: float  # [0, 1]
    direction: str = "advance"  # or "retract"


@dataclass(frozen=True)
class GantryTarget:
    x: float
    y: float


@dataclass(frozen=True)
class ToolPower:
    on: bool


@dataclass(frozen=True)
class RampDownRotors:
    pass


OperatorCommand = (
    SetFlightRef
    | SetMode
    | Pumps
    | Valves
    | RotationThrottle
    | FeedThrottle
    | GantryTarget
    | ToolPower
    | RampDownRotors
)

_TYPES = {
    "set_flight_ref": SetFlightRef,
    "set_mode": SetMode,
    "pumps": Pumps,
    "valves": Valves,
    "rotation_throttle": RotationThrottle,
    "feed_throttle": FeedThrottle,
    "gantry_target": GantryTarget,
    "tool_power": ToolPower,
    "ramp_down_rotors": RampDownRotors,
}
_NAMES = {v: k for k, v in _TYPES.items()}


def command_to_dict(cmd: OperatorCommand) -> dict:
    d = {"type": _NAMES[type(cmd)]}
    if isinstance(cmd, SetFlightRef):
        d.update(velocity=list(cmd.velocity), heading=cmd.heading)
    elif isinstance(cmd, SetMode):
        d.update(mode=cmd.mode.value)
    elif isinstance(cmd, Pumps):
        d.update(on=cmd.on)
    elif isinstance(cmd, Valves):
        d.update(open=cmd.open)
    elif isinstance(cmd, RotationThrottle):
        d.update(value=cmd.value)
    elif isinstance(cmd, FeedThrottle):
        d.update(value=cmd.value, direction=cmd.direction)
    elif isinstance(cmd, GantryTarget):
        d.update(x=cmd.x, y=cmd.y)
    elif isinstance(cmd, ToolPower):
        d.update(on=cmd.on)
    return d


def command_from_dict(d: dict) -> OperatorCommand:
    kind = d.get("type")
    if kind not in _TYPES:
        raise ValueError(f"unknown command type: {kind!r}")
    cls = _TYPES[kind]
    if cls is SetFlightRef:
        return SetFlightRef(tuple(d.get("velocity", (0, 0, 0))), float(d.get("heading", 0.0)))
    if cls is SetMode:
        return SetMode(OperationMode(d["mode"]))
    if cls is Pumps:
        return Pumps(bool(d["on"]))
    if cls is Valves:
        return Valves(bool(d["open"]))
    if cls is RotationThrottle:
        return RotationThrottle(float(d["value"]))
    if cls is FeedThrottle:
        return FeedThrottle(float(d["value"]), d.get("direction", "advance"))
    if cls is GantryTarget:
        return GantryTarget(float(d["x"]), float(d["y"]))
    if cls is ToolPower:
        return ToolPower(bool(d["on"]))
    return RampDownRotors()


@dataclass(frozen=True)
class ScriptEntry:
    command: OperatorCommand
    time: Optional[float] = None  # fire at sim time >= time
    condition: Optional[str] = None  # or when the named condition holds

    def to_dict(self) -> dict:
        when = {}
        if self.time is not None:
            when["time"] = self.time
        if self.condition is not None:
            when["cond"] = self.condition
        return {"when": when, "cmd": command_to_dict(self.command)}


def parse_script(text: str) -> list[ScriptEntry]:
    """Parse a mission script: one JSON object per non-blank, non-# line."""
    entries = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            obj = json.loads(line)
            when = obj.get("when", {})
            entries.append(
                ScriptEntry(
                    command=command_from_dict(obj["cmd"]),
                    time=when.get("time"),
                    condition=when.get("cond"),
                )
            )
        except (KeyError, ValueError, TypeError) as e:
            raise ValueError(f"script line {lineno}: {e}") from e
    return entries


def dump_script(entries) -> str:
    return "\n".join(json.dumps(e.to_dict()) for e in entries) + "\n"
