"""Robot and environment parameters with per-value provenance.

Every scalar that feeds the models carries a provenance tag:
  "datasheet"  - from the platform's published weights/dimensions/components
  "measured"   - from the platform's reported test measurements
  "calibrated" - fitted so the models reproduce the measured anchor points
  "derived"    - arithmetic consequence of other values
  "assumed"    - not available anywhere; engineering default, tune freely
  "tuned"      - set by in-repo scripted tuning (controller gains)

Parameter files are YAML: ``name: {value: ..., provenance: "..."}``.  See
``write_params`` / ``load_params``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict, fields as dc_fields

import numpy as np
import yaml

GRAVITY = 9.81  # m/s^2

# Rotor coefficient anchors: 3000 rpm on all four rotors presses with 110 N,
# combined electrical draw at hover sits at 2 kW.
FEED_ANCHOR_RPM = 3000.0
FEED_ANCHOR_FORCE = 110.0  # N, total over four rotors
MAX_FEED_FORCE = 150.0  # N, at full feed throttle
HOVER_POWER = 2000.0  # W
AVIONICS_POWER = 50.0  # W, constant draw (assumed)


def _default_k_f():
    return FEED_ANCHOR_FORCE / (4.0 * FEED_ANCHOR_RPM**2)


def _default_k_p(total_mass):
    hover = math.sqrt(total_mass * GRAVITY / (4.0 * _default_k_f()))
    return (HOVER_POWER - AVIONICS_POWER) / (4.0 * hover**3)


@dataclass
class Geometry:
    """Fixed mounting geometry (all assumed; the platform publishes only
    bounding dimensions)."""

    attachment_standoff: float = 0.25  # m, wall plane to slide outer stop
    hinge_offset: float = 0.03  # m, hinge axis ahead of body origin along x_B
    slide_travel: float = 0.15  # m, usable stroke of p
    tool_tip_offset: tuple = (0.0, 0.0, 0.15)  # m, tooltip relative to gantry carriage in B
    cup_spacing: float = 0.30  # m, lateral distance between cup centers
    rotor_positions: tuple = (
        (0.40, 0.285, 0.0),
        (0.40, -0.285, 0.0),
        (-0.40, 0.285, 0.0),
        (-0.40, -0.285, 0.0),
    )  # m, order: front-left, front-right, back-left, back-right
    rotor_spin_dirs: tuple = (1, -1, -1, 1)
    gantry_center: tuple = (0.03, 0.0)  # m, workspace center in B xy
    gantry_flight_pos: tuple = (-0.075, 0.0)  # m, tool parked aft for flight COM trim


@dataclass
class RobotParams:
    # Masses and dimensions (datasheet)
    mass_base: float = 6.6  # kg
    mass_positioning: float = 2.2  # kg
    mass_tool: float = 2.3  # kg
    tether_linear_density: float = 0.2  # kg/m
    height: float = 0.77  # m
    width: float = 0.73  # m
    length: float = 1.22  # m
    prop_diameter: float = 0.48  # m

    # Rotor model (calibrated / assumed)
    rotor_thrust_coeff: float = field(default_factory=_default_k_f)  # N/rpm^2
    rotor_torque_coeff: float = 2.5e-8  # N*m/rpm^2 (assumed)
    rotor_power_coeff: float = field(default_factory=lambda: _default_k_p(11.1))  # W/rpm^3
    rotor_speed_limit: float = 3600.0  # rpm (assumed; keeps 150 N reachable)
    rotor_time_constant: float = 0.2  # s, first-order spin-up lag (assumed)

    # Suction (datasheet sizes, assumed actuator curves)
    cup_diameter: float = 0.075  # m
    cup_count: int = 2
    vacuum_max: float = 80e3  # Pa deficit below ambient (assumed)
    pump_time_constant: float = 1.5  # s (assumed)
    valve_release_time_constant: float = 0.3  # s (assumed)
    attach_pressure_fraction: float = 0.3  # attached above this fraction of vacuum_max

    # Friction (assumed; cold behavior reproduces the reported slippage trend)
    friction_mu_warm: float = 0.5  # at >= 20 C
    friction_mu_cold: float = 0.12  # at 0 C
    slide_friction_force: float = 10.0  # N, Coulomb friction of the slide bearings

    # Gantry (derived from the 150 x 210 mm reachable window; 150 mm is taken
    # lateral and 210 mm vertical -- the split is an assumption)
    gantry_workspace: tuple = (0.210, 0.150)  # m, (x_B extent, y_B extent)
    gantry_speed_limit: float = 0.05  # m/s (assumed)
    gantry_backlash: float = 0.001  # m per direction reversal (assumed)

    # Inertia about B axes, box approximation (derived)
    inertia: tuple = (1.04, 1.93, 1.87)  # kg*m^2

    geometry: Geometry = field(default_factory=Geometry)

    @property
    def dry_mass(self) -> float:
        return self.mass_base + self.mass_positioning + self.mass_tool

    @property
    def cup_area(self) -> float:
        return math.pi * (self.cup_diameter / 2.0) ** 2

    def friction_mu(self, temperature_c: float) -> float:
        """Cup friction coefficient vs temperature, piecewise linear: warm
        value at >= 20 C falling to the cold value at 0 C."""
        if temperature_c >= 20.0:
            return self.friction_mu_warm
        if temperature_c <= 0.0:
            return self.friction_mu_cold
        f = temperature_c / 20.0
        return self.friction_mu_cold + f * (self.friction_mu_warm - self.friction_mu_cold)

    def gantry_bounds(self):
        """(lo, hi) corners of the gantry workspace box in B xy."""
        cx, cy = self.geometry.gantry_center
        ex, ey = self.gantry_workspace
        lo = np.array([cx - ex / 2.0, cy - ey / 2.0])
        hi = np.array([cx + ex / 2.0, cy + ey / 2.0])
        return lo, hi

    def validate(self):
        if min(self.mass_base, self.mass_positioning, self.mass_tool) <= 0:
            raise ValueError("masses must be positive")
        if self.rotor_thrust_coeff <= 0:
            raise ValueError("rotor_thrust_coeff must be positive")
        if min(self.gantry_workspace) <= 0:
            raise ValueError("gantry workspace extents must be positive")
        return self


def total_mass(params: RobotParams, tether_deployed_length: float = 0.0) -> float:
    """All-up mass including the deployed portion of the power tether."""
    if tether_deployed_length < 0:
        raise ValueError("tether length must be >= 0")
    return params.dry_mass + params.tether_linear_density * tether_deployed_length


@dataclass
class Material:
    name: str = "concrete"
    min_feed_force: float = 80.0  # N, below this the drill makes no progress
    drill_rate_coeff: float = 2e-5  # m/(N*s) (assumed; penetration rate is a free parameter)


WOOD = Material(name="wood", min_feed_force=30.0, drill_rate_coeff=8e-5)


@dataclass
class Environment:
    gravity: float = GRAVITY
    wall_point: tuple = (3.0, 0.0, 1.5)  # m, a point on the wall plane
    wall_normal: tuple = (-1.0, 0.0, 0.0)  # unit, facing the room (= -x_A when perched)
    material: Material = field(default_factory=Material)
    ambient_temperature: float = 20.0  # C
    tether_attach_point: tuple = (0.0, 0.0, 0.0)  # m, in B
    tether_deployed_length: float = 0.0  # m

    def __post_init__(self):
        n = np.linalg.norm(np.asarray(self.wall_normal, dtype=float))
        if abs(n - 1.0) > 1e-9:
            raise ValueError("wall normal must be unit length")
        if self.material.min_feed_force < 0:
            raise ValueError("min_feed_force must be >= 0")


# ---------------------------------------------------------------------------
# Parameter file round-trip

_PROVENANCE = {
    "mass_base": "datasheet",
    "mass_positioning": "datasheet",
    "mass_tool": "datasheet",
    "tether_linear_density": "datasheet",
    "height": "datasheet",
    "width": "datasheet",
    "length": "datasheet",
    "prop_diameter": "datasheet",
    "rotor_thrust_coeff": "calibrated",
    "rotor_torque_coeff": "assumed",
    "rotor_power_coeff": "calibrated",
    "rotor_speed_limit": "assumed",
    "rotor_time_constant": "assumed",
    "cup_diameter": "datasheet",
    "cup_count": "datasheet",
    "vacuum_max": "assumed",
    "pump_time_constant": "assumed",
    "valve_release_time_constant": "assumed",
    "attach_pressure_fraction": "assumed",
    "friction_mu_warm": "assumed",
    "friction_mu_cold": "assumed",
    "slide_friction_force": "assumed",
    "gantry_workspace": "measured",
    "gantry_speed_limit": "assumed",
    "gantry_backlash": "assumed",
    "inertia": "derived",
    "geometry": "assumed",
}


def write_params(params: RobotParams, path):
    doc = {}
    for f in dc_fields(params):
        value = getattr(params, f.name)
        if f.name == "geometry":
            value = asdict(value)
        elif isinstance(value, tuple):
            value = list(value)
        doc[f.name] = {"value": value, "provenance": _PROVENANCE[f.name]}
    with open(path, "w") as fh:
        yaml.safe_dump(doc, fh, sort_keys=True)


def _as_tuple(v):
    return tuple(tuple(x) if isinstance(x, list) else x for x in v)


def load_params(path) -> RobotParams:
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    known = {f.name for f in dc_fields(RobotParams)}
    kwargs = {}
    for name, entry in doc.items():
        if name not in known:
            raise ValueError(f"unknown parameter {name!r} in {path}")
        value = entry["value"] if isinstance(entry, dict) and "value" in entry else entry
        if name == "geometry":
            g = {k: _as_tuple(v) if isinstance(v, list) else v for k, v in value.items()}
            value = Geometry(**g)
        elif isinstance(value, list):
            value = _as_tuple(value)
        kwargs[name] = value
    return RobotParams(**kwargs).validate()
