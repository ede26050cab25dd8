import json
import math

import numpy as np
import pytest

from perchdrill.frames import Pose, quat_from_axis_angle
from perchdrill.state import SimState


def make_state():
    return SimState(
        body_pose=Pose(
            np.array([1.25, -0.5, 2.0]),
            quat_from_axis_angle(np.array([0.1, 0.9, -0.3]), 0.77),
        ),
        body_twist=np.array([0.1, -0.2, 0.3, 0.01, -0.02, 0.03]),
        hinge_theta=1.2,
        hinge_slide=0.04,
        hinge_rates=np.array([0.05, -0.001]),
        rotor_speeds=np.array([-900.0, -900.0, 10.0, 10.0]),
        cup_pressures=np.array([8.0e4, 7.9e4]),
        attached=(True, True),
        gantry_pos=np.array([0.03, -0.01]),
        drill_depth=0.012,
        time=42.5,
    )


class TestSerialization:
    def test_json_round_trip_bit_exact(self):
        s = make_state()
        r = SimState.from_json(s.to_json())
        assert np.array_equal(r.body_pose.position, s.body_pose.position)
        assert np.array_equal(r.body_pose.orientation, s.body_pose.orientation)
        assert np.array_equal(r.body_twist, s.body_twist)
        assert r.hinge_theta == s.hinge_theta
        assert r.hinge_slide == s.hinge_slide
        assert np.array_equal(r.rotor_speeds, s.rotor_speeds)
        assert np.array_equal(r.cup_pressures, s.cup_pressures)
        assert r.attached == s.attached
        assert r.drill_depth == s.drill_depth
        assert r.time == s.time

    def test_json_is_plain_types(self):
        doc = json.loads(make_state().to_json())
        assert isinstance(doc["attached"][0], bool)
        assert isinstance(doc["time"], float)

    def test_copy_is_independent(self):
        s = make_state()
        c = s.copy()
        c.body_pose.position[0] = 99.0
        c.rotor_speeds[0] = 0.0
        assert s.body_pose.position[0] == 1.25
        assert s.rotor_speeds[0] == -900.0


class TestInvariants:
    def test_default_state_valid(self, params):
        SimState().check_invariants(params)

    def test_theta_range_enforced(self, params):
        s = make_state()
        s.hinge_theta = 2.0
        with pytest.raises(ValueError):
            s.check_invariants(params)

    def test_slide_range_enforced(self, params):
        s = make_state()
        s.hinge_slide = 0.5
        with pytest.raises(ValueError):
            s.check_invariants(params)

    def test_quaternion_norm_enforced(self, params):
        s = make_state()
        s.body_pose.orientation = np.array([2.0, 0.0, 0.0, 0.0])
        with pytest.raises(ValueError):
            s.check_invariants(params)

    def test_negative_pressure_rejected(self, params):
        s = make_state()
        s.cup_pressures = np.array([-1.0, 0.0])
        with pytest.raises(ValueError):
            s.check_invariants(params)
