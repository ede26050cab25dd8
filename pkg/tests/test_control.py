import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perchdrill.control import (
    ControllerGains,
    FlightReference,
    allocate,
    feed_control,
    feed_max_speed,
    flight_control,
    mixer_matrix,
    rotation_control,
)
from perchdrill.mission import MissionSim


class TestMixer:
    def test_matrix_invertible(self, model):
        A = mixer_matrix(model)
        assert abs(np.linalg.det(A)) > 1e-6

    @given(
        st.floats(10.0, 150.0),
        st.floats(-3.0, 3.0),
        st.floats(-3.0, 3.0),
        st.floats(-0.5, 0.5),
    )
    @settings(max_examples=100, deadline=None)
    def test_allocation_round_trip(self, model, T, tx, ty, tz):
        """rpm commands from allocate() reproduce the requested wrench when
        no clamping engages."""
        w = allocate([T, tx, ty, tz], model, free_flight=False)
        if np.max(np.abs(w)) >= model.speed_limit - 1e-6:
            return  # saturated case: no exact reproduction expected
        f = model.k_f * w * np.abs(w)
        got = mixer_matrix(model) @ f
        assert np.allclose(got, [T, tx, ty, tz], atol=1e-6)

    def test_free_flight_allocation_non_negative(self, model):
        w = allocate([5.0, 0.0, 3.0, 0.0], model, free_flight=True)
        assert np.all(w >= 0.0)


class TestFlightControl:
    def test_velocity_step_converges(self):
        sim = MissionSim(seed=0)
        sim.run(2.0)
        sim.flight_ref = FlightReference(np.array([0.5, 0.0, 0.0]))
        sim.run(6.0)
        assert sim.state.body_twist[0] == pytest.approx(0.5, abs=0.05)
        sim.run(2.0)
        assert abs(sim.state.body_pose.position[2] - 1.5) < 0.05  # altitude held

    def test_hover_reference_is_stationary(self):
        sim = MissionSim(seed=0)
        sim.run(4.0)
        assert np.linalg.norm(sim.state.body_twist[:3]) < 0.02
        assert abs(sim.state.body_pose.position[2] - 1.5) < 0.01

    def test_lateral_and_vertical_tracking(self):
        sim = MissionSim(seed=0)
        sim.run(2.0)
        sim.flight_ref = FlightReference(np.array([0.0, 0.3, 0.2]))
        sim.run(8.0)
        v = sim.state.body_twist[:3]
        assert v[1] == pytest.approx(0.3, abs=0.05)
        assert v[2] == pytest.approx(0.2, abs=0.05)

    def test_reference_speed_limit(self):
        with pytest.raises(ValueError):
            FlightReference(np.array([3.0, 0.0, 0.0]))

    def test_gain_validation(self):
        with pytest.raises(ValueError):
            ControllerGains(vel_p=-1.0).validate()


class TestRotationControl:
    def test_front_pair_reversed_back_pair_off(self):
        w = rotation_control(0.5)
        assert w[0] == w[1] < 0.0
        assert w[2] == w[3] == 0.0

    def test_signed_throttle_for_lowering(self):
        w = rotation_control(-0.5)
        assert w[0] == w[1] > 0.0

    def test_clamped(self):
        assert np.max(np.abs(rotation_control(5.0))) <= 3000.0


class TestFeedControl:
    def test_full_throttle_realizes_force_ceiling(self, model):
        w = feed_control(1.0, "advance", model)
        force = float(np.sum(model.k_f * w * np.abs(w)))
        assert force == pytest.approx(150.0, rel=1e-9)
        assert feed_max_speed(model) == pytest.approx(3503.2, abs=0.1)

    def test_retract_reverses_all_four(self, model):
        w = feed_control(0.5, "retract", model)
        assert np.all(w < 0.0)
        assert np.allclose(w, w[0])

    def test_unknown_direction_rejected(self, model):
        with pytest.raises(ValueError):
            feed_control(0.5, "sideways", model)

    def test_throttle_clamped(self, model):
        w = feed_control(2.0, "advance", model)
        assert np.max(np.abs(w)) <= feed_max_speed(model) + 1e-9
