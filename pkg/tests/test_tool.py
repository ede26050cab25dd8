import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perchdrill.params import Material, RobotParams
from perchdrill.tool import (
    HoleRecord,
    NOT_VISIBLE,
    GantryState,
    SensingModel,
    ToolSpec,
    accuracy,
    drill_step,
    gantry_step,
    observe_laser_cross,
    pixel_to_wall,
    precision,
    set_gantry_target,
)


def fresh_gantry(params, pos=(0.03, 0.0)):
    return GantryState(
        position=np.array(pos),
        target=np.array(pos),
        speed_limit=params.gantry_speed_limit,
        backlash=params.gantry_backlash,
    )


class TestGantry:
    def test_target_outside_workspace_rejected(self, params):
        g = fresh_gantry(params)
        assert not set_gantry_target(g, (0.5, 0.0), params)
        assert not set_gantry_target(g, (0.03, 0.09), params)
        assert set_gantry_target(g, (0.10, 0.05), params)

    def test_speed_limit(self, params):
        g = fresh_gantry(params)
        set_gantry_target(g, (0.13, 0.0), params)
        gantry_step(g, 1.0)
        moved = abs(g.position[0] - 0.03)
        assert moved <= params.gantry_speed_limit + 1e-9

    def test_reaches_target(self, params):
        g = fresh_gantry(params)
        set_gantry_target(g, (0.08, -0.04), params)
        for _ in range(500):
            gantry_step(g, 0.01)
        assert np.allclose(g.position, (0.08, -0.04), atol=1e-6)

    def test_backlash_bookkeeping_oracle(self, params):
        """Each direction reversal eats one backlash allotment before the
        carriage moves; total lost motion = reversals * backlash."""
        g = fresh_gantry(params, pos=(0.0, 0.0))
        waypoints = [0.02, -0.01, 0.03, 0.0, 0.04]
        total_time = 0.0
        for x in waypoints:
            set_gantry_target(g, (x, 0.0), params)
            for _ in range(300):
                gantry_step(g, 0.01)
        assert g.position[0] == pytest.approx(0.04, abs=1e-6)
        # oracle: 5 segments alternate direction, so 4 reversals
        path = sum(abs(b - a) for a, b in zip([0.0] + waypoints, waypoints))
        reversals = 4
        min_time = (path + reversals * params.gantry_backlash) / params.gantry_speed_limit
        assert min_time > path / params.gantry_speed_limit  # backlash costs time


class TestDrilling:
    def test_no_progress_below_threshold(self):
        spec, mat = ToolSpec(), Material()
        d = drill_step(70.0, spec, mat, 0.0, 1.0)
        assert d == 0.0

    def test_rate_above_threshold(self):
        spec, mat = ToolSpec(), Material()
        d = drill_step(110.0, spec, mat, 0.0, 1.0)
        assert d == pytest.approx(mat.drill_rate_coeff * 30.0, rel=1e-9)

    def test_depth_capped_at_tool_max(self):
        spec, mat = ToolSpec(), Material()
        d = spec.max_depth
        d2 = drill_step(150.0, spec, mat, d, 10.0)
        assert d2 == spec.max_depth

    @given(st.floats(0, 200), st.floats(0, 0.049))
    @settings(max_examples=50, deadline=None)
    def test_depth_never_decreases(self, force, depth):
        d2 = drill_step(force, ToolSpec(), Material(), depth, 0.01)
        assert d2 >= depth


class TestSensing:
    def test_quantization_to_pixel_grid(self):
        m = SensingModel(laser_offset=(0.0, 0.0), pointing_noise_sigma=0.0)
        px = observe_laser_cross(np.array([0.0101, -0.0099]), m)
        assert px == (3, -2)  # floor(x/0.004 + 0.5)
        assert np.allclose(pixel_to_wall(px, m), [0.012, -0.008])

    def test_mounting_offset_shifts_reading(self):
        m = SensingModel(pointing_noise_sigma=0.0)
        px = observe_laser_cross(np.array([0.0, 0.0]), m)
        assert pixel_to_wall(px, m) == pytest.approx([-0.008, -0.008], abs=1e-9)

    def test_out_of_field(self):
        m = SensingModel(pointing_noise_sigma=0.0)
        assert observe_laser_cross(np.array([1.0, 0.0]), m) is NOT_VISIBLE

    def test_offset_magnitude_hand_value(self):
        # |(-6.5, -7.5)| mm
        m = SensingModel()
        assert np.linalg.norm(m.laser_offset) * 1e3 == pytest.approx(9.9247, abs=1e-3)


class TestStatistics:
    def test_hand_built_fixture(self):
        """Fixture dataset computed by hand: errors (1,0), (3,0), (-1,0),
        (1,2) mm. Mean |e| = (1+3+1+sqrt(5))/4; mean error = (1, 0.5);
        deviations: (0,-.5),(2,-.5),(-2,-.5),(0,1.5)."""
        errs = np.array([[1.0, 0.0], [3.0, 0.0], [-1.0, 0.0], [1.0, 2.0]])
        assert accuracy(errs) == pytest.approx((1 + 3 + 1 + math.sqrt(5)) / 4)
        assert precision(errs) == pytest.approx(math.hypot(2.0, 0.5))

    def test_excluded_records_ignored(self):
        recs = [
            HoleRecord(run_id=0, target=np.zeros(2), hole=np.array([0.001, 0.0])),
            HoleRecord(run_id=1, target=np.zeros(2), hole=np.array([0.003, 0.0])),
            HoleRecord(
                run_id=2, target=np.zeros(2), hole=np.array([0.5, 0.0]), excluded=True
            ),
        ]
        assert accuracy(recs) == pytest.approx(0.002)

    def test_csv_row_format(self):
        r = HoleRecord(run_id=3, target=np.array([0.01, 0.02]), hole=np.array([0.012, 0.019]))
        row = r.csv_row()
        assert row.startswith("3,")
        assert row.endswith(",0")
