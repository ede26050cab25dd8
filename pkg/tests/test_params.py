import math

import numpy as np
import pytest

from perchdrill.params import (
    Environment,
    Material,
    RobotParams,
    load_params,
    total_mass,
    write_params,
)


class TestMasses:
    def test_dry_mass_is_sum_of_subassemblies(self, params):
        assert params.dry_mass == pytest.approx(6.6 + 2.2 + 2.3)

    def test_total_mass_includes_deployed_tether(self, params):
        assert total_mass(params, 0.0) == pytest.approx(params.dry_mass)
        assert total_mass(params, 10.0) == pytest.approx(params.dry_mass + 2.0)


class TestCups:
    def test_cup_area(self, params):
        # 75 mm diameter circle
        assert params.cup_area == pytest.approx(math.pi * 0.0375**2, rel=1e-12)

    def test_single_cup_capacity(self, params):
        # 80 kPa over the cup area, frozen oracle
        assert params.vacuum_max * params.cup_area == pytest.approx(353.43, abs=0.1)

    def test_critical_friction_coefficient(self, params):
        # weight / total normal capacity; hand value 0.154
        mu_crit = params.dry_mass * 9.81 / (2 * params.vacuum_max * params.cup_area)
        assert mu_crit == pytest.approx(0.154, abs=0.001)
        # room-temperature rubber holds with margin, icy rubber does not
        assert params.friction_mu(20.0) > mu_crit
        assert params.friction_mu(0.0) < mu_crit

    def test_friction_interpolation_endpoints(self, params):
        assert params.friction_mu(25.0) == pytest.approx(0.5)
        assert params.friction_mu(-5.0) == pytest.approx(0.12)
        mid = params.friction_mu(10.0)
        assert 0.12 < mid < 0.5


class TestValidation:
    def test_default_params_valid(self):
        RobotParams().validate()

    def test_negative_mass_rejected(self):
        with pytest.raises(ValueError):
            RobotParams(mass_base=-1.0).validate()

    def test_wall_normal_must_be_unit(self):
        with pytest.raises(ValueError):
            Environment(wall_normal=(2.0, 0.0, 0.0))


class TestParamsFile:
    def test_round_trip(self, tmp_path):
        p = RobotParams(mass_base=7.0, vacuum_max=70e3)
        path = tmp_path / "params.yaml"
        write_params(p, path)
        q = load_params(path)
        assert q.mass_base == pytest.approx(7.0)
        assert q.vacuum_max == pytest.approx(70e3)
        assert q.dry_mass == pytest.approx(7.0 + 2.2 + 2.3)

    def test_file_carries_provenance_comments(self, tmp_path):
        path = tmp_path / "params.yaml"
        write_params(RobotParams(), path)
        text = path.read_text()
        assert "datasheet" in text or "calibrated" in text

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "params.yaml"
        path.write_text("no_such_field: 3\n")
        with pytest.raises((KeyError, ValueError)):
            load_params(path)


class TestMaterial:
    def test_concrete_threshold(self):
        m = Material()
        assert m.min_feed_force == pytest.approx(80.0)
        assert m.drill_rate_coeff == pytest.approx(2e-5)
