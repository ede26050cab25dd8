import numpy as np
import pytest

from perchdrill.params import Environment, RobotParams
from perchdrill.rotors import RotorModel


@pytest.fixture(scope="session")
def params():
    return RobotParams()


@pytest.fixture(scope="session")
def env():
    return Environment()


@pytest.fixture(scope="session")
def model(params):
    return RotorModel.from_params(params)


# expensive shared runs ------------------------------------------------------


@pytest.fixture(scope="session")
def force_power_report():
    from perchdrill.experiments import run_force_power_sweep

    return run_force_power_sweep()


@pytest.fixture(scope="session")
def perching_report():
    from perchdrill.experiments import run_perching_mc

    return run_perching_mc(n=30, scatter_sigma=0.05, seed=0)


@pytest.fixture(scope="session")
def drilling_report():
    from perchdrill.experiments import run_drilling_study

    return run_drilling_study(n_holes=9, seed=0)


@pytest.fixture(scope="session")
def drilling_report_noiseless():
    from perchdrill.experiments import run_drilling_study

    return run_drilling_study(n_holes=9, seed=0, noise=False)


@pytest.fixture(scope="session")
def detachment_report():
    from perchdrill.experiments import run_detachment_replay

    return run_detachment_replay()


@pytest.fixture(scope="session")
def golden_mission():
    """Scripted full mission with a reduced drill depth, shared by the
    mission, CLI-equivalence, and acceptance tests."""
    from pathlib import Path

    from perchdrill.commands import parse_script
    from perchdrill.mission import MissionSim, ScriptRunner

    script = Path(__file__).resolve().parents[1] / "missions" / "full_mission.jsonl"
    sim = MissionSim(seed=0, depth_goal=0.01)
    runner = ScriptRunner(sim, parse_script(script.read_text()))
    completed = runner.run(max_time=300.0)
    assert completed, "golden mission script did not complete"
    return sim
