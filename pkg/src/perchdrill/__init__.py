"""Simulation and control stack for a wall-perching aerial drilling robot.

The robot flies as a conventional quadrotor, sticks to vertical surfaces
with vacuum cups, pivots its airframe 90 degrees about a wall-mounted
hinge, and then uses its propellers to press a power tool into the wall.
"""

from .attachment import HingeLockState, SuctionCupState
from .commands import OperationMode
from .frames import Pose
from .mission import MissionSim, ScriptRunner
from .params import Environment, RobotParams, load_params, write_params
from .state import SimState

__all__ = [
    "Environment",
    "HingeLockState",
    "MissionSim",
    "OperationMode",
    "Pose",
    "RobotParams",
    "ScriptRunner",
    "SimState",
    "SuctionCupState",
    "load_params",
    "write_params",
]

__version__ = "0.1.0"
