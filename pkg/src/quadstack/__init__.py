"""Control and simulation stack for the LoCoQuad arachnoid quadruped.

The package is organized around seven subsystems:

* :mod:`quadstack.config` -- robot description files, attachment enumeration
* :mod:`quadstack.feasibility` -- static torque and power/autonomy budgets
* :mod:`quadstack.kinematics` -- per-leg FK/IK and support-polygon stability
* :mod:`quadstack.hal` -- device interfaces and the byte-level PWM emulator
* :mod:`quadstack.sim` -- deterministic tick-based kinematic world
* :mod:`quadstack.behavior` -- behavior state machine and motion primitives
* :mod:`quadstack.runner` / :mod:`quadstack.cli` -- scenario execution
"""

from quadstack.config import (
    AttachmentConfig,
    LegTopology,
    RobotConfig,
    enumerate_attachments,
    parse_config,
    serialize_config,
    total_mass,
)
from quadstack.feasibility import (
    BatteryPack,
    PowerBudget,
    TorqueScenario,
    autonomy_minutes,
    foot_reaction,
    max_body_weight,
    peak_power,
    static_joint_torques,
)
from quadstack.kinematics import LegPose, leg_fk, leg_ik, stability_margin

__version__ = "0.1.0"

__all__ = [
    "AttachmentConfig",
    "BatteryPack",
    "LegPose",
    "LegTopology",
    "PowerBudget",
    "RobotConfig",
    "TorqueScenario",
    "autonomy_minutes",
    "enumerate_attachments",
    "foot_reaction",
    "leg_fk",
    "leg_ik",
    "max_body_weight",
    "parse_config",
    "peak_power",
    "serialize_config",
    "stability_margin",
    "static_joint_torques",
    "total_mass",
]
