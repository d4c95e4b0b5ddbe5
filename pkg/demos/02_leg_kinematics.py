"""
Leg kinematics and static stability
===================================

Forward/inverse kinematics for both leg layouts, the four horn mounting
options, and the support-polygon stability margin.
"""

import numpy as np

from quadstack import data
from quadstack.config import LegTopology, enumerate_attachments, load_config
from quadstack.kinematics import (
    LegPose,
    foot_in_body,
    leg_fk,
    leg_ik,
    stability_margin,
)

config = load_config(data.config_path("locoquad-2j"))
lengths = config.link_lengths

# A two-joint leg straight out, then knee folded straight down.
print("two-joint FK:")
for pose in (LegPose(0, 0), LegPose(90, 0), LegPose(0, -90)):
    foot = leg_fk(LegTopology.TWO_JOINT, None, pose, lengths)
    print(f"  rotator {pose.rotator_deg:6.1f}, knee {pose.knee_deg:6.1f} -> "
          f"({foot.x_cm:6.2f}, {foot.y_cm:6.2f}, {foot.z_cm:6.2f}) cm")

# Inverse kinematics recovers the pose, knee-down branch.
target = leg_fk(LegTopology.THREE_JOINT, None, LegPose(20, -60, 10), lengths)
solved = leg_ik(LegTopology.THREE_JOINT, None, target, lengths)
print(f"three-joint IK to {tuple(round(v, 3) for v in target)}:")
print(f"  rotator {solved.rotator_deg:.2f}, elevator {solved.elevator_deg:.2f}, "
      f"knee {solved.knee_deg:.2f}")

# The four mounting options per reconfigurable joint change the neutral
# shape: 4 variants for the basic leg, 16 for the three-joint one.
for topology in LegTopology:
    options = enumerate_attachments(topology)
    print(f"{topology.value}: {len(options)} attachment configurations")

# Stability: where may the center of gravity go before the stance tips?
feet = np.array([foot_in_body(config, i, p)[:2] for i, p in enumerate(
    (LegPose(0, 0), LegPose(0, 0), LegPose(0, 0), LegPose(0, 0)))])
print("stance margin at the body center: "
      f"{stability_margin(feet, (0.0, 0.0)):.2f} cm")
print("after drifting 10 cm forward:      "
      f"{stability_margin(feet, (10.0, 0.0)):.2f} cm")
print("outside the support polygon:       "
      f"{stability_margin(feet, (25.0, 0.0)):.2f} cm")
