"""
Sensor-driven routines
======================

The three validated behaviors, end to end: the grab-then-release start-up
(the IMU gravity direction tells the robot it was picked up), ultrasonic
obstacle avoidance, and the two-leg balance reflex.
"""

import io
import json
import math

from quadstack import data
from quadstack.config import load_config
from quadstack.runner import load_scenario, run_scenario

config = load_config(data.config_path("locoquad-2j"))


def run(name):
    trace = io.StringIO()
    summary = run_scenario(config, load_scenario(data.scenario_path(name)), trace)
    return summary, [json.loads(line) for line in trace.getvalue().splitlines()]


# 1. Start-up by grab: lift the resting robot, tilt it, put it down.
summary, records = run("grab-startup")
print("grab-startup timeline:")
state = None
for r in records:
    for e in r["events"]:
        print(f"  t={r['t']:5.2f}  event: {e}")
    if r["state"] != state:
        state = r["state"]
        print(f"  t={r['t']:5.2f}  state -> {state}")
print()

# 2. Obstacle avoidance: walk at a wall, swerve below the 0.2 m threshold.
summary, records = run("obstacle-corridor")
turns = [r["t"] for r in records if "avoidance_turn" in r["events"]]
print(f"obstacle-corridor: {len(turns)} avoidance turns at t={turns}, "
      f"{summary.collisions} collisions, heading {summary.heading_change_deg:.0f} deg")
print()

# 3. Balance on two legs from a 10 degree tilt.
summary, records = run("balance-two-legs")
print("balance-two-legs tilt decay:")
for r in records:
    if r["t"] in (0.02, 0.25, 0.5, 1.0, 2.0, 5.0):
        tilt = math.hypot(r["body"]["roll"], r["body"]["pitch"])
        print(f"  t={r['t']:5.2f}  tilt {tilt:6.2f} deg")
print(f"final state: {summary.final_state}")
