"""
Torque and power budgets
========================

How heavy may the robot get, and how long does a charge last?  This walks
the same arithmetic the design was sized with: the foot reaction, the
worst-case moment balance about the knee, the 5.1 V rail demand, and the
constant-load battery model.
"""

from quadstack import data
from quadstack.config import load_config, total_mass
from quadstack.feasibility import (
    PUBLISHED_MAX_BODY_WEIGHT_G,
    autonomy_minutes,
    foot_reaction,
    max_body_weight,
    peak_power,
    scenario_from_config,
)

config = load_config(data.config_path("locoquad-2j"))
print(f"build: {config.name}, total mass {total_mass(config):.0f} g")

# Each foot carries a quarter of the body plus its own link masses.
print(f"foot reaction at 560 g: {foot_reaction(560, 30, 30):.1f} g")

# Worst case: legs fully extended, both pitch servos at nominal torque.
scenario = scenario_from_config(config)
limit = max_body_weight(scenario)
print(f"carrying limit with mid-link arms: {limit:.1f} g")
print(
    f"published figure for the reference design: {PUBLISHED_MAX_BODY_WEIGHT_G:.0f} g "
    "(its moment arms come from the original force diagram and are not"
)
print("recoverable from the link lengths, so both numbers are reported)")

# The rail must feed the controller peak plus every servo at once.
watts, headroom = peak_power(config.electronics)
capacity = config.electronics.converter_count * config.electronics.converter_max_power_w
print(f"peak rail power: {watts:.2f} W against {capacity:.0f} W of converters "
      f"({'fits' if headroom else 'does not fit'})")

# Worst-case autonomy: constant peak load through the converter losses.
minutes = autonomy_minutes(config.battery, watts)
print(f"autonomy at that load: {minutes:.1f} minutes (lower bound)")

# The same analysis at the full 12-servo fit-out:
twelve = load_config(data.config_path("locoquad-3j"))
watts12, _ = peak_power(twelve.electronics)
print(f"three-joint build rail demand: {watts12:.2f} W, "
      f"autonomy {autonomy_minutes(twelve.battery, 30.0):.1f} min at 30 W")
