"""Static torque analysis and the electronics power/autonomy budget.

The mechanics side answers one design question: how heavy may the robot get
before the leg servos stall in the worst-case stance (legs fully extended)?
With the foot reaction

    R = BW/4 + W2 + W3                                       (grams)

and both pitch servos at their torque budget, the moment balance about the
knee reads

    (G2 + G3) / g = BW/4 * d1 + W2 * d3 - W3 * d4 + R * d2   (gram * cm)

where G2, G3 are the elevator and knee torques (N*cm), W2, W3 the link
masses, and d1..d4 the horizontal moment arms.  Solving for BW gives
:func:`max_body_weight`.  Torques are N*cm throughout; the gram-force
conversion always uses the scenario's own ``g``.

The electronics side reproduces the rail power arithmetic (controller peak
plus per-servo drain at the 5.1 V rail) and a worst-case constant-load
autonomy model for the battery pack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from quadstack.config import RobotConfig
    from quadstack.kinematics import LegPose


class DegenerateGeometryError(ValueError):
    """Moment arms that make the equilibrium unsolvable (d1 + d2 = 0)."""


@dataclass(frozen=True)
class TorqueScenario:
    """Inputs to the worst-case moment balance.

    Defaults follow the reference build: 18 N*cm per servo, 30 g links, arms
    from the stated link lengths with link centers of mass at mid-link
    (d1 = 10 + 5.3 cm from CoG to knee through the extended chain, d2 = 4.7 cm
    knee to foot, d3/d4 the half-link arms).
    """

    gamma2_ncm: float = 18.0
    gamma3_ncm: float = 18.0
    w2_g: float = 30.0
    w3_g: float = 30.0
    d1_cm: float = 15.3
    d2_cm: float = 4.7
    d3_cm: float = 2.65
    d4_cm: float = 2.35
    g_ms2: float = 9.81

    def __post_init__(self):
        if self.g_ms2 <= 0:
            raise ValueError("gravity must be > 0")
        for name in ("gamma2_ncm", "gamma3_ncm", "w2_g", "w3_g", "d1_cm", "d2_cm", "d3_cm", "d4_cm"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def torque_budget_gcm(self) -> float:
        """(G2 + G3)/g expressed in gram*cm."""
        return (self.gamma2_ncm + self.gamma3_ncm) / self.g_ms2 * 1000.0


@dataclass(frozen=True)
class PowerBudget:
    """Rail-side supply demand: controller peak plus servo drain."""

    rail_voltage_v: float = 5.1
    controller_peak_current_a: float = 3.0
    servo_current_a: float = 0.2
    servo_count: int = 12
    converter_count: int = 2
    converter_max_power_w: float = 15.0

    def __post_init__(self):
        if self.rail_voltage_v <= 0 or self.converter_max_power_w <= 0:
            raise ValueError("voltages and converter power must be > 0")
        if self.controller_peak_current_a < 0 or self.servo_current_a < 0:
            raise ValueError("currents must be >= 0")
        if self.servo_count < 0 or self.converter_count < 1:
            raise ValueError("need servo_count >= 0 and at least one converter")


@dataclass(frozen=True)
class BatteryPack:
    """Parallel LiPo cells behind DC-DC converters."""

    cell_count_parallel: int = 2
    cell_capacity_mah: float = 3300.0
    average_voltage_v: float = 3.8
    converter_efficiency: float = 0.72

    def __post_init__(self):
        if self.cell_count_parallel < 1 or self.cell_capacity_mah <= 0:
            raise ValueError("battery pack needs >= 1 cell with positive capacity")
        if not 0 < self.converter_efficiency <= 1:
            raise ValueError("converter efficiency must be in (0, 1]")
        if self.average_voltage_v <= 0:
            raise ValueError("average voltage must be > 0")

    @property
    def capacity_ah(self) -> float:
        return self.cell_count_parallel * self.cell_capacity_mah / 1000.0


def foot_reaction(body_weight_g: float, w2_g: float, w3_g: float) -> float:
    """Ground reaction at one foot: a quarter of the body weight plus the leg links."""
    if body_weight_g < 0 or w2_g < 0 or w3_g < 0:
        raise ValueError("weights must be >= 0")
    return body_weight_g / 4.0 + w2_g + w3_g


def max_body_weight(scenario: TorqueScenario) -> float:
    """Largest body weight (grams) the extended-leg stance can statically hold.

    Solves the knee moment balance with the foot reaction substituted in.  A
    negative result is returned as-is: it means the geometry cannot even lift
    the leg links, which is information the caller may want.
    """
    denom = scenario.d1_cm + scenario.d2_cm
    if denom <= 0:
        raise DegenerateGeometryError("d1 + d2 must be > 0")
    numerator = (
        scenario.torque_budget_gcm
        - scenario.w2_g * scenario.d3_cm
        + scenario.w3_g * scenario.d4_cm
        - (scenario.w2_g + scenario.w3_g) * scenario.d2_cm
    )
    return 4.0 * numerator / denom


def equilibrium_moment_gcm(scenario: TorqueScenario, body_weight_g: float) -> float:
    """Right-hand side of the moment balance for a given body weight (gram*cm).

    Plugging :func:`max_body_weight`'s output back in reproduces the torque
    budget; tests use this as the round-trip check.  Accepts negative body
    weights so the identity also holds for infeasible geometries.
    """
    r = body_weight_g / 4.0 + scenario.w2_g + scenario.w3_g
    return (
        body_weight_g / 4.0 * scenario.d1_cm
        + scenario.w2_g * scenario.d3_cm
        - scenario.w3_g * scenario.d4_cm
        + r * scenario.d2_cm
    )


# Worst-case carrying limit published for the reference build.  Its moment
# arms are defined only in the original force diagram and are not recoverable
# from the stated link lengths; the mid-link defaults above land near 676 g
# instead.  Reports print both figures rather than calibrating silently.
PUBLISHED_MAX_BODY_WEIGHT_G = 850.0


def peak_power(budget: PowerBudget) -> tuple[float, bool]:
    """Worst-case rail power draw in watts, plus a converter-headroom flag.

    The flag is true when the demand fits within the combined converter
    rating.
    """
    watts = budget.rail_voltage_v * (
        budget.controller_peak_current_a + budget.servo_count * budget.servo_current_a
    )
    headroom = watts <= budget.converter_count * budget.converter_max_power_w
    return watts, headroom


def autonomy_minutes(pack: BatteryPack, load_w: float) -> float:
    """Worst-case runtime in minutes under a constant load.

    The battery current is the load referred through the converter
    efficiency at the pack's average voltage; capacity is drained linearly
    (no discharge-curve modeling, matching the worst-case method).
    """
    if load_w <= 0:
        raise ValueError("load must be > 0 W")
    battery_current_a = load_w / (pack.average_voltage_v * pack.converter_efficiency)
    return 60.0 * pack.capacity_ah / battery_current_a


def scenario_from_config(config: "RobotConfig") -> TorqueScenario:
    """Extended-leg worst-case scenario with arms taken from a build's geometry.

    Link centers of mass sit at mid-link; the two-joint topology has no
    separate proximal link mass (it is part of the body structure).
    """
    from quadstack.config import LegTopology

    lengths = config.link_lengths
    three = config.topology is LegTopology.THREE_JOINT
    return TorqueScenario(
        gamma2_ncm=config.servo.nominal_torque_ncm,
        gamma3_ncm=config.servo.nominal_torque_ncm,
        w2_g=config.link_masses.link2_g if three else 0.0,
        w3_g=config.link_masses.link3_g,
        d1_cm=lengths.cog_to_elevator_cm + lengths.elevator_to_knee_cm,
        d2_cm=lengths.knee_to_foot_cm,
        d3_cm=lengths.elevator_to_knee_cm / 2.0,
        d4_cm=lengths.knee_to_foot_cm / 2.0,
    )


@dataclass(frozen=True)
class JointTorques:
    """Static holding torques for one leg's pitch joints, in N*cm."""

    torques_ncm: dict[str, float]
    feasible: bool


def static_joint_torques(
    config: "RobotConfig",
    leg_pose: "LegPose",
    carried_fraction: float,
    g_ms2: float = 9.81,
    leg_index: int = 0,
) -> JointTorques:
    """Holding torque at each pitch joint of one ground-contact leg.

    Generalizes the single worst-case analysis to arbitrary poses: for every
    pitch joint, the link masses hanging distal of it and the foot reaction
    each contribute ``mass * g * horizontal arm``, summed as magnitudes (a
    conservative budget; opposing moments are not allowed to cancel).  The
    carried fraction is this leg's share of the robot weight, 1/4 in the
    symmetric stance.  Feasible means every pitch joint stays within the
    servo's nominal torque.
    """
    from quadstack.config import LegTopology, total_mass
    from quadstack.kinematics import leg_chain_points

    if not 0 <= carried_fraction <= 1:
        raise ValueError("carried_fraction must be in [0, 1]")

    three = config.topology is LegTopology.THREE_JOINT
    w2 = config.link_masses.link2_g if three else 0.0
    w3 = config.link_masses.link3_g
    reaction_g = carried_fraction * total_mass(config) + w2 + w3

    # Planar chain points (horizontal reach r, height z) for the current pose.
    points = leg_chain_points(
        config.topology, config.attachments[leg_index], leg_pose, config.link_lengths
    )
    knee_r = points["knee"][0]
    foot_r = points["foot"][0]
    mid3_r = (knee_r + foot_r) / 2.0

    def ncm(moment_gcm: float) -> float:
        # gram-force * cm -> N*cm through the scenario gravity
        return moment_gcm * g_ms2 / 1000.0

    torques: dict[str, float] = {}
    torques["knee"] = ncm(reaction_g * abs(foot_r - knee_r) + w3 * abs(mid3_r - knee_r))
    if three:
        root_r = points["elevator"][0]
        mid2_r = (root_r + knee_r) / 2.0
        torques["elevator"] = ncm(
            reaction_g * abs(foot_r - root_r)
            + w3 * abs(mid3_r - root_r)
            + w2 * abs(mid2_r - root_r)
        )
    limit = config.servo.nominal_torque_ncm
    feasible = all(t <= limit + 1e-12 for t in torques.values())
    return JointTorques(torques_ncm=torques, feasible=feasible)
