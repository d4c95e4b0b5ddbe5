import math
from dataclasses import replace

import numpy as np
import pytest

from quadstack.config import LegTopology
from quadstack.feasibility import (
    DegenerateGeometryError,
    PowerBudget,
    BatteryPack,
    TorqueScenario,
    autonomy_minutes,
    equilibrium_moment_gcm,
    foot_reaction,
    max_body_weight,
    peak_power,
    scenario_from_config,
    static_joint_torques,
)
from quadstack.kinematics import LegPose


def test_foot_reaction_exact():
    assert foot_reaction(0, 0, 0) == 0.0
    assert foot_reaction(560, 30, 30) == 200.0
    assert foot_reaction(850, 30, 30) == 272.5


def test_foot_reaction_rejects_negative():
    with pytest.raises(ValueError):
        foot_reaction(-1, 0, 0)


def test_max_body_weight_no_link_masses():
    # (36 N*cm / 9.81 m/s^2) = 3669.72 g*cm; 4 * 3669.72 / (15.3 + 4.7)
    s = TorqueScenario(w2_g=0.0, w3_g=0.0)
    assert max_body_weight(s) == pytest.approx(733.9, abs=0.1)


def test_max_body_weight_with_link_masses():
    s = TorqueScenario()  # defaults carry the 30 g links and mid-link arms
    assert max_body_weight(s) == pytest.approx(675.7, abs=0.1)


def test_max_body_weight_degenerate_geometry():
    with pytest.raises(DegenerateGeometryError):
        max_body_weight(TorqueScenario(d1_cm=0.0, d2_cm=0.0))


def test_equilibrium_round_trip_random_scenarios():
    rng = np.random.default_rng(42)
    for _ in range(1000):
        s = TorqueScenario(
            gamma2_ncm=rng.uniform(1, 40),
            gamma3_ncm=rng.uniform(1, 40),
            w2_g=rng.uniform(0, 80),
            w3_g=rng.uniform(0, 80),
            d1_cm=rng.uniform(1, 30),
            d2_cm=rng.uniform(0.5, 15),
            d3_cm=rng.uniform(0, 10),
            d4_cm=rng.uniform(0, 10),
            g_ms2=rng.uniform(1.0, 25.0),
        )
        bw = max_body_weight(s)
        lhs = s.torque_budget_gcm
        rhs = equilibrium_moment_gcm(s, bw)
        assert abs(rhs - lhs) <= 1e-9 * abs(lhs)


def test_max_body_weight_monotonicity():
    rng = np.random.default_rng(7)
    base = TorqueScenario()
    for _ in range(100):
        eps = rng.uniform(0.01, 1.0)
        assert max_body_weight(replace(base, d1_cm=base.d1_cm + eps)) < max_body_weight(base)
        assert max_body_weight(replace(base, d2_cm=base.d2_cm + eps)) < max_body_weight(base)
        assert max_body_weight(replace(base, w2_g=base.w2_g + eps)) < max_body_weight(base)
        assert max_body_weight(replace(base, gamma2_ncm=base.gamma2_ncm + eps)) > max_body_weight(base)
        assert max_body_weight(replace(base, gamma3_ncm=base.gamma3_ncm + eps)) > max_body_weight(base)
        assert max_body_weight(replace(base, d4_cm=base.d4_cm + eps)) > max_body_weight(base)


def test_peak_power_twelve_servos_matches_published_figure():
    watts, headroom = peak_power(PowerBudget(servo_count=12))
    assert watts == pytest.approx(5.1 * (3.0 + 2.4))
    assert round(watts, 1) == 27.5  # the published one-decimal figure
    assert headroom is True


def test_peak_power_eight_servos():
    watts, headroom = peak_power(PowerBudget(servo_count=8))
    assert watts == pytest.approx(23.46, abs=0.01)
    assert headroom is True


def test_peak_power_controller_only():
    watts, _ = peak_power(PowerBudget(servo_count=0))
    assert watts == pytest.approx(15.3)


def test_peak_power_linear_in_servo_count():
    budget = PowerBudget()
    slope = budget.rail_voltage_v * budget.servo_current_a
    values = [peak_power(replace(budget, servo_count=n))[0] for n in range(0, 20)]
    diffs = np.diff(values)
    assert np.allclose(diffs, slope)


def test_peak_power_headroom_flag_flips():
    assert peak_power(PowerBudget(servo_count=12))[1] is True
    assert peak_power(PowerBudget(servo_count=40))[1] is False


def test_autonomy_reference_pack():
    pack = BatteryPack()  # 2 x 3300 mAh at 3.8 V, eta=0.72
    assert autonomy_minutes(pack, 30.0) == pytest.approx(36.1, abs=0.2)


def test_autonomy_ideal_converter():
    pack = BatteryPack(converter_efficiency=1.0)
    assert autonomy_minutes(pack, 30.0) == pytest.approx(50.2, abs=0.2)
    assert autonomy_minutes(pack, 15.0) == pytest.approx(100.3, abs=0.2)


def test_autonomy_energy_conservation():
    pack = BatteryPack()
    rng = np.random.default_rng(3)
    loads = rng.uniform(0.5, 60.0, size=50)
    products = [autonomy_minutes(pack, w) * w for w in loads]
    assert np.allclose(products, products[0])


def test_autonomy_rejects_nonpositive_load():
    with pytest.raises(ValueError):
        autonomy_minutes(BatteryPack(), 0.0)


def _extended_pose(config):
    att = config.attachments[0]
    if config.topology is LegTopology.THREE_JOINT:
        return LegPose(0.0, -att.offset_deg("knee"), -att.offset_deg("elevator"))
    return LegPose(0.0, -att.offset_deg("knee"))


def test_static_torques_zero_gravity(config_3j):
    result = static_joint_torques(config_3j, _extended_pose(config_3j), 0.25, g_ms2=0.0)
    assert all(t == 0.0 for t in result.torques_ncm.values())
    assert result.feasible


def test_static_torques_extended_three_joint_knee():
    # 560 g total build on 3-joint legs: R = 140 + 60 = 200 g; knee moment
    # (200 * 4.7 + 30 * 2.35) g*cm -> 9.91 N*cm at g = 9.81
    from dataclasses import replace as dreplace

    from quadstack import data
    from quadstack.config import load_config

    cfg = load_config(data.config_path("locoquad-3j"))
    cfg = dreplace(cfg, body_mass_g=560.0 - 240.0)
    result = static_joint_torques(cfg, _extended_pose(cfg), 0.25)
    assert result.torques_ncm["knee"] == pytest.approx(9.91, abs=0.01)
    # the same conservative budget puts the elevator over its single-servo
    # rating: (200*10 + 30*7.65 + 30*2.65) g*cm = 22.65 N*cm
    assert result.torques_ncm["elevator"] == pytest.approx(22.65, abs=0.01)
    assert not result.feasible


def test_static_torques_foot_below_knee_zero_arm(config_2j):
    # knee at -90 effective hangs the end link straight down: both the foot
    # reaction and the link mass lose their horizontal arm about the knee
    att = config_2j.attachments[0]
    pose = LegPose(0.0, -90.0 - att.offset_deg("knee"))
    result = static_joint_torques(config_2j, pose, 0.25)
    assert result.torques_ncm["knee"] == pytest.approx(0.0, abs=1e-12)
    assert result.feasible


def test_static_feasibility_monotone_and_conservative(config_3j):
    """Mass sweep: the per-joint verdict flips once, below the combined-budget
    limit of the matching scenario (it can only be stricter)."""
    from dataclasses import replace as dreplace

    limit = max_body_weight(scenario_from_config(config_3j))
    pose = _extended_pose(config_3j)
    verdicts = []
    masses = np.linspace(50.0, 1500.0, 60)
    for m in masses:
        cfg = dreplace(config_3j, body_mass_g=m)
        result = static_joint_torques(cfg, pose, 0.25)
        verdicts.append(result.feasible)
        from quadstack.config import total_mass

        if result.feasible:
            assert total_mass(cfg) <= limit
    flips = sum(1 for a, b in zip(verdicts, verdicts[1:]) if a != b)
    assert flips == 1 and verdicts[0] and not verdicts[-1]


def test_scenario_from_config_arms(config_2j, config_3j):
    s2 = scenario_from_config(config_2j)
    assert (s2.d1_cm, s2.d2_cm, s2.d3_cm, s2.d4_cm) == (15.3, 4.7, 2.65, 2.35)
    assert s2.w2_g == 0.0  # no separate proximal link on the two-joint build
    s3 = scenario_from_config(config_3j)
    assert s3.w2_g == 30.0 and s3.w3_g == 30.0


def test_carried_fraction_validated(config_2j):
    with pytest.raises(ValueError):
        static_joint_torques(config_2j, _extended_pose(config_2j), 1.5)
