import json
import math

import numpy as np
import pytest

from quadstack.behavior import neutral_stance
from quadstack.kinematics import BodyState, LegPose, foot_in_body
from quadstack.sim import (
    Box,
    CONTACT_TOL_CM,
    ScheduledEvent,
    SimState,
    Simulator,
    World,
    body_collides,
    format_trace_line,
    raycast_range,
    sensor_pose,
    synthesize_imu,
)


@pytest.fixture()
def sim2j(config_2j):
    return Simulator(config_2j, World())


def _stand_state(sim, config):
    return sim.initial_state(neutral_stance(config))


def test_fixed_point_commands(sim2j, config_2j):
    state = _stand_state(sim2j, config_2j)
    nxt = sim2j.step(state, state.poses, 0.02)
    assert nxt.t_s == pytest.approx(0.02)
    assert nxt.body == state.body
    assert nxt.poses == state.poses
    assert nxt.contacts == state.contacts


def test_dt_validation(sim2j, config_2j):
    state = _stand_state(sim2j, config_2j)
    with pytest.raises(ValueError):
        sim2j.step(state, state.poses, 0.0)
    with pytest.raises(ValueError):
        sim2j.step(state, state.poses, 0.2)


def test_backward_foot_sweep_advances_body(sim2j, config_2j):
    """Feet swept backward in the body frame carry the body forward by the
    same amount (rigid anchoring), with heading unchanged."""
    state = _stand_state(sim2j, config_2j)
    signs = [1.0, -1.0, 1.0, -1.0]  # mirrored sweeps move feet along -x
    sweep = 8.0
    targets = tuple(
        LegPose(signs[i] * sweep, state.poses[i].knee_deg) for i in range(4)
    )
    # expected advance: mean backward displacement of the four feet
    before = [foot_in_body(config_2j, i, state.poses[i]) for i in range(4)]
    after = [foot_in_body(config_2j, i, targets[i]) for i in range(4)]
    expected = -np.mean([a[0] - b[0] for a, b in zip(after, before)])
    for _ in range(30):
        state = sim2j.step(state, targets, 0.02)
    assert state.body.x_cm == pytest.approx(expected, rel=1e-6)
    assert abs(state.body.y_cm) < 1e-9
    assert abs(state.body.yaw_deg) < 1e-9


def test_uniform_sweep_pure_yaw(sim2j, config_2j):
    state = _stand_state(sim2j, config_2j)
    targets = tuple(LegPose(10.0, state.poses[i].knee_deg) for i in range(4))
    for _ in range(30):
        state = sim2j.step(state, targets, 0.02)
    assert abs(state.body.x_cm) < 1e-9
    assert abs(state.body.y_cm) < 1e-9
    assert state.body.yaw_deg < -3.0  # feet CCW about their roots -> body CW


def test_symmetric_cycle_no_lateral_drift(sim2j, config_2j):
    """Mirror-symmetric sweep out and back: lateral drift below 1e-6 m."""
    state = _stand_state(sim2j, config_2j)
    signs = [1.0, -1.0, 1.0, -1.0]
    for phase in (8.0, -8.0, 0.0):
        targets = tuple(
            LegPose(signs[i] * phase, state.poses[i].knee_deg) for i in range(4)
        )
        for _ in range(25):
            state = sim2j.step(state, targets, 0.02)
    assert abs(state.body.y_cm) < 1e-4  # 1e-6 m


def test_feet_never_penetrate_ground(sim2j, config_2j):
    rng = np.random.default_rng(61)
    state = _stand_state(sim2j, config_2j)
    for _ in range(200):
        targets = tuple(
            LegPose(float(rng.uniform(-20, 20)), float(rng.uniform(-60, 20)))
            for _ in range(4)
        )
        state = sim2j.step(state, targets, 0.02)
        rot = state.body.rotation()
        pos = state.body.position_cm
        for i in range(4):
            z = pos[2] + (rot @ foot_in_body(config_2j, i, state.poses[i]))[2]
            assert z >= -CONTACT_TOL_CM
            if state.contacts[i]:
                assert abs(z) <= CONTACT_TOL_CM


def test_body_height_comes_from_stance_fk(sim2j, config_2j):
    state = _stand_state(sim2j, config_2j)
    targets = tuple(LegPose(p.rotator_deg, p.knee_deg + 15.0) for p in state.poses)
    for _ in range(40):
        state = sim2j.step(state, targets, 0.02)
    feet_z = [foot_in_body(config_2j, i, state.poses[i])[2] for i in range(4)]
    assert state.body.z_cm == pytest.approx(-min(feet_z), abs=1e-9)


def test_contact_flags_follow_lifted_feet(sim2j, config_2j):
    state = _stand_state(sim2j, config_2j)
    targets = list(state.poses)
    targets[2] = LegPose(state.poses[2].rotator_deg, state.poses[2].knee_deg + 40.0)
    for _ in range(30):
        state = sim2j.step(state, tuple(targets), 0.02)
    assert state.contacts == (True, True, False, True)


# --- raycast -----------------------------------------------------------------


def _ray_box_oracle(origin, direction, lo, hi):
    tmin, tmax = 0.0, math.inf
    for k in range(3):
        if abs(direction[k]) < 1e-15:
            if not lo[k] <= origin[k] <= hi[k]:
                return None
            continue
        t1 = (lo[k] - origin[k]) / direction[k]
        t2 = (hi[k] - origin[k]) / direction[k]
        lo_t, hi_t = min(t1, t2), max(t1, t2)
        tmin, tmax = max(tmin, lo_t), min(tmax, hi_t)
    return tmin if tmin <= tmax else None


def test_raycast_perpendicular_face():
    world = World(obstacles=(Box((1.0, -0.5, 0.0), (1.5, 0.5, 0.5)),))
    reading = raycast_range(world, np.zeros(3), np.eye(3))
    assert reading.distance_m == pytest.approx(1.0, abs=1e-9)


def test_raycast_empty_world_times_out():
    assert raycast_range(World(), np.zeros(3), np.eye(3)).is_timeout


def test_raycast_beyond_max_range_times_out():
    world = World(obstacles=(Box((5.0, -1.0, 0.0), (6.0, 1.0, 1.0)),))
    assert raycast_range(world, np.zeros(3), np.eye(3)).is_timeout


def test_raycast_cone_ray_hit():
    # face at x=0.5 covering only the upper cone rays: the 7.5 deg ray is the
    # first to connect, at 0.5/cos(7.5 deg)
    world = World(obstacles=(Box((0.5, 0.06, 0.0), (0.7, 1.0, 1.0)),))
    reading = raycast_range(world, np.zeros(3), np.eye(3))
    assert reading.distance_m == pytest.approx(0.5 / math.cos(math.radians(7.5)), abs=2e-3)


def test_raycast_matches_independent_oracle():
    rng = np.random.default_rng(67)
    for _ in range(300):
        lo = rng.uniform(-2, 2, size=3)
        hi = lo + rng.uniform(0.1, 2.0, size=3)
        world = World(obstacles=(Box(tuple(lo), tuple(hi)),))
        yaw = rng.uniform(-math.pi, math.pi)
        rot = np.array(
            [[math.cos(yaw), -math.sin(yaw), 0], [math.sin(yaw), math.cos(yaw), 0], [0, 0, 1]]
        )
        origin = rng.uniform(-3, 3, size=3)
        reading = raycast_range(world, origin, rot)
        best = math.inf
        for off in (-15.0, -7.5, 0.0, 7.5, 15.0):
            a = math.radians(off)
            d = rot @ np.array([math.cos(a), math.sin(a), 0.0])
            hit = _ray_box_oracle(origin, d, lo, hi)
            if hit is not None:
                best = min(best, hit)
        if best > 4.0:
            assert reading.is_timeout
        else:
            assert reading.distance_m == pytest.approx(best, abs=1e-9)


# --- IMU ----------------------------------------------------------------------


def test_imu_level_rest(sim2j, config_2j):
    state = _stand_state(sim2j, config_2j)
    sample, _ = synthesize_imu(state, state, 0.02, np.zeros(3))
    assert sample.accel == pytest.approx((0.0, 0.0, 9.81), abs=1e-12)
    assert sample.gyro == pytest.approx((0.0, 0.0, 0.0), abs=1e-12)


def test_imu_rolled_90_reads_gravity_on_y():
    a = SimState(0.0, BodyState(roll_deg=90.0), (), (False,) * 4)
    sample, _ = synthesize_imu(a, a, 0.02, np.zeros(3))
    # +roll raises the left (+y) side, so gravity lands on +y in body frame
    assert sample.accel == pytest.approx((0.0, 9.81, 0.0), abs=1e-9)


def test_imu_yaw_rate():
    a = SimState(0.0, BodyState(), (), (False,) * 4)
    b = SimState(0.02, BodyState(yaw_deg=0.2), (), (False,) * 4)
    sample, _ = synthesize_imu(b, a, 0.02, np.zeros(3))
    assert sample.gyro == pytest.approx((0.0, 0.0, 10.0), abs=1e-9)


def test_imu_noise_needs_rng(sim2j, config_2j):
    state = _stand_state(sim2j, config_2j)
    with pytest.raises(ValueError):
        synthesize_imu(state, state, 0.02, None, noise_std=0.1)
    rng = np.random.default_rng(0)
    noisy, _ = synthesize_imu(state, state, 0.02, None, noise_std=0.1, rng=rng)
    assert noisy.accel != (0.0, 0.0, 9.81)


# --- events / grab ------------------------------------------------------------


def test_grab_lifts_and_release_sets_down(config_2j):
    world = World(events=(ScheduledEvent(0.1, "grab"), ScheduledEvent(1.0, "release")))
    sim = Simulator(config_2j, world)
    state = sim.initial_state(neutral_stance(config_2j))
    z0 = state.body.z_cm
    while state.t_s < 0.6:
        state = sim.step(state, state.poses, 0.02)
    assert state.held
    assert state.contacts == (False,) * 4
    assert state.body.z_cm > z0 + 10.0
    assert state.body.roll_deg > 20.0
    while state.t_s < 1.2:
        state = sim.step(state, state.poses, 0.02)
    assert not state.held
    assert state.body.z_cm == pytest.approx(z0, abs=1e-6)
    assert state.body.roll_deg == 0.0
    assert all(state.contacts)


def test_world_event_ordering_enforced():
    with pytest.raises(ValueError):
        World(events=(ScheduledEvent(2.0, "grab"), ScheduledEvent(1.0, "release")))


def test_body_collision_check(config_2j):
    world = World(obstacles=(Box((0.05, -0.5, 0.0), (0.4, 0.5, 0.3)),))
    near = BodyState(x_cm=0.0, z_cm=3.3)
    assert body_collides(config_2j, near, world)  # body radius ~0.113 m
    far = BodyState(x_cm=-30.0, z_cm=3.3)
    assert not body_collides(config_2j, far, world)


# --- trace format ---------------------------------------------------------------


def test_trace_line_schema(config_2j, sim2j):
    from quadstack.hal import ImuSample, RangeReading

    state = _stand_state(sim2j, config_2j)
    line = format_trace_line(
        0.02,
        "rest",
        state.poses,
        config_2j.topology,
        state.body,
        RangeReading(1.2345678901),
        ImuSample((0.0, 0.0, 9.81), (0.0, 0.0, 0.0)),
        ["beep"],
    )
    record = json.loads(line)
    assert list(record.keys()) == ["t", "state", "joints", "body", "range_m", "accel", "gyro", "events"]
    assert list(record["body"].keys()) == ["x", "y", "z", "roll", "pitch", "yaw"]
    assert record["range_m"] == pytest.approx(1.23456789, abs=1e-8)  # 9 significant digits
    assert "1.23456789" in line and "1.2345678901" not in line
    assert record["events"] == ["beep"]
    assert len(record["joints"]) == 4 and len(record["joints"][0]) == 2


def test_trace_timeout_range_is_null(config_2j, sim2j):
    from quadstack.hal import ImuSample, RangeReading

    state = _stand_state(sim2j, config_2j)
    line = format_trace_line(
        0.02, "rest", state.poses, config_2j.topology, state.body,
        RangeReading.timeout(), ImuSample((0, 0, 9.81), (0, 0, 0)), [],
    )
    assert json.loads(line)["range_m"] is None
