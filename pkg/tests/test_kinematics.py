import math

import numpy as np
import pytest
from shapely.geometry import Point, Polygon

from quadstack.config import AttachmentConfig, LegTopology, LinkLengths
from quadstack.kinematics import (
    BodyState,
    FootPosition,
    JointRangeError,
    LegPose,
    UnreachableTargetError,
    convex_hull,
    leg_fk,
    leg_ik,
    normalize_angle_deg,
    rotation_from_rpy,
    rpy_from_rotation,
    stability_margin,
)

LENGTHS = LinkLengths(10.0, 5.3, 4.7)
T2 = LegTopology.TWO_JOINT
T3 = LegTopology.THREE_JOINT


def test_fk_two_joint_examples():
    assert leg_fk(T2, None, LegPose(0, 0), LENGTHS) == pytest.approx((10.0, 0.0, 0.0), abs=1e-12)
    assert leg_fk(T2, None, LegPose(90, 0), LENGTHS) == pytest.approx((0.0, 10.0, 0.0), abs=1e-12)
    assert leg_fk(T2, None, LegPose(0, -90), LENGTHS) == pytest.approx((5.3, 0.0, -4.7), abs=1e-12)


def test_ik_two_joint_examples():
    pose = leg_ik(T2, None, FootPosition(10.0, 0.0, 0.0), LENGTHS)
    assert (pose.rotator_deg, pose.knee_deg) == pytest.approx((0.0, 0.0), abs=1e-9)
    pose = leg_ik(T2, None, FootPosition(5.3, 0.0, -4.7), LENGTHS)
    assert (pose.rotator_deg, pose.knee_deg) == pytest.approx((0.0, -90.0), abs=1e-9)


def test_ik_unreachable_beyond_max_reach():
    with pytest.raises(UnreachableTargetError):
        leg_ik(T2, None, FootPosition(10.1, 0.0, 0.0), LENGTHS)
    with pytest.raises(UnreachableTargetError):
        leg_ik(T3, None, FootPosition(10.1, 0.0, 0.0), LENGTHS)


def test_ik_unreachable_off_the_two_joint_circle():
    # inside the annulus but off the fixed-proximal-link circle
    with pytest.raises(UnreachableTargetError):
        leg_ik(T2, None, FootPosition(5.3, 0.0, -4.0), LENGTHS)


def test_ik_out_of_range_yaw():
    with pytest.raises(JointRangeError):
        leg_ik(T2, None, FootPosition(-5.3, 0.5, -4.7), LENGTHS)


def test_ik_three_joint_inside_annulus():
    with pytest.raises(UnreachableTargetError):
        leg_ik(T3, None, FootPosition(0.2, 0.0, 0.0), LENGTHS)


def test_fk_ik_round_trip_two_joint():
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(10_000):
        pose = LegPose(rng.uniform(-89, 89), rng.uniform(-89, 89))
        target = leg_fk(T2, None, pose, LENGTHS)
        back = leg_fk(T2, None, leg_ik(T2, None, target, LENGTHS), LENGTHS)
        worst = max(worst, math.dist(target, back))
    assert worst < 1e-6


def test_fk_ik_round_trip_three_joint_free_elevator():
    rng = np.random.default_rng(23)
    worst = 0.0
    for _ in range(10_000):
        pose = LegPose(rng.uniform(-89, 89), rng.uniform(-89.0, -0.5), rng.uniform(-30, 30))
        target = leg_fk(T3, None, pose, LENGTHS)
        back = leg_fk(T3, None, leg_ik(T3, None, target, LENGTHS), LENGTHS)
        worst = max(worst, math.dist(target, back))
    assert worst < 1e-6


def test_ik_three_joint_pinned_elevator_recovers_pose():
    rng = np.random.default_rng(29)
    for _ in range(500):
        pose = LegPose(rng.uniform(-89, 89), rng.uniform(-89, 89), rng.uniform(-45, 45))
        target = leg_fk(T3, None, pose, LENGTHS)
        solved = leg_ik(T3, None, target, LENGTHS, elevator_deg=pose.elevator_deg)
        assert solved.rotator_deg == pytest.approx(pose.rotator_deg, abs=1e-9)
        assert solved.knee_deg == pytest.approx(pose.knee_deg, abs=1e-9)


def test_fk_triangle_inequality():
    rng = np.random.default_rng(31)
    reach = LENGTHS.elevator_to_knee_cm + LENGTHS.knee_to_foot_cm
    for _ in range(2000):
        pose = LegPose(rng.uniform(-90, 90), rng.uniform(-90, 90), rng.uniform(-90, 90))
        p = leg_fk(T3, None, pose, LENGTHS)
        assert math.hypot(p.x_cm, math.hypot(p.y_cm, p.z_cm)) <= reach + 1e-12


def test_attachment_offset_equals_command_shift():
    rng = np.random.default_rng(37)
    att = AttachmentConfig(knee=2)  # -45 deg horn offset
    for _ in range(500):
        rot = rng.uniform(-90, 90)
        knee = rng.uniform(-45, 45)
        with_offset = leg_fk(T2, att, LegPose(rot, knee), LENGTHS)
        equivalent = leg_fk(T2, None, LegPose(rot, knee - 45.0), LENGTHS)
        assert with_offset == pytest.approx(equivalent, abs=1e-12)


def test_fk_determinism():
    pose = LegPose(12.345, -67.89, 3.21)
    a = leg_fk(T3, None, pose, LENGTHS)
    b = leg_fk(T3, None, pose, LENGTHS)
    assert a == b


# --- support polygon ---------------------------------------------------------


def test_margin_square_examples():
    square = np.array([[5, 5], [5, -5], [-5, 5], [-5, -5]], dtype=float)
    assert stability_margin(square, (0, 0)) == pytest.approx(5.0)
    assert stability_margin(square, (6, 0)) == pytest.approx(-1.0)


def test_margin_triangle_example():
    tri = np.array([[0, 0], [10, 0], [0, 10]], dtype=float)
    assert stability_margin(tri, (2, 2)) == pytest.approx(2.0)


def test_margin_degenerate_support():
    assert stability_margin(np.array([[0.0, 0.0], [1.0, 0.0]]), (0, 0)) == -math.inf
    assert stability_margin(np.array([[0.0, 0.0]]), (1, 1)) == -math.inf


def test_margin_boundary_is_zero():
    square = np.array([[5, 5], [5, -5], [-5, 5], [-5, -5]], dtype=float)
    assert stability_margin(square, (5.0, 0.0)) == pytest.approx(0.0, abs=1e-12)


def test_margin_rigid_motion_invariance():
    rng = np.random.default_rng(41)
    for _ in range(200):
        pts = rng.uniform(-10, 10, size=(6, 2))
        cog = rng.uniform(-12, 12, size=2)
        ref = stability_margin(pts, cog)
        theta = rng.uniform(0, 2 * math.pi)
        shift = rng.uniform(-50, 50, size=2)
        rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
        moved = pts @ rot.T + shift
        assert stability_margin(moved, rot @ cog + shift) == pytest.approx(ref, abs=1e-9)


def test_margin_sign_against_shapely():
    rng = np.random.default_rng(43)
    checked = 0
    while checked < 1000:
        pts = rng.uniform(-10, 10, size=(rng.integers(3, 9), 2))
        hull = convex_hull(pts)
        if len(hull) < 3:
            continue
        poly = Polygon(hull)
        probe = rng.uniform(-12, 12, size=2)
        margin = stability_margin(pts, probe)
        if abs(margin) < 1e-9:
            continue
        assert (margin > 0) == poly.contains(Point(probe))
        checked += 1


def test_convex_hull_is_convex_and_ccw():
    rng = np.random.default_rng(47)
    for _ in range(100):
        pts = rng.uniform(-5, 5, size=(12, 2))
        hull = convex_hull(pts)
        n = len(hull)
        for i in range(n):
            o, a, b = hull[i], hull[(i + 1) % n], hull[(i + 2) % n]
            cross = (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
            assert cross > -1e-12


# --- body state helpers -------------------------------------------------------


def test_normalize_angle():
    assert normalize_angle_deg(180.0) == 180.0
    assert normalize_angle_deg(-180.0) == 180.0
    assert normalize_angle_deg(540.0) == 180.0
    assert normalize_angle_deg(-90.0) == -90.0


def test_rpy_rotation_round_trip():
    rng = np.random.default_rng(53)
    for _ in range(500):
        roll, pitch, yaw = rng.uniform(-80, 80, size=3)
        rot = rotation_from_rpy(roll, pitch, yaw)
        r2, p2, y2 = rpy_from_rotation(rot)
        assert (r2, p2, y2) == pytest.approx((roll, pitch, yaw), abs=1e-9)


def test_body_state_normalizes_angles():
    body = BodyState(yaw_deg=270.0)
    assert body.yaw_deg == -90.0
