"""Deterministic, tick-based kinematic world.

The simulation is quasi-static on purpose: the platform walks statically
with a crawl-style gait, so a physics engine would add nondeterminism and
nothing testable.  Each tick:

* joint angles slew toward their commands at the servo rate limit;
* feet that were in contact act as anchors: the rigid transform that best
  re-anchors them (least squares over the contact feet, yaw + translation)
  is applied to the body, followed by a roll/pitch settle that presses the
  anchored feet onto the ground plane (rank-aware, so a two-foot stance
  leaves its unsupported axis alone);
* the body never floats: its height always comes from the stance-leg
  kinematics, and no foot is left below the ground plane.

While the robot is held (grabbed by the user), the body pose follows the
grab script instead and no foot is in contact.

Positions are cm in the world frame; obstacle boxes are meters (SI, like the
range sensor that observes them).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from quadstack.config import LegTopology, RobotConfig
from quadstack.hal import MAX_RANGE_M, ImuSample, RangeReading
from quadstack.kinematics import (
    BodyState,
    LegPose,
    foot_in_body,
    normalize_angle_deg,
    rotation_from_rpy,
    rpy_from_rotation,
)

CONTACT_TOL_CM = 0.1  # contact feet stay within 1 mm of the ground plane
LIFTOFF_CM = 0.25  # a foot this far off the plane stops being an anchor
MAX_DT_S = 0.1
CONE_HALF_ANGLE_DEG = 15.0
CONE_RAY_OFFSETS_DEG = (-15.0, -7.5, 0.0, 7.5, 15.0)

GRAB_LIFT_CM = 20.0
GRAB_TILT_DEG = 40.0
GRAB_RAMP_S = 0.25


@dataclass(frozen=True)
class Box:
    """Axis-aligned obstacle, world frame, meters."""

    min_m: tuple[float, float, float]
    max_m: tuple[float, float, float]

    def __post_init__(self):
        for lo, hi in zip(self.min_m, self.max_m):
            if hi <= lo:
                raise ValueError("box extents must be positive")


@dataclass(frozen=True)
class ScheduledEvent:
    """World-side scripted event (grab/release of the robot, picture trigger)."""

    t_s: float
    kind: str

    def __post_init__(self):
        if self.t_s < 0:
            raise ValueError("event times must be >= 0")
        if self.kind not in ("grab", "release", "picture"):
            raise ValueError(f"unknown event kind {self.kind!r}")


@dataclass(frozen=True)
class World:
    """Flat ground at z=0, axis-aligned box obstacles, scheduled events."""

    obstacles: tuple[Box, ...] = ()
    events: tuple[ScheduledEvent, ...] = ()

    def __post_init__(self):
        times = [e.t_s for e in self.events]
        if times != sorted(times):
            raise ValueError("events must be ordered by time")

    def events_between(self, t0_s: float, t1_s: float) -> list[ScheduledEvent]:
        """Events with t in (t0, t1]."""
        return [e for e in self.events if t0_s < e.t_s <= t1_s]


@dataclass(frozen=True)
class SimState:
    """Snapshot of the simulated robot at one tick."""

    t_s: float
    body: BodyState
    poses: tuple[LegPose, LegPose, LegPose, LegPose]
    contacts: tuple[bool, bool, bool, bool]
    held: bool = False
    grab_ref: tuple[float, BodyState] | None = None


def _slew_angle(current: float, target: float, max_step_deg: float) -> float:
    delta = target - current
    if delta > max_step_deg:
        delta = max_step_deg
    elif delta < -max_step_deg:
        delta = -max_step_deg
    return current + delta


def _slew_pose(current: LegPose, target: LegPose, max_step_deg: float) -> LegPose:
    elevator = None
    if current.elevator_deg is not None:
        elevator = _slew_angle(current.elevator_deg, target.elevator_deg or 0.0, max_step_deg)
    return LegPose(
        rotator_deg=_slew_angle(current.rotator_deg, target.rotator_deg, max_step_deg),
        knee_deg=_slew_angle(current.knee_deg, target.knee_deg, max_step_deg),
        elevator_deg=elevator,
    )


def _axis_rotation(axis: np.ndarray, angle_rad: float) -> np.ndarray:
    """Rodrigues rotation about a unit axis."""
    k = axis / np.linalg.norm(axis)
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(angle_rad) * kx + (1 - math.cos(angle_rad)) * (kx @ kx)


class Simulator:
    """Steps one robot through a world.  Single-threaded per instance."""

    def __init__(self, config: RobotConfig, world: World):
        self.config = config
        self.world = world

    # -- state construction ----------------------------------------------

    def initial_state(
        self,
        poses: tuple[LegPose, LegPose, LegPose, LegPose],
        body: BodyState | None = None,
    ) -> SimState:
        """State with the body settled onto the lowest feet of ``poses``."""
        feet = [foot_in_body(self.config, i, poses[i]) for i in range(4)]
        if body is None:
            z0 = -min(f[2] for f in feet)
            body = BodyState(z_cm=z0)
        rot = body.rotation()
        pos = body.position_cm
        world_z = [pos[2] + (rot @ f)[2] for f in feet]
        contacts = tuple(z <= CONTACT_TOL_CM for z in world_z)
        return SimState(t_s=0.0, body=body, poses=poses, contacts=contacts)

    # -- stepping ----------------------------------------------------------

    def step(
        self,
        state: SimState,
        commands: tuple[LegPose, LegPose, LegPose, LegPose],
        dt_s: float,
    ) -> SimState:
        if not 0.0 < dt_s <= MAX_DT_S:
            raise ValueError(f"dt must be in (0, {MAX_DT_S}] s")
        t_new = state.t_s + dt_s

        held = state.held
        grab_ref = state.grab_ref
        released = False
        for event in self.world.events_between(state.t_s, t_new):
            if event.kind == "grab":
                held = True
                grab_ref = (event.t_s, state.body)
            elif event.kind == "release":
                held = False
                released = True

        max_step = self.config.servo_slew_deg_s * dt_s
        poses = tuple(_slew_pose(state.poses[i], commands[i], max_step) for i in range(4))

        if held:
            body = self._grab_script_pose(grab_ref, t_new)
            return SimState(t_new, body, poses, (False,) * 4, held=True, grab_ref=grab_ref)

        if released:
            # The user sets the robot back down on its feet: level attitude at
            # the current heading, height from the lowest foot.
            feet = [foot_in_body(self.config, i, poses[i]) for i in range(4)]
            rot = rotation_from_rpy(0.0, 0.0, state.body.yaw_deg)
            z0 = -min(float((rot @ f)[2]) for f in feet)
            body = BodyState(state.body.x_cm, state.body.y_cm, z0, 0.0, 0.0, state.body.yaw_deg)
            world_z = [z0 + float((rot @ f)[2]) for f in feet]
            contacts = tuple(bool(z <= CONTACT_TOL_CM) for z in world_z)
            return SimState(t_new, body, poses, contacts, held=False, grab_ref=grab_ref)

        feet_body = [foot_in_body(self.config, i, poses[i]) for i in range(4)]
        prev_rot = state.body.rotation()
        prev_pos = state.body.position_cm
        # Height each foot would have under the previous body pose: feet
        # commanded upward leave the anchor set immediately.
        z_prevpose = [float(prev_pos[2] + (prev_rot @ f)[2]) for f in feet_body]
        anchors: dict[int, np.ndarray] = {}
        for i in range(4):
            if state.contacts[i] and z_prevpose[i] <= LIFTOFF_CM:
                prev_foot = foot_in_body(self.config, i, state.poses[i])
                anchors[i] = prev_pos + prev_rot @ prev_foot
        if anchors:
            settle_set = sorted(anchors)
        else:
            z_min = min(z_prevpose)
            settle_set = [i for i in range(4) if z_prevpose[i] <= z_min + LIFTOFF_CM]

        body = self._anchor_body(state.body, feet_body, anchors, settle_set)

        rot = body.rotation()
        pos = body.position_cm
        world_z = [pos[2] + (rot @ f)[2] for f in feet_body]
        contacts = tuple(z <= CONTACT_TOL_CM for z in world_z)
        return SimState(t_new, body, poses, contacts, held=False, grab_ref=grab_ref)

    def _grab_script_pose(self, grab_ref: tuple[float, BodyState] | None, t_s: float) -> BodyState:
        if grab_ref is None:
            return BodyState()
        t0, base = grab_ref
        ramp = min(1.0, max(0.0, (t_s - t0) / GRAB_RAMP_S))
        return BodyState(
            x_cm=base.x_cm,
            y_cm=base.y_cm,
            z_cm=base.z_cm + GRAB_LIFT_CM * ramp,
            roll_deg=base.roll_deg + GRAB_TILT_DEG * ramp,
            pitch_deg=base.pitch_deg,
            yaw_deg=base.yaw_deg,
        )

    def _anchor_body(
        self,
        prev_body: BodyState,
        feet_body: list[np.ndarray],
        anchors: dict[int, np.ndarray],
        settle_set: list[int],
    ) -> BodyState:
        """Yaw+translation least squares over anchors, then roll/pitch settle."""
        roll, pitch, yaw = prev_body.roll_deg, prev_body.pitch_deg, prev_body.yaw_deg
        px, py = prev_body.x_cm, prev_body.y_cm

        for _ in range(2):
            rp = rotation_from_rpy(roll, pitch, 0.0)
            local = [rp @ f for f in feet_body]

            if anchors:
                idx = sorted(anchors)
                c = np.array([[local[i][0], local[i][1]] for i in idx])
                a = np.array([[anchors[i][0], anchors[i][1]] for i in idx])
                if len(idx) >= 2:
                    cc = c - c.mean(axis=0)
                    ac = a - a.mean(axis=0)
                    s = float(np.sum(cc[:, 0] * ac[:, 1] - cc[:, 1] * ac[:, 0]))
                    d = float(np.sum(cc * ac))
                    if s != 0.0 or d != 0.0:
                        yaw = math.degrees(math.atan2(s, d))
                rot2 = np.array(
                    [
                        [math.cos(math.radians(yaw)), -math.sin(math.radians(yaw))],
                        [math.sin(math.radians(yaw)), math.cos(math.radians(yaw))],
                    ]
                )
                p_xy = a.mean(axis=0) - rot2 @ c.mean(axis=0)
                px, py = float(p_xy[0]), float(p_xy[1])

            rot = rotation_from_rpy(roll, pitch, yaw)
            pz = -float(np.mean([(rot @ feet_body[i])[2] for i in settle_set]))

            # roll/pitch settle: press the settle-set feet onto z=0.  With two
            # feet the normal equations are rank deficient; the minimum-norm
            # solution leaves the unsupported rotation axis untouched.
            u_roll = rot @ np.array([1.0, 0.0, 0.0])
            u_pitch = rot @ np.array([0.0, -1.0, 0.0])
            rows = []
            res = []
            for i in settle_set:
                d = rot @ feet_body[i]
                rows.append([np.cross(u_roll, d)[2], np.cross(u_pitch, d)[2]])
                res.append(pz + d[2])
            j = np.array(rows)
            r = np.array(res)
            delta, *_ = np.linalg.lstsq(j, -r, rcond=None)
            if np.max(np.abs(delta)) > 1e-12:
                r_delta = _axis_rotation(u_roll, float(delta[0])) @ _axis_rotation(
                    u_pitch, float(delta[1])
                )
                roll, pitch, yaw = rpy_from_rotation(r_delta @ rot)

        rot = rotation_from_rpy(roll, pitch, yaw)
        pz = -float(np.mean([(rot @ feet_body[i])[2] for i in settle_set]))
        # never leave any foot below the ground plane
        min_z = min(pz + (rot @ f)[2] for f in feet_body)
        if min_z < 0.0:
            pz -= min_z
        return BodyState(px, py, pz, roll, pitch, yaw)


# --- sensors ------------------------------------------------------------


def sensor_pose(config: RobotConfig, body: BodyState) -> tuple[np.ndarray, np.ndarray]:
    """Range-sensor origin (meters, world) and forward direction."""
    rot = body.rotation()
    mount = np.array(config.range_sensor_mount_cm)
    origin_m = (body.position_cm + rot @ mount) / 100.0
    return origin_m, rot


def _ray_box(origin: np.ndarray, direction: np.ndarray, box: Box) -> float | None:
    tmin, tmax = 0.0, math.inf
    for axis in range(3):
        o, d = origin[axis], direction[axis]
        lo, hi = box.min_m[axis], box.max_m[axis]
        if abs(d) < 1e-12:
            if o < lo or o > hi:
                return None
            continue
        t1, t2 = (lo - o) / d, (hi - o) / d
        if t1 > t2:
            t1, t2 = t2, t1
        tmin = max(tmin, t1)
        tmax = min(tmax, t2)
        if tmin > tmax:
            return None
    return tmin


def raycast_range(world: World, origin_m: np.ndarray, rot: np.ndarray) -> RangeReading:
    """Nearest obstacle distance along a 5-ray approximation of a +-15 deg cone."""
    best = math.inf
    for offset in CONE_RAY_OFFSETS_DEG:
        a = math.radians(offset)
        direction = rot @ np.array([math.cos(a), math.sin(a), 0.0])
        for box in world.obstacles:
            hit = _ray_box(origin_m, direction, box)
            if hit is not None and hit < best:
                best = hit
    if best > MAX_RANGE_M:
        return RangeReading.timeout()
    return RangeReading(distance_m=best)


def synthesize_imu(
    state: SimState,
    previous: SimState,
    dt_s: float,
    prev_velocity_cm_s: np.ndarray | None = None,
    g_ms2: float = 9.81,
    noise_std: float = 0.0,
    rng: np.random.Generator | None = None,
) -> tuple[ImuSample, np.ndarray]:
    """Body-frame specific force and angular rate between two states.

    Returns the sample and the world-frame body velocity (cm/s) so callers
    can chain the finite differences.  The accelerometer reads +g on z for a
    level stationary body; optional zero-mean Gaussian noise uses the given
    seeded generator.
    """
    if dt_s <= 0:
        raise ValueError("dt must be > 0")
    rot = state.body.rotation()
    velocity = (state.body.position_cm - previous.body.position_cm) / dt_s
    if prev_velocity_cm_s is None:
        accel_world = np.zeros(3)
    else:
        accel_world = (velocity - prev_velocity_cm_s) / dt_s / 100.0  # cm -> m
    specific_force = rot.T @ (accel_world + np.array([0.0, 0.0, g_ms2]))

    rel = previous.body.rotation().T @ rot
    angle = math.acos(min(1.0, max(-1.0, (np.trace(rel) - 1.0) / 2.0)))
    if angle < 1e-12:
        omega = np.zeros(3)
    else:
        axis = np.array(
            [rel[2, 1] - rel[1, 2], rel[0, 2] - rel[2, 0], rel[1, 0] - rel[0, 1]]
        ) / (2.0 * math.sin(angle))
        omega = axis * math.degrees(angle) / dt_s

    if noise_std > 0.0:
        if rng is None:
            raise ValueError("noise requires a seeded generator")
        noise = rng.normal(0.0, noise_std, size=6)
        specific_force = specific_force + noise[:3]
        omega = omega + noise[3:]

    sample = ImuSample(accel=tuple(float(v) for v in specific_force), gyro=tuple(float(v) for v in omega))
    return sample, velocity


# --- collision check ------------------------------------------------------


def body_collides(config: RobotConfig, body: BodyState, world: World) -> bool:
    """Conservative body/obstacle overlap test.

    The body is modeled as a vertical cylinder circumscribing its stack
    (radius from the horizontal half-extents) so the check is independent of
    yaw.
    """
    half_l, half_w, height = (v / 2.0 for v in config.body_size_cm)
    radius_m = math.hypot(half_l, half_w) / 100.0
    cx, cy = body.x_cm / 100.0, body.y_cm / 100.0
    z_lo = max(0.0, (body.z_cm - config.body_size_cm[2] / 2.0) / 100.0)
    z_hi = (body.z_cm + config.body_size_cm[2]) / 100.0
    for box in world.obstacles:
        if box.max_m[2] < z_lo or box.min_m[2] > z_hi:
            continue
        nx = min(max(cx, box.min_m[0]), box.max_m[0])
        ny = min(max(cy, box.min_m[1]), box.max_m[1])
        if math.hypot(cx - nx, cy - ny) <= radius_m:
            return True
    return False


# --- trace serialization ----------------------------------------------------


def _fmt_value(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".9g")
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        inner = ", ".join(f"{_fmt_value(k)}: {_fmt_value(v)}" for k, v in value.items())
        return "{" + inner + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_fmt_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def format_trace_line(
    t_s: float,
    state_name: str,
    poses: tuple[LegPose, ...],
    topology: LegTopology,
    body: BodyState,
    range_reading: RangeReading,
    imu: ImuSample,
    events: list[str],
) -> str:
    """One JSONL trace record with fixed field order and %.9g floats."""
    record = {
        "t": t_s,
        "state": state_name,
        "joints": [list(p.angles(topology)) for p in poses],
        "body": {
            "x": body.x_cm,
            "y": body.y_cm,
            "z": body.z_cm,
            "roll": body.roll_deg,
            "pitch": body.pitch_deg,
            "yaw": body.yaw_deg,
        },
        "range_m": range_reading.distance_m,
        "accel": list(imu.accel),
        "gyro": list(imu.gyro),
        "events": list(events),
    }
    return _fmt_value(record)
