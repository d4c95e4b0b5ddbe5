"""Per-leg forward/inverse kinematics and support-polygon stability.

Frames and conventions:

* Leg-root frame: origin on the rotator axis, x outward along the neutral
  leg direction, z up.  The rotator yaws about z; elevator and knee pitch
  about the (rotated) y axis, positive pitch raising the link tip.
* Angles are degrees end to end (the servo-facing unit); radians appear only
  inside trig calls.  Commanded joint angles live in [-90, +90] about the
  servo midpoint; the attachment's horn offset is added before composing the
  chain.
* The two-joint leg is rotator + knee with a rigid proximal link of length
  ``elevator_to_knee_cm``; the three-joint leg pitches at the root (elevator)
  and at the knee.
* Body frame: x forward, y left, z up (right-handed).  Positive roll tips
  the body to the right (left side rises), positive pitch raises the nose,
  positive yaw turns left.  Orientation composes as Rz(yaw) Ry(-pitch)
  Rx(roll).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from quadstack.config import AttachmentConfig, LegTopology, LinkLengths, RobotConfig

ANGLE_LIMIT_DEG = 90.0
_LIMIT_EPS = 1e-9
REACH_TOL_CM = 1e-6


class UnreachableTargetError(ValueError):
    """Foot target outside the leg's reachable set."""


class JointRangeError(ValueError):
    """A kinematic solution exists but needs an angle beyond the servo range."""


def _check_limit(name: str, angle: float) -> float:
    if abs(angle) > ANGLE_LIMIT_DEG + _LIMIT_EPS:
        raise JointRangeError(f"{name} angle {angle:.3f} deg exceeds +-{ANGLE_LIMIT_DEG:.0f}")
    return angle


@dataclass(frozen=True)
class LegPose:
    """Commanded joint angles (degrees) for one leg.

    ``elevator_deg`` is present exactly for three-joint legs.
    """

    rotator_deg: float
    knee_deg: float
    elevator_deg: float | None = None

    def __post_init__(self):
        _check_limit("rotator", self.rotator_deg)
        _check_limit("knee", self.knee_deg)
        if self.elevator_deg is not None:
            _check_limit("elevator", self.elevator_deg)

    def angles(self, topology: LegTopology) -> tuple[float, ...]:
        """Angles ordered proximal to distal for the given topology."""
        if topology is LegTopology.THREE_JOINT:
            if self.elevator_deg is None:
                raise ValueError("three-joint topology needs an elevator angle")
            return (self.rotator_deg, self.elevator_deg, self.knee_deg)
        if self.elevator_deg is not None:
            raise ValueError("two-joint topology has no elevator angle")
        return (self.rotator_deg, self.knee_deg)


class FootPosition(NamedTuple):
    """Foot coordinates (cm) in the leg-root frame."""

    x_cm: float
    y_cm: float
    z_cm: float


def normalize_angle_deg(angle: float) -> float:
    """Wrap to (-180, 180]."""
    wrapped = math.fmod(angle + 180.0, 360.0)
    if wrapped <= 0.0:
        wrapped += 360.0
    return wrapped - 180.0


@dataclass(frozen=True)
class BodyState:
    """Body pose in the world frame: position (cm) and roll/pitch/yaw (degrees)."""

    x_cm: float = 0.0
    y_cm: float = 0.0
    z_cm: float = 0.0
    roll_deg: float = 0.0
    pitch_deg: float = 0.0
    yaw_deg: float = 0.0

    def __post_init__(self):
        for name in ("roll_deg", "pitch_deg", "yaw_deg"):
            object.__setattr__(self, name, normalize_angle_deg(getattr(self, name)))

    @property
    def position_cm(self) -> np.ndarray:
        return np.array([self.x_cm, self.y_cm, self.z_cm])

    def rotation(self) -> np.ndarray:
        return rotation_from_rpy(self.roll_deg, self.pitch_deg, self.yaw_deg)


def rotation_from_rpy(roll_deg: float, pitch_deg: float, yaw_deg: float) -> np.ndarray:
    """World-from-body rotation matrix for the documented roll/pitch/yaw signs."""
    r = math.radians(roll_deg)
    p = math.radians(-pitch_deg)  # positive pitch = nose up in an x-fwd, y-left frame
    y = math.radians(yaw_deg)
    cr, sr = math.cos(r), math.sin(r)
    cp, sp = math.cos(p), math.sin(p)
    cy, sy = math.cos(y), math.sin(y)
    rx = np.array([[1, 0, 0], [0, cr, -sr], [0, sr, cr]])
    ry = np.array([[cp, 0, sp], [0, 1, 0], [-sp, 0, cp]])
    rz = np.array([[cy, -sy, 0], [sy, cy, 0], [0, 0, 1]])
    return rz @ ry @ rx


def rpy_from_rotation(rot: np.ndarray) -> tuple[float, float, float]:
    """Inverse of :func:`rotation_from_rpy` (gimbal-safe for |pitch| < 90)."""
    sp = -rot[2, 0]
    sp = min(1.0, max(-1.0, sp))
    p_internal = math.asin(sp)  # rotation about +y; pitch = -p_internal
    cp = math.cos(p_internal)
    if abs(cp) < 1e-12:
        y = 0.0
        r = math.atan2(-rot[0, 1], rot[1, 1])
    else:
        y = math.atan2(rot[1, 0], rot[0, 0])
        r = math.atan2(rot[2, 1], rot[2, 2])
    return math.degrees(r), -math.degrees(p_internal), math.degrees(y)


def _effective_angles(
    topology: LegTopology, attachment: AttachmentConfig | None, pose: LegPose
) -> tuple[float, float, float]:
    """(yaw, elevator, knee) in degrees with horn offsets applied.

    ``attachment=None`` means a neutral mount with zero offsets, used for
    analysis; physical builds always carry one of the four options.
    """
    angles = pose.angles(topology)
    yaw = angles[0]
    if topology is LegTopology.THREE_JOINT:
        elevator, knee = angles[1], angles[2]
    else:
        elevator, knee = 0.0, angles[1]
    if attachment is not None:
        knee += attachment.offset_deg("knee")
        if topology is LegTopology.THREE_JOINT:
            elevator += attachment.offset_deg("elevator")
    return yaw, elevator, knee


def leg_chain_points(
    topology: LegTopology,
    attachment: AttachmentConfig | None,
    pose: LegPose,
    lengths: LinkLengths,
) -> dict[str, tuple[float, float]]:
    """Joint positions in the leg's vertical plane as (horizontal reach, height).

    Keys: ``root`` (and ``elevator``, colocated with the root), ``knee``,
    ``foot``.  The rotator yaw does not change these planar coordinates.
    """
    _, elevator, knee = _effective_angles(topology, attachment, pose)
    l1 = lengths.elevator_to_knee_cm
    l2 = lengths.knee_to_foot_cm
    e = math.radians(elevator)
    k = math.radians(knee)
    knee_pt = (l1 * math.cos(e), l1 * math.sin(e))
    foot_pt = (
        knee_pt[0] + l2 * math.cos(e + k),
        knee_pt[1] + l2 * math.sin(e + k),
    )
    points = {"root": (0.0, 0.0), "knee": knee_pt, "foot": foot_pt}
    if topology is LegTopology.THREE_JOINT:
        points["elevator"] = (0.0, 0.0)
    return points


def leg_fk(
    topology: LegTopology,
    attachment: AttachmentConfig | None,
    pose: LegPose,
    lengths: LinkLengths,
) -> FootPosition:
    """Foot position in the leg-root frame for a commanded pose."""
    yaw, _, _ = _effective_angles(topology, attachment, pose)
    points = leg_chain_points(topology, attachment, pose, lengths)
    r, z = points["foot"]
    psi = math.radians(yaw)
    return FootPosition(r * math.cos(psi), r * math.sin(psi), z)


def leg_ik(
    topology: LegTopology,
    attachment: AttachmentConfig | None,
    target: FootPosition,
    lengths: LinkLengths,
    elevator_deg: float | None = None,
    reach_tol_cm: float = REACH_TOL_CM,
) -> LegPose:
    """Closed-form inverse kinematics, knee-down branch.

    The rotator comes from atan2 on the horizontal target; the remaining
    planar problem is solved by the law of cosines.  For three-joint legs the
    planar pair (elevator, knee) is solved jointly; passing ``elevator_deg``
    instead pins the elevator to that commanded angle and solves the knee
    against the remaining circle (useful when gaits own the elevator).

    Raises :class:`UnreachableTargetError` when the planar distance falls
    outside what the distal links can span, and :class:`JointRangeError` when
    the solution needs a commanded angle beyond +-90 degrees.
    """
    x, y, z = target
    l1 = lengths.elevator_to_knee_cm
    l2 = lengths.knee_to_foot_cm
    yaw = math.degrees(math.atan2(y, x)) if (x, y) != (0.0, 0.0) else 0.0
    _check_limit("rotator", yaw)
    r = math.hypot(x, y)

    planar = math.hypot(r, z)
    if planar > l1 + l2 + reach_tol_cm or planar < abs(l1 - l2) - reach_tol_cm:
        raise UnreachableTargetError(
            f"planar distance {planar:.4f} cm outside [{abs(l1 - l2):.4f}, {l1 + l2:.4f}]"
        )

    knee_off = attachment.offset_deg("knee") if attachment is not None else 0.0
    elev_off = attachment.offset_deg("elevator") if attachment is not None else 0.0

    if topology is LegTopology.TWO_JOINT:
        if elevator_deg is not None:
            raise ValueError("two-joint topology has no elevator to pin")
        knee_eff = _knee_about_center(r, z, 0.0, l1, l2, reach_tol_cm)
        knee_cmd = _check_limit("knee", normalize_angle_deg(knee_eff - knee_off))
        return LegPose(rotator_deg=yaw, knee_deg=knee_cmd)

    if elevator_deg is not None:
        elev_eff = elevator_deg + elev_off
        knee_eff = _knee_about_center(r, z, math.radians(elev_eff), l1, l2, reach_tol_cm)
        knee_cmd = _check_limit("knee", normalize_angle_deg(knee_eff - knee_off))
        return LegPose(rotator_deg=yaw, knee_deg=knee_cmd, elevator_deg=_check_limit("elevator", elevator_deg))

    cos_knee = (planar * planar - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    cos_knee = min(1.0, max(-1.0, cos_knee))
    knee_eff = -math.degrees(math.acos(cos_knee))  # knee-down branch
    k = math.radians(knee_eff)
    elev_eff = math.degrees(
        math.atan2(z, r) - math.atan2(l2 * math.sin(k), l1 + l2 * math.cos(k))
    )
    knee_cmd = _check_limit("knee", normalize_angle_deg(knee_eff - knee_off))
    elev_cmd = _check_limit("elevator", normalize_angle_deg(elev_eff - elev_off))
    return LegPose(rotator_deg=yaw, knee_deg=knee_cmd, elevator_deg=elev_cmd)


def _knee_about_center(
    r: float, z: float, elev_rad: float, l1: float, l2: float, tol: float
) -> float:
    """Knee angle (degrees, relative to link 1) reaching (r, z) with link 1 fixed.

    With the proximal link pinned, the reachable set is the circle of radius
    l2 around the knee; targets off that circle (beyond ``tol``) error.
    """
    cx = l1 * math.cos(elev_rad)
    cz = l1 * math.sin(elev_rad)
    dx, dz = r - cx, z - cz
    dist = math.hypot(dx, dz)
    if abs(dist - l2) > tol:
        raise UnreachableTargetError(
            f"target is {dist:.6f} cm from the knee; the end link spans {l2:.6f} cm"
        )
    return normalize_angle_deg(math.degrees(math.atan2(dz, dx) - elev_rad))


def mount_yaw_deg(config: RobotConfig, leg_index: int) -> float:
    """Body-frame heading of a leg's neutral axis, from its root position."""
    root = config.leg_roots_cm[leg_index]
    return math.degrees(math.atan2(root[1], root[0]))


def foot_in_body(config: RobotConfig, leg_index: int, pose: LegPose) -> np.ndarray:
    """Foot position (cm) in the body frame for one leg's commanded pose."""
    fp = leg_fk(config.topology, config.attachments[leg_index], pose, config.link_lengths)
    psi = math.radians(mount_yaw_deg(config, leg_index))
    c, s = math.cos(psi), math.sin(psi)
    root = config.leg_roots_cm[leg_index]
    return np.array(
        [
            root[0] + c * fp.x_cm - s * fp.y_cm,
            root[1] + s * fp.x_cm + c * fp.y_cm,
            fp.z_cm,
        ]
    )


# --- support polygon --------------------------------------------------------


def convex_hull(points: np.ndarray) -> np.ndarray:
    """Convex hull of 2D points in counter-clockwise order (monotone chain)."""
    pts = np.unique(np.asarray(points, dtype=float).reshape(-1, 2), axis=0)
    if len(pts) <= 2:
        return pts
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def turn(o, a, b) -> float:
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def half(iterable):
        chain: list[np.ndarray] = []
        for p in iterable:
            while len(chain) >= 2 and turn(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    return np.array(lower[:-1] + upper[:-1])


def stability_margin(polygon: np.ndarray, cog_xy) -> float:
    """Signed distance (cm) from the CoG ground projection to the support hull.

    Positive inside (distance to the nearest edge), negative outside
    (distance to the hull), zero on the boundary.  Fewer than three distinct
    support points cannot enclose the CoG, so the margin is ``-inf``.
    """
    hull = convex_hull(np.asarray(polygon, dtype=float))
    if len(hull) < 3:
        return -math.inf
    p = np.asarray(cog_xy, dtype=float)
    a = hull
    b = np.roll(hull, -1, axis=0)
    edge = b - a
    rel = p - a
    cross = edge[:, 0] * rel[:, 1] - edge[:, 1] * rel[:, 0]
    lengths = np.hypot(edge[:, 0], edge[:, 1])
    signed = cross / lengths
    if np.all(signed >= 0.0):
        return float(np.min(signed))
    # outside: distance to the nearest hull segment
    t = np.clip((rel * edge).sum(axis=1) / (lengths * lengths), 0.0, 1.0)
    closest = a + t[:, None] * edge
    dists = np.hypot(*(p - closest).T)
    return -float(np.min(dists))
