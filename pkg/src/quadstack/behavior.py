"""Behavior layer: state machine, motion primitives, and sensor reflexes.

The robot runs a small set of finite states (initialization, rest, explore,
picture shot, interaction, and a two-leg balance demo) driven by the range
sensor, the IMU, and scripted triggers.  Locomotion is built from keyframed
motion primitives; walking and turning use a statically stable crawl that
moves one leg at a time, pre-shifting the body away from the leg about to
swing so the support triangle always contains the center of gravity.

Grab detection follows the IMU gravity direction: a sustained deviation of
the specific-force magnitude from g, or a sustained tilt of the measured
gravity axis, means a user picked the robot up.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from quadstack.config import GaitParams, LegTopology, RobotConfig
from quadstack.hal import ImuSample, RangeReading
from quadstack.kinematics import (
    ANGLE_LIMIT_DEG,
    LegPose,
    foot_in_body,
    leg_fk,
    leg_ik,
    mount_yaw_deg,
)

STANCE_KNEE_EFF_DEG = -45.0  # spider stance: knee above the foot
RAISED_KNEE_EFF_DEG = 0.0  # leg held straight out, foot well off the ground
BALANCE_STANCE_ROTATOR_DEG = 30.0  # feet rotated toward the sagittal axis
PRIMITIVE_NAMES = (
    "stand",
    "walk_forward",
    "walk_backward",
    "turn_left",
    "turn_right",
    "wave",
    "swing",
    "look_up",
    "raise_two_legs",
)

GRAVITY_MS2 = 9.81


class GaitError(ValueError):
    """Requested step unreachable for the build's geometry or servo range."""


class InsufficientWindowError(ValueError):
    """IMU history too short for the requested persistence check."""


class BehaviorState(Enum):
    INITIALIZATION = "initialization"
    REST = "rest"
    EXPLORE = "explore"
    PICTURE_SHOT = "picture_shot"
    INTERACTION = "interaction"
    BALANCE_DEMO = "balance_demo"


# Input classes are evaluated top to bottom; the first match wins and every
# state falls through to "otherwise", so the machine is total by table.
TRANSITIONS: dict[BehaviorState, dict[str, BehaviorState]] = {
    BehaviorState.INITIALIZATION: {
        "grab": BehaviorState.INTERACTION,
        "timer_done": BehaviorState.REST,
        "otherwise": BehaviorState.INITIALIZATION,
    },
    BehaviorState.REST: {
        "grab": BehaviorState.INTERACTION,
        "release_settled": BehaviorState.EXPLORE,
        "otherwise": BehaviorState.REST,
    },
    BehaviorState.EXPLORE: {
        "grab": BehaviorState.INTERACTION,
        "picture": BehaviorState.PICTURE_SHOT,
        "obstacle": BehaviorState.EXPLORE,
        "otherwise": BehaviorState.EXPLORE,
    },
    BehaviorState.PICTURE_SHOT: {
        "grab": BehaviorState.INTERACTION,
        "timer_done": BehaviorState.EXPLORE,
        "otherwise": BehaviorState.PICTURE_SHOT,
    },
    BehaviorState.INTERACTION: {
        "release": BehaviorState.REST,
        "otherwise": BehaviorState.INTERACTION,
    },
    BehaviorState.BALANCE_DEMO: {
        "grab": BehaviorState.INTERACTION,
        "otherwise": BehaviorState.BALANCE_DEMO,
    },
}

INITIALIZATION_S = 1.0
PICTURE_HOLD_S = 1.0
PICTURE_DONE_S = 1.2
RELEASE_SETTLE_S = 0.5
IMU_WINDOW_S = 0.5
# The PD output is an offset request; the integrator tracks it at this rate
# so the stance knees move gently enough not to read as a grab on the IMU.
BALANCE_APPLY_RATE_PER_S = 10.0
# Complementary-filter time constant for the roll estimate: integrate the
# gyro, lean slowly on the accelerometer (whose gravity direction is swamped
# by motion transients tick to tick).
BALANCE_FILTER_TAU_S = 0.5


@dataclass(frozen=True)
class Keyframe:
    targets: tuple[LegPose, LegPose, LegPose, LegPose]
    hold_s: float

    def __post_init__(self):
        if self.hold_s <= 0:
            raise ValueError("keyframe hold must be > 0")


@dataclass(frozen=True)
class MotionPrimitive:
    """Named keyframe sequence; cyclic primitives wrap back to keyframe 0."""

    name: str
    keyframes: tuple[Keyframe, ...]
    cyclic: bool

    def __post_init__(self):
        if not self.keyframes:
            raise ValueError("a primitive needs at least one keyframe")

    @property
    def duration_s(self) -> float:
        return sum(k.hold_s for k in self.keyframes)

    def target_at(self, elapsed_s: float) -> tuple[LegPose, LegPose, LegPose, LegPose]:
        """Active keyframe targets at a time offset from the primitive start."""
        if elapsed_s < 0:
            elapsed_s = 0.0
        if self.cyclic:
            elapsed_s = math.fmod(elapsed_s, self.duration_s)
        acc = 0.0
        for frame in self.keyframes:
            acc += frame.hold_s
            if elapsed_s < acc:
                return frame.targets
        return self.keyframes[-1].targets


# --- stance geometry helpers -------------------------------------------------


def _knee_cmd(config: RobotConfig, leg: int, knee_eff_deg: float) -> float:
    cmd = knee_eff_deg - config.attachments[leg].offset_deg("knee")
    if abs(cmd) > ANGLE_LIMIT_DEG:
        raise GaitError(
            f"knee {knee_eff_deg:.1f} deg needs command {cmd:.1f} with this attachment"
        )
    return cmd


def _elevator_cmd(config: RobotConfig, leg: int, elev_eff_deg: float) -> float | None:
    if config.topology is not LegTopology.THREE_JOINT:
        return None
    cmd = elev_eff_deg - config.attachments[leg].offset_deg("elevator")
    if abs(cmd) > ANGLE_LIMIT_DEG:
        raise GaitError(
            f"elevator {elev_eff_deg:.1f} deg needs command {cmd:.1f} with this attachment"
        )
    return cmd


def stance_pose(config: RobotConfig, leg: int, rotator_deg: float = 0.0) -> LegPose:
    """Resting spider stance for one leg: elevator level, knee bent down."""
    return LegPose(
        rotator_deg=rotator_deg,
        knee_deg=_knee_cmd(config, leg, STANCE_KNEE_EFF_DEG),
        elevator_deg=_elevator_cmd(config, leg, 0.0),
    )


def neutral_stance(config: RobotConfig) -> tuple[LegPose, LegPose, LegPose, LegPose]:
    return tuple(stance_pose(config, i) for i in range(4))


def stance_foot_planar(config: RobotConfig) -> tuple[float, float]:
    """(horizontal reach, height) of a foot in the resting stance."""
    from quadstack.kinematics import leg_chain_points

    points = leg_chain_points(
        config.topology, config.attachments[0], stance_pose(config, 0), config.link_lengths
    )
    return points["foot"]


def _swing_knee_eff(config: RobotConfig, step_height_cm: float) -> float:
    """Knee angle lifting the foot ``step_height`` above the stance plane."""
    _, z_st = stance_foot_planar(config)
    l2 = config.link_lengths.knee_to_foot_cm
    s = (z_st + step_height_cm) / l2
    if s > 1.0:
        raise GaitError(f"step height {step_height_cm} cm exceeds the leg's lift range")
    return math.degrees(math.asin(s))


def _tangents(config: RobotConfig) -> list[tuple[float, float]]:
    """Unit direction each foot moves per positive rotator increment."""
    out = []
    r_st, _ = stance_foot_planar(config)
    for i in range(4):
        mu = math.radians(mount_yaw_deg(config, i))
        out.append((-math.sin(mu), math.cos(mu)))
    return out


def _shift_deltas_deg(config: RobotConfig, shift_vec_cm: tuple[float, float]) -> list[float]:
    """Rotator offsets that translate the body by (about half of) the request.

    Each stance foot can only move along its yaw tangent, so the requested
    body shift is projected per leg; the anchored least squares then realizes
    the mean of those tangential displacements.
    """
    r_st, _ = stance_foot_planar(config)
    deltas = []
    for t in _tangents(config):
        foot_move = (-shift_vec_cm[0] * t[0]) + (-shift_vec_cm[1] * t[1])
        deltas.append(math.degrees(foot_move / r_st))
    return deltas


def sweep_amplitude_rad(config: RobotConfig, params: GaitParams) -> float:
    """Half-sweep of the stance rotators that yields the commanded step length."""
    r_st, _ = stance_foot_planar(config)
    forward_factor = sum(
        abs(math.sin(math.radians(mount_yaw_deg(config, i)))) for i in range(4)
    ) / 4.0
    if forward_factor <= 1e-6:
        raise GaitError("leg mounts give the sweep no forward component")
    return params.step_length_cm / (2.0 * r_st * forward_factor)


def estimated_turn_per_cycle_deg(config: RobotConfig, params: GaitParams) -> float:
    """Body yaw gained per turning gait cycle, keyframe-exact."""
    frames = _crawl_keyframes(config, params, [-1.0] * 4, params.cycle_time_s)
    _, _, dyaw = _cycle_rigid_motion(config, frames)
    return abs(dyaw)


# --- primitive construction ---------------------------------------------------


def _build_crawl(
    config: RobotConfig,
    params: GaitParams,
    sweep_sign: Sequence[float],
    amp_deg: float,
    cycle_time_s: float,
) -> tuple[Keyframe, ...]:
    """One crawl cycle at a given sweep amplitude.

    Each phase is four keyframes: sweep all stance legs (carrying the body
    lean away from the upcoming swing leg), lift the swing knee in place,
    swing the raised leg forward, and set it down.  Lifting before sweeping
    keeps the swing foot from dragging the body backward while it is still
    grounded, and every keyframe leaves at least three legs in stance.
    """
    knee_st = [_knee_cmd(config, i, STANCE_KNEE_EFF_DEG) for i in range(4)]
    knee_sw_eff = _swing_knee_eff(config, params.step_height_cm)
    knee_sw = [_knee_cmd(config, i, knee_sw_eff) for i in range(4)]
    elev = [_elevator_cmd(config, i, 0.0) for i in range(4)]
    order = params.stance_order

    def base(i: int, u: float) -> float:
        return sweep_sign[i] * (-amp_deg + u * (2.0 * amp_deg / 3.0))

    # u = stance phases since the leg last swung, staggered so order[p] is
    # ripe (u=3) exactly at phase p.
    u = [0.0] * 4
    for p, leg in enumerate(order):
        u[leg] = 3.0 - p

    quarter = cycle_time_s / 4.0
    t_sweep = 0.40 * quarter
    t_lift = 0.10 * quarter
    t_swing = 0.30 * quarter
    t_place = 0.20 * quarter

    def pose(i: int, rot: float, knee: float) -> LegPose:
        if abs(rot) > ANGLE_LIMIT_DEG:
            raise GaitError(f"step length needs rotator {rot:.1f} deg, beyond the range")
        return LegPose(rotator_deg=rot, knee_deg=knee, elevator_deg=elev[i])

    frames: list[Keyframe] = []
    for p in range(4):
        w = order[p]
        # Lean away from the swing leg's end of the body, purely along x: the
        # support triangle's diagonal edge gains clearance without adding any
        # lateral sway that would drift the walk sideways.
        lean = -params.body_shift_cm if config.leg_roots_cm[w][0] > 0 else params.body_shift_cm
        shift = _shift_deltas_deg(config, (lean, 0.0))

        rot = [0.0] * 4
        for i in range(4):
            if i != w:
                u[i] += 1.0
            rot[i] = base(i, u[i]) + shift[i]
        frames.append(Keyframe(tuple(pose(i, rot[i], knee_st[i]) for i in range(4)), t_sweep))

        lifted = tuple(pose(i, rot[i], knee_sw[i] if i == w else knee_st[i]) for i in range(4))
        frames.append(Keyframe(lifted, t_lift))

        u[w] = 0.0
        rot[w] = base(w, 0.0) + shift[w]
        swung = tuple(pose(i, rot[i], knee_sw[i] if i == w else knee_st[i]) for i in range(4))
        frames.append(Keyframe(swung, t_swing))
        frames.append(Keyframe(tuple(pose(i, rot[i], knee_st[i]) for i in range(4)), t_place))
    return tuple(frames)


def _cycle_rigid_motion(config: RobotConfig, frames: Sequence[Keyframe]) -> tuple[float, float, float]:
    """Exact body motion (dx cm, dy cm, dyaw deg) one keyframe cycle produces.

    Walks the cyclic keyframe transitions and applies the same anchored least
    squares the simulator uses: legs whose knee sits at the stance angle on
    both sides of a transition act as anchors; the body motion is the inverse
    of their mean rigid displacement.  Used to calibrate sweep amplitudes.
    """
    knee_st = [_knee_cmd(config, i, STANCE_KNEE_EFF_DEG) for i in range(4)]
    dx = dy = dyaw = 0.0
    n = len(frames)
    for k in range(n):
        a = frames[k].targets
        b = frames[(k + 1) % n].targets
        legs = [
            i
            for i in range(4)
            if abs(a[i].knee_deg - knee_st[i]) < 1e-9 and abs(b[i].knee_deg - knee_st[i]) < 1e-9
        ]
        if not legs:
            continue
        p = [foot_in_body(config, i, a[i])[:2] for i in legs]
        q = [foot_in_body(config, i, b[i])[:2] for i in legs]
        pc = [sum(v[0] for v in p) / len(p), sum(v[1] for v in p) / len(p)]
        qc = [sum(v[0] for v in q) / len(q), sum(v[1] for v in q) / len(q)]
        s = sum((pi[0] - pc[0]) * (qi[1] - qc[1]) - (pi[1] - pc[1]) * (qi[0] - qc[0]) for pi, qi in zip(p, q))
        c = sum((pi[0] - pc[0]) * (qi[0] - qc[0]) + (pi[1] - pc[1]) * (qi[1] - qc[1]) for pi, qi in zip(p, q))
        theta = math.atan2(s, c) if (s, c) != (0.0, 0.0) else 0.0
        # feet move by (R(theta), t); the anchored body moves by the inverse
        tx = qc[0] - (math.cos(theta) * pc[0] - math.sin(theta) * pc[1])
        ty = qc[1] - (math.sin(theta) * pc[0] + math.cos(theta) * pc[1])
        dx -= tx
        dy -= ty
        dyaw -= math.degrees(theta)
    return dx, dy, dyaw


def _crawl_keyframes(
    config: RobotConfig,
    params: GaitParams,
    sweep_sign: Sequence[float],
    cycle_time_s: float,
) -> tuple[Keyframe, ...]:
    """Crawl cycle with the sweep amplitude calibrated to the step length.

    The analytic amplitude assumes straight tangential foot motion; arcs and
    the lean offsets bend that, so the builder measures the keyframe-exact
    body motion per cycle and rescales the amplitude until the commanded step
    length comes out (two fixed-point passes suffice).
    """
    amp = math.degrees(sweep_amplitude_rad(config, params))
    frames = _build_crawl(config, params, sweep_sign, amp, cycle_time_s)
    walking = len(set(sweep_sign)) > 1
    if walking:
        for _ in range(2):
            dx, _, _ = _cycle_rigid_motion(config, frames)
            if abs(dx) < 1e-9:
                raise GaitError("sweep produces no forward motion for this geometry")
            amp *= params.step_length_cm / abs(dx)
            frames = _build_crawl(config, params, sweep_sign, amp, cycle_time_s)
    return frames


def _mirror_pose(p: LegPose) -> LegPose:
    return LegPose(-p.rotator_deg, p.knee_deg, p.elevator_deg)


def mirror_primitive(prim: MotionPrimitive, name: str) -> MotionPrimitive:
    """Sagittal mirror: swap left/right legs and negate yaw angles."""
    swapped = []
    for frame in prim.keyframes:
        t = frame.targets
        swapped.append(
            Keyframe((_mirror_pose(t[1]), _mirror_pose(t[0]), _mirror_pose(t[3]), _mirror_pose(t[2])), frame.hold_s)
        )
    return MotionPrimitive(name=name, keyframes=tuple(swapped), cyclic=prim.cyclic)


def _validate_reachability(config: RobotConfig, frames: Iterable[Keyframe]) -> None:
    """Round-trip every keyframe target through FK/IK to prove it reachable."""
    for frame in frames:
        for leg, target in enumerate(frame.targets):
            foot = leg_fk(config.topology, config.attachments[leg], target, config.link_lengths)
            leg_ik(
                config.topology,
                config.attachments[leg],
                foot,
                config.link_lengths,
                elevator_deg=target.elevator_deg,
            )


def primitive_keyframes(name: str, params: GaitParams, config: RobotConfig) -> MotionPrimitive:
    """Build one of the named motion primitives for a robot build.

    Walk and turn primitives are crawl-style (exactly one swing leg at a
    time); ``look_up`` presses the front feet down and folds the rear knees
    so the body pitches up for the camera; ``raise_two_legs`` is the two-leg
    balance stance.  Raises :class:`GaitError` when the requested step does
    not fit the geometry or servo range.
    """
    if name not in PRIMITIVE_NAMES:
        raise ValueError(f"unknown primitive {name!r}")
    T = params.cycle_time_s

    if name == "stand":
        return MotionPrimitive("stand", (Keyframe(neutral_stance(config), 0.5),), cyclic=False)

    if name in ("walk_forward", "walk_backward"):
        signs = []
        for t in _tangents(config):
            direction = -1.0 if name == "walk_backward" else 1.0
            signs.append(direction * (1.0 if -t[0] > 0 else -1.0))
        frames = _crawl_keyframes(config, params, signs, T)
        _validate_reachability(config, frames)
        return MotionPrimitive(name, frames, cyclic=True)

    if name in ("turn_left", "turn_right"):
        frames = _crawl_keyframes(config, params, [-1.0] * 4, T)
        _validate_reachability(config, frames)
        left = MotionPrimitive("turn_left", frames, cyclic=True)
        if name == "turn_left":
            return left
        return mirror_primitive(left, "turn_right")

    if name == "wave":
        base = list(neutral_stance(config))
        lifted_knee = _knee_cmd(config, 0, -5.0)
        frames = []
        for rot in (0.0, 20.0, -20.0, 0.0):
            targets = list(base)
            targets[0] = LegPose(rot, lifted_knee, base[0].elevator_deg)
            frames.append(Keyframe(tuple(targets), T / 8.0))
        return MotionPrimitive("wave", tuple(frames), cyclic=True)

    if name == "swing":
        frames = []
        for side in (1.0, -1.0):
            deltas = _shift_deltas_deg(config, (0.0, side * params.body_shift_cm))
            targets = tuple(
                stance_pose(config, i, rotator_deg=deltas[i]) for i in range(4)
            )
            frames.append(Keyframe(targets, T / 4.0))
        return MotionPrimitive("swing", tuple(frames), cyclic=True)

    if name == "look_up":
        targets = []
        for i in range(4):
            front = config.leg_roots_cm[i][0] > 0
            knee_eff = -80.0 if front else -12.0
            targets.append(LegPose(0.0, _knee_cmd(config, i, knee_eff), _elevator_cmd(config, i, 0.0)))
        return MotionPrimitive("look_up", (Keyframe(tuple(targets), 1.0),), cyclic=False)

    # raise_two_legs: balance on the front pair, rear legs held straight out.
    # All feet rotate toward the centerline: the stance pair gains roll
    # authority per knee degree, the raised pair gains ground clearance when
    # the body rolls.
    targets = []
    for i in range(4):
        front = config.leg_roots_cm[i][0] > 0
        left = config.leg_roots_cm[i][1] > 0
        rot = -BALANCE_STANCE_ROTATOR_DEG if left == front else BALANCE_STANCE_ROTATOR_DEG
        knee_eff = STANCE_KNEE_EFF_DEG if front else RAISED_KNEE_EFF_DEG
        targets.append(LegPose(rot, _knee_cmd(config, i, knee_eff), _elevator_cmd(config, i, 0.0)))
    return MotionPrimitive("raise_two_legs", (Keyframe(tuple(targets), 0.5),), cyclic=False)


# --- sensor reflexes ----------------------------------------------------------


def obstacle_policy(reading: RangeReading, threshold_m: float = 0.2) -> str:
    """``turn`` below the avoidance threshold, otherwise ``continue``.

    A timeout means nothing is in range, which is treated as a clear path.
    """
    if reading.is_timeout:
        return "continue"
    return "turn" if reading.distance_m < threshold_m else "continue"


def _sustained(
    window: Sequence[tuple[float, ImuSample]], persist_s: float, predicate
) -> bool:
    t_end = window[-1][0]
    recent = [s for t, s in window if t >= t_end - persist_s]
    return bool(recent) and all(predicate(s) for s in recent)


def _accel_norm(sample: ImuSample) -> float:
    return math.sqrt(sum(a * a for a in sample.accel))


def _tilt_deg(sample: ImuSample) -> float:
    norm = _accel_norm(sample)
    if norm < 1e-9:
        return 0.0
    return math.degrees(math.acos(max(-1.0, min(1.0, sample.accel[2] / norm))))


def detect_grab(
    imu_window: Sequence[tuple[float, ImuSample]],
    g_ms2: float = GRAVITY_MS2,
    accel_fraction: float = 0.3,
    tilt_deg: float = 25.0,
    persist_s: float = 0.2,
) -> bool:
    """True when the gravity reading says a user picked the robot up.

    Either the specific-force magnitude deviates from g by more than the
    given fraction, or the measured gravity axis tilts beyond the threshold,
    sustained over the persistence time.  The window must span at least that
    long.
    """
    if len(imu_window) < 2 or imu_window[-1][0] - imu_window[0][0] < persist_s:
        raise InsufficientWindowError(f"need at least {persist_s} s of IMU history")
    magnitude = lambda s: abs(_accel_norm(s) - g_ms2) > accel_fraction * g_ms2
    tilted = lambda s: _tilt_deg(s) > tilt_deg
    return _sustained(imu_window, persist_s, magnitude) or _sustained(
        imu_window, persist_s, tilted
    )


def detect_release(
    imu_window: Sequence[tuple[float, ImuSample]],
    g_ms2: float = GRAVITY_MS2,
    persist_s: float = 0.3,
) -> bool:
    """True when the IMU has read a calm, upright gravity vector long enough."""
    if len(imu_window) < 2 or imu_window[-1][0] - imu_window[0][0] < persist_s:
        raise InsufficientWindowError(f"need at least {persist_s} s of IMU history")
    calm = lambda s: abs(_accel_norm(s) - g_ms2) < 0.1 * g_ms2 and _tilt_deg(s) < 10.0
    return _sustained(imu_window, persist_s, calm)


def balance_step(
    imu: ImuSample,
    kp: float,
    kd: float,
    dt_s: float,
    roll_deg: float | None = None,
    max_step_deg: float = 5.0,
) -> tuple[dict[int, float], float]:
    """PD knee corrections for the two front stance legs, from gravity roll.

    The roll error comes from the gravity direction (``atan2(a_y, a_z)``
    unless a fused estimate is passed in); the damping term uses the roll
    gyro.  Returns ``({front_left: +out, front_right: -out}, roll)``; the
    output is clamped to ``max_step_deg`` per tick and is zero at zero error.
    Positive roll (left side high) raises the left foot and presses the
    right foot down.
    """
    if dt_s <= 0:
        raise ValueError("dt must be > 0")
    if roll_deg is None:
        roll_deg = math.degrees(math.atan2(imu.accel[1], imu.accel[2]))
    rate = imu.gyro[0]
    out = kp * roll_deg + kd * rate
    out = max(-max_step_deg, min(max_step_deg, out))
    return {0: out, 1: -out}, roll_deg


# --- the state machine --------------------------------------------------------


@dataclass(frozen=True)
class BehaviorInputs:
    t_s: float
    dt_s: float
    range_reading: RangeReading
    imu: ImuSample
    picture_trigger: bool = False


@dataclass(frozen=True)
class TickResult:
    state: BehaviorState
    primitive: str
    events: tuple[str, ...]


class BehaviorController:
    """Tick-driven behavior machine; one instance per robot, single thread."""

    def __init__(
        self,
        config: RobotConfig,
        initial_state: BehaviorState = BehaviorState.INITIALIZATION,
        start_t_s: float = 0.0,
    ):
        self.config = config
        self.params = config.behavior
        self.state = initial_state
        self.state_since_s = start_t_s
        self._imu_window: deque[tuple[float, ImuSample]] = deque()
        self._primitives: dict[str, MotionPrimitive] = {}
        self._primitive_name = self._default_primitive(initial_state)
        self._primitive_since_s = start_t_s
        self._avoid_until_s: float | None = None
        self._recent_release = False
        self._camera_fired = False
        self.balance_adjust = [0.0, 0.0]  # integrated knee offsets, front legs
        self._roll_est_deg: float | None = None

    # -- primitives --------------------------------------------------------

    def primitive(self, name: str) -> MotionPrimitive:
        if name not in self._primitives:
            self._primitives[name] = primitive_keyframes(name, self.params.gait, self.config)
        return self._primitives[name]

    def _default_primitive(self, state: BehaviorState) -> str:
        return {
            BehaviorState.INITIALIZATION: "stand",
            BehaviorState.REST: "stand",
            BehaviorState.EXPLORE: "walk_forward",
            BehaviorState.PICTURE_SHOT: "look_up",
            BehaviorState.INTERACTION: "stand",
            BehaviorState.BALANCE_DEMO: "raise_two_legs",
        }[state]

    def _set_primitive(self, name: str, t_s: float) -> None:
        if name != self._primitive_name:
            self._primitive_name = name
            self._primitive_since_s = t_s

    def _enter(self, state: BehaviorState, t_s: float) -> None:
        self.state = state
        self.state_since_s = t_s
        self._camera_fired = False
        self._set_primitive(self._default_primitive(state), t_s)

    # -- sensing -----------------------------------------------------------

    def _update_window(self, t_s: float, imu: ImuSample) -> None:
        self._imu_window.append((t_s, imu))
        while self._imu_window and self._imu_window[0][0] < t_s - IMU_WINDOW_S:
            self._imu_window.popleft()

    def _grabbed(self) -> bool:
        try:
            return detect_grab(
                list(self._imu_window),
                accel_fraction=self.params.grab_accel_fraction,
                tilt_deg=self.params.grab_tilt_deg,
                persist_s=self.params.grab_persist_s,
            )
        except InsufficientWindowError:
            return False

    def _released(self) -> bool:
        try:
            return detect_release(list(self._imu_window), persist_s=self.params.release_persist_s)
        except InsufficientWindowError:
            return False

    # -- the tick ------------------------------------------------------------

    def tick(self, inputs: BehaviorInputs) -> TickResult:
        t = inputs.t_s
        self._update_window(t, inputs.imu)
        events: list[str] = []
        in_state = t - self.state_since_s

        if self.state is not BehaviorState.INTERACTION and self._grabbed():
            events += ["grab_detected", "beep"]
            self._enter(BehaviorState.INTERACTION, t)

        elif self.state is BehaviorState.INITIALIZATION:
            if in_state >= INITIALIZATION_S:
                self._enter(BehaviorState.REST, t)

        elif self.state is BehaviorState.REST:
            if self._recent_release and in_state >= RELEASE_SETTLE_S:
                self._recent_release = False
                events.append("startup_explore")
                self._enter(BehaviorState.EXPLORE, t)

        elif self.state is BehaviorState.EXPLORE:
            if inputs.picture_trigger:
                self._enter(BehaviorState.PICTURE_SHOT, t)
            elif self._avoid_until_s is not None and t < self._avoid_until_s:
                pass  # keep turning
            else:
                self._avoid_until_s = None
                action = obstacle_policy(inputs.range_reading, self.params.obstacle_threshold_m)
                if action == "turn":
                    cycles = self.params.avoid_turn_deg / estimated_turn_per_cycle_deg(
                        self.config, self.params.gait
                    )
                    self._avoid_until_s = t + cycles * self.params.gait.cycle_time_s
                    events.append("avoidance_turn")
                    self._set_primitive("turn_left", t)
                else:
                    self._set_primitive("walk_forward", t)

        elif self.state is BehaviorState.PICTURE_SHOT:
            if in_state >= PICTURE_HOLD_S and not self._camera_fired:
                self._camera_fired = True
                events.append("camera_trigger")
            if in_state >= PICTURE_DONE_S:
                self._enter(BehaviorState.EXPLORE, t)

        elif self.state is BehaviorState.INTERACTION:
            if self._released():
                self._recent_release = True
                events.append("release_detected")
                self._enter(BehaviorState.REST, t)

        elif self.state is BehaviorState.BALANCE_DEMO:
            roll_acc = math.degrees(math.atan2(inputs.imu.accel[1], inputs.imu.accel[2]))
            if self._roll_est_deg is None:
                self._roll_est_deg = roll_acc
            else:
                predicted = self._roll_est_deg + inputs.imu.gyro[0] * inputs.dt_s
                beta = inputs.dt_s / (BALANCE_FILTER_TAU_S + inputs.dt_s)
                self._roll_est_deg = predicted + beta * (roll_acc - predicted)
            corrections, _ = balance_step(
                inputs.imu,
                self.params.balance_kp,
                self.params.balance_kd,
                inputs.dt_s,
                roll_deg=self._roll_est_deg,
                max_step_deg=self.params.balance_max_step_deg,
            )
            for leg, out in corrections.items():
                step = out * BALANCE_APPLY_RATE_PER_S * inputs.dt_s
                self.balance_adjust[leg] = max(-60.0, min(60.0, self.balance_adjust[leg] + step))

        return TickResult(self.state, self._primitive_name, tuple(events))

    def joint_targets(self, t_s: float) -> tuple[LegPose, LegPose, LegPose, LegPose]:
        """Current keyframe targets, with balance corrections folded in."""
        prim = self.primitive(self._primitive_name)
        targets = prim.target_at(t_s - self._primitive_since_s)
        if self.state is BehaviorState.BALANCE_DEMO:
            adjusted = list(targets)
            for leg in (0, 1):
                p = adjusted[leg]
                knee = max(-ANGLE_LIMIT_DEG, min(ANGLE_LIMIT_DEG, p.knee_deg + self.balance_adjust[leg]))
                adjusted[leg] = LegPose(p.rotator_deg, knee, p.elevator_deg)
            targets = tuple(adjusted)
        return targets


def fsm_tick(controller: BehaviorController, inputs: BehaviorInputs) -> TickResult:
    """Functional wrapper over :meth:`BehaviorController.tick`."""
    return controller.tick(inputs)
