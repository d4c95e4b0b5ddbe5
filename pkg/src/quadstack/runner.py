"""Scenario execution: behavior + HAL emulation + simulator in one tick loop.

Every tick the loop senses (raycast range, synthesized IMU), decides (the
behavior machine, or a scripted mission primitive), pushes the commanded
angles through the byte-level PWM emulator, and steps the kinematic world
with the quantized angles the device would actually execute.  One JSONL
trace line is written per tick; identical (config, scenario, seed) runs
produce byte-identical traces.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np

from quadstack import behavior as bhv
from quadstack.config import LegTopology, RobotConfig, load_config
from quadstack.hal import Buzzer, CameraTrigger, EventTrace, ServoBank
from quadstack.kinematics import (
    ANGLE_LIMIT_DEG,
    BodyState,
    LegPose,
    foot_in_body,
    normalize_angle_deg,
    stability_margin,
)
from quadstack.sim import (
    Box,
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

log = logging.getLogger("quadstack.runner")


class ScenarioError(ValueError):
    """Malformed scenario document or spec."""


@dataclass(frozen=True)
class Mission:
    """Scripted primitive run, bypassing the state machine."""

    primitive: str
    stop_at_heading_deg: float | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    duration_s: float
    seed: int
    description: str = ""
    initial_state: str = "explore"
    mission: Mission | None = None
    obstacles: tuple[Box, ...] = ()
    events: tuple[ScheduledEvent, ...] = ()
    initial_roll_deg: float = 0.0
    imu_noise_std: float = 0.0

    def __post_init__(self):
        if self.duration_s <= 0:
            raise ScenarioError("scenario duration must be > 0")


def parse_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario syntax error at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    obj = dict(doc)

    def take(key, default=None, required=False):
        if key in obj:
            return obj.pop(key)
        if required:
            raise ScenarioError(f"scenario is missing {key!r}")
        return default

    name = take("name", required=True)
    duration = float(take("duration_s", required=True))
    seed = int(take("seed", 0))
    description = take("description", "")
    initial_state = take("initial_state", "explore")
    mission = None
    mission_raw = take("mission")
    if mission_raw is not None:
        stop = mission_raw.get("stop_at_heading_deg")
        mission = Mission(
            primitive=mission_raw["primitive"],
            stop_at_heading_deg=None if stop is None else float(stop),
        )
        if mission.primitive not in bhv.PRIMITIVE_NAMES:
            raise ScenarioError(f"unknown mission primitive {mission.primitive!r}")
    obstacles = tuple(
        Box(min_m=tuple(b["min_m"]), max_m=tuple(b["max_m"])) for b in take("obstacles", [])
    )
    events = tuple(
        ScheduledEvent(t_s=float(e["t_s"]), kind=e["kind"]) for e in take("events", [])
    )
    initial_roll = float(take("initial_roll_deg", 0.0))
    noise = float(take("imu_noise_std", 0.0))
    if obj:
        raise ScenarioError(f"unknown scenario key {sorted(obj)[0]!r}")
    return Scenario(
        name=name,
        duration_s=duration,
        seed=seed,
        description=description,
        initial_state=initial_state,
        mission=mission,
        obstacles=obstacles,
        events=events,
        initial_roll_deg=initial_roll,
        imu_noise_std=noise,
    )


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


@dataclass(frozen=True)
class ScenarioSpec:
    """What the CLI needs to run one episode."""

    config_path: str
    scenario_path: str
    trace_path: str
    duration_s: float | None = None
    seed: int | None = None
    initial_state: str | None = None

    def __post_init__(self):
        if not self.config_path or not self.scenario_path:
            raise ScenarioError("config and scenario paths must be non-empty")
        if self.duration_s is not None and self.duration_s <= 0:
            raise ScenarioError("duration must be > 0")


@dataclass
class Summary:
    scenario: str
    config: str
    seed: int
    duration_s: float
    dt_s: float
    ticks: int
    distance_m: float
    commanded_distance_m: float
    heading_change_deg: float
    min_stability_margin_cm: float | None
    collisions: int
    avoidance_turns: int
    final_state: str
    events: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    def text(self) -> str:
        margin = (
            "n/a" if self.min_stability_margin_cm is None else f"{self.min_stability_margin_cm:.2f} cm"
        )
        lines = [
            f"scenario {self.scenario} ({self.ticks} ticks of {self.dt_s:.3f} s, seed {self.seed})",
            f"  distance traveled:   {self.distance_m * 100:.1f} cm"
            f" (commanded {self.commanded_distance_m * 100:.1f} cm)",
            f"  heading change:      {self.heading_change_deg:.1f} deg",
            f"  min stability margin: {margin}",
            f"  collisions:          {self.collisions}",
            f"  avoidance turns:     {self.avoidance_turns}",
            f"  final state:         {self.final_state}",
        ]
        return "\n".join(lines)


def _settled_balance_state(config: RobotConfig, asym_deg: float) -> SimState:
    """Let the simulator settle the two-leg stance for a knee asymmetry."""
    sim = Simulator(config, World())
    poses = _balance_initial_poses(config, asym_deg)
    fl = foot_in_body(config, 0, poses[0])
    fr = foot_in_body(config, 1, poses[1])
    guess_roll = math.degrees(math.atan2(fr[2] - fl[2], fl[1] - fr[1]))
    rot = BodyState(roll_deg=guess_roll).rotation()
    z0 = -float((rot @ fl)[2])
    state = sim.initial_state(poses, body=BodyState(z_cm=z0, roll_deg=guess_roll))
    dt = 1.0 / config.update_rate_hz
    for _ in range(8):
        state = sim.step(state, poses, dt)
    return SimState(0.0, state.body, state.poses, state.contacts)


def _balance_asymmetry_deg(config: RobotConfig, roll_deg: float) -> float:
    """Knee asymmetry on the front pair that settles the body at ``roll_deg``.

    The front-left knee goes deeper by the result, the front-right shallower,
    so both feet sit on the ground with the body rolled (left side high).
    Bisection runs against the simulator's own attitude settle, so the
    scenario starts in an exact equilibrium.
    """
    lo, hi = 0.0, ANGLE_LIMIT_DEG - 1.0
    for _ in range(40):
        mid = (lo + hi) / 2.0
        if _settled_balance_state(config, mid).body.roll_deg < roll_deg:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def _balance_initial_poses(config: RobotConfig, asym_deg: float) -> tuple[LegPose, ...]:
    base = bhv.primitive_keyframes("raise_two_legs", config.behavior.gait, config).keyframes[0].targets
    fl, fr, rl, rr = base
    return (
        LegPose(fl.rotator_deg, fl.knee_deg - asym_deg, fl.elevator_deg),
        LegPose(fr.rotator_deg, fr.knee_deg + asym_deg, fr.elevator_deg),
        rl,
        rr,
    )


def run_scenario(
    config: RobotConfig,
    scenario: Scenario,
    trace: IO[str],
    duration_s: float | None = None,
    seed: int | None = None,
    initial_state: str | None = None,
) -> Summary:
    """Run one episode, writing the JSONL trace, and return the summary."""
    duration = duration_s if duration_s is not None else scenario.duration_s
    if duration <= 0:
        raise ScenarioError("duration must be > 0")
    run_seed = seed if seed is not None else scenario.seed
    state_name = initial_state if initial_state is not None else scenario.initial_state

    dt = 1.0 / config.update_rate_hz
    world = World(obstacles=scenario.obstacles, events=scenario.events)
    sim = Simulator(config, world)
    rng = np.random.default_rng(run_seed)
    devices = EventTrace()
    camera = CameraTrigger(devices)
    buzzer = Buzzer(devices)
    joints_per_leg = len(config.topology.joints)
    bank = ServoBank(config.servo, joints_per_leg, config.update_rate_hz)

    controller: bhv.BehaviorController | None = None
    mission_prim: bhv.MotionPrimitive | None = None
    stand = bhv.primitive_keyframes("stand", config.behavior.gait, config)

    if scenario.mission is not None:
        mission_prim = bhv.primitive_keyframes(scenario.mission.primitive, config.behavior.gait, config)
        state = sim.initial_state(bhv.neutral_stance(config))
    elif state_name == bhv.BehaviorState.BALANCE_DEMO.value:
        controller = bhv.BehaviorController(
            config, initial_state=bhv.BehaviorState.BALANCE_DEMO, start_t_s=0.0
        )
        asym = _balance_asymmetry_deg(config, scenario.initial_roll_deg)
        controller.balance_adjust = [-asym, asym]
        state = _settled_balance_state(config, asym)
    else:
        try:
            init_enum = bhv.BehaviorState(state_name)
        except ValueError:
            raise ScenarioError(f"unknown initial state {state_name!r}") from None
        controller = bhv.BehaviorController(config, initial_state=init_enum, start_t_s=0.0)
        state = sim.initial_state(bhv.neutral_stance(config))

    log.info("scenario %s: %d ticks at %.3f s", scenario.name, round(duration / dt), dt)

    prev_state = state
    velocity = None
    start_xy = (state.body.x_cm, state.body.y_cm)
    heading_acc = 0.0
    min_margin: float | None = None
    collisions = 0
    avoidance_turns = 0
    time_walking = 0.0
    mission_done = False
    mission_stopped_at = 0.0
    total_events = 0

    ticks = round(duration / dt)
    for _ in range(ticks):
        t = state.t_s
        origin_m, rot = sensor_pose(config, state.body)
        reading = raycast_range(world, origin_m, rot)
        imu, velocity = synthesize_imu(
            state, prev_state, dt, velocity, noise_std=scenario.imu_noise_std, rng=rng
        )
        picture = any(e.kind == "picture" for e in world.events_between(t, t + dt))

        tick_events: list[str] = []
        if mission_prim is not None:
            if (
                not mission_done
                and scenario.mission.stop_at_heading_deg is not None
                and abs(heading_acc) >= scenario.mission.stop_at_heading_deg
            ):
                mission_done = True
                mission_stopped_at = t
                tick_events.append("mission_complete")
            if mission_done:
                targets = stand.target_at(t - mission_stopped_at)
            else:
                targets = mission_prim.target_at(t)
            label = "scripted"
            if mission_prim.name.startswith("walk") and not mission_done:
                time_walking += dt
        else:
            result = controller.tick(
                bhv.BehaviorInputs(t_s=t, dt_s=dt, range_reading=reading, imu=imu, picture_trigger=picture)
            )
            targets = controller.joint_targets(t)
            label = result.state.value
            for ev in result.events:
                if ev == "beep":
                    buzzer.beep(t)
                elif ev == "camera_trigger":
                    camera.shoot(t)
                elif ev == "avoidance_turn":
                    avoidance_turns += 1
                tick_events.append(ev)
            if result.primitive.startswith("walk"):
                time_walking += dt

        # byte-level servo path: command -> pulse -> registers -> decoded angles
        quantized = []
        for leg in range(4):
            angles = targets[leg].angles(config.topology)
            decoded = []
            for j, angle in enumerate(angles):
                clamped = max(-ANGLE_LIMIT_DEG, min(ANGLE_LIMIT_DEG, angle))
                bank.command_angle(leg, j, clamped)
                decoded.append(bank.readback_angle(leg, j))
            if config.topology is LegTopology.THREE_JOINT:
                quantized.append(LegPose(decoded[0], decoded[2], decoded[1]))
            else:
                quantized.append(LegPose(decoded[0], decoded[1]))

        new_state = sim.step(state, tuple(quantized), dt)

        for event in world.events_between(t, new_state.t_s):
            tick_events.append(event.kind)

        dyaw = normalize_angle_deg(new_state.body.yaw_deg - state.body.yaw_deg)
        heading_acc += dyaw

        contacts = [i for i in range(4) if new_state.contacts[i]]
        if len(contacts) >= 3:
            rot_new = new_state.body.rotation()
            pos = new_state.body.position_cm
            pts = [(pos + rot_new @ foot_in_body(config, i, new_state.poses[i]))[:2] for i in contacts]
            margin = stability_margin(np.array(pts), pos[:2])
            min_margin = margin if min_margin is None else min(min_margin, margin)

        if body_collides(config, new_state.body, world):
            collisions += 1

        total_events += len(tick_events)
        trace.write(
            format_trace_line(
                new_state.t_s,
                label,
                new_state.poses,
                config.topology,
                new_state.body,
                reading,
                imu,
                tick_events,
            )
            + "\n"
        )
        prev_state = state
        state = new_state

    gait = config.behavior.gait
    commanded_cm = gait.step_length_cm * (time_walking / gait.cycle_time_s)
    distance_cm = math.hypot(state.body.x_cm - start_xy[0], state.body.y_cm - start_xy[1])
    final = "scripted" if mission_prim is not None else controller.state.value
    return Summary(
        scenario=scenario.name,
        config=config.name,
        seed=run_seed,
        duration_s=duration,
        dt_s=dt,
        ticks=ticks,
        distance_m=distance_cm / 100.0,
        commanded_distance_m=commanded_cm / 100.0,
        heading_change_deg=heading_acc,
        min_stability_margin_cm=min_margin,
        collisions=collisions,
        avoidance_turns=avoidance_turns,
        final_state=final,
        events=total_events,
    )


def run_spec(spec: ScenarioSpec) -> Summary:
    """Load the files named by a spec, run, and write the trace to disk."""
    config = load_config(spec.config_path)
    scenario = load_scenario(spec.scenario_path)
    trace_path = Path(spec.trace_path)
    trace_path.parent.mkdir(parents=True, exist_ok=True)
    with open(trace_path, "w", encoding="utf-8", newline="\n") as fh:
        return run_scenario(
            config,
            scenario,
            fh,
            duration_s=spec.duration_s,
            seed=spec.seed,
            initial_state=spec.initial_state,
        )
