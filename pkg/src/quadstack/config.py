"""Robot description files: parsing, validation, and attachment enumeration.

A robot build is described by a JSON document with snake_case keys whose unit
is encoded in the key name (``knee_to_foot_cm``, ``nominal_torque_ncm``,
``servo_current_ma``, ``pulse_min_us``).  Two reference builds ship with the
package: ``locoquad-2j.json`` (two joints per leg) and ``locoquad-3j.json``
(three joints per leg); see :func:`quadstack.data.config_path`.

Units are fixed per field and never parsed out of values: cm for lengths,
grams for masses, N*cm for torques, mA for currents, microseconds for pulses.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Any


class ConfigError(ValueError):
    """Base class for configuration file problems."""


class ConfigSyntaxError(ConfigError):
    """Document is not well-formed JSON; carries the offending position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"syntax error at line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class SchemaError(ConfigError):
    """Well-formed document that violates the configuration schema."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class MassBudgetWarning(UserWarning):
    """Total build mass exceeds what the torque budget can carry."""


class LegTopology(Enum):
    """Leg joint layout.  The rotator is always the proximal (yaw) joint."""

    TWO_JOINT = "two_joint"
    THREE_JOINT = "three_joint"

    @property
    def joints(self) -> tuple[str, ...]:
        if self is LegTopology.TWO_JOINT:
            return ("rotator", "knee")
        return ("rotator", "elevator", "knee")

    @property
    def reconfigurable_joints(self) -> tuple[str, ...]:
        """Joints with selectable servo-horn mounting positions."""
        if self is LegTopology.TWO_JOINT:
            return ("knee",)
        return ("elevator", "knee")


# Horn mounting option -> angular offset of the link relative to the servo
# midpoint.  Four discrete positions exist per reconfigurable joint; the
# offsets are symmetric and stay inside the 180 degree servo range.
ATTACHMENT_OFFSETS_DEG: dict[int, float] = {1: -90.0, 2: -45.0, 3: 45.0, 4: 90.0}


@dataclass(frozen=True)
class AttachmentConfig:
    """Mount option (1..4) for each reconfigurable joint of one leg."""

    knee: int
    elevator: int | None = None

    def __post_init__(self):
        for name, opt in (("knee", self.knee), ("elevator", self.elevator)):
            if opt is not None and opt not in ATTACHMENT_OFFSETS_DEG:
                raise ConfigError(f"attachment option {name}={opt} not in 1..4")

    def offset_deg(self, joint: str) -> float:
        """Angular offset contributed by the mount at ``joint`` (0 for rotator)."""
        if joint == "knee":
            return ATTACHMENT_OFFSETS_DEG[self.knee]
        if joint == "elevator":
            if self.elevator is None:
                return 0.0
            return ATTACHMENT_OFFSETS_DEG[self.elevator]
        return 0.0


@dataclass(frozen=True)
class ServoSpec:
    """Datasheet figures for one servo model."""

    nominal_torque_ncm: float
    angular_range_deg: float
    pulse_min_us: float
    pulse_max_us: float
    current_draw_ma: float

    def __post_init__(self):
        if self.nominal_torque_ncm <= 0:
            raise ConfigError("servo nominal torque must be > 0")
        if not 0 < self.angular_range_deg <= 360:
            raise ConfigError("servo angular range must be in (0, 360]")
        if self.pulse_min_us >= self.pulse_max_us:
            raise ConfigError("servo pulse_min_us must be < pulse_max_us")


@dataclass(frozen=True)
class LinkLengths:
    """Leg chain lengths in cm.

    The two-joint topology has no separate elevator; it reuses
    ``elevator_to_knee_cm`` as its single proximal link length.
    """

    cog_to_elevator_cm: float
    elevator_to_knee_cm: float
    knee_to_foot_cm: float

    def __post_init__(self):
        for name in ("cog_to_elevator_cm", "elevator_to_knee_cm", "knee_to_foot_cm"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"link length {name} must be > 0")


@dataclass(frozen=True)
class LinkMasses:
    """Reference masses (grams) of the two distal leg links."""

    link2_g: float
    link3_g: float

    def __post_init__(self):
        if self.link2_g < 0 or self.link3_g < 0:
            raise ConfigError("link masses must be >= 0")


@dataclass(frozen=True)
class GaitParams:
    step_length_cm: float = 3.0
    step_height_cm: float = 2.0
    cycle_time_s: float = 2.0
    body_shift_cm: float = 4.5
    # Swing order over legs 0=FL, 1=FR, 2=RL, 3=RR (a crawl: one leg at a time).
    stance_order: tuple[int, int, int, int] = (0, 3, 1, 2)


@dataclass(frozen=True)
class BehaviorParams:
    """Tunables for the behavior layer, stored in the config ``behavior`` block."""

    obstacle_threshold_m: float = 0.2
    grab_accel_fraction: float = 0.3
    grab_tilt_deg: float = 25.0
    grab_persist_s: float = 0.2
    release_persist_s: float = 0.3
    balance_kp: float = 0.8
    balance_kd: float = 0.1
    balance_max_step_deg: float = 5.0
    avoid_turn_deg: float = 45.0
    gait: GaitParams = field(default_factory=GaitParams)


@dataclass(frozen=True)
class RobotConfig:
    """Full parametric description of one robot build."""

    topology: LegTopology
    attachments: tuple[AttachmentConfig, AttachmentConfig, AttachmentConfig, AttachmentConfig]
    link_lengths: LinkLengths
    link_masses: LinkMasses
    body_mass_g: float
    servo: ServoSpec
    electronics: "PowerBudget"
    battery: "BatteryPack"
    name: str = ""
    comment: str = ""
    leg_roots_cm: tuple[tuple[float, float], ...] = ((7.0, 7.0), (7.0, -7.0), (-7.0, 7.0), (-7.0, -7.0))
    update_rate_hz: float = 50.0
    servo_slew_deg_s: float = 300.0
    body_size_cm: tuple[float, float, float] = (16.0, 16.0, 6.0)
    range_sensor_mount_cm: tuple[float, float, float] = (8.0, 0.0, 2.0)
    behavior: BehaviorParams = field(default_factory=BehaviorParams)

    def __post_init__(self):
        if len(self.attachments) != 4:
            raise ConfigError("a quadruped needs exactly 4 leg attachments")
        if len(self.leg_roots_cm) != 4:
            raise ConfigError("a quadruped needs exactly 4 leg roots")
        if self.body_mass_g < 0:
            raise ConfigError("body mass must be >= 0")
        for att in self.attachments:
            want_elevator = self.topology is LegTopology.THREE_JOINT
            if want_elevator and att.elevator is None:
                raise ConfigError("three-joint legs need an elevator attachment option")
            if not want_elevator and att.elevator is not None:
                raise ConfigError("two-joint legs have no elevator attachment")


def enumerate_attachments(topology: LegTopology) -> list[AttachmentConfig]:
    """All distinct mount configurations for one leg of the given topology.

    The list is exhaustive, duplicate-free, and ordered lexicographically by
    joint option, proximal joint first: 4 entries for two-joint legs, 16
    (4 elevator x 4 knee) for three-joint legs.
    """
    options = sorted(ATTACHMENT_OFFSETS_DEG)
    if topology is LegTopology.TWO_JOINT:
        return [AttachmentConfig(knee=k) for k in options]
    return [AttachmentConfig(knee=k, elevator=e) for e, k in product(options, options)]


def total_mass(config: RobotConfig) -> float:
    """Total build mass in grams: body plus the per-leg link masses.

    The two-joint build counts only the end-effector link per leg; its
    proximal link is part of the body-side structure and is included in
    ``body_mass_g``.  The three-joint build carries both links separately.
    """
    per_leg = config.link_masses.link3_g
    if config.topology is LegTopology.THREE_JOINT:
        per_leg += config.link_masses.link2_g
    return config.body_mass_g + 4 * per_leg


# --- schema-walking helpers -------------------------------------------------

_MISSING = object()


def _require_mapping(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(path, f"expected an object, got {type(value).__name__}")
    return value


def _take(obj: dict, key: str, path: str, default: Any = _MISSING) -> Any:
    if key in obj:
        return obj.pop(key)
    if default is _MISSING:
        raise SchemaError(f"{path}.{key}", "missing required key")
    return default


def _reject_unknown(obj: dict, path: str) -> None:
    if obj:
        raise SchemaError(f"{path}.{sorted(obj)[0]}", "unknown key")


def _number(value: Any, path: str, lo: float | None = None, hi: float | None = None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, f"expected a number, got {type(value).__name__}")
    x = float(value)
    if lo is not None and x < lo:
        raise SchemaError(path, f"value {x} below minimum {lo}")
    if hi is not None and x > hi:
        raise SchemaError(path, f"value {x} above maximum {hi}")
    return x


def _integer(value: Any, path: str, lo: int | None = None, hi: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, f"expected an integer, got {type(value).__name__}")
    if lo is not None and value < lo:
        raise SchemaError(path, f"value {value} below minimum {lo}")
    if hi is not None and value > hi:
        raise SchemaError(path, f"value {value} above maximum {hi}")
    return value


def _string(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(path, f"expected a string, got {type(value).__name__}")
    return value


def _vector(value: Any, path: str, n: int) -> tuple[float, ...]:
    if not isinstance(value, list) or len(value) != n:
        raise SchemaError(path, f"expected a list of {n} numbers")
    return tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(value))


def _parse_attachment(value: Any, path: str, topology: LegTopology) -> AttachmentConfig:
    obj = dict(_require_mapping(value, path))
    knee = _integer(_take(obj, "knee", path), f"{path}.knee", 1, 4)
    elevator = None
    if topology is LegTopology.THREE_JOINT:
        elevator = _integer(_take(obj, "elevator", path), f"{path}.elevator", 1, 4)
    _reject_unknown(obj, path)
    return AttachmentConfig(knee=knee, elevator=elevator)


def _parse_gait(value: Any, path: str) -> GaitParams:
    obj = dict(_require_mapping(value, path))
    base = GaitParams()
    step = _number(_take(obj, "step_length_cm", path, base.step_length_cm), f"{path}.step_length_cm", 0.1)
    height = _number(_take(obj, "step_height_cm", path, base.step_height_cm), f"{path}.step_height_cm", 0.1)
    cycle = _number(_take(obj, "cycle_time_s", path, base.cycle_time_s), f"{path}.cycle_time_s", 0.1)
    shift = _number(_take(obj, "body_shift_cm", path, base.body_shift_cm), f"{path}.body_shift_cm", 0.0)
    order_raw = _take(obj, "stance_order", path, list(base.stance_order))
    if not isinstance(order_raw, list) or sorted(order_raw) != [0, 1, 2, 3]:
        raise SchemaError(f"{path}.stance_order", "must be a permutation of [0, 1, 2, 3]")
    _reject_unknown(obj, path)
    return GaitParams(step, height, cycle, shift, tuple(order_raw))


def _parse_behavior(value: Any, path: str) -> BehaviorParams:
    obj = dict(_require_mapping(value, path))
    base = BehaviorParams()
    params = BehaviorParams(
        obstacle_threshold_m=_number(
            _take(obj, "obstacle_threshold_m", path, base.obstacle_threshold_m), f"{path}.obstacle_threshold_m", 0.0
        ),
        grab_accel_fraction=_number(
            _take(obj, "grab_accel_fraction", path, base.grab_accel_fraction), f"{path}.grab_accel_fraction", 0.0
        ),
        grab_tilt_deg=_number(_take(obj, "grab_tilt_deg", path, base.grab_tilt_deg), f"{path}.grab_tilt_deg", 0.0),
        grab_persist_s=_number(_take(obj, "grab_persist_s", path, base.grab_persist_s), f"{path}.grab_persist_s", 0.0),
        release_persist_s=_number(
            _take(obj, "release_persist_s", path, base.release_persist_s), f"{path}.release_persist_s", 0.0
        ),
        balance_kp=_number(_take(obj, "balance_kp", path, base.balance_kp), f"{path}.balance_kp", 0.0),
        balance_kd=_number(_take(obj, "balance_kd", path, base.balance_kd), f"{path}.balance_kd", 0.0),
        balance_max_step_deg=_number(
            _take(obj, "balance_max_step_deg", path, base.balance_max_step_deg), f"{path}.balance_max_step_deg", 0.0
        ),
        avoid_turn_deg=_number(_take(obj, "avoid_turn_deg", path, base.avoid_turn_deg), f"{path}.avoid_turn_deg", 0.0),
        gait=_parse_gait(_take(obj, "gait", path, {}), f"{path}.gait"),
    )
    _reject_unknown(obj, path)
    return params


def parse_config(text: str) -> RobotConfig:
    """Parse and validate a robot description document.

    Defaults are filled for: ``name``, ``comment`` (empty), ``attachments``
    (option 2, a -45 degree horn offset, on every reconfigurable joint),
    ``legs`` (4), ``leg_roots_cm`` (a +-7 cm square), ``update_rate_hz`` (50),
    ``servo_slew_deg_s`` (300), ``body_size_cm`` (16 x 16 x 6),
    ``range_sensor_mount_cm`` ((8, 0, 2), facing forward) and the whole
    ``behavior`` block.  Unknown keys are rejected anywhere in the document.

    Raises :class:`ConfigSyntaxError` for malformed JSON (with position) and
    :class:`SchemaError` for schema violations (with the key path).  A build
    whose total mass exceeds the carrying limit of its own torque budget gets
    a :class:`MassBudgetWarning`, not an error.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigSyntaxError(exc.msg, exc.lineno, exc.colno) from exc

    obj = dict(_require_mapping(doc, "$"))

    topo_raw = _string(_take(obj, "topology", "$"), "$.topology")
    try:
        topology = LegTopology(topo_raw)
    except ValueError:
        raise SchemaError("$.topology", f"unknown topology {topo_raw!r} (two_joint or three_joint)") from None

    legs = _integer(_take(obj, "legs", "$", 4), "$.legs")
    if legs != 4:
        raise SchemaError("$.legs", f"this stack drives quadrupeds only, got {legs} legs")

    att_default = [
        {"knee": 2} if topology is LegTopology.TWO_JOINT else {"knee": 2, "elevator": 2} for _ in range(4)
    ]
    att_raw = _take(obj, "attachments", "$", att_default)
    if not isinstance(att_raw, list) or len(att_raw) != 4:
        raise SchemaError("$.attachments", "expected a list of 4 per-leg attachment objects")
    attachments = tuple(
        _parse_attachment(a, f"$.attachments[{i}]", topology) for i, a in enumerate(att_raw)
    )

    ll_obj = dict(_require_mapping(_take(obj, "link_lengths", "$"), "$.link_lengths"))
    link_lengths = LinkLengths(
        cog_to_elevator_cm=_number(_take(ll_obj, "cog_to_elevator_cm", "$.link_lengths"), "$.link_lengths.cog_to_elevator_cm", 1e-9),
        elevator_to_knee_cm=_number(_take(ll_obj, "elevator_to_knee_cm", "$.link_lengths"), "$.link_lengths.elevator_to_knee_cm", 1e-9),
        knee_to_foot_cm=_number(_take(ll_obj, "knee_to_foot_cm", "$.link_lengths"), "$.link_lengths.knee_to_foot_cm", 1e-9),
    )
    _reject_unknown(ll_obj, "$.link_lengths")

    lm_obj = dict(_require_mapping(_take(obj, "link_masses", "$"), "$.link_masses"))
    link_masses = LinkMasses(
        link2_g=_number(_take(lm_obj, "link2_g", "$.link_masses"), "$.link_masses.link2_g", 0.0),
        link3_g=_number(_take(lm_obj, "link3_g", "$.link_masses"), "$.link_masses.link3_g", 0.0),
    )
    _reject_unknown(lm_obj, "$.link_masses")

    body_mass_g = _number(_take(obj, "body_mass_g", "$"), "$.body_mass_g", 0.0)

    sv_obj = dict(_require_mapping(_take(obj, "servo", "$"), "$.servo"))
    servo = ServoSpec(
        nominal_torque_ncm=_number(_take(sv_obj, "nominal_torque_ncm", "$.servo"), "$.servo.nominal_torque_ncm", 1e-9),
        angular_range_deg=_number(_take(sv_obj, "angular_range_deg", "$.servo"), "$.servo.angular_range_deg", 1e-9, 360.0),
        pulse_min_us=_number(_take(sv_obj, "pulse_min_us", "$.servo"), "$.servo.pulse_min_us", 0.0),
        pulse_max_us=_number(_take(sv_obj, "pulse_max_us", "$.servo"), "$.servo.pulse_max_us", 0.0),
        current_draw_ma=_number(_take(sv_obj, "servo_current_ma", "$.servo"), "$.servo.servo_current_ma", 0.0),
    )
    if servo.pulse_min_us >= servo.pulse_max_us:
        raise SchemaError("$.servo.pulse_min_us", "must be strictly below pulse_max_us")
    _reject_unknown(sv_obj, "$.servo")

    from quadstack.feasibility import BatteryPack, PowerBudget  # deferred: feasibility imports config types

    el_obj = dict(_require_mapping(_take(obj, "electronics", "$"), "$.electronics"))
    electronics = PowerBudget(
        rail_voltage_v=_number(_take(el_obj, "rail_voltage_v", "$.electronics"), "$.electronics.rail_voltage_v", 1e-9),
        controller_peak_current_a=_number(
            _take(el_obj, "controller_peak_current_a", "$.electronics"), "$.electronics.controller_peak_current_a", 0.0
        ),
        servo_current_a=servo.current_draw_ma / 1000.0,
        servo_count=_integer(_take(el_obj, "servo_count", "$.electronics"), "$.electronics.servo_count", 0),
        converter_count=_integer(_take(el_obj, "converter_count", "$.electronics"), "$.electronics.converter_count", 1),
        converter_max_power_w=_number(
            _take(el_obj, "converter_max_power_w", "$.electronics"), "$.electronics.converter_max_power_w", 1e-9
        ),
    )
    _reject_unknown(el_obj, "$.electronics")

    bt_obj = dict(_require_mapping(_take(obj, "battery", "$"), "$.battery"))
    battery = BatteryPack(
        cell_count_parallel=_integer(_take(bt_obj, "cell_count_parallel", "$.battery"), "$.battery.cell_count_parallel", 1),
        cell_capacity_mah=_number(_take(bt_obj, "cell_capacity_mah", "$.battery"), "$.battery.cell_capacity_mah", 1e-9),
        average_voltage_v=_number(_take(bt_obj, "average_voltage_v", "$.battery"), "$.battery.average_voltage_v", 1e-9),
        converter_efficiency=_number(_take(bt_obj, "converter_efficiency", "$.battery"), "$.battery.converter_efficiency", 1e-9, 1.0),
    )
    _reject_unknown(bt_obj, "$.battery")

    roots_raw = _take(obj, "leg_roots_cm", "$", [[7.0, 7.0], [7.0, -7.0], [-7.0, 7.0], [-7.0, -7.0]])
    if not isinstance(roots_raw, list) or len(roots_raw) != 4:
        raise SchemaError("$.leg_roots_cm", "expected a list of 4 [x, y] pairs")
    leg_roots = tuple(_vector(r, f"$.leg_roots_cm[{i}]", 2) for i, r in enumerate(roots_raw))

    config = RobotConfig(
        topology=topology,
        attachments=attachments,
        link_lengths=link_lengths,
        link_masses=link_masses,
        body_mass_g=body_mass_g,
        servo=servo,
        electronics=electronics,
        battery=battery,
        name=_string(_take(obj, "name", "$", ""), "$.name"),
        comment=_string(_take(obj, "comment", "$", ""), "$.comment"),
        leg_roots_cm=leg_roots,
        update_rate_hz=_number(_take(obj, "update_rate_hz", "$", 50.0), "$.update_rate_hz", 1.0),
        servo_slew_deg_s=_number(_take(obj, "servo_slew_deg_s", "$", 300.0), "$.servo_slew_deg_s", 1e-9),
        body_size_cm=_vector(_take(obj, "body_size_cm", "$", [16.0, 16.0, 6.0]), "$.body_size_cm", 3),
        range_sensor_mount_cm=_vector(
            _take(obj, "range_sensor_mount_cm", "$", [8.0, 0.0, 2.0]), "$.range_sensor_mount_cm", 3
        ),
        behavior=_parse_behavior(_take(obj, "behavior", "$", {}), "$.behavior"),
    )
    _reject_unknown(obj, "$")
    _warn_if_over_budget(config)
    return config


def _warn_if_over_budget(config: RobotConfig) -> None:
    from quadstack import feasibility

    scenario = feasibility.scenario_from_config(config)
    limit = feasibility.max_body_weight(scenario)
    legs = total_mass(config) - config.body_mass_g
    if total_mass(config) > limit + legs:
        warnings.warn(
            f"total mass {total_mass(config):.0f} g exceeds the torque-budget "
            f"carrying limit {limit:.0f} g (+ {legs:.0f} g of leg links)",
            MassBudgetWarning,
            stacklevel=3,
        )


def serialize_config(config: RobotConfig) -> str:
    """Render a config back to its document form (inverse of :func:`parse_config`)."""
    attachments = []
    for att in config.attachments:
        entry: dict[str, int] = {"knee": att.knee}
        if att.elevator is not None:
            entry["elevator"] = att.elevator
        attachments.append(entry)
    doc = {
        "name": config.name,
        "comment": config.comment,
        "topology": config.topology.value,
        "legs": 4,
        "attachments": attachments,
        "link_lengths": {
            "cog_to_elevator_cm": config.link_lengths.cog_to_elevator_cm,
            "elevator_to_knee_cm": config.link_lengths.elevator_to_knee_cm,
            "knee_to_foot_cm": config.link_lengths.knee_to_foot_cm,
        },
        "link_masses": {
            "link2_g": config.link_masses.link2_g,
            "link3_g": config.link_masses.link3_g,
        },
        "body_mass_g": config.body_mass_g,
        "servo": {
            "nominal_torque_ncm": config.servo.nominal_torque_ncm,
            "angular_range_deg": config.servo.angular_range_deg,
            "pulse_min_us": config.servo.pulse_min_us,
            "pulse_max_us": config.servo.pulse_max_us,
            "servo_current_ma": config.servo.current_draw_ma,
        },
        "electronics": {
            "rail_voltage_v": config.electronics.rail_voltage_v,
            "controller_peak_current_a": config.electronics.controller_peak_current_a,
            "servo_count": config.electronics.servo_count,
            "converter_count": config.electronics.converter_count,
            "converter_max_power_w": config.electronics.converter_max_power_w,
        },
        "battery": {
            "cell_count_parallel": config.battery.cell_count_parallel,
            "cell_capacity_mah": config.battery.cell_capacity_mah,
            "average_voltage_v": config.battery.average_voltage_v,
            "converter_efficiency": config.battery.converter_efficiency,
        },
        "leg_roots_cm": [list(r) for r in config.leg_roots_cm],
        "update_rate_hz": config.update_rate_hz,
        "servo_slew_deg_s": config.servo_slew_deg_s,
        "body_size_cm": list(config.body_size_cm),
        "range_sensor_mount_cm": list(config.range_sensor_mount_cm),
        "behavior": {
            "obstacle_threshold_m": config.behavior.obstacle_threshold_m,
            "grab_accel_fraction": config.behavior.grab_accel_fraction,
            "grab_tilt_deg": config.behavior.grab_tilt_deg,
            "grab_persist_s": config.behavior.grab_persist_s,
            "release_persist_s": config.behavior.release_persist_s,
            "balance_kp": config.behavior.balance_kp,
            "balance_kd": config.behavior.balance_kd,
            "balance_max_step_deg": config.behavior.balance_max_step_deg,
            "avoid_turn_deg": config.behavior.avoid_turn_deg,
            "gait": {
                "step_length_cm": config.behavior.gait.step_length_cm,
                "step_height_cm": config.behavior.gait.step_height_cm,
                "cycle_time_s": config.behavior.gait.cycle_time_s,
                "body_shift_cm": config.behavior.gait.body_shift_cm,
                "stance_order": list(config.behavior.gait.stance_order),
            },
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def load_config(path) -> RobotConfig:
    """Read and parse a config file from disk."""
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
