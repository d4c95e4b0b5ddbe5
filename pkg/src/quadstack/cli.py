"""Command-line entry point: feasibility reports, simulation runs, enumeration.

Exit codes are part of the contract so CI can gate on them:

* 0 -- success, all checks feasible
* 1 -- usage, config, or scenario error
* 2 -- a feasibility check failed
* 3 -- the simulated body collided with an obstacle

``QUADSTACK_LOG`` sets the log level (e.g. ``QUADSTACK_LOG=INFO``).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from quadstack import data as shipped
from quadstack import feasibility as feas
from quadstack.config import (
    ATTACHMENT_OFFSETS_DEG,
    ConfigError,
    LegTopology,
    RobotConfig,
    enumerate_attachments,
    load_config,
    total_mass,
)
from quadstack.kinematics import LegPose
from quadstack.runner import ScenarioError, ScenarioSpec, run_spec

TOPOLOGY_FLAGS = {"2j": LegTopology.TWO_JOINT, "3j": LegTopology.THREE_JOINT}


def _extended_pose(config: RobotConfig) -> LegPose:
    """Commanded pose whose effective joint angles are all zero (leg straight out)."""
    att = config.attachments[0]
    knee = -att.offset_deg("knee")
    if config.topology is LegTopology.THREE_JOINT:
        return LegPose(0.0, knee, -att.offset_deg("elevator"))
    return LegPose(0.0, knee)


def feasibility_report(config: RobotConfig, body_mass_override_g: float | None = None) -> dict:
    """All feasibility figures for one build, plus the pass/fail verdicts."""
    if body_mass_override_g is not None:
        from dataclasses import replace

        config = replace(config, body_mass_g=body_mass_override_g)
    scenario = feas.scenario_from_config(config)
    limit = feas.max_body_weight(scenario)
    mass = total_mass(config)
    torques = feas.static_joint_torques(config, _extended_pose(config), 0.25)
    watts, headroom = feas.peak_power(config.electronics)
    minutes = feas.autonomy_minutes(config.battery, watts)
    mass_ok = mass <= limit
    return {
        "config": config.name,
        "total_mass_g": mass,
        "max_body_weight_g": limit,
        "published_max_body_weight_g": feas.PUBLISHED_MAX_BODY_WEIGHT_G,
        "moment_arms_cm": {
            "d1": scenario.d1_cm,
            "d2": scenario.d2_cm,
            "d3": scenario.d3_cm,
            "d4": scenario.d4_cm,
        },
        "mass_within_limit": mass_ok,
        "worst_case_joint_torques_ncm": torques.torques_ncm,
        "joint_torques_within_nominal": torques.feasible,
        "servo_nominal_torque_ncm": config.servo.nominal_torque_ncm,
        "peak_power_w": watts,
        "converter_capacity_w": config.electronics.converter_count
        * config.electronics.converter_max_power_w,
        "power_headroom": headroom,
        "autonomy_minutes": minutes,
        "feasible": bool(mass_ok and headroom),
    }


def _print_feasibility_text(report: dict) -> None:
    def verdict(ok: bool) -> str:
        return "OK" if ok else "FAIL"

    arms = report["moment_arms_cm"]
    print(f"feasibility report: {report['config'] or '(unnamed build)'}")
    print("  mechanics:")
    print(f"    total mass:          {report['total_mass_g']:.1f} g")
    print(
        f"    max body weight:     {report['max_body_weight_g']:.1f} g"
        f"   [{verdict(report['mass_within_limit'])}]"
    )
    print(
        f"    published limit:     {report['published_max_body_weight_g']:.0f} g"
        " (worst-case figure for the reference design; its moment arms come from"
    )
    print(
        "                         the original force diagram and are not recoverable from the"
    )
    print(
        f"                         link lengths alone -- the computed limit above uses mid-link"
        f" arms d1={arms['d1']:.2f} d2={arms['d2']:.2f} d3={arms['d3']:.2f} d4={arms['d4']:.2f} cm)"
    )
    print("    worst-case joint torques, legs extended, 1/4 body weight (conservative")
    print("    per-joint budget; informational, not gating):")
    for joint, t in report["worst_case_joint_torques_ncm"].items():
        flag = "OK" if t <= report["servo_nominal_torque_ncm"] else "over nominal"
        print(f"      {joint:9s} {t:6.2f} N*cm / {report['servo_nominal_torque_ncm']:.1f}   [{flag}]")
    print("  power:")
    print(
        f"    peak power:          {report['peak_power_w']:.2f} W"
        f" (converters {report['converter_capacity_w']:.1f} W)   [{verdict(report['power_headroom'])}]"
    )
    print(f"    autonomy at peak:    {report['autonomy_minutes']:.1f} min")
    print(f"  feasible: {'yes' if report['feasible'] else 'NO'}")


def cmd_feasibility(args: argparse.Namespace) -> int:
    try:
        config = load_config(shipped.resolve(args.config, "config"))
        report = feasibility_report(config, args.body_mass_g)
    except (ConfigError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        _print_feasibility_text(report)
    return 0 if report["feasible"] else 2


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        spec = ScenarioSpec(
            config_path=str(shipped.resolve(args.config, "config")),
            scenario_path=str(shipped.resolve(args.scenario, "scenario")),
            trace_path=args.trace,
            duration_s=args.duration,
            seed=args.seed,
            initial_state=args.initial_state,
        )
        summary = run_spec(spec)
    except (ConfigError, ScenarioError, FileNotFoundError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(summary.to_dict(), indent=2))
    else:
        print(summary.text())
        print(f"  trace:               {args.trace}")
    return 3 if summary.collisions > 0 else 0


def cmd_enumerate(args: argparse.Namespace) -> int:
    topology = TOPOLOGY_FLAGS[args.topology]
    rows = enumerate_attachments(topology)
    for i, att in enumerate(rows, start=1):
        parts = []
        if att.elevator is not None:
            parts.append(f"elevator={att.elevator} ({ATTACHMENT_OFFSETS_DEG[att.elevator]:+.0f} deg)")
        parts.append(f"knee={att.knee} ({ATTACHMENT_OFFSETS_DEG[att.knee]:+.0f} deg)")
        print(f"{i:3d}: " + ", ".join(parts))
    print(f"{len(rows)} configurations")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadstack",
        description="Feasibility math, kinematic simulation, and behaviors for the LoCoQuad quadruped.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_feas = sub.add_parser("feasibility", help="torque and power budget report for a build")
    p_feas.add_argument("--config", required=True, help="config file path or shipped name")
    p_feas.add_argument("--json", action="store_true", help="machine-readable output")
    p_feas.add_argument(
        "--body-mass-g", type=float, default=None, help="override the config's body mass"
    )
    p_feas.set_defaults(func=cmd_feasibility)

    p_sim = sub.add_parser("simulate", help="run a scenario and write a JSONL trace")
    p_sim.add_argument("--config", required=True, help="config file path or shipped name")
    p_sim.add_argument("--scenario", required=True, help="scenario file path or shipped name")
    p_sim.add_argument("--duration", type=float, default=None, help="override duration in seconds")
    p_sim.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_sim.add_argument("--initial-state", default=None, help="override the initial behavior state")
    p_sim.add_argument("--trace", required=True, help="output JSONL trace path")
    p_sim.add_argument("--json", action="store_true", help="machine-readable summary")
    p_sim.set_defaults(func=cmd_simulate)

    p_enum = sub.add_parser("enumerate", help="list the leg attachment configurations")
    p_enum.add_argument("--topology", required=True, choices=sorted(TOPOLOGY_FLAGS))
    p_enum.set_defaults(func=cmd_enumerate)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("QUADSTACK_LOG", "WARNING").upper())
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
