"""Shipped reference configs and scenario files."""

from importlib import resources
from pathlib import Path

CONFIG_NAMES = ("locoquad-2j", "locoquad-3j")
SCENARIO_NAMES = ("walk-10s", "turn-90", "obstacle-corridor", "balance-two-legs", "grab-startup")


def _path(subdir: str, name: str) -> Path:
    candidate = resources.files(__package__) / subdir / f"{name}.json"
    return Path(str(candidate))


def config_path(name: str) -> Path:
    """Filesystem path of a shipped robot config (e.g. ``locoquad-2j``)."""
    if name not in CONFIG_NAMES:
        raise KeyError(f"unknown shipped config {name!r}; have {CONFIG_NAMES}")
    return _path("configs", name)


def scenario_path(name: str) -> Path:
    """Filesystem path of a shipped scenario (e.g. ``walk-10s``)."""
    if name not in SCENARIO_NAMES:
        raise KeyError(f"unknown shipped scenario {name!r}; have {SCENARIO_NAMES}")
    return _path("scenarios", name)


def resolve(path_or_name: str, kind: str) -> Path:
    """Accept either a real file path or a shipped name."""
    p = Path(path_or_name)
    if p.exists():
        return p
    stem = p.stem if p.suffix else path_or_name
    if kind == "config" and stem in CONFIG_NAMES:
        return config_path(stem)
    if kind == "scenario" and stem in SCENARIO_NAMES:
        return scenario_path(stem)
    raise FileNotFoundError(f"no such {kind} file or shipped name: {path_or_name}")
