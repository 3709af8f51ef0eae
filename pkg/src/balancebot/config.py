"""Simulation configuration: one JSON document covering every subsystem.

The top-level seed drives the sensor noise stream; ImuConfig.seed only
matters for a standalone ImuModel.  Field names in the JSON match the
dataclass fields one for one, with the two gain sets nested under "gains".
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .control import (
    ANGLE_GAINS_DEFAULT,
    VELOCITY_GAINS_DEFAULT,
    ControllerConfig,
    PidGains,
)
from .imu import ImuConfig
from .plant import PlantParams
from .stepper import StepperConfig


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


@dataclass
class SimConfig:
    plant: PlantParams = field(default_factory=PlantParams)
    imu: ImuConfig = field(default_factory=ImuConfig)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    angle_gains: PidGains = field(default_factory=lambda: PidGains(*ANGLE_GAINS_DEFAULT))
    velocity_gains: PidGains = field(default_factory=lambda: PidGains(*VELOCITY_GAINS_DEFAULT))
    stepper: StepperConfig = field(default_factory=StepperConfig)
    initial_pitch: float = 0.0     # rad
    realtime: bool = False
    duration_s: float = 10.0
    telemetry_rate_hz: float = 50.0
    seed: int = 0


def default_config() -> SimConfig:
    return SimConfig()


def validate_config(cfg: SimConfig) -> None:
    """Cross-field checks; per-type invariants run in the dataclasses."""
    if cfg.duration_s <= 0.0:
        raise ConfigError("duration_s must be positive")
    if cfg.telemetry_rate_hz <= 0.0:
        raise ConfigError("telemetry_rate_hz must be positive")
    if abs(cfg.initial_pitch) >= cfg.plant.max_tilt:
        raise ConfigError("initial_pitch must start inside the tilt limit")
    if 1_000_000 % cfg.stepper.ticks_per_second != 0:
        raise ConfigError("ticks_per_second must divide 1e6 for an integer tick")
    tick_us = 1_000_000 // cfg.stepper.ticks_per_second
    if cfg.controller.velocity_period_us % tick_us or cfg.controller.control_period_us % tick_us:
        raise ConfigError("controller periods must be multiples of the master tick")


def config_to_dict(cfg: SimConfig) -> dict[str, Any]:
    return {
        "plant": dataclasses.asdict(cfg.plant),
        "imu": dataclasses.asdict(cfg.imu),
        "controller": dataclasses.asdict(cfg.controller),
        "gains": {
            "angle": dataclasses.asdict(cfg.angle_gains),
            "velocity": dataclasses.asdict(cfg.velocity_gains),
        },
        "stepper": dataclasses.asdict(cfg.stepper),
        "initial_pitch": cfg.initial_pitch,
        "realtime": cfg.realtime,
        "duration_s": cfg.duration_s,
        "telemetry_rate_hz": cfg.telemetry_rate_hz,
        "seed": cfg.seed,
    }


def _build(cls, doc: Any, where: str):
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be an object")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown {where} fields: {sorted(unknown)}")
    fixed = dict(doc)
    for key in ("accel_offsets", "gyro_offsets"):
        if key in fixed and isinstance(fixed[key], list):
            fixed[key] = tuple(fixed[key])
    try:
        return cls(**fixed)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {where}: {exc}") from exc


def config_from_dict(doc: dict[str, Any]) -> SimConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    known = {
        "plant", "imu", "controller", "gains", "stepper",
        "initial_pitch", "realtime", "duration_s", "telemetry_rate_hz", "seed",
    }
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")

    cfg = SimConfig()
    if "plant" in doc:
        cfg.plant = _build(PlantParams, doc["plant"], "plant")
    if "imu" in doc:
        cfg.imu = _build(ImuConfig, doc["imu"], "imu")
    if "controller" in doc:
        cfg.controller = _build(ControllerConfig, doc["controller"], "controller")
    if "gains" in doc:
        gains = doc["gains"]
        if not isinstance(gains, dict):
            raise ConfigError("gains must be an object")
        if "angle" in gains:
            cfg.angle_gains = _build(PidGains, gains["angle"], "gains.angle")
        if "velocity" in gains:
            cfg.velocity_gains = _build(PidGains, gains["velocity"], "gains.velocity")
    for name in ("initial_pitch", "duration_s", "telemetry_rate_hz"):
        if name in doc:
            try:
                setattr(cfg, name, float(doc[name]))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad {name}: {doc[name]!r}") from exc
    if "stepper" in doc:
        cfg.stepper = _build(StepperConfig, doc["stepper"], "stepper")
    if "realtime" in doc:
        cfg.realtime = bool(doc["realtime"])
    if "seed" in doc:
        if not isinstance(doc["seed"], int):
            raise ConfigError("seed must be an integer")
        cfg.seed = doc["seed"]
    validate_config(cfg)
    return cfg


def load_config(path: str | Path) -> SimConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return config_from_dict(doc)


def save_config(cfg: SimConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2) + "\n")
