"""Simulator and control library for a two-wheel self-balancing robot."""

from .config import ConfigError, SimConfig, default_config, load_config, save_config
from .control import Balancer, ControllerConfig, Pid, PidGains
from .imu import ImuConfig, ImuModel, SensorReading, calibrate
from .plant import PlantParams, PlantState, apply_disturbance, pitch_accel, step_plant
from .protocol import (
    CommandError,
    MoveCommand,
    TelemetryFrame,
    decode_telemetry,
    encode_telemetry,
    format_echo,
    format_move,
    parse_move,
)
from .simulation import Simulation, Trace, TraceRow, run_simulation
from .stepper import ChannelState, StepperConfig, set_wheel_velocities, tick_isr, ticks_per_pulse

__all__ = [
    "Balancer",
    "ChannelState",
    "CommandError",
    "ConfigError",
    "ControllerConfig",
    "ImuConfig",
    "ImuModel",
    "MoveCommand",
    "Pid",
    "PidGains",
    "PlantParams",
    "PlantState",
    "SensorReading",
    "SimConfig",
    "Simulation",
    "StepperConfig",
    "TelemetryFrame",
    "Trace",
    "TraceRow",
    "apply_disturbance",
    "calibrate",
    "decode_telemetry",
    "default_config",
    "encode_telemetry",
    "format_echo",
    "format_move",
    "load_config",
    "parse_move",
    "pitch_accel",
    "run_simulation",
    "save_config",
    "set_wheel_velocities",
    "step_plant",
    "tick_isr",
    "ticks_per_pulse",
]

__version__ = "0.1.0"
