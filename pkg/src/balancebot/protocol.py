"""Wire protocol: teleop command lines in, telemetry JSON lines out.

Command grammar (one line per command, no terminator):

    mov<velocity>,<steering>   set references, floats in rad/s
    xxxxx                      keep-alive, ignored
    anything else              ignored

Malformed mov lines raise CommandError; callers answer with an error line
and keep running.  Telemetry frames are single-line JSON objects with floats
rounded to six significant digits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

MAX_VELOCITY = 10.0  # rad/s
MAX_STEERING = 5.0   # rad/s

KEEPALIVE = "xxxxx"

_TELEMETRY_FIELDS = (
    "timeUs", "pitch", "targetAngle", "velocity", "targetVelocity",
    "steering", "accel", "isBalancing", "fallen", "posX", "posY", "heading",
)


class CommandError(ValueError):
    """Malformed mov command or telemetry line."""


@dataclass(frozen=True)
class MoveCommand:
    ref_velocity: float  # rad/s, wheel
    ref_steering: float  # rad/s, wheel differential


@dataclass(frozen=True)
class TelemetryFrame:
    time_us: int
    pitch: float
    target_angle: float
    velocity: float
    target_velocity: float
    steering: float
    accel: float
    is_balancing: bool
    fallen: bool
    pos_x: float
    pos_y: float
    heading: float


def _clamp(value: float, limit: float) -> float:
    if value > limit:
        return limit
    if value < -limit:
        return -limit
    return value


def parse_move(
    line: str,
    max_velocity: float = MAX_VELOCITY,
    max_steering: float = MAX_STEERING,
) -> MoveCommand | None:
    """Classify one command line.

    Returns a clamped MoveCommand for mov lines, None for ignored lines
    (keep-alives and unknown commands), and raises CommandError for mov
    lines whose payload does not parse.  Never anything else.
    """
    if line == KEEPALIVE:
        return None
    if not line.startswith("mov"):
        return None
    payload = line[3:]
    if "," not in payload:
        raise CommandError(f"mov needs two comma-separated floats: {line!r}")
    # Take the first two fields; trailing junk after a second comma is
    # tolerated just as the firmware tolerated it.
    parts = payload.split(",")
    try:
        velocity = float(parts[0])
        steering = float(parts[1])
    except ValueError as exc:
        raise CommandError(f"bad mov floats: {line!r}") from exc
    if not (math.isfinite(velocity) and math.isfinite(steering)):
        raise CommandError(f"non-finite mov values: {line!r}")
    return MoveCommand(_clamp(velocity, max_velocity), _clamp(steering, max_steering))


def format_move(cmd: MoveCommand) -> str:
    """Command line for a move, two decimals: mov1.50,-0.50"""
    return f"mov{cmd.ref_velocity:.2f},{cmd.ref_steering:.2f}"


def format_echo(cmd: MoveCommand) -> str:
    """Echo line confirming accepted references: x1.50,-0.50"""
    return f"x{cmd.ref_velocity:.2f},{cmd.ref_steering:.2f}"


def _round6(value: float) -> float:
    return float(f"{value:.6g}")


def encode_telemetry(frame: TelemetryFrame) -> str:
    """One-line JSON for a frame, floats at six significant digits."""
    doc = {
        "timeUs": frame.time_us,
        "pitch": _round6(frame.pitch),
        "targetAngle": _round6(frame.target_angle),
        "velocity": _round6(frame.velocity),
        "targetVelocity": _round6(frame.target_velocity),
        "steering": _round6(frame.steering),
        "accel": _round6(frame.accel),
        "isBalancing": frame.is_balancing,
        "fallen": frame.fallen,
        "posX": _round6(frame.pos_x),
        "posY": _round6(frame.pos_y),
        "heading": _round6(frame.heading),
    }
    return json.dumps(doc, separators=(",", ":"))


def decode_telemetry(text: str) -> TelemetryFrame:
    """Parse a telemetry line; raises CommandError on anything malformed."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CommandError(f"bad telemetry JSON: {text!r}") from exc
    if not isinstance(doc, dict):
        raise CommandError("telemetry line is not an object")
    missing = [k for k in _TELEMETRY_FIELDS if k not in doc]
    if missing:
        raise CommandError(f"telemetry missing fields: {missing}")
    try:
        return TelemetryFrame(
            time_us=int(doc["timeUs"]),
            pitch=float(doc["pitch"]),
            target_angle=float(doc["targetAngle"]),
            velocity=float(doc["velocity"]),
            target_velocity=float(doc["targetVelocity"]),
            steering=float(doc["steering"]),
            accel=float(doc["accel"]),
            is_balancing=bool(doc["isBalancing"]),
            fallen=bool(doc["fallen"]),
            pos_x=float(doc["posX"]),
            pos_y=float(doc["posY"]),
            heading=float(doc["heading"]),
        )
    except (TypeError, ValueError) as exc:
        raise CommandError(f"bad telemetry field types: {text!r}") from exc
