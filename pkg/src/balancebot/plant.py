"""Rigid-body model of a two-wheel balancing robot on stepper-driven wheels.

The robot is treated as an inverted pendulum whose base is kinematically
commanded: wheel steps arrive as discrete events and the base velocity is
whatever the steppers realize.  Pitch reacts to base acceleration, which is
recovered by differencing a low-passed base velocity so that the step pulse
train does not inject unbounded jerk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

TAU = 2.0 * math.pi

# Default wheel step size, full-step 200*8 microstep drivers.
DEFAULT_STEP_ANGLE = TAU / 1600.0

# Time constant of the single-pole filter applied to base velocity before the
# backward difference that produces base acceleration.
ACCEL_FILTER_TAU_S = 0.005


@dataclass
class PlantParams:
    """Physical constants of the robot."""

    gravity: float = 9.81          # m/s^2
    body_length: float = 0.10      # m, pivot to centre of mass
    wheel_radius: float = 0.05     # m
    track_width: float = 0.20      # m, wheel-to-wheel
    max_tilt: float = math.pi / 2  # rad, |pitch| at which the robot is down

    def __post_init__(self) -> None:
        if self.gravity <= 0.0:
            raise ValueError("gravity must be positive")
        if self.body_length <= 0.0 or self.wheel_radius <= 0.0 or self.track_width <= 0.0:
            raise ValueError("lengths must be positive")
        if not 0.0 < self.max_tilt <= math.pi:
            raise ValueError("max_tilt must be in (0, pi]")


@dataclass
class PlantState:
    """Complete pose of the robot.

    ``base_velocity`` is the low-pass filter state used for the acceleration
    estimate; it is part of the state so that stepping is a pure function of
    (state, inputs).
    """

    pitch: float = 0.0             # rad, positive = forward lean
    pitch_rate: float = 0.0        # rad/s
    wheel_angle_left: float = 0.0  # rad, cumulative
    wheel_angle_right: float = 0.0
    heading: float = 0.0           # rad, yaw
    pos_x: float = 0.0             # m
    pos_y: float = 0.0
    fallen: bool = False
    time_us: int = 0
    base_velocity: float = 0.0     # m/s, smoothed


def pitch_accel(pitch: float, base_accel: float, params: PlantParams) -> float:
    """Angular acceleration of the body for a given base acceleration.

    Kinematic-base pendulum: theta_dd = (g*sin(theta) - a*cos(theta)) / L.
    """
    return (params.gravity * math.sin(pitch) - base_accel * math.cos(pitch)) / params.body_length


def step_plant(
    state: PlantState,
    params: PlantParams,
    steps_left: int,
    steps_right: int,
    dt: float,
    step_angle: float = DEFAULT_STEP_ANGLE,
) -> None:
    """Advance the plant by one integration window of dt seconds.

    steps_left/steps_right are signed step counts realized during the window.
    Integration is semi-implicit Euler: rate first, then angle.  Once fallen
    the pose is frozen and only time advances.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")

    dt_us = round(dt * 1e6)
    if state.fallen:
        state.time_us += dt_us
        return

    if steps_left or steps_right:
        w_left = steps_left * step_angle / dt
        w_right = steps_right * step_angle / dt
        state.wheel_angle_left += steps_left * step_angle
        state.wheel_angle_right += steps_right * step_angle
        v_raw = params.wheel_radius * 0.5 * (w_left + w_right)
        yaw_rate = params.wheel_radius * (w_right - w_left) / params.track_width
    else:
        v_raw = 0.0
        yaw_rate = 0.0

    # One-pole smoothing, then backward difference for base acceleration.
    alpha = dt / (ACCEL_FILTER_TAU_S + dt)
    v_new = state.base_velocity + alpha * (v_raw - state.base_velocity)
    base_accel = (v_new - state.base_velocity) / dt
    state.base_velocity = v_new

    accel = pitch_accel(state.pitch, base_accel, params)
    state.pitch_rate += accel * dt
    state.pitch += state.pitch_rate * dt

    if steps_left or steps_right:
        state.heading += yaw_rate * dt
        state.pos_x += v_raw * math.cos(state.heading) * dt
        state.pos_y += v_raw * math.sin(state.heading) * dt

    state.time_us += dt_us

    if abs(state.pitch) >= params.max_tilt:
        state.pitch = params.max_tilt if state.pitch > 0.0 else -params.max_tilt
        state.pitch_rate = 0.0
        state.fallen = True


def apply_disturbance(state: PlantState, impulse: float) -> None:
    """Kick the body: add an instantaneous pitch-rate impulse (rad/s).

    No effect once the robot is down.
    """
    if state.fallen:
        return
    state.pitch_rate += impulse
