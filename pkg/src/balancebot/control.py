"""Cascaded balance controller: outer wheel-velocity loop, inner angle loop.

The PID recurrence mirrors the original firmware closely, including two
quirks that materially change closed-loop behaviour and are kept on purpose:

* the derivative acts on the measurement, not the error, so target steps do
  not produce derivative kicks;
* the integral accumulator stores ki*e*dt terms directly and is cleared by
  set_target.  The control path re-targets the angle loop every cycle, which
  makes its integral term contribute at most one cycle's worth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

DEG_TO_RAD = math.pi / 180.0

# Angle-loop gains the original hand-tuning arrived at; kept as defaults.
ANGLE_GAINS_DEFAULT = (1150.0, 157.5, 0.12)
VELOCITY_GAINS_DEFAULT = (0.1, 0.002, 0.0005)


@dataclass
class PidGains:
    kp: float
    kd: float
    ki: float


@dataclass
class ControllerConfig:
    """Thresholds and timing of the balance loop."""

    max_accel: float = 200.0                      # rad/s^2, wheel accel clamp
    angle_set_point: float = 2.0 * DEG_TO_RAD     # rad, initial lean target
    warmup_delay_us: int = 5_000_000              # sensor settle time
    engage_threshold: float = math.pi / 18        # rad, |angle err| to engage
    disengage_threshold: float = math.pi / 4      # rad, |angle err| to give up
    control_period_us: int = 1000
    velocity_period_us: int = 100
    smoothing_a: float = 0.99                     # reference low-pass, per cycle
    integral_reset_on_set_target: bool = True

    def __post_init__(self) -> None:
        if self.max_accel <= 0.0:
            raise ValueError("max_accel must be positive")
        if not 0.0 < self.engage_threshold < self.disengage_threshold:
            raise ValueError("need 0 < engage_threshold < disengage_threshold")
        if self.control_period_us <= 0 or self.velocity_period_us <= 0:
            raise ValueError("periods must be positive")
        if self.warmup_delay_us < 0:
            raise ValueError("warmup_delay_us must be >= 0")
        if not 0.0 <= self.smoothing_a < 1.0:
            raise ValueError("smoothing_a must be in [0, 1)")


class Pid:
    """One PID channel.  State: target, last measurement, integral."""

    def __init__(self, gains: PidGains, target: float = 0.0) -> None:
        self.gains = gains
        self.target = target
        self.last_value = 0.0
        self.has_last_value = False
        self.integral_error = 0.0

    def set_target(self, target: float, reset_integral: bool = True) -> None:
        self.target = target
        if reset_integral:
            self.integral_error = 0.0

    def get_control(self, value: float, dt: float) -> float:
        """Control output for one measurement taken dt seconds after the last."""
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        g = self.gains
        last = self.last_value if self.has_last_value else value
        error = self.target - value
        d_error = -(value - last) / dt
        self.integral_error += g.ki * error * dt
        self.last_value = value
        self.has_last_value = True
        return g.kp * error + g.kd * d_error + self.integral_error


class Balancer:
    """Balance state machine plus the velocity integrator feeding the wheels.

    update_control consumes pitch samples and produces a wheel acceleration;
    update_velocity integrates it into a wheel velocity at a faster, fixed
    period.  References arrive raw (ref_velocity/ref_steering) and are
    low-passed into the targets by smooth_references once per control cycle.
    """

    def __init__(
        self,
        cfg: ControllerConfig,
        angle_gains: PidGains,
        velocity_gains: PidGains,
    ) -> None:
        self.cfg = cfg
        self.angle_pid = Pid(angle_gains, target=cfg.angle_set_point)
        self.velocity_pid = Pid(velocity_gains, target=0.0)
        self.is_balancing = False
        self.accel = 0.0            # rad/s^2, wheel
        self.velocity = 0.0         # rad/s, wheel, before steering split
        self.steering = 0.0         # rad/s, wheel differential
        self.target_angle = cfg.angle_set_point
        self.target_velocity = 0.0
        self.ref_velocity = 0.0
        self.ref_steering = 0.0
        self._last_control_us = 0
        self._last_velocity_us = 0

    def update_control(self, angle: float, now_us: int) -> None:
        """Run one balance cycle on a fresh pitch sample.

        No-op during warmup or when called again within the control period.
        The engage window admits the controller near upright; past the
        disengage threshold it gives up and freezes the wheels.
        """
        cfg = self.cfg
        if now_us < cfg.warmup_delay_us:
            return
        if now_us - self._last_control_us < cfg.control_period_us:
            return
        dt = (now_us - self._last_control_us) * 1e-6

        if abs(angle - self.target_angle) < cfg.engage_threshold:
            self.is_balancing = True
        if abs(angle - self.target_angle) > cfg.disengage_threshold:
            self.is_balancing = False
            self.accel = 0.0
            self.velocity = 0.0
        if not self.is_balancing:
            return

        reset = cfg.integral_reset_on_set_target
        self.target_angle = -self.velocity_pid.get_control(self.velocity, dt)
        self.angle_pid.set_target(self.target_angle, reset_integral=reset)
        accel = self.angle_pid.get_control(angle, dt)
        if accel > cfg.max_accel:
            accel = cfg.max_accel
        elif accel < -cfg.max_accel:
            accel = -cfg.max_accel
        self.accel = accel
        self._last_control_us = now_us

    def update_velocity(self, now_us: int) -> tuple[float, float] | None:
        """Integrate accel into wheel velocity; returns (left, right) or None.

        Acts at most once per velocity period; the split applies steering
        differentially: left = v - s, right = v + s.
        """
        if now_us - self._last_velocity_us < self.cfg.velocity_period_us:
            return None
        dt = (now_us - self._last_velocity_us) * 1e-6
        self.velocity += self.accel * dt
        self._last_velocity_us = now_us
        return self.velocity - self.steering, self.velocity + self.steering

    def smooth_references(self) -> None:
        """One smoothing step pulling targets toward the raw references."""
        a = self.cfg.smoothing_a
        b = 1.0 - a
        self.target_velocity = a * self.target_velocity + b * self.ref_velocity
        self.velocity_pid.set_target(
            self.target_velocity, reset_integral=self.cfg.integral_reset_on_set_target
        )
        self.steering = a * self.steering + b * self.ref_steering
