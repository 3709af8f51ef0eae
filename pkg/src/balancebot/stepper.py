"""Stepper pulse timing: velocity commands to discrete step events.

Reproduces the integer pulse scheduler of the firmware's 50 kHz timer
interrupt, including its floor bias: the tick count per pulse is truncated,
so realized wheel speed runs slightly above the command (about 4 percent at
one rev/s with default settings).  That bias is part of the modelled plant,
not something to correct here.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

logger = logging.getLogger(__name__)

TAU = 2.0 * math.pi


@dataclass
class StepperConfig:
    ppr: int = 1600                  # pulses (steps) per wheel revolution
    ticks_per_second: int = 50_000   # timer interrupt rate
    pulse_width: int = 1             # ticks the step line is held high
    disable_below: float = 1e-3      # rad/s, commands under this stop the channel

    def __post_init__(self) -> None:
        if self.ppr <= 0 or self.ticks_per_second <= 0:
            raise ValueError("ppr and ticks_per_second must be positive")
        if self.pulse_width < 1:
            raise ValueError("pulse_width must be >= 1")
        if self.disable_below < 0.0:
            raise ValueError("disable_below must be >= 0")

    @property
    def min_ticks_per_pulse(self) -> int:
        return self.pulse_width + 1


@dataclass
class ChannelState:
    """Per-wheel scheduler state.  ticks_per_pulse None means disabled."""

    current_tick: int = 0
    ticks_per_pulse: int | None = None
    direction: int = 1  # +1 forward, -1 reverse


def ticks_per_pulse(velocity: float, cfg: StepperConfig) -> int | None:
    """Timer ticks between step pulses for a wheel velocity in rad/s.

    Returns None (disabled) for commands below the cutoff.  The firmware
    divides tick rate by pulse rate, truncates, then subtracts the pulse
    width; results under the schedulable minimum clamp up.
    """
    if abs(velocity) < cfg.disable_below:
        return None
    raw = int(math.floor(TAU * cfg.ticks_per_second / (abs(velocity) * cfg.ppr))) - cfg.pulse_width
    if raw < cfg.min_ticks_per_pulse:
        logger.debug("ticks_per_pulse clamped: v=%g raw=%d min=%d", velocity, raw, cfg.min_ticks_per_pulse)
        return cfg.min_ticks_per_pulse
    return raw


def set_wheel_velocities(
    left_velocity: float,
    right_velocity: float,
    left: ChannelState,
    right: ChannelState,
    cfg: StepperConfig,
) -> None:
    """Load both channels with new velocity commands.

    Direction follows the sign; an exactly-zero command keeps the previous
    direction (the channel is disabled then anyway).
    """
    for v, ch in ((left_velocity, left), (right_velocity, right)):
        ch.ticks_per_pulse = ticks_per_pulse(v, cfg)
        if v > 0.0:
            ch.direction = 1
        elif v < 0.0:
            ch.direction = -1


def _tick_channel(ch: ChannelState) -> int:
    if ch.ticks_per_pulse is None:
        return 0
    if ch.current_tick >= ch.ticks_per_pulse:
        ch.current_tick = 0
    step = ch.direction if ch.current_tick == 0 else 0
    ch.current_tick += 1
    return step


def tick_isr(left: ChannelState, right: ChannelState) -> tuple[int, int]:
    """One timer tick; returns signed step events (0 or +/-1) per wheel.

    A pulse fires whenever a channel's counter wraps to zero, so a freshly
    loaded channel steps on its first tick.  Disabled channels hold their
    counters and emit nothing.
    """
    return _tick_channel(left), _tick_channel(right)
