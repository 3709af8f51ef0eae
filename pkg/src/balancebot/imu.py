"""Pitch sensor model: rate-gated sampling, bias, gaussian noise.

The hardware offsets carried in the config are opaque calibration metadata
for a specific board; they ride along in config files but do not enter the
simulated readings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .plant import PlantState


@dataclass
class ImuConfig:
    sample_rate_hz: float = 200.0
    noise_sigma: float = 0.002       # rad
    pitch_bias: float = 0.0          # rad, constant offset on every reading
    accel_offsets: tuple[int, int, int] = (-5508, -730, 666)
    gyro_offsets: tuple[int, int, int] = (7, 18, -10)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sample_rate_hz <= 0.0:
            raise ValueError("sample_rate_hz must be positive")
        if self.noise_sigma < 0.0:
            raise ValueError("noise_sigma must be >= 0")


@dataclass
class SensorReading:
    pitch: float
    timestamp_us: int


class ImuModel:
    """Sampled pitch sensor.  Same seed and truth give the same readings."""

    def __init__(self, cfg: ImuConfig) -> None:
        self.cfg = cfg
        self.period_us = round(1e6 / cfg.sample_rate_hz)
        self._rng = np.random.default_rng(cfg.seed)
        self.next_due_us = 0

    def sample(self, truth: PlantState, now_us: int) -> SensorReading | None:
        """A new reading, or None until a full sample period has elapsed."""
        if now_us < self.next_due_us:
            return None
        self.next_due_us = now_us + self.period_us
        noise = float(self._rng.normal(0.0, self.cfg.noise_sigma))
        return SensorReading(truth.pitch + self.cfg.pitch_bias + noise, now_us)


def calibrate(readings: list[SensorReading]) -> float:
    """Bias estimate from readings taken while the robot is held level.

    Plain mean of the pitches; store the negated value as the correction.
    """
    if not readings:
        raise ValueError("calibrate needs at least one reading")
    return sum(r.pitch for r in readings) / len(readings)
