"""Staged gain search mechanizing the hand-tuning recipe.

The search tunes one term at a time, in the order a person does it on the
bench:

* Stage 1 sweeps the angle Kp alone (velocity loop off) and keeps every Kp
  that swings the robot back past upright: too little P and it never comes
  back, it just drifts off and falls.
* Stage 2 sweeps Kd for a candidate Kp and requires the robot to stay up
  for the whole scenario, picking the Kd with the quietest pitch.  P alone
  oscillates with growing amplitude; D is what turns that into balance.
* Stage 3 turns the velocity loop on (scaled around its defaults), sweeps
  the angle Ki jointly with that scale, and picks the survivor with the
  least position drift.

If a later stage finds no surviving gain for the current Kp, the search
moves to the next Kp candidate and repeats; a Kp can keep the robot up in
isolation yet be too weak once the velocity loop loads it.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .config import SimConfig, default_config
from .control import PidGains, VELOCITY_GAINS_DEFAULT
from .simulation import Simulation, Trace, run_simulation

RECOVERY_BAND = math.pi / 18  # rad, same window that engages the controller

KP_GRID_DEFAULT = tuple(np.geomspace(10.0, 1e5, 32))
KD_POINTS_DEFAULT = 32
KI_GRID_DEFAULT = (0.0,) + tuple(np.geomspace(1e-3, 1e2, 16))
VELOCITY_SCALES_DEFAULT = tuple(np.geomspace(0.1, 10.0, 5))


class TunerError(RuntimeError):
    """No swept gain kept the robot upright."""


@dataclass
class RunMetrics:
    fallen: bool
    settle_time_s: float | None   # first time the pitch stays in band to the end
    oscillation_amp: float        # rad, std of pitch over the final half
    drift_m: float | None         # |x| at the end; None when unknown (replays)
    crossed_upright: bool         # pitch changed sign at least once


def compute_metrics(
    trace: Trace,
    set_point: float,
    fallen: bool,
    final_pos_x: float | None,
) -> RunMetrics:
    """Scalar summary of one run.  Works on truncated (fallen) traces too."""
    rows = trace.rows
    if not rows:
        return RunMetrics(fallen, None, 0.0,
                          abs(final_pos_x) if final_pos_x is not None else None, False)
    pitches = np.array([r.pitch for r in rows])
    crossed = bool(np.any(pitches[:-1] * pitches[1:] < 0.0)) if len(pitches) > 1 else False
    oscillation = float(np.std(pitches[len(pitches) // 2:]))

    settle: float | None = None
    if not fallen:
        outside = np.abs(pitches - set_point) >= RECOVERY_BAND
        if not outside[-1]:
            last_bad = int(np.nonzero(outside)[0][-1]) if outside.any() else -1
            settle = rows[last_bad + 1].time_s
    drift = abs(final_pos_x) if final_pos_x is not None else None
    return RunMetrics(fallen, settle, oscillation, drift, crossed)


def make_scenario(seed: int = 1, duration_s: float = 10.0) -> SimConfig:
    """The standard tuning scenario: 5 degree tilt, noisy sensor, no warmup."""
    cfg = default_config()
    cfg.controller = dataclasses.replace(cfg.controller, warmup_delay_us=0)
    cfg.imu = dataclasses.replace(cfg.imu, noise_sigma=0.002)
    cfg.initial_pitch = 5.0 * math.pi / 180.0
    cfg.duration_s = duration_s
    cfg.seed = seed
    return cfg


def evaluate_gains(
    angle_gains: PidGains,
    velocity_gains: PidGains,
    scenario: SimConfig,
    disturbances: Sequence[tuple[int, float]] = (),
) -> RunMetrics:
    """Run the scenario once with the given gains and summarize it.

    Deterministic: the same gains, scenario and seed always give the same
    metrics.  Runs stop early once the robot is down.
    """
    cfg = dataclasses.replace(scenario, angle_gains=angle_gains, velocity_gains=velocity_gains)
    sim = run_simulation(cfg, disturbances=disturbances, stop_when_fallen=True)
    return compute_metrics(
        sim.trace, cfg.controller.angle_set_point, sim.plant.fallen, sim.plant.pos_x
    )


@dataclass
class TuneReport:
    angle_gains: PidGains
    velocity_gains: PidGains
    metrics: RunMetrics
    trial_count: int
    seed: int
    stages: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "angle_gains": dataclasses.asdict(self.angle_gains),
            "velocity_gains": dataclasses.asdict(self.velocity_gains),
            "metrics": dataclasses.asdict(self.metrics),
            "trial_count": self.trial_count,
            "seed": self.seed,
            "stages": self.stages,
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "TuneReport":
        return cls(
            angle_gains=PidGains(**doc["angle_gains"]),
            velocity_gains=PidGains(**doc["velocity_gains"]),
            metrics=RunMetrics(**doc["metrics"]),
            trial_count=int(doc["trial_count"]),
            seed=int(doc["seed"]),
            stages=dict(doc.get("stages", {})),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "TuneReport":
        return cls.from_dict(json.loads(Path(path).read_text()))


def tune_gains(
    scenario: SimConfig,
    kp_grid: Sequence[float] = KP_GRID_DEFAULT,
    kd_points: int = KD_POINTS_DEFAULT,
    ki_grid: Sequence[float] = KI_GRID_DEFAULT,
    velocity_scales: Sequence[float] = VELOCITY_SCALES_DEFAULT,
) -> TuneReport:
    """Full staged search; returns the report or raises TunerError."""
    vel_off = PidGains(0.0, 0.0, 0.0)
    vel_base = VELOCITY_GAINS_DEFAULT
    trials = 0

    # Stage 1: Kp values that bring the robot back through upright.
    candidates = []
    for kp in kp_grid:
        m = evaluate_gains(PidGains(kp, 0.0, 0.0), vel_off, scenario)
        trials += 1
        if m.crossed_upright:
            candidates.append(float(kp))
    if not candidates:
        raise TunerError("no Kp in the grid recovers past upright")

    for kp in candidates:
        # Stage 2: damp the oscillation; survivor with the quietest pitch.
        best_kd = None
        best_osc = math.inf
        for kd in np.linspace(0.0, kp / 2.0, kd_points):
            m = evaluate_gains(PidGains(kp, float(kd), 0.0), vel_off, scenario)
            trials += 1
            if not m.fallen and m.oscillation_amp < best_osc:
                best_kd = float(kd)
                best_osc = m.oscillation_amp
        if best_kd is None:
            continue

        # Stage 3: velocity loop on, Ki and velocity scale; least drift wins.
        best = None
        for scale in velocity_scales:
            vel = PidGains(vel_base[0] * scale, vel_base[1] * scale, vel_base[2] * scale)
            for ki in ki_grid:
                m = evaluate_gains(PidGains(kp, best_kd, float(ki)), vel, scenario)
                trials += 1
                if m.fallen or m.drift_m is None:
                    continue
                if best is None or m.drift_m < best[0]:
                    best = (m.drift_m, float(ki), float(scale), vel)
        if best is None:
            continue

        _, ki, scale, vel = best
        angle = PidGains(kp, best_kd, ki)
        final = evaluate_gains(angle, vel, scenario)
        trials += 1
        return TuneReport(
            angle_gains=angle,
            velocity_gains=vel,
            metrics=final,
            trial_count=trials,
            seed=scenario.seed,
            stages={"kp": kp, "kd": best_kd, "ki": ki, "velocity_scale": scale},
        )

    raise TunerError("no swept gain combination kept the robot upright")


def disturbance_sweep(
    angle_gains: PidGains,
    velocity_gains: PidGains,
    scenario: SimConfig,
    at_s: float = 2.0,
    window_s: float = 3.0,
    precision: float = 0.01,
) -> float:
    """Largest pitch-rate impulse (rad/s) the loop absorbs.

    The impulse fires at at_s; the robot recovers if it is upright and back
    inside the engage band when the window closes.  Bisection narrows the
    boundary to the given precision.
    """
    cfg = dataclasses.replace(
        scenario,
        angle_gains=angle_gains,
        velocity_gains=velocity_gains,
        duration_s=at_s + window_s,
    )
    at_us = round(at_s * 1e6)
    set_point = cfg.controller.angle_set_point

    def recovers(impulse: float) -> bool:
        sim = run_simulation(cfg, disturbances=[(at_us, impulse)], stop_when_fallen=True)
        if sim.plant.fallen:
            return False
        return abs(sim.trace.rows[-1].pitch - set_point) < RECOVERY_BAND

    if not recovers(0.0):
        return 0.0
    lo, hi = 0.0, 0.25
    while recovers(hi):
        lo = hi
        hi *= 2.0
        if hi > 200.0:
            return lo
    while hi - lo > precision:
        mid = 0.5 * (lo + hi)
        if recovers(mid):
            lo = mid
        else:
            hi = mid
    return lo
