"""Clocked composition of plant, stepper, sensor and controller.

Everything shares one master clock at the stepper tick rate (20 us at the
default 50 kHz).  Within a tick the order is fixed:

  1. control-period boundary: apply queued commands, smooth references
  2. velocity-period boundary: update_velocity -> set_wheel_velocities
  3. sensor due: sample -> update_control (controller sees the mirrored sign)
  4. control-period boundary: append a trace row
  5. telemetry boundary: emit a frame
  6. timer ISR emits step events
  7. plant integrates the step events

The loop body inlines the per-tick plant and ISR arithmetic for speed; the
operations and their order are exactly those of step_plant and tick_isr, so
a composed reference run produces bit-identical state.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import replace
from pathlib import Path
from typing import Iterable, NamedTuple, TextIO

from .config import SimConfig, validate_config
from .control import Balancer
from .imu import ImuModel
from .plant import ACCEL_FILTER_TAU_S, PlantState, TAU
from .protocol import CommandError, TelemetryFrame, format_echo, parse_move
from .stepper import ChannelState, ticks_per_pulse

# The sensor is mounted with its pitch axis opposing the chassis forward
# axis: a forward lean lowers the reading.  The control law needs this
# orientation to push the wheels toward the fall, mirroring how the original
# robot's sensor happened to face.
IMU_MOUNT_SIGN = -1.0

ERROR_REPLY = "err bad command"


class TraceRow(NamedTuple):
    time_s: float
    pitch: float
    target_angle: float
    velocity: float
    target_velocity: float
    steering: float
    accel: float
    ticks_left: int
    ticks_right: int
    is_balancing: bool
    fallen: bool


CSV_COLUMNS = (
    "time_s", "pitch_rad", "target_angle_rad", "velocity_rads",
    "target_velocity_rads", "steering_rads", "accel_rads2",
    "ticks_left", "ticks_right", "is_balancing", "fallen",
)


class Trace:
    """Full-resolution run record, one row per control period."""

    def __init__(self, rows: list[TraceRow] | None = None) -> None:
        self.rows: list[TraceRow] = rows if rows is not None else []

    def write_csv(self, target: str | Path | TextIO) -> None:
        if hasattr(target, "write"):
            self._write(target)
        else:
            with open(target, "w", newline="") as fh:
                self._write(fh)

    def _write(self, fh: TextIO) -> None:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for r in self.rows:
            fh.write(
                f"{r.time_s!r},{r.pitch!r},{r.target_angle!r},{r.velocity!r},"
                f"{r.target_velocity!r},{r.steering!r},{r.accel!r},"
                f"{r.ticks_left},{r.ticks_right},{int(r.is_balancing)},{int(r.fallen)}\n"
            )

    @classmethod
    def read_csv(cls, source: str | Path | TextIO) -> "Trace":
        if hasattr(source, "read"):
            lines = source.read().splitlines()
        else:
            lines = Path(source).read_text().splitlines()
        if not lines or lines[0] != ",".join(CSV_COLUMNS):
            raise ValueError("not a trace CSV: bad header")
        rows = []
        for line in lines[1:]:
            p = line.split(",")
            if len(p) != len(CSV_COLUMNS):
                raise ValueError(f"bad trace row: {line!r}")
            rows.append(TraceRow(
                float(p[0]), float(p[1]), float(p[2]), float(p[3]), float(p[4]),
                float(p[5]), float(p[6]), int(p[7]), int(p[8]),
                bool(int(p[9])), bool(int(p[10])),
            ))
        return cls(rows)


class Simulation:
    """One robot, one clock.  Drive with advance_to_us or run_simulation."""

    def __init__(self, cfg: SimConfig) -> None:
        validate_config(cfg)
        self.cfg = cfg
        self.tick_us = 1_000_000 // cfg.stepper.ticks_per_second
        self.plant = PlantState(pitch=cfg.initial_pitch)
        self.balancer = Balancer(cfg.controller, cfg.angle_gains, cfg.velocity_gains)
        self.imu = ImuModel(replace(cfg.imu, seed=cfg.seed))
        self.left = ChannelState()
        self.right = ChannelState()
        self.trace = Trace()
        self.frames: deque[TelemetryFrame] = deque()
        self.ticks_left = 0          # cumulative signed steps, left wheel
        self.ticks_right = 0
        self.n_velocity_updates = 0
        self.n_control_calls = 0
        self._pending: deque[tuple[float, float]] = deque()
        self._telemetry_period_us = round(1e6 / cfg.telemetry_rate_hz)
        self._ctrl_due_us = 0
        self._vel_due_us = cfg.controller.velocity_period_us
        self._frame_due_us = 0
        self._disturbances: deque[tuple[int, float]] = deque()

    @property
    def time_us(self) -> int:
        return self.plant.time_us

    def submit_command(self, line: str) -> str | None:
        """Parse one teleop line; queue accepted references for the next
        control-cycle boundary.  Returns the reply line (echo or error) or
        None for ignored input."""
        try:
            cmd = parse_move(line.strip())
        except CommandError:
            return ERROR_REPLY
        if cmd is None:
            return None
        self._pending.append((cmd.ref_velocity, cmd.ref_steering))
        return format_echo(cmd)

    def schedule_disturbance(self, at_us: int, impulse: float) -> None:
        """Queue a pitch-rate impulse to fire at the given sim time."""
        self._disturbances.append((at_us, impulse))
        self._disturbances = deque(sorted(self._disturbances))

    def drain_frames(self) -> list[TelemetryFrame]:
        out = list(self.frames)
        self.frames.clear()
        return out

    def advance_to_us(self, t_end_us: int, stop_when_fallen: bool = False) -> None:
        """Run the master clock up to (not including) t_end_us."""
        cfg = self.cfg
        bal = self.balancer
        imu = self.imu
        plant = self.plant
        params = cfg.plant

        # Clock bookkeeping.
        tick = self.tick_us
        dt = tick * 1e-6
        ctrl_period = cfg.controller.control_period_us
        ctrl_due = self._ctrl_due_us
        vel_due = self._vel_due_us
        vel_period = cfg.controller.velocity_period_us
        imu_due = imu.next_due_us
        frame_due = self._frame_due_us
        frame_period = self._telemetry_period_us

        # Plant constants and state, hoisted.
        g = params.gravity
        body_l = params.body_length
        wheel_r = params.wheel_radius
        track_w = params.track_width
        max_tilt = params.max_tilt
        step_angle = TAU / cfg.stepper.ppr
        alpha = dt / (ACCEL_FILTER_TAU_S + dt)
        sin = math.sin
        cos = math.cos
        pitch = plant.pitch
        pitch_rate = plant.pitch_rate
        ang_l = plant.wheel_angle_left
        ang_r = plant.wheel_angle_right
        heading = plant.heading
        pos_x = plant.pos_x
        pos_y = plant.pos_y
        fallen = plant.fallen
        base_v = plant.base_velocity
        now = plant.time_us

        # Stepper channel state, hoisted.
        lch = self.left
        rch = self.right
        l_tick, l_tpp, l_dir = lch.current_tick, lch.ticks_per_pulse, lch.direction
        r_tick, r_tpp, r_dir = rch.current_tick, rch.ticks_per_pulse, rch.direction
        scfg = cfg.stepper

        ticks_l = self.ticks_left
        ticks_r = self.ticks_right
        n_vel = self.n_velocity_updates
        n_ctl = self.n_control_calls
        pending = self._pending
        dists = self._disturbances
        rows_append = self.trace.rows.append
        frames_append = self.frames.append
        mount = IMU_MOUNT_SIGN

        def write_back() -> None:
            plant.pitch = pitch
            plant.pitch_rate = pitch_rate
            plant.wheel_angle_left = ang_l
            plant.wheel_angle_right = ang_r
            plant.heading = heading
            plant.pos_x = pos_x
            plant.pos_y = pos_y
            plant.fallen = fallen
            plant.base_velocity = base_v
            plant.time_us = now

        while now < t_end_us:
            if dists and dists[0][0] <= now:
                _, impulse = dists.popleft()
                if not fallen:
                    pitch_rate += impulse

            ctrl_boundary = now >= ctrl_due
            if ctrl_boundary:
                ctrl_due = now + ctrl_period
                while pending:
                    bal.ref_velocity, bal.ref_steering = pending.popleft()
                bal.smooth_references()

            if now >= vel_due:
                lr = bal.update_velocity(now)
                vel_due = now + vel_period
                if lr is not None:
                    n_vel += 1
                    lv, rv = lr
                    l_tpp = ticks_per_pulse(lv, scfg)
                    if lv > 0.0:
                        l_dir = 1
                    elif lv < 0.0:
                        l_dir = -1
                    r_tpp = ticks_per_pulse(rv, scfg)
                    if rv > 0.0:
                        r_dir = 1
                    elif rv < 0.0:
                        r_dir = -1

            if now >= imu_due:
                write_back()
                reading = imu.sample(plant, now)
                imu_due = imu.next_due_us
                if reading is not None:
                    n_ctl += 1
                    bal.update_control(mount * reading.pitch, now)

            if ctrl_boundary:
                rows_append(TraceRow(
                    now * 1e-6, pitch, bal.target_angle, bal.velocity,
                    bal.target_velocity, bal.steering, bal.accel,
                    ticks_l, ticks_r, bal.is_balancing, fallen,
                ))

            if now >= frame_due:
                frame_due = now + frame_period
                frames_append(TelemetryFrame(
                    now, pitch, bal.target_angle, bal.velocity,
                    bal.target_velocity, bal.steering, bal.accel,
                    bal.is_balancing, fallen, pos_x, pos_y, heading,
                ))

            # Timer ISR: same automaton as stepper.tick_isr.
            s_l = 0
            if l_tpp is not None:
                if l_tick >= l_tpp:
                    l_tick = 0
                if l_tick == 0:
                    s_l = l_dir
                l_tick += 1
            s_r = 0
            if r_tpp is not None:
                if r_tick >= r_tpp:
                    r_tick = 0
                if r_tick == 0:
                    s_r = r_dir
                r_tick += 1
            ticks_l += s_l
            ticks_r += s_r

            # Plant integration: same arithmetic as plant.step_plant.
            if fallen:
                now += tick
                continue
            if s_l or s_r:
                w_l = s_l * step_angle / dt
                w_r = s_r * step_angle / dt
                ang_l += s_l * step_angle
                ang_r += s_r * step_angle
                v_raw = wheel_r * 0.5 * (w_l + w_r)
                yaw_rate = wheel_r * (w_r - w_l) / track_w
            else:
                v_raw = 0.0
                yaw_rate = 0.0
            v_new = base_v + alpha * (v_raw - base_v)
            base_accel = (v_new - base_v) / dt
            base_v = v_new
            accel = (g * sin(pitch) - base_accel * cos(pitch)) / body_l
            pitch_rate += accel * dt
            pitch += pitch_rate * dt
            if s_l or s_r:
                heading += yaw_rate * dt
                pos_x += v_raw * cos(heading) * dt
                pos_y += v_raw * sin(heading) * dt
            now += tick
            if abs(pitch) >= max_tilt:
                pitch = max_tilt if pitch > 0.0 else -max_tilt
                pitch_rate = 0.0
                fallen = True
                if stop_when_fallen:
                    break

        write_back()
        lch.current_tick, lch.ticks_per_pulse, lch.direction = l_tick, l_tpp, l_dir
        rch.current_tick, rch.ticks_per_pulse, rch.direction = r_tick, r_tpp, r_dir
        self.ticks_left = ticks_l
        self.ticks_right = ticks_r
        self.n_velocity_updates = n_vel
        self.n_control_calls = n_ctl
        self._ctrl_due_us = ctrl_due
        self._vel_due_us = vel_due
        self._frame_due_us = frame_due


def run_simulation(
    cfg: SimConfig,
    commands: Iterable[tuple[int, str]] = (),
    disturbances: Iterable[tuple[int, float]] = (),
    stop_when_fallen: bool = False,
) -> Simulation:
    """Run a headless simulation for cfg.duration_s seconds.

    commands are (time_us, line) pairs fed through the normal command path
    when the clock reaches them; disturbances are (time_us, pitch-rate
    impulse) pairs.  Returns the finished Simulation with trace, frames and
    final state attached.
    """
    sim = Simulation(cfg)
    for at_us, impulse in disturbances:
        sim.schedule_disturbance(at_us, impulse)
    duration_us = round(cfg.duration_s * 1e6)
    schedule = sorted(commands, key=lambda c: c[0])
    for at_us, line in schedule:
        at_us = min(max(at_us, 0), duration_us)
        sim.advance_to_us(at_us, stop_when_fallen=stop_when_fallen)
        if stop_when_fallen and sim.plant.fallen:
            break
        sim.submit_command(line)
    sim.advance_to_us(duration_us, stop_when_fallen=stop_when_fallen)
    return sim
