"""Command line front end: simulate, tune, sweep, replay, serve."""

from __future__ import annotations

import argparse
import asyncio
import dataclasses
import json
import logging
import sys
import time

from .config import SimConfig, default_config, load_config
from .control import PidGains
from .service import DEFAULT_TCP_PORT, DEFAULT_WS_PORT, serve
from .simulation import Simulation, Trace, run_simulation
from .tuner import (
    TuneReport,
    compute_metrics,
    disturbance_sweep,
    make_scenario,
    tune_gains,
)


def _load(args: argparse.Namespace, fallback: SimConfig | None = None) -> SimConfig:
    cfg = load_config(args.config) if args.config else (fallback or default_config())
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _run_realtime(cfg: SimConfig) -> Simulation:
    """Headless run paced to the wall clock."""
    sim = Simulation(cfg)
    duration_us = round(cfg.duration_s * 1e6)
    start = time.monotonic()
    while sim.time_us < duration_us:
        target = min(duration_us, int((time.monotonic() - start) * 1e6))
        if target > sim.time_us:
            sim.advance_to_us(target)
        else:
            time.sleep(0.002)
    return sim


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _load(args)
    if args.duration is not None:
        cfg.duration_s = args.duration
    cfg.realtime = bool(args.realtime)
    t0 = time.perf_counter()
    sim = _run_realtime(cfg) if cfg.realtime else run_simulation(cfg)
    wall = time.perf_counter() - t0
    if args.trace_out:
        sim.trace.write_csv(args.trace_out)
    metrics = compute_metrics(
        sim.trace, cfg.controller.angle_set_point, sim.plant.fallen, sim.plant.pos_x
    )
    _emit({
        "duration_s": cfg.duration_s,
        "wall_s": round(wall, 3),
        "metrics": dataclasses.asdict(metrics),
        "final": {
            "pitch": sim.plant.pitch,
            "pos_x": sim.plant.pos_x,
            "pos_y": sim.plant.pos_y,
            "heading": sim.plant.heading,
            "fallen": sim.plant.fallen,
        },
        "trace_rows": len(sim.trace.rows),
    }, args.out)
    return 0


def cmd_tune(args: argparse.Namespace) -> int:
    cfg = _load(args, fallback=make_scenario(seed=args.seed if args.seed is not None else 1))
    report = tune_gains(cfg)
    _emit(report.to_dict(), args.out)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load(args, fallback=make_scenario(seed=args.seed if args.seed is not None else 1))
    if args.gains:
        report = TuneReport.load(args.gains)
        angle, velocity = report.angle_gains, report.velocity_gains
    else:
        angle, velocity = cfg.angle_gains, cfg.velocity_gains
    max_impulse = disturbance_sweep(angle, velocity, cfg)
    _emit({
        "max_impulse_rads": max_impulse,
        "angle_gains": dataclasses.asdict(angle),
        "velocity_gains": dataclasses.asdict(velocity),
    }, args.out)
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    trace = Trace.read_csv(args.trace)
    cfg = _load(args)
    fallen = trace.rows[-1].fallen if trace.rows else False
    metrics = compute_metrics(trace, cfg.controller.angle_set_point, fallen, None)
    _emit({
        "rows": len(trace.rows),
        "duration_s": trace.rows[-1].time_s if trace.rows else 0.0,
        "metrics": dataclasses.asdict(metrics),
    }, args.out)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    cfg = _load(args)
    try:
        asyncio.run(serve(cfg, tcp_port=args.tcp_port, ws_port=args.ws_port))
    except KeyboardInterrupt:
        pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="balancebot",
        description="Deterministic two-wheel balancing robot simulator",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="simulation config JSON")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", help="write the JSON result here instead of stdout")

    p = sub.add_parser("simulate", help="run one headless simulation")
    common(p)
    p.add_argument("--duration", type=float, default=None, help="seconds to simulate")
    p.add_argument("--trace-out", help="write the full-resolution trace CSV here")
    pace = p.add_mutually_exclusive_group()
    pace.add_argument("--realtime", action="store_true", help="pace to the wall clock")
    pace.add_argument("--fast", dest="realtime", action="store_false",
                      help="run as fast as possible (default)")
    p.set_defaults(func=cmd_simulate, realtime=False)

    p = sub.add_parser("tune", help="staged gain search on the scenario")
    common(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("sweep", help="bisect the largest recoverable disturbance")
    common(p)
    p.add_argument("--gains", help="tune report JSON to take gains from")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("replay", help="summarize a recorded trace CSV")
    common(p)
    p.add_argument("trace", help="trace CSV produced by simulate --trace-out")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="live TCP/WebSocket teleop service")
    common(p)
    p.add_argument("--tcp-port", type=int, default=DEFAULT_TCP_PORT)
    p.add_argument("--ws-port", type=int, default=DEFAULT_WS_PORT)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
