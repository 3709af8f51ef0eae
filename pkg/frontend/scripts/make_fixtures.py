#!/usr/bin/env python3
"""Record a teleop session with the simulator for the UI test fixtures.

Runs one headless session: quiet warmup, then a sustained forward command
held to the end.  Writes the exact telemetry wire lines the browser client
would receive, the full-resolution trace CSV of the same session, and a
small metadata file with the constants the tests need.

Requires the balancebot package (pip install -e .. from the repo root).
Regenerate with:

    python3 frontend/scripts/make_fixtures.py
"""

import json
from dataclasses import replace
from pathlib import Path

from balancebot.config import default_config
from balancebot.control import PidGains
from balancebot.protocol import encode_telemetry
from balancebot.simulation import Simulation

REPO_ROOT = Path(__file__).resolve().parents[2]
FIXTURE_DIR = Path(__file__).resolve().parents[1] / "test" / "fixtures"

COMMAND_AT_US = 5_500_000
DURATION_US = 12_000_000
COMMAND_LINE = "mov1.50,0.00"


def tuned_gains() -> tuple[PidGains, PidGains]:
    doc = json.loads((REPO_ROOT / "tests" / "golden" / "tuned_gains.json").read_text())
    return (PidGains(**doc["angle_gains"]), PidGains(**doc["velocity_gains"]))


def main() -> None:
    angle, velocity = tuned_gains()
    # Upright-exact start: the plant holds pitch 0 through the open-loop
    # warmup, then the controller engages on the first post-warmup sample.
    cfg = replace(
        default_config(),
        angle_gains=angle,
        velocity_gains=velocity,
        initial_pitch=0.0,
        duration_s=DURATION_US * 1e-6,
        seed=7,
    )

    sim = Simulation(cfg)
    sim.advance_to_us(COMMAND_AT_US)
    echo = sim.submit_command(COMMAND_LINE)
    assert echo == "x1.50,0.00", echo
    sim.advance_to_us(DURATION_US)
    assert not sim.plant.fallen, "fixture session must stay upright"

    frames = sim.drain_frames()
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    lines = [encode_telemetry(f) for f in frames]
    (FIXTURE_DIR / "forward_session.jsonl").write_text("\n".join(lines) + "\n")
    sim.trace.write_csv(FIXTURE_DIR / "forward_session.csv")
    meta = {
        "commandLine": COMMAND_LINE,
        "commandAtUs": COMMAND_AT_US,
        "durationUs": DURATION_US,
        "framePeriodUs": round(1e6 / cfg.telemetry_rate_hz),
        "wheelRadius": cfg.plant.wheel_radius,
        "trackWidth": cfg.plant.track_width,
        "stepsPerRev": cfg.stepper.ppr,
        "seed": cfg.seed,
    }
    (FIXTURE_DIR / "forward_session.meta.json").write_text(
        json.dumps(meta, indent=2) + "\n"
    )
    print(f"{len(frames)} frames, {len(sim.trace.rows)} rows, "
          f"final x={sim.plant.pos_x:.4f} m y={sim.plant.pos_y:.2e} m")


if __name__ == "__main__":
    main()
