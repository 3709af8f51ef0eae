"""Shared fixtures: fast scenario configs and the frozen tuned gains."""

import dataclasses
import math
from pathlib import Path

import pytest

from balancebot.config import default_config
from balancebot.tuner import TuneReport, make_scenario

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def golden_report() -> TuneReport:
    """Tuned gains frozen after the first verified search run."""
    return TuneReport.load(GOLDEN_DIR / "tuned_gains.json")


@pytest.fixture
def scenario():
    """The standard evaluation scenario: 5 degree tilt, noisy sensor, seed 1."""
    return make_scenario(seed=1)


@pytest.fixture
def fast_cfg():
    """Short, warmup-free config for composition tests."""
    cfg = default_config()
    cfg.controller = dataclasses.replace(cfg.controller, warmup_delay_us=0)
    cfg.duration_s = 2.0
    cfg.initial_pitch = 0.03
    return cfg


@pytest.fixture
def tuned_cfg(golden_report, scenario):
    """Standard scenario carrying the frozen tuned gains."""
    scenario.angle_gains = golden_report.angle_gains
    scenario.velocity_gains = golden_report.velocity_gains
    return scenario


def assert_close(actual: float, expected: float, rel: float = 0.0, abs_tol: float = 0.0):
    err = abs(actual - expected)
    bound = max(abs_tol, rel * abs(expected))
    assert err <= bound, f"{actual} vs {expected}: err {err} > {bound}"


@pytest.fixture
def deg() -> float:
    return math.pi / 180.0
