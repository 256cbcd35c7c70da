"""Shock formation toolkit: metric models, plane oracles, 2-D solver and diagnostics."""

import json

from ._core import (
    MetricModel,
    ShockError,
    moving_medium_model,
    physicality,
    quadratic_model,
    simple_wave_blowup,
    sound_speed,
)
from . import _core


def simulate(config, out):
    """Run the 2-D solver on a config file. Returns (exit_code, report dict)."""
    code, report = _core.simulate(str(config), str(out))
    return code, json.loads(report)


def verify(run_dir):
    """Recompute shock_report.json from saved tables. Returns (exit_code, reproduced, passed)."""
    return _core.verify(str(run_dir))


def plane(config, out):
    return _core.plane(str(config), str(out))


def resolved_config(text):
    return json.loads(_core.resolved_config(text))


__all__ = [
    "MetricModel",
    "ShockError",
    "moving_medium_model",
    "physicality",
    "plane",
    "quadratic_model",
    "resolved_config",
    "simple_wave_blowup",
    "simulate",
    "sound_speed",
    "verify",
]
