import json
import math
from pathlib import Path

import numpy as np
import pytest

import shockform as sf

ROOT = Path(__file__).resolve().parents[2]

# cos^3 amplitude giving delta_star = 1/2 for the moving-medium law (tests/oracles/simple_wave.py)
AMPLITUDE = 0.137832223855448


def test_moving_medium_metric():
    m = sf.moving_medium_model(1.0)
    assert m.normalized
    g = m.metric(0.2)
    want = np.array([[-1 + 0.04, 0.2, 0], [0.2, 1, 0], [0, 0, 1]])
    assert np.allclose(g, want, atol=1e-15)
    assert np.allclose(g @ m.inverse(0.2), np.eye(3), atol=1e-13)
    assert m.nonlinearity() == pytest.approx(2.0)


def test_linear_law_has_no_nonlinearity():
    assert sf.quadratic_model([0, 0, 0, 0, 0, 0]).nonlinearity() == 0.0
    assert sf.quadratic_model([0, 0, 0, 1, 0, 0]).nonlinearity() == 1.0


def test_simple_wave_blowup_matches_oracle():
    r = sf.simple_wave_blowup(sf.moving_medium_model(1.0), amplitude=AMPLITUDE)
    assert r["T"] == pytest.approx(2.0, rel=1e-9)
    assert r["delta_star"] == pytest.approx(0.5, rel=1e-6)
    assert r["u"] == pytest.approx(0.695913275997772, rel=1e-6)


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_fluid_sound_speed_and_physicality(s):
    assert sf.sound_speed(s) == pytest.approx((1 + 2 * s) ** -0.5, abs=1e-12)
    ok, why = sf.physicality(s)
    assert ok and why == ""


def test_errors_are_translated():
    with pytest.raises(sf.ShockError, match="ValidationError"):
        sf.resolved_config('{"grid": {"nx": 64}}')
    cfg = sf.resolved_config('{"model": {"kind": "moving_medium"}}')
    assert cfg["grid"]["nx"] == 2048
    assert math.isclose(cfg["grid"]["x_max"], cfg["grid"]["x_min"] + 1.1 + 2 * cfg["run"]["t_max"])


def test_simulate_and_verify(tmp_path):
    code, report = sf.simulate(ROOT / "configs" / "zero.json", tmp_path / "run")
    assert code == 0
    assert report["status"] == "t_max"
    assert report["delta_star"] == 0.0
    assert sf.verify(tmp_path / "run") == (0, True, True)
    stored = json.loads((tmp_path / "run" / "shock_report.json").read_text())
    assert stored == report


def test_plane(tmp_path):
    r = sf.plane(ROOT / "configs" / "simple_wave.json", tmp_path)
    assert r["exit_code"] == 0
    assert r["T"] == pytest.approx(2.0, rel=1e-6)
