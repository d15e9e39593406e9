import csv
import io
import json
import math
from pathlib import Path

import numpy as np
import pytest

import legtherm

ROOT = Path(__file__).resolve().parents[2]


def parse_trace(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(lines))))
    return rows


def test_config_round_trip():
    cfg = legtherm.SimConfig()
    again = legtherm.SimConfig.from_json(cfg.to_json())
    assert again == cfg
    shipped = legtherm.SimConfig.load(str(ROOT / "config" / "default.json"))
    assert shipped == cfg


def test_config_errors_carry_kind():
    with pytest.raises(legtherm.Error) as info:
        legtherm.SimConfig.from_json('{"format": "legtherm-config/1", "bogus": 1}')
    assert info.value.kind == "ConfigError"
    assert "bogus" in str(info.value)


def test_layout_table():
    res = legtherm.layout("residual")
    nom = legtherm.layout("nominal")
    assert sum(n for _, _, n in res) == legtherm.RESIDUAL_OBS_SIZE == 73
    assert sum(n for _, _, n in nom) == legtherm.NOMINAL_OBS_SIZE == 45
    offset = 0
    for _, off, n in res:
        assert off == offset
        offset += n
    exported = json.loads(legtherm.layout_json())
    assert [(r["field"], r["offset"], r["length"]) for r in exported["residual"]["fields"]] == res


def test_reward_functions():
    assert legtherm.thermal_weight(60.0) == pytest.approx(1.0, abs=1e-12)
    assert legtherm.thermal_weight(65.0) == pytest.approx(math.exp(1.75), abs=1e-12)
    assert legtherm.thermal_weight(30.0, "literal") == pytest.approx(1.0, abs=1e-12)
    assert legtherm.regularization_reward(np.full(12, 0.1)) == pytest.approx(-0.012, rel=1e-14)


def test_discretize_and_steady_state():
    cfg = legtherm.SimConfig()
    a, b = legtherm.discretize(cfg, 1.0)
    assert a.shape == (14, 14) and b.shape == (14, 14)
    assert np.max(np.abs(np.linalg.eigvals(a))) <= 1.0 + 1e-12
    ss = legtherm.steady_state(cfg, np.zeros(14), 0.0)
    assert np.allclose(ss, ss[-1])


def test_reset_shapes_and_determinism():
    env = legtherm.VecEnv(legtherm.SimConfig(), batch=8)
    first = env.reset(list(range(8)))
    second = env.reset(list(range(8)))
    assert first["observations"].shape == (8, 73)
    assert np.array_equal(first["observations"], second["observations"])
    fields = {name: (off, n) for name, off, n in legtherm.layout("residual")}
    off, n = fields["motor_temps"]
    assert np.array_equal(first["observations"][:, off : off + n], first["motor_temps"])


def test_step_matches_cli_trace():
    cfg = legtherm.SimConfig()
    seed, steps = 11, 100
    rng = np.random.default_rng(seed)
    actions = rng.uniform(-1.0, 1.0, size=(steps, 12))
    env = legtherm.VecEnv(cfg, batch=1, scenario="randomized")
    env.reset([seed])
    rows = parse_trace(
        legtherm.simulate_trace(cfg, "randomized", seed, steps * 0.02, "external_residual", actions)
    )
    names = legtherm.reward_names()
    for k in range(steps):
        out = env.step(actions[k : k + 1])
        assert out["reward_names"] == names
        row = rows[k + 1]
        assert out["reward_total"][0] == float(row["reward_total"])
        for i, name in enumerate(names):
            assert out["rewards"][0, i] == float(row["r_" + name])
        labels = legtherm.node_labels()[:12]
        assert list(out["motor_temps"][0]) == [float(row["T_" + l]) for l in labels]


def test_step_rejects_wrong_action_size():
    env = legtherm.VecEnv(legtherm.SimConfig(), batch=2)
    env.reset([1, 2])
    with pytest.raises(legtherm.Error) as info:
        env.step(np.zeros((2, 11)))
    assert info.value.kind == "DimensionMismatch"


def test_long_horizon_summary_is_worker_independent():
    cfg = legtherm.SimConfig()
    one = legtherm.long_horizon(cfg, 6, 30.0, "governed", 5, 1)
    three = legtherm.long_horizon(cfg, 6, 30.0, "governed", 5, 3)
    assert one == three
    assert len(json.loads(one)["agents"]) == 6


CLI = ROOT / "build" / "tools" / "legtherm"


@pytest.mark.skipif(not CLI.exists(), reason="command-line tool not built")
def test_step_matches_command_line_tool(tmp_path):
    import subprocess

    seed, steps = 4, 50
    actions = np.random.default_rng(seed).uniform(-1.0, 1.0, size=(steps, 12))
    path = tmp_path / "actions.csv"
    np.savetxt(path, actions, delimiter=",", fmt="%.17g")
    text = subprocess.run(
        [str(CLI), "simulate", "--mode", "external_residual", "--scenario", "standing",
         "--seed", str(seed), "--duration", str(steps * 0.02), "--actions", str(path)],
        check=True, capture_output=True, text=True,
    ).stdout
    rows = parse_trace(text)
    env = legtherm.VecEnv(legtherm.SimConfig(), batch=1, scenario="standing")
    env.reset([seed])
    for k in range(steps):
        out = env.step(actions[k : k + 1])
        assert out["reward_total"][0] == float(rows[k + 1]["reward_total"])
