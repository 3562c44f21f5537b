import json

import pytest

from conftest import FIXTURES
from recalldrift import ConfigError
from recalldrift.config import load_run_config, parse_run_config


def test_fixture_configs_load():
    cfg = load_run_config(FIXTURES / "table2.json")
    assert str(cfg.run_policy()) == "greedy:9"
    assert cfg.resolve(cfg.log) == FIXTURES / "table2_events.jsonl"
    sim = load_run_config(FIXTURES / "sim.json").sim_config()
    assert sim.seed == 42 and sim.reuse_rate == ((30.0, 0.1), (30.0, 0.25))


def test_unknown_key_rejected():
    data = json.loads((FIXTURES / "table2.json").read_text())
    data["polcy"] = "never"
    with pytest.raises(ConfigError, match="polcy"):
        parse_run_config(data)


def test_bad_sim_distribution_named():
    data = json.loads((FIXTURES / "sim.json").read_text())
    data["sim"]["scope_dist"] = [0.5, 0.5, 0.5]
    with pytest.raises(ConfigError, match="sim.scope_dist"):
        parse_run_config(data)


def test_prior_grid_range():
    data = json.loads((FIXTURES / "table2.json").read_text())
    data["prior_grid"] = [[0.5, 1.2, 0.7, 0.4]]
    with pytest.raises(ConfigError, match="prior_grid"):
        parse_run_config(data)


def test_invalid_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{nope")
    with pytest.raises(ConfigError):
        load_run_config(p)
