import json
import shutil

import pytest
from click.testing import CliRunner

from conftest import FIXTURES
from recalldrift.cli import main
from recalldrift.events import read_log


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def table2(tmp_path):
    for name in ("table2.json", "table2_events.jsonl"):
        shutil.copy(FIXTURES / name, tmp_path / name)
    return tmp_path / "table2.json"


def test_replay_table2(runner, table2, tmp_path):
    res = runner.invoke(main, ["replay", "--config", str(table2), "--out", str(tmp_path / "o")])
    assert res.exit_code == 0, res.output
    assert "88.236" in res.output and "75.978" in res.output and "13.89%" in res.output
    csv_text = (tmp_path / "o" / "report.csv").read_text()
    assert csv_text.startswith("metric,value\n")
    assert "prompts_shown,108" in csv_text
    assert (tmp_path / "o" / "counters.csv").exists()


def test_replay_policy_override(runner, table2, tmp_path):
    res = runner.invoke(main, ["replay", "--config", str(table2), "--policy", "never", "--out", str(tmp_path / "o")])
    assert res.exit_code == 0
    assert "relative reduction            0.00%" in res.output


def test_simulate_empty(runner, tmp_path):
    cfg = json.loads((FIXTURES / "sim.json").read_text())
    cfg["sim"]["n_items"] = 0
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    res = runner.invoke(main, ["simulate", "--config", str(path), "--out", str(tmp_path / "o")])
    assert res.exit_code == 0, res.output
    assert (tmp_path / "o" / "events.jsonl").read_text() == ""


def test_simulate_replay_calibrate_policy(runner, tmp_path):
    out = tmp_path / "o"
    cfg = str(FIXTURES / "sim.json")
    assert runner.invoke(main, ["simulate", "--config", cfg, "--out", str(out)]).exit_code == 0
    log = str(out / "events.jsonl")
    assert all(e.outgoing is not None for e in read_log(log))
    for cmd in ("replay", "policy", "sweep", "calibrate"):
        res = runner.invoke(main, [cmd, "--config", cfg, "--log", log, "--out", str(out)])
        assert res.exit_code == 0, (cmd, res.output)
    header = (out / "scored_events.csv").read_text().splitlines()[0]
    assert header == "event_id,day_index,risk,delta_r,weighted_benefit,selected"
    assert "dominance" in (out / "sweep.txt").read_text()
    calib = (out / "calibration.csv").read_text().splitlines()
    assert len(calib) == 11


def test_config_errors_exit_2(runner, tmp_path):
    res = runner.invoke(main, ["replay", "--config", str(tmp_path / "missing.json")])
    assert res.exit_code == 2
    bad = json.loads((FIXTURES / "table2.json").read_text())
    bad["effect"]["pc_after"] = "high"
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(bad))
    res = runner.invoke(main, ["replay", "--config", str(p)])
    assert res.exit_code == 2
    assert "effect.pc_after" in res.output
    bad = json.loads((FIXTURES / "table2.json").read_text())
    bad["policy"] = "sometimes"
    p.write_text(json.dumps(bad))
    res = runner.invoke(main, ["replay", "--config", str(p)])
    assert res.exit_code == 2 and "policy" in res.output


def test_missing_log_exit_2(runner, tmp_path):
    cfg = json.loads((FIXTURES / "table2.json").read_text())
    cfg["log"] = "nope.jsonl"
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    assert runner.invoke(main, ["replay", "--config", str(p)]).exit_code == 2


def test_prov_attach_read_check(runner, tmp_path):
    res = runner.invoke(main, ["prov", "attach", "--store", str(tmp_path), "--entity-id", "e1", "--scope", "Friends",
                               "--created", "2024-05", "--agent", "agentA"])
    assert res.exit_code == 0, res.output
    sidecar = tmp_path / "e1.prov.json"
    assert sidecar.read_bytes() == (FIXTURES.parent / "tests" / "golden" / "e1.prov.json").read_bytes()
    res = runner.invoke(main, ["prov", "read", str(sidecar)])
    assert "Original audience: Friends — May 2024" in res.output
    res = runner.invoke(main, ["prov", "check", str(sidecar), "--outgoing", "Public"])
    assert res.exit_code == 1
    res = runner.invoke(main, ["prov", "check", str(sidecar), "--outgoing", "Friends"])
    assert res.exit_code == 0


def test_prov_absent_and_malformed(runner, tmp_path):
    res = runner.invoke(main, ["prov", "read", str(tmp_path / "x.prov.json")])
    assert res.exit_code == 0 and "No provenance — defaulting to Private" in res.output
    assert runner.invoke(main, ["prov", "check", str(tmp_path / "x.prov.json"), "--outgoing", "Public"]).exit_code == 0
    (tmp_path / "bad.prov.json").write_text("{\"entity_id\": ")
    assert runner.invoke(main, ["prov", "read", str(tmp_path / "bad.prov.json")]).exit_code == 2


def test_prov_foreign_scope(runner, tmp_path):
    onto = str(FIXTURES / "ontologies" / "enterprise.json")
    store = tmp_path / "d.prov.json"
    res = runner.invoke(main, ["prov", "attach", "--store", str(store), "--entity-id", "d", "--foreign-scope", "org",
                               "--ontology", onto, "--created", "2024-02", "--sensitive"])
    assert res.exit_code == 0, res.output
    assert "Limited audience — February 2024" in res.output
    assert json.loads(store.read_text())["scope"] == "Friends"
    res = runner.invoke(main, ["prov", "attach", "--store", str(store), "--entity-id", "d", "--foreign-scope", "guild",
                               "--ontology", onto, "--created", "2024-02"])
    assert json.loads(store.read_text())["scope"] == "Private"


def test_inputs_not_mutated(runner, table2, tmp_path):
    before = {p.name: p.read_bytes() for p in tmp_path.iterdir() if p.is_file()}
    for cmd in ("replay", "policy", "sweep"):
        runner.invoke(main, [cmd, "--config", str(table2), "--out", str(tmp_path / "o")])
    after = {p.name: p.read_bytes() for p in tmp_path.iterdir() if p.is_file()}
    assert before == after
