import json
import os
from pathlib import Path

import pytest

import srpsim

SCENARIOS = Path(os.environ.get("SRPSIM_SCENARIO_DIR", Path(__file__).resolve().parents[2] / "scenarios"))


def test_benign_run_passes():
    r = srpsim.run(str(SCENARIOS / "benign_basic.json"))
    assert r["passed"]
    assert r["verdicts"], "benign line should accept a route"
    for v in r["verdicts"]:
        assert v["loop_free"] and v["fresh"]
        assert v["route"][0] == v["source"] and v["route"][-1] == v["target"]


def test_same_seed_same_digest():
    path = str(SCENARIOS / "fig1a_tunnel.json")
    a = srpsim.run(path, seed=11)
    b = srpsim.run(path, seed=11)
    assert a["digest"] == b["digest"]
    assert a["seed"] == 11


def test_wormhole_route_has_witness():
    r = srpsim.run(str(SCENARIOS / "fig1a_tunnel.json"))
    stale = [v for v in r["verdicts"] if not v["fresh"] and not v["endpoints_faulty"]]
    assert stale
    assert all(v["weakly_fresh"] and "Y1" in v["witness"] for v in stale)


def test_trace_round_trip_and_tamper():
    path = str(SCENARIOS / "benign_augmented.json")
    r = srpsim.run(path, trace=True)
    c = srpsim.check(r["trace"], path)
    assert c["digest_ok"] and c["passed"]
    assert [v["route"] for v in c["verdicts"]] == [v["route"] for v in r["verdicts"]]
    assert all(v["error"] == 0 for v in c["verdicts"])
    assert not srpsim.check(r["trace"].replace("accept", "Accept", 1), path)["digest_ok"]


def test_json_text_and_errors():
    text = json.dumps({
        "name": "inline", "nodes": ["S", "T"],
        "links": [{"edge": ["S", "T"], "up": [[0, None]]}],
        "keys": [["S", "T"]],
        "discoveries": [{"source": "S", "target": "T", "at": 1}],
        "expect": [{"accepted": "==1"}],
    })
    assert srpsim.run(text)["passed"]
    with pytest.raises(srpsim.ScenarioError):
        srpsim.run(text.replace('"S", "T"]', '"S", "S"]', 1))
    with pytest.raises(srpsim.ScenarioError):
        srpsim.run("/no/such/scenario.json")


def test_fuzz_and_catalog():
    rep = srpsim.fuzz(runs=150, cls="independent", mode="augmented", max_nodes=6, seed=3)
    assert rep["runs"] == 150 and rep["clean"]
    assert rep == srpsim.fuzz(runs=150, cls="independent", mode="augmented", max_nodes=6, seed=3)
    names = {a["name"] for a in srpsim.list_attacks()}
    assert {"forge_rrep", "replay_stale_rrep", "biased_metric", "fig1a_tunnel"} <= names
