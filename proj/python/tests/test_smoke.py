# Copyright 2026 The Bertrand Arena Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json

import pytest

ba = pytest.importorskip("bertrand_arena")


def small_config(**extra):
    cfg = {
        "scenario": "homogeneous",
        "market": {"model": "logit", "c": 1},
        "agents": [{"kind": "tql"}, {"kind": "tql"}],
        "horizon": 3000,
        "epoch_len": 1000,
        "metrics_window": 1000,
        "n_runs": 2,
    }
    cfg.update(extra)
    return cfg


def test_equilibria_logit():
    eq = ba.equilibria(ba.MarketSpec.logit())
    assert eq["p_nash"] == pytest.approx(1.4729, abs=1e-4)
    assert eq["p_monopoly"] == pytest.approx(1.9250, abs=1e-4)
    assert eq["pi_monopoly"] == pytest.approx(0.3375, abs=1e-4)


def test_demand_and_profit_standard():
    spec = ba.MarketSpec.standard()
    assert ba.demand(spec, 0.4, 0.4) == pytest.approx(0.3)
    assert ba.profit(spec, 0.5, 0.5) == pytest.approx(0.125)
    with pytest.raises(ValueError):
        ba.demand(spec, 1.5, 0.2)


def test_invalid_market_raises():
    with pytest.raises(ba.InvalidParameter):
        ba.equilibria(ba.MarketSpec.logit(mu=-1.0))


def test_grid_and_metrics():
    grid = ba.price_grid(ba.MarketSpec.standard(), m=11)
    assert grid[0] == 0.0 and grid[-1] == 1.0 and len(grid) == 11
    assert ba.rpdi(1.699, 1.472927, 1.924981) == pytest.approx(0.5, abs=1e-3)
    assert ba.delta(0.5, 0.0, 1.0) == 0.5


def test_config_helpers():
    full = ba.normalize_config(small_config())
    assert full["agents"][0]["alpha"] == 0.1
    over = ba.with_overrides(small_config(), "n_runs=5", "agents.1.kind=ppo")
    assert over["n_runs"] == 5 and over["agents"][1]["kind"] == "ppo"
    assert ba.config_hash(small_config()) == ba.config_hash(full)
    assert ba.config_hash(over) != ba.config_hash(full)
    with pytest.raises(ba.InvalidParameter):
        ba.normalize_config({"no_such_key": 1})


def test_simulate_is_deterministic():
    a = ba.simulate(small_config(), seed=3)
    b = ba.simulate(small_config(), seed=3)
    assert a["epochs"] == b["epochs"]
    assert len(a["epochs"]["epoch"]) == 3
    assert len(a["tail"]["t"]) == 1000
    assert a["updates"] == [3000, 3000]


def test_experiment_and_report(tmp_path):
    out = tmp_path / "exp"
    res = ba.run_experiment(small_config(), out, n_workers=2)
    assert not res["failures"]
    assert [r["seed"] for r in res["records"]] == [1, 2]
    manifest = json.loads((out / "manifest.json").read_text())
    assert len(manifest["config_hash"]) == 16
    assert (out / "summary.csv").read_text().startswith(
        "scenario,market,agent,run_seed,rpdi,delta\n")
    again = ba.write_report(out)
    assert again["runs"] == 2


def test_report_on_empty_dir_raises(tmp_path):
    with pytest.raises(ba.InsufficientData):
        ba.write_report(tmp_path)
