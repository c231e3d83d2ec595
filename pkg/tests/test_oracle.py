from __future__ import annotations

import json

import pytest

from mvresp import oracle
from mvresp import responsibility as resp
from mvresp.scenario_io import dump_scenario, load_fixture
from mvresp.strategy import enumerate_strategies, non_dominated_set, outcome_table, regret_minimising_set
from mvresp.values import Literal, score_vector


def test_random_instances_are_deterministic():
    a, b = oracle.random_scenario(11), oracle.random_scenario(11)
    assert dump_scenario(a) == dump_scenario(b)
    assert a.mas == b.mas
    assert dump_scenario(oracle.random_scenario(12)) != dump_scenario(a)


def test_exact_caps_give_eight_strategies():
    caps = oracle.InstanceCaps(max_agents=2, max_props=2, max_actions=2, max_horizon=2, max_depth=2, exact=True)
    d = oracle.random_mas(5, caps)
    assert [len(enumerate_strategies(d, a)) for a in d.agents] == [8, 8]


def test_ceiling_too_small():
    caps = oracle.InstanceCaps(strategy_ceiling=1, exact=True)
    with pytest.raises(oracle.CapsError):
        oracle.random_mas(0, caps)


def test_caps_validation_and_parsing():
    with pytest.raises(ValueError):
        oracle.InstanceCaps(max_agents=0)
    caps = oracle.InstanceCaps.parse("agents=3, max_horizon=1,exact=true")
    assert (caps.max_agents, caps.max_horizon, caps.exact) == (3, 1, True)
    with pytest.raises(ValueError, match="unknown cap"):
        oracle.InstanceCaps.parse("colour=3")


def test_single_action_is_trivial():
    caps = oracle.InstanceCaps(max_actions=1)
    report = oracle.check_instance(oracle.random_scenario(3, caps))
    assert report.passed


@pytest.mark.parametrize("seed", range(4))
def test_single_agent_reduces_to_best_outcome(seed):
    caps = oracle.InstanceCaps(max_agents=1, max_horizon=2, max_actions=2, exact=True)
    d = oracle.random_mas(seed, caps)
    report = oracle.check_instance(d)
    assert report.passed
    t = outcome_table(d, "A")
    best = max(row[0] for row in t.score)
    expected = [s for s, row in zip(t.strategies, t.score) if row[0] == best]
    assert regret_minimising_set(d, "A") == expected == non_dominated_set(d, "A")


@pytest.mark.parametrize("name", ["table1a", "table1b", "table1c", "table2", "table3", "table5", "table6", "regret_explanation"])
def test_fixtures_pass(name):
    report = oracle.check_instance(load_fixture(name))
    assert report.passed, report.failed_claims
    assert all(c.checked for c in report.claims.values())


def test_table4_cycle_diagnostic():
    report = oracle.check_instance(load_fixture("table4"))
    assert report.passed
    cycle = report.diagnostics["strong_excuse_cycle"]["A"]
    assert len(cycle) == 3


def test_vacuous_positive_reading_is_a_finding():
    report = oracle.check_instance(load_fixture("table2"))
    assert report.passed
    assert any("without an excuse check" in f for f in report.findings)


def test_large_instances_are_skipped():
    report = oracle.check_instance(load_fixture("shopping_centre"))
    assert report.skipped and not report.passed


def _buggy_excuse_column(t, r, r2):
    for c, (a, b) in enumerate(zip(t.score[r], t.score[r2])):
        if a >= b and r != r2:
            return c
    return None


def test_planted_bug_is_caught_and_replays(monkeypatch):
    monkeypatch.setattr(resp, "_excuse_column", _buggy_excuse_column)
    report = oracle.check_instance(load_fixture("table5"))
    assert not report.passed
    assert "library_attributions" in report.failed_claims
    cex = json.loads(json.dumps(report.counterexample()))
    assert set(cex["claims"]) == set(report.failed_claims)
    again = oracle.replay(cex)
    assert again.verdicts() == report.verdicts()


def test_planted_order_bug_is_caught(monkeypatch):
    import mvresp.oracle as mod

    monkeypatch.setattr(mod, "lib_leq", lambda x, y, vb: score_vector(x, vb) >= score_vector(y, vb))
    report = oracle.check_instance(load_fixture("table3"))
    assert report.failed_claims == ["library_order"]


def test_fuzz_is_deterministic():
    a = oracle.fuzz(5, seed=42).to_dict()
    b = oracle.fuzz(5, seed=42).to_dict()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a["failed"] == 0 and a["passed"] == 5


def test_fuzz_pure_random_formulas():
    report = oracle.fuzz(5, oracle.InstanceCaps(pure_random=True), seed=1)
    assert report.ok


def test_fuzz_parallel_matches_serial():
    serial = oracle.fuzz(4, seed=9).to_dict()
    parallel = oracle.fuzz(4, seed=9, jobs=2).to_dict()
    assert serial == parallel


def test_fuzz_rejects_empty_run():
    with pytest.raises(ValueError):
        oracle.fuzz(0)


def test_naive_order_clauses():
    d = load_fixture("regret_explanation").mas
    order = oracle.DefinitionalOrder(d.values)
    x = Literal("w1", False)
    y = Literal("w2", True)
    assert order.leq(frozenset({x, y}), frozenset())
    assert order.lt(frozenset({x}), frozenset({x, y}))
    assert order.leq(frozenset({y}), frozenset({y}))


def test_fuzz_counts_skipped_separately():
    caps = oracle.InstanceCaps.parse("horizon=3,strategy_ceiling=128,exact=1")
    report = oracle.fuzz(2, caps, seed=0)
    assert report.skipped == 2 and report.failures == 0
    data = report.to_dict()
    assert data["passed"] == 0 and data["skipped"] == 2
    assert all(t["passed"] == 0 for t in data["claims"].values())


def test_generator_redraws_when_values_collide():
    # one proposition and three values per level leaves few distinct formulas
    caps = oracle.InstanceCaps.parse("props=1,values=3,levels=1,exact=1")
    for seed in range(5):
        assert not oracle.random_scenario(seed, caps).warnings
