from __future__ import annotations

import json

import pytest

from mvresp import cli
from mvresp import responsibility as resp
from mvresp.scenario_io import canonical_json, dump_scenario, load_fixture


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    assert code == 0, err
    return json.loads(out)


def test_validate_ok(capsys):
    code, out, _ = run(capsys, "validate", "--scenario", "table3")
    assert code == 0 and out.startswith("table3: OK")


def test_validate_corrupt_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2", encoding="utf-8")
    code, _, err = run(capsys, "validate", "--scenario", str(bad))
    assert code == 2 and "not a JSON document" in err


def test_validate_lists_negation_warning(capsys, tmp_path):
    doc = dump_scenario(load_fixture("table3"))
    doc["values"] = [[{"name": "w1", "formula": "G p_w1"}, {"name": "w2", "formula": "!(G p_w1)"}]]
    path = tmp_path / "neg.json"
    path.write_text(canonical_json(doc), encoding="utf-8")
    data = run_json(capsys, "validate", "--scenario", str(path))
    assert data["warnings"] == ["value w2 is the negation of value w1"]


def test_attribute_passive_and_inexcusable(capsys):
    data = run_json(capsys, "attribute", "--scenario", "table3", "--joint", "A=sA,B=sB'")
    assert {"literals": ["-w1", "-w2"], "score": [-2]} in data["attributed"]
    data = run_json(capsys, "attribute", "--scenario", "table3", "--joint", "A=sA,B=sB'", "--kind", "inexcusable")
    assert data["attributed"] == [{"literals": [], "score": [0]}]


def test_attribute_liability(capsys):
    data = run_json(capsys, "attribute", "--scenario", "table6", "--joint", "A=sA',B=sB'", "--value", "!w1")
    assert data["liable"] is True and data["via"] == "sA"


def test_anticipate(capsys):
    data = run_json(capsys, "anticipate", "--scenario", "table3", "--agent", "A", "--strategy", "sA")
    assert data["anticipated"] == {"literals": ["-w1", "-w2"], "score": [-2]}
    data = run_json(capsys, "anticipate", "--scenario", "table6", "--strategy", "sA", "--kind", "inexcusable")
    assert data["anticipated"]["literals"] == []
    data = run_json(capsys, "anticipate", "--scenario", "table5", "--strategy", "sA'", "--kind", "inexcusable")
    assert data["anticipated"]["score"] == [-1] and data["witness"]["accuser"] == "sA"


def test_strategy_by_index(capsys):
    data = run_json(capsys, "anticipate", "--scenario", "table3", "--strategy", "1")
    assert data["strategy"] == "sA'"


def test_recommend(capsys):
    assert run_json(capsys, "recommend", "--scenario", "table6")["recommended"] == ["sA"]
    assert run_json(capsys, "recommend", "--scenario", "table3")["recommended"] == ["sA", "sA'"]


def test_recommend_empty_is_theorem_failure(capsys, monkeypatch):
    monkeypatch.setattr(resp, "recommendation", lambda d, a: resp.Recommendation((), (), ()))
    code, _, _ = run(capsys, "recommend", "--scenario", "table3")
    assert code == 3


def test_explain_compensation(capsys):
    code, out, _ = run(capsys, "explain", "--scenario", "regret_explanation", "--strategy", "s")
    assert code == 0
    assert "{-w1 | +w2}" in out and "{-w1}" in out
    assert "both s and s' risk the avoidable violation of w1" in out
    assert "s at least has the compensation of satisfying w2" in out


def test_explain_cites_dominating_strategy(capsys):
    data = run_json(capsys, "explain", "--scenario", "table6", "--strategy", "sA'")
    assert data["dominated_by"] == ["sA"]
    assert any("dominated by sA" in line for line in data["narrative"])


def test_explain_dictator(capsys, tmp_path):
    doc = {
        "kind": "matrix", "row_agent": "A", "rows": ["good", "bad"], "col_agent": "B", "cols": ["idle"],
        "cells": [[["w1"]], [[]]], "values": [["w1"]],
    }
    path = tmp_path / "dictator.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    code, out, _ = run(capsys, "explain", "--scenario", str(path), "--strategy", "good")
    assert code == 0 and "no avoidable violations" in out


def test_play_and_dominance_and_regret(capsys):
    data = run_json(capsys, "play", "--scenario", "shopping_centre", "--joint", "Anna=garden_then_hall,Ben=idle")
    assert len(data["states"]) == 3
    data = run_json(capsys, "dominance", "--scenario", "table5")
    assert data["non_dominated"] == ["sA"]
    data = run_json(capsys, "regret", "--scenario", "regret_explanation")
    assert data["regret_minimising"] == ["s"]


@pytest.mark.parametrize(
    "argv",
    [
        ["attribute", "--scenario", "table3", "--joint", "A=sA"],
        ["attribute", "--scenario", "table3", "--joint", "A=nope,B=sB"],
        ["anticipate", "--scenario", "table3", "--agent", "Z", "--strategy", "sA"],
        ["anticipate", "--scenario", "table3", "--strategy", "7"],
        ["anticipate", "--scenario", "table3"],
        ["validate", "--scenario", "missing_fixture"],
        ["fuzz", "-n", "0"],
        ["fuzz", "-n", "2", "--format", "json"],
        ["fuzz", "-n", "2", "--seed", "1", "--caps", "colour=2"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_argparse_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["attribute", "--kind", "strong", "--scenario", "table3"])
    assert info.value.code == 2


def test_internal_error(capsys, monkeypatch):
    def boom(*_):
        raise RuntimeError("boom")

    monkeypatch.setitem(cli.COMMANDS, "validate", boom)
    code, _, err = run(capsys, "validate", "--scenario", "table3")
    assert code == 1 and "boom" in err


def test_fuzz_text_repeat_is_identical(capsys):
    first = run(capsys, "fuzz", "-n", "3", "--seed", "5")
    second = run(capsys, "fuzz", "-n", "3", "--seed", "5")
    assert first == second and first[0] == 0
    assert first[1].startswith("fuzz: 3/3 instances passed")


def test_fuzz_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(resp, "_excuse_column", lambda t, r, r2: None)
    code, out, _ = run(capsys, "fuzz", "-n", "3", "--seed", "5")
    assert code == 3 and "FAIL seed" in out
