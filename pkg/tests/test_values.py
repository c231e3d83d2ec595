from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvresp.ltlf import atom, eventually, henceforth, neg, parse_formula
from mvresp.scenario_io import load_scenario
from mvresp.system import History
from mvresp.values import (
    Literal,
    ValueBase,
    check_value_base,
    equivalent,
    format_outcome,
    format_score,
    leq,
    relative_regret,
    satset,
    score_vector,
    strictly_less,
)

VB = ValueBase.of(
    [("w1", eventually(atom("p"))), ("w2", eventually(atom("q")))],
    [("w3", henceforth(atom("r")))],
)


def lits(text: str) -> frozenset:
    return frozenset(Literal(t[1:], t[0] == "+") for t in text.split())


def test_satset_signs_every_value():
    h = History.from_trace([{"r"}, {"p", "r"}])
    assert satset(h, VB) == lits("+w1 -w2 +w3")


def test_score_vector_counts_per_level():
    assert score_vector(lits("+w1 -w2 -w3"), VB) == (0, -1)
    assert score_vector(frozenset(), VB) == (0, 0)


@pytest.mark.parametrize(
    "x, y, expected",
    [
        ("+w1", "+w3", False),  # first level decides
        ("-w3", "-w1", False),
        ("-w1 -w2", "-w1", True),
        ("+w1 -w2", "+w3", True),  # ties at level 1 fall through
        ("-w1", "-w2", True),  # equally good
    ],
)
def test_lexicographic_order(x, y, expected):
    assert leq(lits(x), lits(y), VB) is expected


def test_strict_and_equivalence():
    assert strictly_less(lits("-w1"), frozenset(), VB)
    assert equivalent(lits("-w1"), lits("-w2"), VB)
    assert not strictly_less(lits("-w1"), lits("-w2"), VB)


def test_relative_regret_example():
    two = ValueBase.of([("w1", atom("p")), ("w2", atom("q"))])
    h1 = History.from_trace([set()])
    h2 = History.from_trace([{"p"}])
    assert relative_regret(h1, h2, two) == lits("-w1")


def test_formatting_groups_levels():
    assert format_outcome(lits("-w3 +w1 -w2"), VB) == "{+w1, -w2 | -w3}"
    assert format_outcome(frozenset(), VB) == "{}"
    assert format_score((-1, 0, 2)) == "(-1, 0, +2)"


def test_duplicate_value_names_rejected():
    with pytest.raises(ValueError, match="duplicate"):
        ValueBase.of([("w", atom("p"))], [("w", atom("q"))])


def _doc(values):
    return {
        "agents": ["A"],
        "propositions": ["p"],
        "actions": ["on", "off"],
        "transitions": [{"joint": {"A": "on"}, "to": ["p"]}, {"joint": {"A": "off"}, "to": []}],
        "s0": [],
        "horizon": 2,
        "values": [values],
    }


def test_syntactic_negation_pair():
    sc = load_scenario(_doc([{"name": "w1", "formula": "G p"}, {"name": "w2", "formula": "!(G p)"}]))
    assert sc.warnings == ["value w2 is the negation of value w1"]
    report = check_value_base(sc.mas)
    assert report.negation_pairs == [("w1", "w2")] and not report.ok


def test_model_relative_negation_pair():
    # with s0 = {} the two formulas can never agree on a reachable history
    sc = load_scenario(_doc([{"name": "w1", "formula": "p"}, {"name": "w2", "formula": "!p & true"}]))
    assert any("every reachable history" in w for w in sc.warnings)


def test_negation_found_after_desugaring():
    sc = load_scenario(_doc([{"name": "w1", "formula": "F p"}, {"name": "w2", "formula": "G !p"}, {"name": "w3", "formula": "X p"}]))
    assert sc.warnings == ["value w2 is the negation of value w1"]
    assert parse_formula("G !p") == neg(parse_formula("F p"))


names = ["w1", "w2", "w3"]
satsets = st.tuples(*(st.booleans() for _ in names)).map(
    lambda bits: frozenset(Literal(n, b) for n, b in zip(names, bits))
)


@settings(max_examples=200, deadline=None)
@given(satsets, satsets, satsets)
def test_difference_preserves_order_and_halves_scores(x, y, z):
    assert leq(x, y, VB) == leq(x - z, y - z, VB)
    half = score_vector(x - z, VB)
    assert all(2 * h == a - b for h, a, b in zip(half, score_vector(x, VB), score_vector(z, VB)))
