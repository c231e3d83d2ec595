from __future__ import annotations

import pytest

from mvresp.ltlf import atom, eventually
from mvresp.strategy import JointStrategy, enumerate_strategies
from mvresp.system import (
    MAS,
    MTS,
    CapExceeded,
    History,
    JointAction,
    ModelError,
    StrategyError,
    Transition,
    check_total,
    histories,
    history_count,
    node_label,
    play,
    prefix,
    reachable_nodes,
    strategy_count,
    successor,
)
from mvresp.values import ValueBase

EMPTY = frozenset()
P = frozenset({"p"})


def counter_mts(rows=None, available=()):
    """A toggles p with "flip"; from the empty state a double flip also sets q."""
    rows = rows or (
        Transition(None, (None, None), EMPTY),
        Transition(EMPTY, ("flip", None), P),
        Transition(P, ("flip", None), EMPTY),
        Transition(EMPTY, ("flip", "flip"), frozenset({"p", "q"})),
    )
    return MTS(("p", "q"), ("A", "B"), ("stay", "flip"), rows, available)


def mas(horizon=2, **kw):
    vb = ValueBase.of([("w1", eventually(atom("p")))])
    return MAS(counter_mts(**kw), EMPTY, horizon, vb)


def test_joint_action_access():
    j = JointAction((("A", "stay"), ("B", "flip")))
    assert j["B"] == "flip" and j.agents == ("A", "B") and str(j) == "A=stay,B=flip"
    with pytest.raises(KeyError):
        j["C"]


def test_most_specific_row_wins():
    m = counter_mts()
    j = lambda a, b: JointAction((("A", a), ("B", b)))  # noqa: E731
    assert successor(m, EMPTY, j("stay", "stay")) == EMPTY
    assert successor(m, EMPTY, j("flip", "stay")) == P
    assert successor(m, P, j("flip", "stay")) == EMPTY
    assert successor(m, EMPTY, j("flip", "flip")) == {"p", "q"}


def test_ambiguous_and_missing_rows():
    rows = (
        Transition(None, ("flip", None), P),
        Transition(None, (None, "flip"), EMPTY),
    )
    m = counter_mts(rows)
    with pytest.raises(ModelError, match="ambiguous"):
        successor(m, EMPTY, JointAction((("A", "flip"), ("B", "flip"))))
    with pytest.raises(ModelError, match="no transition"):
        successor(m, EMPTY, JointAction((("A", "stay"), ("B", "stay"))))
    d = MAS(m, EMPTY, 1, ValueBase.of([("w1", atom("p"))]))
    with pytest.raises(ModelError):
        check_total(d)


def test_mts_validation():
    with pytest.raises(ValueError, match="undeclared action"):
        MTS(("p",), ("A",), ("a",), (Transition(None, ("b",), EMPTY),))
    with pytest.raises(ValueError, match="no available action"):
        MTS(("p",), ("A",), ("a",), (Transition(None, (None,), EMPTY),), ((),))
    with pytest.raises(ValueError, match="horizon"):
        MAS(MTS(("p",), ("A",), ("a",), (Transition(None, (None,), EMPTY),)), EMPTY, 0, ValueBase.of([("w", atom("p"))]))


def test_history_shape_and_prefix():
    h = History.from_trace([set(), {"p"}, set()])
    assert h.length == 2
    assert prefix(h, 1).states == (EMPTY, P)
    with pytest.raises(ValueError):
        History((EMPTY,), (JointAction(()),))
    with pytest.raises(ValueError):
        prefix(h, 3)


def test_decision_nodes_and_counts():
    d = mas(horizon=2)
    tree = reachable_nodes(d, "A")
    assert len(tree) == 3
    assert [node_label(tree, n) for n in tree.nodes] == ["root", "B=stay", "B=flip"]
    assert strategy_count(d, "A") == 8
    assert len(enumerate_strategies(d, "A")) == 8
    assert history_count(d) == 16 == len(list(histories(d)))


def test_availability_shrinks_strategy_space():
    d = mas(horizon=2, available=(("stay", "flip"), ("stay",)))
    assert strategy_count(d, "B") == 1
    assert strategy_count(d, "A") == 4  # B never branches: root plus one child


def test_strategy_cap():
    vb = ValueBase.of([("w1", atom("p"))])
    d = MAS(counter_mts(), EMPTY, 4, vb, strategy_cap=100)
    with pytest.raises(CapExceeded):
        strategy_count(d, "A")


def test_play_follows_strategies():
    d = mas(horizon=2)
    sa = enumerate_strategies(d, "A")[-1]  # flip everywhere
    sb = enumerate_strategies(d, "B")[0]  # stay everywhere
    h = play(JointStrategy((sa, sb)), d)
    assert h.states == (EMPTY, P, EMPTY)
    assert [str(j) for j in h.actions] == ["A=flip,B=stay", "A=flip,B=stay"]


def test_play_rejects_missing_agent():
    d = mas()
    with pytest.raises(StrategyError):
        play(JointStrategy((enumerate_strategies(d, "A")[0],)), d)
