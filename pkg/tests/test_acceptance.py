"""Acceptance criteria, one ``criterion`` label each; the summary prints PASS/FAIL per label."""

from __future__ import annotations

import itertools
import os
import random
import subprocess
import sys
import time

import pytest

from mvresp import oracle
from mvresp import responsibility as resp
from mvresp.ltlf import TOP, atom, conj, disj, eventually, henceforth, implies, neg, next_, truth_vector, until
from mvresp.scenario_io import load_fixture
from mvresp.strategy import JointStrategy, non_dominated_set, weakly_dominates
from mvresp.values import Literal, Value, ValueBase, leq, strictly_less

C1 = "1 table fixtures reproduce exactly"
C2 = "2 theorem suite: 100 fuzzed instances pass every claim"
C3 = "3 LTLf evaluator matches naive recursion on 10,000 cases"
C4 = "4 order axioms hold on 1,000 random subsets per value base"
C5 = "5 structured CLI output is byte-identical across runs"


def neg_set(*names):
    return frozenset(Literal(n, False) for n in names)


def joint(sc, **picks):
    return JointStrategy(tuple(sc.strategy(a, picks[a]) for a in sc.mas.agents))


@pytest.fixture
def timed():
    start = time.perf_counter()
    yield
    assert time.perf_counter() - start < 1.0


@pytest.mark.criterion(C1)
def test_table1_attributions_grow_with_options(timed):
    got = {}
    for name in ("table1a", "table1b", "table1c"):
        sc = load_fixture(name)
        got[name] = resp.passive_attributions(sc.mas, joint(sc, A="sA", B="sB"), "A")
    assert got["table1a"] == {frozenset(), neg_set("w1")}
    assert got["table1b"] == {frozenset(), neg_set("w1"), neg_set("w2")}
    assert neg_set("w1", "w2") not in got["table1b"]
    assert got["table1c"] == {frozenset(), neg_set("w1"), neg_set("w2"), neg_set("w1", "w2")}


@pytest.mark.criterion(C1)
def test_table3_anticipation_and_excuse_failure(timed):
    sc = load_fixture("table3")
    d = sc.mas
    for label in ("sA", "sA'"):
        sigma = sc.strategy("A", label)
        passive = resp.anticipate(d, "A", sigma, "passive")
        assert passive.outcome == neg_set("w1", "w2") and passive.score == (-2,)
        inexcusable = resp.anticipate(d, "A", sigma, "inexcusable")
        assert inexcusable.outcome == frozenset() and inexcusable.score == (0,)
    js = joint(sc, A="sA", B="sB'")
    assert resp.weak_excuse_acceptance_failures(d, js, "A", "passive") == [neg_set("w1", "w2")]
    assert resp.weak_excuse_acceptance_failures(d, js, "A", "inexcusable") == []


@pytest.mark.criterion(C1)
def test_table4_strong_excuse_cycle(timed):
    sc = load_fixture("table4")
    d = sc.mas
    facts = [
        (dict(A="sA'", B="sB"), "sA"),
        (dict(A="sA''", B="sB'"), "sA'"),
        (dict(A="sA", B="sB''"), "sA''"),
    ]
    for picks, preferred in facts:
        js = joint(sc, **picks)
        assert resp.strong_excuse(d, js, "A", sc.strategy("A", preferred)) is None
    report = oracle.check_instance(sc)
    assert report.passed
    assert "A" in report.diagnostics["strong_excuse_cycle"]


@pytest.mark.criterion(C1)
def test_table5_dominance_and_naive_union(timed):
    sc = load_fixture("table5")
    d = sc.mas
    sA, sA1 = sc.strategy("A", "sA"), sc.strategy("A", "sA'")
    assert weakly_dominates(d, "A", sA1, sA) and not weakly_dominates(d, "A", sA, sA1)
    assert resp.naive_union_diagnostic(d, "A", sA) == neg_set("w3", "w4", "w5")
    assert resp.naive_union_diagnostic(d, "A", sA1) == neg_set("w4", "w5")


@pytest.mark.criterion(C1)
def test_table6_liability_and_recommendation(timed):
    sc = load_fixture("table6")
    d = sc.mas
    sA, sA1 = sc.strategy("A", "sA"), sc.strategy("A", "sA'")
    assert weakly_dominates(d, "A", sA1, sA) and not weakly_dominates(d, "A", sA, sA1)
    lia = resp.liable(d, joint(sc, A="sA'", B="sB'"), "A", neg(d.values["w1"].formula))
    assert lia.liable and lia.via == sA
    assert resp.recommend(d, "A") == [sA]
    assert non_dominated_set(d, "A") == [sA]


@pytest.mark.criterion(C2)
def test_fuzz_hundred_instances():
    start = time.perf_counter()
    report = oracle.fuzz(100, oracle.InstanceCaps(), seed=0)
    elapsed = time.perf_counter() - start
    print(f"fuzz: {report.n - report.failures}/{report.n} passed in {elapsed:.1f}s")
    assert report.ok, report.counterexamples[:1]
    assert not any(i.get("skipped") for i in report.instances)
    assert elapsed <= 300


def _random_formula(rng, props, depth):
    if depth == 0 or rng.random() < 0.2:
        return TOP if rng.random() < 0.1 else atom(rng.choice(props))
    op = rng.choice(["not", "and", "or", "implies", "next", "until", "G", "F"])
    sub = lambda: _random_formula(rng, props, depth - 1)  # noqa: E731
    if op == "not":
        return neg(sub())
    if op == "next":
        return next_(sub())
    if op == "G":
        return henceforth(sub())
    if op == "F":
        return eventually(sub())
    build = {"and": conj, "or": disj, "implies": implies, "until": until}[op]
    return build(sub(), sub())


@pytest.mark.criterion(C3)
def test_ltlf_fast_matches_naive():
    rng = random.Random(2024)
    props = ["p", "q", "r"]
    mismatches = 0
    for _ in range(10_000):
        f = _random_formula(rng, props, 4)
        trace = tuple(
            frozenset(p for p in props if rng.random() < 0.5) for _ in range(rng.randint(1, 5))
        )
        fast = truth_vector(f, trace)
        slow = tuple(oracle.naive_eval(f, trace, t) for t in range(len(trace)))
        mismatches += fast != slow
    assert mismatches == 0


@pytest.mark.criterion(C4)
@pytest.mark.parametrize("seed", range(5))
def test_order_axioms(seed):
    rng = random.Random(seed)
    names = [f"w{i}" for i in range(rng.randint(2, 6))]
    rng.shuffle(names)
    cuts = sorted(rng.sample(range(1, len(names)), rng.randint(0, len(names) - 1)))
    levels = [names[a:b] for a, b in zip([0] + cuts, cuts + [len(names)])]
    vb = ValueBase(tuple(tuple(Value(n, atom(n)) for n in level) for level in levels))
    pool = [Literal(n, s) for n in names for s in (True, False)]
    subsets = [frozenset(lit for lit in pool if rng.random() < 0.5) for _ in range(1000)]
    n = len(subsets)
    le = [0] * n
    for i, j in itertools.product(range(n), repeat=2):
        if leq(subsets[i], subsets[j], vb):
            le[i] |= 1 << j
    violations = 0
    for i in range(n):
        violations += not (le[i] >> i) & 1
        violations += strictly_less(subsets[i], subsets[i], vb)
        for j in range(i + 1, n):
            a, b = (le[i] >> j) & 1, (le[j] >> i) & 1
            violations += not (a or b)
            violations += strictly_less(subsets[i], subsets[j], vb) and strictly_less(subsets[j], subsets[i], vb)
        # i ⪯ j ⪯ m implies i ⪯ m, over every j above i
        above, rest = le[i], le[i]
        while rest:
            j = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            violations += bool(le[j] & ~above)
    assert violations == 0


CLI_RUNS = [
    ["validate", "--scenario", "table3"],
    ["play", "--scenario", "shopping_centre", "--joint", "Anna=hall_then_glass,Ben=litterbug"],
    ["attribute", "--scenario", "table3", "--joint", "A=sA,B=sB'", "--kind", "passive"],
    ["attribute", "--scenario", "table4", "--joint", "A=sA,B=sB''", "--kind", "inexcusable"],
    ["attribute", "--scenario", "table6", "--joint", "A=sA',B=sB'", "--value", "!w1"],
    ["anticipate", "--scenario", "table5", "--agent", "A", "--strategy", "sA'", "--kind", "inexcusable", "--all-witnesses"],
    ["dominance", "--scenario", "shopping_centre", "--agent", "Anna"],
    ["regret", "--scenario", "table4", "--all-witnesses"],
    ["recommend", "--scenario", "shopping_centre", "--agent", "Ben"],
    ["explain", "--scenario", "regret_explanation", "--strategy", "s"],
    ["fuzz", "-n", "3", "--seed", "7"],
]


@pytest.mark.criterion(C5)
@pytest.mark.parametrize("argv", CLI_RUNS, ids=[r[0] + "-" + str(i) for i, r in enumerate(CLI_RUNS)])
def test_structured_output_is_byte_identical(argv):
    outputs = []
    for hashseed in ("1", "2"):
        env = {**os.environ, "PYTHONHASHSEED": hashseed}
        proc = subprocess.run(
            [sys.executable, "-m", "mvresp", *argv, "--format", "json"],
            capture_output=True,
            env=env,
            timeout=120,
        )
        assert proc.returncode == 0, proc.stderr.decode()
        outputs.append(proc.stdout)
    assert outputs[0] == outputs[1]
    assert outputs[0].endswith(b"\n")
