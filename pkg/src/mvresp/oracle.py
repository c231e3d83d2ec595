"""Brute-force verification of the attribution/anticipation results on small systems.

Everything the checker asserts is recomputed here from the definitions:
histories come from ``play``, satisfaction from a naive recursive LTLf
evaluator, comparison from the literal two-clause definition of ⪯, and
responsibility sets from explicit set differences. Library results are
then compared against those recomputations.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Any

import networkx as nx

from . import responsibility as resp
from . import strategy as strat
from .ltlf import Formula, neg
from .scenario_io import Scenario, ScenarioError, dump_scenario, load_scenario
from .system import MAS, CapExceeded, History, play, strategy_count
from .values import Literal, OutcomeSet, ValueBase, leq as lib_leq


# --------------------------------------------------------------------------
# naive semantics

def naive_eval(f: Formula, states: tuple[frozenset, ...], t: int) -> bool:
    """Direct transcription of the finite-trace satisfaction clauses."""
    k = len(states) - 1
    kind = f.kind
    if kind == "atom":
        return f.name in states[t]
    if kind == "top":
        return True
    if kind == "not":
        return not naive_eval(f.args[0], states, t)
    if kind == "and":
        return naive_eval(f.args[0], states, t) and naive_eval(f.args[1], states, t)
    if kind == "next":
        return t < k and naive_eval(f.args[0], states, t + 1)
    if kind == "until":
        a, b = f.args
        return any(
            naive_eval(b, states, t2) and all(naive_eval(a, states, t3) for t3 in range(t, t2))
            for t2 in range(t, k + 1)
        )
    raise ValueError(f"unknown formula kind {kind!r}")


def naive_holds(f: Formula, h: History) -> bool:
    return naive_eval(f, h.states, 0)


class DefinitionalOrder:
    """⪯ exactly as its two defining clauses read, with per-level counts."""

    def __init__(self, vb: ValueBase):
        self.vb = vb
        self.levels = [{v.name for v in level} for level in vb.levels]
        self._scores: dict[OutcomeSet, list[int]] = {}

    def level_score(self, X: OutcomeSet, n: int) -> int:
        names = self.levels[n]
        sat = sum(1 for lit in X if lit.positive and lit.value in names)
        vio = sum(1 for lit in X if not lit.positive and lit.value in names)
        return sat - vio

    def scores(self, X: OutcomeSet) -> list[int]:
        hit = self._scores.get(X)
        if hit is None:
            hit = self._scores[X] = [self.level_score(X, n) for n in range(len(self.levels))]
        return hit

    def leq(self, X: OutcomeSet, Y: OutcomeSet) -> bool:
        sx, sy = self.scores(X), self.scores(Y)
        m = len(sx)
        if all(sx[n] == sy[n] for n in range(m)):  # clause ii
            return True
        return any(
            sx[n] < sy[n] and all(sx[n2] == sy[n2] for n2 in range(n)) for n in range(m)
        )  # clause i

    def lt(self, X: OutcomeSet, Y: OutcomeSet) -> bool:
        return self.leq(X, Y) and not self.leq(Y, X)

    def worst(self, candidates: list[OutcomeSet]) -> OutcomeSet:
        for x in candidates:
            if all(self.leq(x, y) for y in candidates):
                return x
        raise AssertionError("⪯ is not total on the candidates")


# --------------------------------------------------------------------------
# random instances

class CapsError(ValueError):
    """The caps admit no instance."""


@dataclass(frozen=True)
class InstanceCaps:
    max_agents: int = 2
    max_props: int = 3
    max_actions: int = 2
    max_horizon: int = 2
    max_depth: int = 2
    max_values: int = 2
    max_levels: int = 2
    strategy_ceiling: int = 64
    seed: int = 0
    exact: bool = False  # use every max_* as the exact size
    pure_random: bool = False  # random formulas instead of the template pool

    def __post_init__(self) -> None:
        for f in fields(self):
            if f.name.startswith("max_") or f.name == "strategy_ceiling":
                if getattr(self, f.name) < 1:
                    raise ValueError(f"{f.name} must be positive")

    @classmethod
    def parse(cls, text: str, **base: Any) -> InstanceCaps:
        """``"max_agents=3,max_horizon=1"``; the ``max_`` prefix may be dropped."""
        kwargs: dict[str, Any] = dict(base)
        names = {f.name: f.type for f in fields(cls)}
        for part in filter(None, (p.strip() for p in text.split(","))):
            key, _, raw = part.partition("=")
            key = key.strip()
            if key not in names and f"max_{key}" in names:
                key = f"max_{key}"
            if key not in names:
                raise ValueError(f"unknown cap {key!r}")
            if key in ("exact", "pure_random"):
                kwargs[key] = raw.strip().lower() in ("1", "true", "yes")
            else:
                kwargs[key] = int(raw)
        return cls(**kwargs)

    def as_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_DEPTH1 = ["F {a}", "G {a}", "X {a}", "{a} U {b}", "{a} & {b}", "{a} | {b}"]
_DEPTH2 = ["F ({a} & {b})", "G ({a} | {b})", "F G {a}", "G F {a}", "X ({a} U {b})", "F X {a}", "!({a} U {b})", "G ({a} -> X {b})"]


def _literal(rng: random.Random, props: list[str]) -> str:
    p = rng.choice(props)
    return p if rng.random() < 0.5 else "!" + p


def _template_formula(rng: random.Random, props: list[str], max_depth: int) -> str:
    pool = _DEPTH1 + (_DEPTH2 if max_depth >= 2 else [])
    return rng.choice(pool).format(a=_literal(rng, props), b=_literal(rng, props))


def _random_formula(rng: random.Random, props: list[str], depth: int) -> str:
    if depth == 0 or rng.random() < 0.25:
        return rng.choice(props + ["true"])
    op = rng.choice(["!", "X", "F", "G", "&", "|", "->", "U"])
    if op in ("!", "X", "F", "G"):
        return f"{op}({_random_formula(rng, props, depth - 1)})"
    return f"({_random_formula(rng, props, depth - 1)} {op} {_random_formula(rng, props, depth - 1)})"


def _draw(rng: random.Random, hi: int, exact: bool) -> int:
    if exact or hi == 1 or rng.random() < 0.75:
        return hi
    return rng.randint(1, hi - 1)


def _strategy_counts(agents: int, actions: int, horizon: int) -> int:
    nodes = sum((actions ** (agents - 1)) ** t for t in range(horizon))
    return actions**nodes


def random_scenario(seed: int, caps: InstanceCaps | None = None) -> Scenario:
    """A random, load-validated system, fully determined by ``seed``.

    Value formulas are resampled while the value base draws a consistency
    warning; if that keeps failing the whole system is redrawn.

    Raises:
        CapsError: no draw satisfied the strategy ceiling, or no consistent
            value base was found.
    """
    caps = caps or InstanceCaps()
    rng = random.Random(seed)
    for _ in range(20):
        doc, shape, props = _random_system(rng, caps, seed)
        for _ in range(20):
            counter = itertools.count(1)
            doc["values"] = [
                [
                    {
                        "name": f"w{next(counter)}",
                        "formula": _random_formula(rng, props, caps.max_depth)
                        if caps.pure_random
                        else _template_formula(rng, props, caps.max_depth),
                    }
                    for _ in range(size)
                ]
                for size in shape
            ]
            sc = load_scenario(doc)
            if not sc.warnings:
                return sc
    raise CapsError(f"seed {seed}: no consistent value base found")


def _random_system(rng: random.Random, caps: InstanceCaps, seed: int) -> tuple[dict, list[int], list[str]]:
    for _ in range(100):
        n_agents = _draw(rng, caps.max_agents, caps.exact)
        n_actions = _draw(rng, caps.max_actions, caps.exact)
        horizon = _draw(rng, caps.max_horizon, caps.exact)
        if _strategy_counts(n_agents, n_actions, horizon) <= caps.strategy_ceiling:
            break
    else:
        raise CapsError(f"no instance within a strategy ceiling of {caps.strategy_ceiling}")
    n_props = _draw(rng, caps.max_props, caps.exact)
    agents = [chr(ord("A") + i) for i in range(n_agents)]
    props = ["p", "q", "r", "s", "t", "u", "v", "w"][:n_props] if n_props <= 8 else [f"p{i}" for i in range(n_props)]
    actions = [chr(ord("a") + i) for i in range(n_actions)]
    states = [sorted(c) for n in range(n_props + 1) for c in itertools.combinations(props, n)]
    transitions = [
        {"from": s, "joint": dict(zip(agents, combo)), "to": rng.choice(states)}
        for s in states
        for combo in itertools.product(actions, repeat=n_agents)
    ]
    doc = {
        "kind": "scenario",
        "name": f"random-{seed}",
        "agents": agents,
        "propositions": props,
        "actions": actions,
        "transitions": transitions,
        "s0": rng.choice(states),
        "horizon": horizon,
    }
    n_levels = _draw(rng, caps.max_levels, caps.exact)
    shape = [_draw(rng, caps.max_values, caps.exact) for _ in range(n_levels)]
    return doc, shape, props


def random_mas(seed: int, caps: InstanceCaps | None = None) -> MAS:
    return random_scenario(seed, caps).mas


# --------------------------------------------------------------------------
# checking

CLAIMS = (
    "passive_consistent_complete",
    "inexcusable_properties",
    "strong_implies_weak",
    "liability_equivalence",
    "anticipation_nonpositive",
    "passive_min_is_regret_min",
    "inexcusable_min_is_non_dominated",
    "recommendation_nonempty",
    "difference_preserves_order",
    "library_order",
    "library_attributions",
    "library_excuses",
    "library_liability",
    "library_anticipation",
    "library_minimisers",
)


@dataclass
class ClaimResult:
    passed: bool = True
    checked: int = 0
    counterexample: dict | None = None

    def check(self, ok: bool, payload: Any = None) -> None:
        self.checked += 1
        if not ok and self.passed:
            self.passed = False
            self.counterexample = payload() if callable(payload) else payload


@dataclass
class CheckReport:
    descriptor: dict
    scenario: dict
    claims: dict[str, ClaimResult] = field(default_factory=dict)
    findings: list[str] = field(default_factory=list)
    diagnostics: dict[str, Any] = field(default_factory=dict)
    skipped: str | None = None

    @property
    def passed(self) -> bool:
        return self.skipped is None and all(c.passed for c in self.claims.values())

    @property
    def failed_claims(self) -> list[str]:
        return [name for name, c in self.claims.items() if not c.passed]

    def verdicts(self) -> dict[str, bool]:
        return {name: c.passed for name, c in self.claims.items()}

    def counterexample(self) -> dict | None:
        """Replayable document: the scenario plus the failing claims."""
        failing = {n: self.claims[n].counterexample for n in self.failed_claims}
        if not failing:
            return None
        return {"kind": "counterexample", "scenario": self.scenario, "claims": failing}

    def to_dict(self) -> dict:
        return {
            "descriptor": self.descriptor,
            "passed": self.passed,
            "skipped": self.skipped,
            "claims": {
                n: {"passed": c.passed, "checked": c.checked, "counterexample": c.counterexample}
                for n, c in self.claims.items()
            },
            "findings": self.findings,
            "diagnostics": self.diagnostics,
        }


def _tree(t: strat.StrategyTree) -> dict:
    return {"owner": t.owner, "choices": t.as_dict()}


def _joint(js: strat.JointStrategy) -> dict:
    return {t.owner: t.as_dict() for t in js.members}


def _lits(X: OutcomeSet) -> list[str]:
    return sorted(str(lit) for lit in X)


class _AgentView:
    """Plays and satsets of one agent's strategies against every opposing profile."""

    def __init__(self, d: MAS, agent: str, satsets: dict[History, OutcomeSet], order: DefinitionalOrder):
        self.d, self.agent, self.order = d, agent, order
        self.S = strat.enumerate_strategies(d, agent)
        self.C = strat.enumerate_joint(d, d.mts.others(agent))
        self.hist = [[play(c.plus(s, d.agents), d) for c in self.C] for s in self.S]
        vb = d.values
        for row in self.hist:
            for h in row:
                if h not in satsets:
                    satsets[h] = frozenset(Literal(v.name, naive_holds(v.formula, h)) for v in vb.values)
        self.sat = [[satsets[h] for h in row] for row in self.hist]
        R = range(len(self.S))
        leq = order.leq
        self.dom = [[all(leq(self.sat[r][c], self.sat[r2][c]) for c in range(len(self.C))) for r2 in R] for r in R]
        self._weak = {}

    def js(self, r: int, c: int) -> strat.JointStrategy:
        return self.C[c].plus(self.S[r], self.d.agents)

    def via(self, r: int, c: int, r2: int) -> OutcomeSet:
        return self.sat[r][c] - self.sat[r2][c]

    def weak_excuse(self, r: int, r2: int) -> int | None:
        key = (r, r2)
        if key not in self._weak:
            self._weak[key] = next(
                (c for c in range(len(self.C)) if self.order.lt(self.sat[r2][c], self.sat[r][c])), None
            )
        return self._weak[key]

    def strong_excuse(self, r: int, c: int, r2: int) -> int | None:
        loss = self.sat[r2][c] - self.sat[r][c]
        empty: OutcomeSet = frozenset()
        for c2 in range(len(self.C)):
            gain = self.sat[r][c2] - self.sat[r2][c2]
            if self.order.lt(empty, gain) and self.order.leq(loss, gain):
                return c2
        return None

    def passive(self, r: int, c: int) -> set[OutcomeSet]:
        return {self.via(r, c, r2) for r2 in range(len(self.S))}

    def inexcusable(self, r: int, c: int) -> set[OutcomeSet]:
        return {self.via(r, c, r2) for r2 in range(len(self.S)) if self.weak_excuse(r, r2) is None}

    def anticipated(self, r: int, kind: str) -> OutcomeSet:
        pick = self.passive if kind == "passive" else self.inexcusable
        return self.order.worst([x for c in range(len(self.C)) for x in pick(r, c)])

    def regret(self, r: int) -> OutcomeSet:
        return self.order.worst(
            [self.sat[r][c] - self.sat[r2][c] for c in range(len(self.C)) for r2 in range(len(self.S))]
        )

    def maximisers(self, values: list[OutcomeSet]) -> set[int]:
        return {r for r, x in enumerate(values) if all(self.order.leq(y, x) for y in values)}

    def non_dominated(self) -> set[int]:
        R = range(len(self.S))
        return {r for r in R if not any(self.dom[r][r2] and not self.dom[r2][r] for r2 in R)}


def _describe(d: MAS) -> dict:
    mts = d.mts
    return {
        "agents": len(mts.agents),
        "propositions": len(mts.propositions),
        "actions": len(mts.actions),
        "horizon": d.horizon,
        "levels": [len(level) for level in d.values.levels],
        "values": {v.name: v.text for v in d.values.values},
    }


MAX_PROFILES = 4096


def check_instance(
    target: MAS | Scenario, descriptor: dict | None = None, max_profiles: int = MAX_PROFILES
) -> CheckReport:
    """Exhaustively check every claim on one system, for every agent.

    Systems with more than ``max_profiles`` joint strategies are reported as
    skipped: the checks are cubic in the number of own strategies.
    """
    sc = target if isinstance(target, Scenario) else Scenario("", target)
    d = sc.mas
    report = CheckReport({**(descriptor or {}), **_describe(d)}, dump_scenario(sc))
    report.claims = {name: ClaimResult() for name in CLAIMS}
    try:
        profiles = 1
        for agent in d.agents:
            profiles *= strategy_count(d, agent)
        if profiles > max_profiles:
            report.skipped = f"{profiles} joint strategies, above the checker limit of {max_profiles}"
            return report
        _check(d, report)
    except CapExceeded as exc:
        report.skipped = f"cap exceeded: {exc}"
    return report


def _check(d: MAS, report: CheckReport) -> None:
    vb = d.values
    order = DefinitionalOrder(vb)
    claims = report.claims
    satsets: dict[History, OutcomeSet] = {}
    truth: dict[tuple[History, str], bool] = {}

    def holds_lit(h: History, lit: Literal) -> bool:
        key = (h, lit.value)
        if key not in truth:
            truth[key] = naive_holds(vb[lit.value].formula, h)
        return truth[key] == lit.positive

    empty: OutcomeSet = frozenset()
    names = vb.names
    vacuous_mismatch = 0
    cycles = {}

    for agent in d.agents:
        v = _AgentView(d, agent, satsets, order)
        R, Cs = range(len(v.S)), range(len(v.C))

        def where(r, c, r2=None, **extra):
            out = {"agent": agent, "joint": _joint(v.js(r, c))}
            if r2 is not None:
                out["alternative"] = _tree(v.S[r2])
            out.update(extra)
            return out

        def consistent_complete(r: int, c: int, X: OutcomeSet) -> tuple[bool, bool]:
            h1 = v.hist[r][c]
            consistent = all(holds_lit(h1, lit) for lit in X) and any(
                all(holds_lit(v.hist[r2][c], lit.negated()) for lit in X) for r2 in R
            )
            untouched = [w for w in names if Literal(w, True) not in X and Literal(w, False) not in X]
            complete = any(
                all(holds_lit(h1, Literal(w, True)) == holds_lit(v.hist[r2][c], Literal(w, True)) for w in untouched)
                for r2 in R
            )
            return consistent, complete

        for r in R:
            for c in Cs:
                js = v.js(r, c)
                lib_passive = resp.passive_attributions(d, js, agent)
                lib_inex = resp.inexcusable_attributions(d, js, agent)
                def_passive = v.passive(r, c)
                def_inex = v.inexcusable(r, c)
                claims["library_attributions"].check(
                    lib_passive == def_passive and lib_inex == def_inex,
                    lambda: where(r, c, library_passive=[_lits(x) for x in lib_passive],
                                  library_inexcusable=[_lits(x) for x in lib_inex],
                                  expected_passive=[_lits(x) for x in def_passive],
                                  expected_inexcusable=[_lits(x) for x in def_inex]),
                )
                for X in lib_passive:
                    ok1, ok2 = consistent_complete(r, c, X)
                    claims["passive_consistent_complete"].check(ok1 and ok2, lambda: where(r, c, outcome=_lits(X), consistent=ok1, complete=ok2))
                for X in lib_inex:
                    ok1, ok2 = consistent_complete(r, c, X)
                    vias = [r2 for r2 in R if v.via(r, c, r2) == X]
                    weak_ok = any(v.weak_excuse(r, r2) is None for r2 in vias)
                    strong_ok = any(
                        v.strong_excuse(r, c, r2) is None or not order.leq(X, empty) for r2 in vias if v.weak_excuse(r, r2) is None
                    )
                    claims["inexcusable_properties"].check(
                        ok1 and ok2 and weak_ok and strong_ok,
                        lambda: where(r, c, outcome=_lits(X), consistent=ok1, complete=ok2,
                                      accepts_weak=weak_ok, accepts_strong=strong_ok),
                    )

                for r2 in R:
                    X = v.via(r, c, r2)
                    if not order.leq(X, empty):
                        continue
                    weak = v.weak_excuse(r, r2)
                    strong = v.strong_excuse(r, c, r2)
                    ok = strong is None or (weak is not None and order.lt(v.sat[r2][strong], v.sat[r][strong]))
                    claims["strong_implies_weak"].check(ok, lambda: where(r, c, r2, strong_witness=_joint(v.C[strong])))
                    lw = resp.weak_excuse(d, js, agent, v.S[r2])
                    ls = resp.strong_excuse(d, js, agent, v.S[r2])
                    lib_ok = (lw is None) == (weak is None) and (ls is None) == (strong is None)
                    if ls is not None:
                        c3 = v.C.index(ls.witness)
                        lib_ok = lib_ok and order.lt(v.sat[r2][c3], v.sat[r][c3])
                    claims["library_excuses"].check(
                        lib_ok,
                        lambda: where(r, c, r2, library_weak=lw is not None, library_strong=ls is not None,
                                      expected_weak=weak is not None, expected_strong=strong is not None),
                    )

                vac_inex = resp.inexcusable_attributions(d, js, agent, vacuous_positive=True)
                for w in names:
                    h1 = v.hist[r][c]
                    violated = not holds_lit(h1, Literal(w, True))
                    liable_def = violated and any(
                        holds_lit(v.hist[r2][c], Literal(w, True)) and v.dom[r][r2] for r2 in R
                    )
                    neg_lit = Literal(w, False)
                    in_inex = any(neg_lit in X for X in def_inex)
                    claims["liability_equivalence"].check(
                        liable_def == in_inex,
                        lambda: where(r, c, value=w, liable=liable_def, inexcusable_member=in_inex),
                    )
                    lib = bool(resp.liable(d, js, agent, neg(vb[w].formula)))
                    claims["library_liability"].check(
                        lib == liable_def, lambda: where(r, c, value=w, library=lib, expected=liable_def)
                    )
                    if liable_def != any(neg_lit in X for X in vac_inex):
                        vacuous_mismatch += 1

        anticipated = {kind: [v.anticipated(r, kind) for r in R] for kind in resp.KINDS}
        regrets = [v.regret(r) for r in R]
        for r in R:
            for kind in resp.KINDS:
                lib = resp.anticipate(d, agent, v.S[r], kind)
                expected = anticipated[kind][r]
                claims["anticipation_nonpositive"].check(
                    order.leq(lib.outcome, empty) and order.leq(expected, empty),
                    lambda: {"agent": agent, "strategy": _tree(v.S[r]), "kind": kind, "outcome": _lits(lib.outcome)},
                )
                same = order.leq(lib.outcome, expected) and order.leq(expected, lib.outcome)
                witness_ok = lib.outcome in (v.passive if kind == "passive" else v.inexcusable)(r, v.C.index(lib.context))
                claims["library_anticipation"].check(
                    same and witness_ok,
                    lambda: {"agent": agent, "strategy": _tree(v.S[r]), "kind": kind,
                             "library": _lits(lib.outcome), "expected": _lits(expected)},
                )
            lib_reg = strat.anticipated_regret(d, agent, v.S[r])
            claims["library_anticipation"].check(
                order.leq(lib_reg.outcome, regrets[r]) and order.leq(regrets[r], lib_reg.outcome),
                lambda: {"agent": agent, "strategy": _tree(v.S[r]), "kind": "regret",
                         "library": _lits(lib_reg.outcome), "expected": _lits(regrets[r])},
            )

        passive_min = v.maximisers(anticipated["passive"])
        inex_min = v.maximisers(anticipated["inexcusable"])
        regret_min = v.maximisers(regrets)
        nd = v.non_dominated()
        both = regret_min & nd
        idx = lambda trees: {v.S.index(t) for t in trees}  # noqa: E731
        names_of = lambda rows: [_tree(v.S[i]) for i in sorted(rows)]  # noqa: E731
        claims["passive_min_is_regret_min"].check(passive_min == regret_min, lambda: {"agent": agent, "passive_min": names_of(passive_min), "regret_min": names_of(regret_min)})
        claims["inexcusable_min_is_non_dominated"].check(inex_min == nd, lambda: {"agent": agent, "inexcusable_min": names_of(inex_min), "non_dominated": names_of(nd)})
        claims["recommendation_nonempty"].check(bool(both), lambda: {"agent": agent})
        lib_sets = {
            "passive_min": idx(resp.responsibility_minimising_set(d, agent, "passive")),
            "inexcusable_min": idx(resp.responsibility_minimising_set(d, agent, "inexcusable")),
            "regret_min": idx(strat.regret_minimising_set(d, agent)),
            "regret_min_dedupe": idx(strat.regret_minimising_set(d, agent, dedupe=True)),
            "non_dominated": idx(strat.non_dominated_set(d, agent)),
            "recommend": idx(resp.recommend(d, agent)),
        }
        expected_sets = {
            "passive_min": passive_min,
            "inexcusable_min": inex_min,
            "regret_min": regret_min,
            "regret_min_dedupe": regret_min,
            "non_dominated": nd,
            "recommend": both,
        }
        for key in lib_sets:
            claims["library_minimisers"].check(
                lib_sets[key] == expected_sets[key],
                lambda: {"agent": agent, "set": key, "library": names_of(lib_sets[key]), "expected": names_of(expected_sets[key])},
            )

        cycle = _strong_excuse_cycle(v)
        if cycle:
            cycles[agent] = cycle

    if vacuous_mismatch:
        report.findings.append(
            f"keeping accusations not below the empty set without an excuse check breaks the liability "
            f"equivalence in {vacuous_mismatch} (joint strategy, value) cases"
        )
    if cycles:
        report.diagnostics["strong_excuse_cycle"] = cycles

    # order: library vs clauses, and the set-difference corollary over all satsets
    distinct = sorted(set(satsets.values()), key=_lits)
    for X, Y in itertools.product(distinct, repeat=2):
        claims["library_order"].check(
            lib_leq(X, Y, vb) == order.leq(X, Y), lambda: {"X": _lits(X), "Y": _lits(Y)}
        )
    for X, Y, Z in itertools.product(distinct, repeat=3):
        ok = order.leq(X, Y) == order.leq(X - Z, Y - Z)
        ok = ok and all(
            2 * order.level_score(X - Z, n) == order.level_score(X, n) - order.level_score(Z, n)
            for n in range(len(vb.levels))
        )
        claims["difference_preserves_order"].check(ok, lambda: {"X": _lits(X), "Y": _lits(Y), "Z": _lits(Z)})


def _strong_excuse_cycle(v: _AgentView) -> list[dict] | None:
    """Cycle in "should have preferred σ′ to σ" edges derived from missing strong excuses."""
    g = nx.DiGraph()
    for r in range(len(v.S)):
        for c in range(len(v.C)):
            for r2 in range(len(v.S)):
                if v.order.lt(v.sat[r][c], v.sat[r2][c]) and v.strong_excuse(r, c, r2) is None:
                    g.add_edge(r, r2, context=c)
    try:
        cyc = nx.find_cycle(g)
    except nx.NetworkXNoCycle:
        return None
    return [
        {"chosen": _tree(v.S[a]), "preferred": _tree(v.S[b]), "against": _joint(v.C[g.edges[a, b]["context"]])}
        for a, b in cyc
    ]


def replay(counterexample: dict) -> CheckReport:
    """Re-run the checker on a serialized counterexample's scenario."""
    if counterexample.get("kind") != "counterexample":
        raise ScenarioError("not a counterexample document")
    return check_instance(load_scenario(counterexample["scenario"]))


# --------------------------------------------------------------------------
# fuzzing

@dataclass
class FuzzReport:
    n: int
    seed: int
    caps: InstanceCaps
    instances: list[dict] = field(default_factory=list)
    counterexamples: list[dict] = field(default_factory=list)

    @property
    def failures(self) -> int:
        return sum(1 for i in self.instances if not i["passed"] and not i.get("skipped"))

    @property
    def skipped(self) -> int:
        return sum(1 for i in self.instances if i.get("skipped"))

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def claim_totals(self) -> dict[str, dict[str, int]]:
        totals = {name: {"passed": 0, "failed": 0} for name in CLAIMS}
        for inst in self.instances:
            for name, passed in inst.get("verdicts", {}).items():
                totals[name]["passed" if passed else "failed"] += 1
        return totals

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "caps": self.caps.as_dict(),
            "passed": self.n - self.failures - self.skipped,
            "failed": self.failures,
            "skipped": self.skipped,
            "claims": self.claim_totals(),
            "instances": self.instances,
            "counterexamples": self.counterexamples,
        }


def _run_one(args: tuple[int, InstanceCaps]) -> tuple[dict, dict | None]:
    seed, caps = args
    try:
        sc = random_scenario(seed, caps)
    except CapsError as exc:
        return {"seed": seed, "passed": False, "error": str(exc)}, None
    report = check_instance(sc, {"seed": seed})
    summary = {
        "seed": seed,
        "passed": report.passed,
        "verdicts": {} if report.skipped else report.verdicts(),
        "findings": report.findings,
    }
    if report.skipped:
        summary["skipped"] = report.skipped
    return summary, report.counterexample()


def instance_seeds(n: int, seed: int) -> list[int]:
    rng = random.Random(seed)
    return [rng.getrandbits(32) for _ in range(n)]


def fuzz(n: int, caps: InstanceCaps | None = None, seed: int | None = None, jobs: int = 1) -> FuzzReport:
    """Check ``n`` seeded random instances; results are ordered by instance."""
    if n < 1:
        raise ValueError("fuzz needs at least one instance")
    caps = caps or InstanceCaps()
    seed = caps.seed if seed is None else seed
    work = [(s, caps) for s in instance_seeds(n, seed)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, work))
    else:
        results = [_run_one(w) for w in work]
    report = FuzzReport(n, seed, caps)
    for summary, cex in results:
        report.instances.append(summary)
        if cex is not None:
            report.counterexamples.append(cex)
    return report


__all__ = [
    "CLAIMS",
    "CapsError",
    "CheckReport",
    "DefinitionalOrder",
    "FuzzReport",
    "InstanceCaps",
    "check_instance",
    "fuzz",
    "instance_seeds",
    "naive_eval",
    "naive_holds",
    "random_mas",
    "random_scenario",
    "replay",
]
