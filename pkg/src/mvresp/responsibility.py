"""Responsibility attribution and anticipation for multi-value agents.

Responsibility of agent ``i`` in ``play(js)`` via an alternative strategy
σ′ is what the actual history realises that the counterfactual history
(σ′ against the same opponents) does not. Passive responsibility ranges
over every σ′; the inexcusable variant drops accusations for which ``i``
has a weak excuse.

A weak excuse for choosing σ_i over σ′ is an opposing profile under which
σ_i does strictly better than σ′. The condition is evaluated for every
accusation. An accusation strictly better than ∅ always has one (the
actual opponents), so inexcusable attributions are never positive. Pass
``vacuous_positive=True`` to instead keep every accusation that is not
strictly worse than ∅ without an excuse check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal as Kind

from .ltlf import Formula, holds, neg
from .strategy import (
    JointStrategy,
    OutcomeTable,
    StrategyTree,
    history_satset,
    non_dominated_set,
    outcome_table,
    regret_minimising_set,
)
from .system import MAS, play
from .values import Literal, OutcomeSet, ScoreVector, score_vector

KINDS = ("passive", "inexcusable")
ResponsibilityKind = Kind["passive", "inexcusable"]


class NotNegativeError(ValueError):
    """Excuses are only defined for accusations that are no better than ∅."""


class UnsatisfiedError(ValueError):
    """An accusation was requested for a formula that does not hold in the play."""


@dataclass(frozen=True)
class Excuse:
    kind: str  # "weak" | "strong"
    witness: JointStrategy
    gain: OutcomeSet  # what σ_i achieves over σ′ under the witness


@dataclass(frozen=True)
class Attribution:
    agent: str
    kind: str
    outcome: OutcomeSet
    via: StrategyTree
    context: JointStrategy
    score: ScoreVector
    excuse: Excuse | None = None


@dataclass(frozen=True)
class Liability:
    liable: bool
    via: StrategyTree | None = None

    def __bool__(self) -> bool:
        return self.liable


@dataclass(frozen=True)
class Anticipation:
    agent: str
    strategy: StrategyTree
    kind: str
    outcome: OutcomeSet
    score: ScoreVector
    context: JointStrategy
    via: StrategyTree
    ties: tuple[tuple[OutcomeSet, JointStrategy, StrategyTree], ...] = ()


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise ValueError(f"unknown responsibility kind {kind!r}; expected one of {KINDS}")


def _zero(d: MAS) -> ScoreVector:
    return (0,) * len(d.values.levels)


def _swap(d: MAS, js: JointStrategy, sigma: StrategyTree) -> JointStrategy:
    return js.plus(sigma, d.agents)


def responsible_via(d: MAS, js: JointStrategy, agent: str, alternative: StrategyTree) -> OutcomeSet:
    """satset(play(js)) minus satset(play(js with ``agent`` switched to ``alternative``))."""
    return history_satset(d, js) - history_satset(d, _swap(d, js, alternative))


def passive_attributions(d: MAS, js: JointStrategy, agent: str) -> frozenset[OutcomeSet]:
    t = outcome_table(d, agent)
    r, c = t.locate(js)
    return frozenset(t.sat[r][c] - t.sat[r2][c] for r2 in range(len(t.strategies)))


def _excuse_column(t: OutcomeTable, r: int, r2: int) -> int | None:
    """First opposing profile under which row ``r`` strictly beats row ``r2``."""
    for c, (a, b) in enumerate(zip(t.score[r], t.score[r2])):
        if a > b:
            return c
    return None


def _excused(d: MAS, t: OutcomeTable, r: int, r2: int) -> int | None:
    cache = d.memo(("excused", t.agent), dict)
    key = (r, r2)
    if key not in cache:
        cache[key] = _excuse_column(t, r, r2)
    return cache[key]


def _inexcusable(d: MAS, t: OutcomeTable, r: int, c: int, r2: int, vacuous_positive: bool) -> bool:
    if vacuous_positive and t.score[r][c] >= t.score[r2][c]:
        return True
    return _excused(d, t, r, r2) is None


def inexcusable_attributions(
    d: MAS, js: JointStrategy, agent: str, vacuous_positive: bool = False
) -> frozenset[OutcomeSet]:
    t = outcome_table(d, agent)
    r, c = t.locate(js)
    return frozenset(
        t.sat[r][c] - t.sat[r2][c]
        for r2 in range(len(t.strategies))
        if _inexcusable(d, t, r, c, r2, vacuous_positive)
    )


def attributions(d: MAS, js: JointStrategy, agent: str) -> list[Attribution]:
    """One report per alternative strategy, in enumeration order.

    ``kind`` is ``"inexcusable"`` when no weak excuse blocks the accusation,
    else ``"passive"`` with the blocking excuse attached.
    """
    t = outcome_table(d, agent)
    r, c = t.locate(js)
    out = []
    for r2, alt in enumerate(t.strategies):
        x = t.sat[r][c] - t.sat[r2][c]
        col = _excused(d, t, r, r2)
        excuse = None
        if col is not None:
            excuse = Excuse("weak", t.opponents[col], t.sat[r][col] - t.sat[r2][col])
        out.append(
            Attribution(
                agent,
                "passive" if excuse else "inexcusable",
                x,
                alt,
                js,
                score_vector(x, d.values),
                excuse,
            )
        )
    return out


def weak_excuse_acceptance_failures(d: MAS, js: JointStrategy, agent: str, kind: str) -> list[OutcomeSet]:
    """Attributed sets for which every via-strategy admits a weak excuse.

    Empty for ``inexcusable`` by construction; non-empty results for
    ``passive`` show that passive responsibility does not accept excuses.
    """
    _check_kind(kind)
    t = outcome_table(d, agent)
    r, c = t.locate(js)
    attributed = passive_attributions(d, js, agent) if kind == "passive" else inexcusable_attributions(d, js, agent)
    failures = []
    for x in attributed:
        vias = [r2 for r2 in range(len(t.strategies)) if t.sat[r][c] - t.sat[r2][c] == x]
        if all(_excused(d, t, r, r2) is not None for r2 in vias):
            failures.append(x)
    return sorted(failures, key=lambda x: (score_vector(x, d.values), sorted(x)))


# --------------------------------------------------------------------------
# single-value accusations and liability

def accusations(d: MAS, js: JointStrategy, agent: str, omega: Formula) -> list[StrategyTree]:
    """Alternative strategies whose play (same opponents) violates ``omega``.

    Raises:
        UnsatisfiedError: ``omega`` does not hold in ``play(js)``.
    """
    if not holds(omega, play(js, d)):
        raise UnsatisfiedError("the formula does not hold in the actual play")
    t = outcome_table(d, agent)
    return [alt for alt in t.strategies if not holds(omega, play(_swap(d, js, alt), d))]


def liable(d: MAS, js: JointStrategy, agent: str, omega: Formula) -> Liability:
    """Liability: ``omega`` holds, and some accusation weakly dominates the chosen strategy."""
    if not holds(omega, play(js, d)):
        return Liability(False)
    t = outcome_table(d, agent)
    r = t.row(js[agent])
    for alt in accusations(d, js, agent, omega):
        r2 = t.row(alt)
        if all(a <= b for a, b in zip(t.score[r], t.score[r2])):
            return Liability(True, alt)
    return Liability(False)


def value_formula(d: MAS, name: str, positive: bool = True) -> Formula:
    f = d.values[name].formula
    return f if positive else neg(f)


# --------------------------------------------------------------------------
# excuses

def _excuse_setup(d: MAS, js: JointStrategy, agent: str, alternative: StrategyTree) -> tuple[OutcomeTable, int, int, int]:
    t = outcome_table(d, agent)
    r, c = t.locate(js)
    r2 = t.row(alternative)
    if t.score[r][c] > t.score[r2][c]:
        raise NotNegativeError(
            f"responsibility via {alternative} is strictly better than the empty set; excuses do not apply"
        )
    return t, r, c, r2


def weak_excuse(d: MAS, js: JointStrategy, agent: str, alternative: StrategyTree) -> Excuse | None:
    """An opposing profile under which the chosen strategy beats ``alternative``.

    Raises:
        NotNegativeError: the accusation via ``alternative`` is better than ∅.
    """
    t, r, _, r2 = _excuse_setup(d, js, agent, alternative)
    col = _excused(d, t, r, r2)
    if col is None:
        return None
    return Excuse("weak", t.opponents[col], t.sat[r][col] - t.sat[r2][col])


def strong_excuse(d: MAS, js: JointStrategy, agent: str, alternative: StrategyTree) -> Excuse | None:
    """An opposing profile whose gain G over ``alternative`` satisfies G ≻ ∅ and L ⪯ G.

    L is what ``alternative`` would have realised over the actual play. The
    comparison with ∅ is strict and the one with L is not.
    """
    t, r, c, r2 = _excuse_setup(d, js, agent, alternative)
    loss = score_vector(t.sat[r2][c] - t.sat[r][c], d.values)
    zero = _zero(d)
    for c2, rest in enumerate(t.opponents):
        gain = t.sat[r][c2] - t.sat[r2][c2]
        g = score_vector(gain, d.values)
        if g > zero and loss <= g:
            return Excuse("strong", rest, gain)
    return None


# --------------------------------------------------------------------------
# anticipation

def anticipate(d: MAS, agent: str, sigma: StrategyTree, kind: str, all_witnesses: bool = False) -> Anticipation:
    """The ⪯-worst set ``agent`` may be ``kind``-responsible for when playing ``sigma``."""
    _check_kind(kind)
    t = outcome_table(d, agent)
    r = t.row(sigma)
    found: list[tuple[ScoreVector, OutcomeSet, int, int]] = []
    for c in range(len(t.opponents)):
        for r2 in range(len(t.strategies)):
            if kind == "inexcusable" and _excused(d, t, r, r2) is not None:
                continue
            x = t.sat[r][c] - t.sat[r2][c]
            found.append((score_vector(x, d.values), x, c, r2))
    worst = min(f[0] for f in found)
    score, x, c, r2 = next(f for f in found if f[0] == worst)
    ties: tuple = ()
    if all_witnesses:
        ties = tuple((f[1], t.opponents[f[2]], t.strategies[f[3]]) for f in found if f[0] == worst)
    return Anticipation(agent, sigma, kind, x, score, t.opponents[c], t.strategies[r2], ties)


def responsibility_minimising_set(d: MAS, agent: str, kind: str) -> list[StrategyTree]:
    t = outcome_table(d, agent)
    scores = [anticipate(d, agent, s, kind).score for s in t.strategies]
    top = max(scores)
    return [s for s, sc in zip(t.strategies, scores) if sc == top]


@dataclass(frozen=True)
class Recommendation:
    regret_minimising: tuple[StrategyTree, ...]
    non_dominated: tuple[StrategyTree, ...]
    both: tuple[StrategyTree, ...]


def recommendation(d: MAS, agent: str) -> Recommendation:
    regret = regret_minimising_set(d, agent)
    nd = non_dominated_set(d, agent)
    keep = set(nd)
    return Recommendation(tuple(regret), tuple(nd), tuple(s for s in regret if s in keep))


def recommend(d: MAS, agent: str) -> list[StrategyTree]:
    """Strategies that are both regret-minimising and non-dominated."""
    return list(recommendation(d, agent).both)


def naive_union_diagnostic(d: MAS, agent: str, sigma: StrategyTree) -> OutcomeSet:
    """Union of violated values over all passive attributions of ``sigma``.

    Non-normative: reproduces the pitfall of pooling responsibility across
    histories, where a dominating strategy can look worse.
    """
    t = outcome_table(d, agent)
    r = t.row(sigma)
    out: set[Literal] = set()
    for c in range(len(t.opponents)):
        for r2 in range(len(t.strategies)):
            out |= {lit for lit in t.sat[r][c] - t.sat[r2][c] if not lit.positive}
    return frozenset(out)
