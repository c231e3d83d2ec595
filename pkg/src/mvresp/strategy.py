"""Strategy trees, exhaustive enumeration, weak dominance and symbolic regret."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .system import MAS, CapExceeded, DecisionTree, Node, StrategyError, node_label, play, reachable_nodes, strategy_count
from .values import OutcomeSet, ScoreVector, satset, score_vector


@dataclass(frozen=True)
class StrategyTree:
    """An action for every decision node of ``owner`` (see ``reachable_nodes``)."""

    owner: str
    choices: tuple[str, ...]
    tree: DecisionTree = field(compare=False, repr=False)
    label: str | None = field(default=None, compare=False)

    def action_at(self, node: Node) -> str:
        try:
            return self.choices[self.tree.index[node]]
        except KeyError:
            raise StrategyError(f"strategy of {self.owner} has no decision for node {node!r}") from None

    def as_dict(self) -> dict[str, str]:
        return {node_label(self.tree, n): a for n, a in zip(self.tree.nodes, self.choices)}

    def named(self, label: str | None) -> StrategyTree:
        return StrategyTree(self.owner, self.choices, self.tree, label)

    def __str__(self) -> str:
        if self.label:
            return self.label
        if len(self.choices) == 1:
            return f"{self.owner}:{self.choices[0]}"
        return f"{self.owner}:" + "".join(f"[{k}->{a}]" for k, a in self.as_dict().items())


@dataclass(frozen=True)
class JointStrategy:
    """One strategy tree per coalition member, in agent declaration order."""

    members: tuple[StrategyTree, ...] = ()

    @property
    def coalition(self) -> tuple[str, ...]:
        return tuple(t.owner for t in self.members)

    def __getitem__(self, agent: str) -> StrategyTree:
        for t in self.members:
            if t.owner == agent:
                return t
        raise KeyError(agent)

    def __contains__(self, agent: object) -> bool:
        return any(t.owner == agent for t in self.members)

    def __iter__(self) -> Iterator[str]:
        return iter(self.coalition)

    def __len__(self) -> int:
        return len(self.members)

    def without(self, agent: str) -> JointStrategy:
        return JointStrategy(tuple(t for t in self.members if t.owner != agent))

    def plus(self, tree: StrategyTree, order: Iterable[str]) -> JointStrategy:
        """Add (or replace) ``tree``; ``order`` is the agent declaration order."""
        by_owner = {t.owner: t for t in self.members}
        by_owner[tree.owner] = tree
        return JointStrategy(tuple(by_owner[a] for a in order if a in by_owner))

    def __str__(self) -> str:
        if not self.members:
            return "()"
        return "(" + ", ".join(str(t) for t in self.members) + ")"


def enumerate_strategies(d: MAS, agent: str) -> list[StrategyTree]:
    """All strategy trees of ``agent``; the first decision node varies slowest.

    Raises:
        CapExceeded: more than ``d.strategy_cap`` strategies.
    """
    tree = reachable_nodes(d, agent)

    def build() -> list[StrategyTree]:
        acts = d.mts.available_to(agent)
        return [StrategyTree(agent, combo, tree) for combo in itertools.product(acts, repeat=len(tree))]

    return d.memo(("strategies", agent), build)


def enumerate_joint(d: MAS, coalition: Iterable[str]) -> list[JointStrategy]:
    members = [a for a in d.agents if a in set(coalition)]
    total = 1
    for a in members:
        total *= strategy_count(d, a)
    if total > d.strategy_cap:
        raise CapExceeded(f"{total} joint strategies for {members}, above the cap of {d.strategy_cap}")

    def build() -> list[JointStrategy]:
        pools = [enumerate_strategies(d, a) for a in members]
        return [JointStrategy(combo) for combo in itertools.product(*pools)]

    return d.memo(("joint", tuple(members)), build)


def history_satset(d: MAS, js: JointStrategy) -> OutcomeSet:
    h = play(js, d)
    cache = d.memo("satsets", dict)
    hit = cache.get(h)
    if hit is None:
        hit = cache[h] = satset(h, d.values)
    return hit


@dataclass(frozen=True)
class OutcomeTable:
    """Outcomes of every own strategy (rows) against every opposing joint strategy (columns)."""

    agent: str
    strategies: tuple[StrategyTree, ...]
    opponents: tuple[JointStrategy, ...]
    sat: tuple[tuple[OutcomeSet, ...], ...]
    score: tuple[tuple[ScoreVector, ...], ...]
    row_of: dict = field(compare=False, repr=False)
    col_of: dict = field(compare=False, repr=False)

    def row(self, sigma: StrategyTree) -> int:
        try:
            return self.row_of[sigma]
        except KeyError:
            raise StrategyError(f"{sigma} is not a strategy of {self.agent}") from None

    def col(self, rest: JointStrategy) -> int:
        try:
            return self.col_of[rest]
        except KeyError:
            raise StrategyError(f"{rest} is not a joint strategy of the agents other than {self.agent}") from None

    def locate(self, js: JointStrategy) -> tuple[int, int]:
        return self.row(js[self.agent]), self.col(js.without(self.agent))


def outcome_table(d: MAS, agent: str) -> OutcomeTable:
    def build() -> OutcomeTable:
        strategies = tuple(enumerate_strategies(d, agent))
        opponents = tuple(enumerate_joint(d, d.mts.others(agent)))
        sat = tuple(
            tuple(history_satset(d, rest.plus(s, d.agents)) for rest in opponents) for s in strategies
        )
        score = tuple(tuple(score_vector(x, d.values) for x in row) for row in sat)
        return OutcomeTable(
            agent,
            strategies,
            opponents,
            sat,
            score,
            {s: i for i, s in enumerate(strategies)},
            {c: i for i, c in enumerate(opponents)},
        )

    return d.memo(("table", agent), build)


# --------------------------------------------------------------------------
# dominance

def weakly_dominates(d: MAS, agent: str, sigma: StrategyTree, other: StrategyTree) -> bool:
    """σ ≤_D σ′: ``other`` does at least as well as ``sigma`` against every opponent profile."""
    t = outcome_table(d, agent)
    r, r2 = t.row(sigma), t.row(other)
    return all(a <= b for a, b in zip(t.score[r], t.score[r2]))


def _dominated_rows(t: OutcomeTable) -> list[bool]:
    rows = t.score
    n = len(rows)
    weak = [[all(a <= b for a, b in zip(rows[r], rows[r2])) for r2 in range(n)] for r in range(n)]
    return [any(weak[r][r2] and not weak[r2][r] for r2 in range(n)) for r in range(n)]


def non_dominated(d: MAS, agent: str, sigma: StrategyTree) -> bool:
    t = outcome_table(d, agent)
    return not _dominated_rows(t)[t.row(sigma)]


def non_dominated_set(d: MAS, agent: str) -> list[StrategyTree]:
    t = outcome_table(d, agent)
    return [s for s, dom in zip(t.strategies, _dominated_rows(t)) if not dom]


# --------------------------------------------------------------------------
# symbolic regret

@dataclass(frozen=True)
class RegretWitness:
    context: JointStrategy  # the other agents' joint strategy
    alternative: StrategyTree


@dataclass(frozen=True)
class Regret:
    strategy: StrategyTree
    outcome: OutcomeSet
    score: ScoreVector
    witness: RegretWitness
    ties: tuple[tuple[OutcomeSet, RegretWitness], ...] = ()


def _halved(a: ScoreVector, b: ScoreVector) -> ScoreVector:
    # score(X \ Z) = (score(X) - score(Z)) / 2 for full satsets X, Z
    return tuple((x - y) // 2 for x, y in zip(a, b))


def _column_best(t: OutcomeTable) -> list[int]:
    best = []
    for c in range(len(t.opponents)):
        top = 0
        for r in range(1, len(t.strategies)):
            if t.score[r][c] > t.score[top][c]:
                top = r
        best.append(top)
    return best


def anticipated_regret(d: MAS, agent: str, sigma: StrategyTree, all_witnesses: bool = False) -> Regret:
    """The ⪯-least relative regret of ``sigma`` over all opponents and alternatives.

    Against a fixed opponent profile the worst regret comes from the best
    alternative in that column, so only column maxima are compared. The
    first witness in enumeration order is reported; ``all_witnesses`` also
    lists every tied (outcome, witness) pair.
    """
    t = outcome_table(d, agent)
    r = t.row(sigma)
    best = d.memo(("column_best", agent), lambda: _column_best(t))
    worst: ScoreVector | None = None
    at = (0, r)
    for c, top in enumerate(best):
        reg = _halved(t.score[r][c], t.score[top][c])
        if worst is None or reg < worst:
            worst, at = reg, (c, top)
    c, top = at
    outcome = t.sat[r][c] - t.sat[top][c]
    witness = RegretWitness(t.opponents[c], t.strategies[top])
    ties: tuple = ()
    if all_witnesses:
        ties = tuple(
            (t.sat[r][c2] - t.sat[r2][c2], RegretWitness(t.opponents[c2], t.strategies[r2]))
            for c2 in range(len(t.opponents))
            for r2 in range(len(t.strategies))
            if _halved(t.score[r][c2], t.score[r2][c2]) == worst
        )
    return Regret(sigma, outcome, worst, witness, ties)  # type: ignore[arg-type]


def outcome_signature(d: MAS, agent: str, sigma: StrategyTree) -> tuple[OutcomeSet, ...]:
    t = outcome_table(d, agent)
    return t.sat[t.row(sigma)]


def regret_minimising_set(d: MAS, agent: str, dedupe: bool = False) -> list[StrategyTree]:
    """Strategies whose anticipated regret is ⪯-maximal.

    With ``dedupe`` the regret is computed once per outcome signature; rows
    with identical outcomes always share their anticipated regret.
    """
    t = outcome_table(d, agent)
    if dedupe:
        reps: dict[tuple, ScoreVector] = {}
        scores = []
        for s in t.strategies:
            sig = t.sat[t.row(s)]
            if sig not in reps:
                reps[sig] = anticipated_regret(d, agent, s).score
            scores.append(reps[sig])
    else:
        scores = [anticipated_regret(d, agent, s).score for s in t.strategies]
    top = max(scores)
    return [s for s, sc in zip(t.strategies, scores) if sc == top]
