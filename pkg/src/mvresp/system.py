"""Multiagent transition systems, moral action systems, histories and play."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Iterator, Mapping, Protocol

if TYPE_CHECKING:
    from .values import ValueBase

State = frozenset  # of proposition names

WILDCARD = "*"
DEFAULT_STRATEGY_CAP = 10**6


class ModelError(ValueError):
    """The transition table has no (or an ambiguous) row for a state/joint action."""


class StrategyError(ValueError):
    """A strategy tree cannot be applied, e.g. it lacks a reachable decision node."""


class CapExceeded(RuntimeError):
    """Exhaustive enumeration would exceed the configured strategy cap."""


@dataclass(frozen=True)
class JointAction:
    """One action per agent, stored in agent declaration order."""

    choices: tuple[tuple[str, str], ...]

    def __getitem__(self, agent: str) -> str:
        for a, act in self.choices:
            if a == agent:
                return act
        raise KeyError(agent)

    @property
    def agents(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.choices)

    @property
    def actions(self) -> tuple[str, ...]:
        return tuple(act for _, act in self.choices)

    def as_dict(self) -> dict[str, str]:
        return dict(self.choices)

    def __str__(self) -> str:
        return ",".join(f"{a}={act}" for a, act in self.choices)


@dataclass(frozen=True)
class History:
    states: tuple[State, ...]
    actions: tuple[JointAction, ...]

    def __post_init__(self) -> None:
        if len(self.states) != len(self.actions) + 1:
            raise ValueError("a k-history has k+1 states and k joint actions")

    @property
    def length(self) -> int:
        return len(self.actions)

    @classmethod
    def from_trace(cls, states: Iterable[Iterable[str]]) -> History:
        """Build a history from a bare state trace (actions left empty)."""
        sts = tuple(frozenset(s) for s in states)
        return cls(sts, tuple(JointAction(()) for _ in sts[1:]))

    def __str__(self) -> str:
        parts = [_show_state(self.states[0])]
        for j, s in zip(self.actions, self.states[1:]):
            parts.append(f"--[{j}]-->")
            parts.append(_show_state(s))
        return " ".join(parts)


def _show_state(s: State) -> str:
    return "{" + ",".join(sorted(s)) + "}"


def prefix(h: History, k: int) -> History:
    """The first ``k``+1 states and first ``k`` joint actions of ``h``."""
    if not 0 <= k <= h.length:
        raise ValueError(f"prefix length {k} outside 0..{h.length}")
    return History(h.states[: k + 1], h.actions[:k])


@dataclass(frozen=True)
class Transition:
    """A row of the transition table; ``None`` marks a wildcard component."""

    source: State | None
    joint: tuple[str | None, ...]
    target: State

    @property
    def specificity(self) -> int:
        return (self.source is not None) + sum(a is not None for a in self.joint)

    def matches(self, s: State, acts: tuple[str, ...]) -> bool:
        if self.source is not None and self.source != s:
            return False
        return all(w is None or w == a for w, a in zip(self.joint, acts))


@dataclass(frozen=True)
class MTS:
    propositions: tuple[str, ...]
    agents: tuple[str, ...]
    actions: tuple[str, ...]
    transitions: tuple[Transition, ...]
    available: tuple[tuple[str, ...], ...] = ()
    _lookup: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        if not self.agents:
            raise ValueError("an MTS needs at least one agent")
        if not self.actions:
            raise ValueError("the action set must be non-empty")
        if len(set(self.agents)) != len(self.agents):
            raise ValueError("duplicate agent names")
        if not self.available:
            object.__setattr__(self, "available", tuple(self.actions for _ in self.agents))
        if len(self.available) != len(self.agents):
            raise ValueError("one availability list per agent")
        declared = set(self.actions)
        for agent, acts in zip(self.agents, self.available):
            if not acts:
                raise ValueError(f"agent {agent} has no available action")
            bad = set(acts) - declared
            if bad:
                raise ValueError(f"agent {agent}: undeclared actions {sorted(bad)}")
        props = set(self.propositions)
        for row in self.transitions:
            if len(row.joint) != len(self.agents):
                raise ValueError("transition row joint action has the wrong arity")
            for s in (row.source, row.target):
                if s is not None and not s <= props:
                    raise ValueError(f"undeclared propositions {sorted(s - props)} in transition row")
            for w in row.joint:
                if w is not None and w not in declared:
                    raise ValueError(f"undeclared action {w!r} in transition row")

    def available_to(self, agent: str) -> tuple[str, ...]:
        return self.available[self.agents.index(agent)]

    def joint_actions(self) -> list[JointAction]:
        return [JointAction(tuple(zip(self.agents, combo))) for combo in itertools.product(*self.available)]

    def others(self, agent: str) -> tuple[str, ...]:
        return tuple(a for a in self.agents if a != agent)


def successor(m: MTS, s: State, j: JointAction) -> State:
    """τ(s, j): the most specific matching transition row wins.

    Raises:
        ModelError: no row matches, or two equally specific rows disagree.
    """
    acts = j.actions
    key = (s, acts)
    hit = m._lookup.get(key)
    if hit is not None:
        return hit
    best: list[Transition] = []
    best_spec = -1
    for row in m.transitions:
        if row.matches(s, acts):
            if row.specificity > best_spec:
                best, best_spec = [row], row.specificity
            elif row.specificity == best_spec:
                best.append(row)
    if not best:
        raise ModelError(f"no transition for state {_show_state(s)} under joint action {j}")
    targets = {row.target for row in best}
    if len(targets) > 1:
        raise ModelError(f"ambiguous transition for state {_show_state(s)} under joint action {j}")
    target = best[0].target
    m._lookup[key] = target
    return target


@dataclass(frozen=True)
class MAS:
    """A moral action system: MTS, start state, horizon and value base."""

    mts: MTS
    s0: State
    horizon: int
    values: ValueBase
    strategy_cap: int = field(default=DEFAULT_STRATEGY_CAP, compare=False)
    _memo: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if not self.s0 <= set(self.mts.propositions):
            raise ValueError(f"start state uses undeclared propositions {sorted(self.s0 - set(self.mts.propositions))}")

    @property
    def agents(self) -> tuple[str, ...]:
        return self.mts.agents

    def memo(self, key, build):
        """Per-instance cache for derived tables (strategies, plays, satsets)."""
        try:
            return self._memo[key]
        except KeyError:
            value = self._memo[key] = build()
            return value


def check_total(d: MAS) -> None:
    """Verify τ is defined on every state reachable before the horizon."""
    frontier = {d.s0}
    joints = d.mts.joint_actions()
    for _ in range(d.horizon):
        nxt = set()
        for s in frontier:
            for j in joints:
                nxt.add(successor(d.mts, s, j))
        frontier = nxt


def histories(d: MAS) -> Iterator[History]:
    """Every k-history reachable in ``d`` (one per joint-action sequence)."""
    joints = d.mts.joint_actions()
    for seq in itertools.product(joints, repeat=d.horizon):
        states = [d.s0]
        for j in seq:
            states.append(successor(d.mts, states[-1], j))
        yield History(tuple(states), tuple(seq))


def history_count(d: MAS) -> int:
    return len(d.mts.joint_actions()) ** d.horizon


# --------------------------------------------------------------------------
# decision nodes

Node = tuple[tuple[str, ...], ...]  # per past step, the other agents' actions


@dataclass(frozen=True)
class DecisionTree:
    """The decision points of one agent up to the horizon.

    A node is the sequence of the other agents' actions so far. The agent's
    own earlier moves are fixed by the strategy itself and states follow
    from τ, so this key identifies the reachable history uniquely.
    """

    agent: str
    others: tuple[str, ...]
    nodes: tuple[Node, ...]
    index: Mapping[Node, int] = field(compare=False, repr=False, hash=False)

    def children(self, node: Node, horizon: int) -> list[Node]:
        if len(node) + 1 >= horizon:
            return []
        return [n for n in self.nodes if len(n) == len(node) + 1 and n[:-1] == node]

    def __len__(self) -> int:
        return len(self.nodes)


def node_label(tree: DecisionTree, node: Node) -> str:
    if not node:
        return "root"
    return ";".join(",".join(f"{a}={act}" for a, act in zip(tree.others, step)) for step in node)


def strategy_count(d: MAS, agent: str) -> int:
    """|Act_i| ** (number of decision nodes), computed without enumeration."""
    mts = d.mts
    branching = math.prod(len(mts.available_to(o)) for o in mts.others(agent))
    nodes = sum(branching**t for t in range(d.horizon))
    own = len(mts.available_to(agent))
    if own == 1:
        return 1
    if nodes * math.log(own) > math.log(d.strategy_cap) + 1e-9:
        raise CapExceeded(
            f"agent {agent} has {own}^{nodes} strategies, above the cap of {d.strategy_cap}"
        )
    return own**nodes


def reachable_nodes(d: MAS, agent: str) -> DecisionTree:
    """Decision points of ``agent`` in breadth-first, action-declaration order.

    Raises:
        CapExceeded: if the implied strategy count is above ``d.strategy_cap``.
    """
    strategy_count(d, agent)

    def build() -> DecisionTree:
        mts = d.mts
        others = mts.others(agent)
        steps = list(itertools.product(*(mts.available_to(o) for o in others)))
        nodes: list[Node] = [()]
        layer: list[Node] = [()]
        for _ in range(d.horizon - 1):
            layer = [n + (step,) for n in layer for step in steps]
            nodes.extend(layer)
        return DecisionTree(agent, others, tuple(nodes), {n: i for i, n in enumerate(nodes)})

    return d.memo(("nodes", agent), build)


class _Tree(Protocol):
    def action_at(self, node: Node) -> str: ...


def play(js: Mapping[str, _Tree], d: MAS) -> History:
    """The unique k-history produced by a full joint strategy.

    The action at step t is chosen on the length-t prefix; the state at t+1
    is τ applied to the state at t and that joint action.

    Raises:
        StrategyError: an agent has no strategy, or its tree lacks a node.
    """
    mts = d.mts
    missing = [a for a in mts.agents if a not in js]
    if missing:
        raise StrategyError(f"no strategy for agents {missing}")
    trees = [js[a] for a in mts.agents]
    positions = {a: i for i, a in enumerate(mts.agents)}
    other_pos = [tuple(positions[o] for o in mts.others(a)) for a in mts.agents]
    keys: list[Node] = [() for _ in mts.agents]
    states = [d.s0]
    actions = []
    for _ in range(d.horizon):
        acts = tuple(tree.action_at(key) for tree, key in zip(trees, keys))
        for i, a in enumerate(mts.agents):
            if acts[i] not in mts.available[i]:
                raise StrategyError(f"action {acts[i]!r} is not available to {a}")
        j = JointAction(tuple(zip(mts.agents, acts)))
        actions.append(j)
        states.append(successor(mts, states[-1], j))
        keys = [key + (tuple(acts[p] for p in op),) for key, op in zip(keys, other_pos)]
    return History(tuple(states), tuple(actions))
