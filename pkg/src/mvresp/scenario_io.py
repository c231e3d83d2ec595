"""Scenario and matrix documents, the matrix compiler and the shipped fixtures.

Documents are JSON trees. ``canonical_json`` is the single on-disk encoding
(sorted keys, two-space indent, trailing newline) so fixture files and
goldens are byte-stable.

Scenario document::

    {"kind": "scenario", "name": ..., "agents": [...], "propositions": [...],
     "actions": [...], "availability": {agent: [action, ...]},      # optional
     "transitions": [{"from": [props] | "*",
                      "joint": {agent: action | "*"}, "to": [props]}],
     "s0": [props], "horizon": k,
     "values": [[{"name": ..., "formula": ...}, ...], ...],          # level 1 first
     "strategies": {agent: {label: {node: action, "*": default}}}}  # optional

A node is ``"root"`` or the other agents' past actions, e.g. ``"B=a;B=b"``.

Matrix document (one-shot two-agent game, compiled to a horizon-1 system)::

    {"kind": "matrix", "name": ..., "row_agent": "A", "rows": [labels],
     "col_agent": "B", "cols": [labels], "cells": [[[value names]]],
     "values": [[value names], ...],
     "row_available": [labels], "col_available": [labels]}        # optional
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .ltlf import FormulaSyntaxError, atoms, parse_formula
from .strategy import StrategyTree, enumerate_strategies
from .system import (
    MAS,
    MTS,
    DecisionTree,
    ModelError,
    Node,
    Transition,
    check_total,
    node_label,
    reachable_nodes,
)
from .values import Value, ValueBase, check_value_base

FIXTURE_NAMES = (
    "table1a",
    "table1b",
    "table1c",
    "table2",
    "table3",
    "table4",
    "table5",
    "table6",
    "shopping_centre",
    "regret_explanation",
)


class ScenarioError(ValueError):
    """A document that does not describe a valid moral action system."""


@dataclass
class Scenario:
    name: str
    mas: MAS
    strategies: dict[str, dict[str, StrategyTree]] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    description: str = ""

    def strategy(self, agent: str, label: str) -> StrategyTree:
        try:
            return self.strategies[agent][label]
        except KeyError:
            raise KeyError(f"no strategy {label!r} for agent {agent!r}") from None

    def label_of(self, tree: StrategyTree) -> StrategyTree:
        """Attach the scenario label to an enumerated tree, when it has one."""
        for label, named in self.strategies.get(tree.owner, {}).items():
            if named == tree:
                return tree.named(label)
        return tree


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _require(doc: Mapping, key: str) -> Any:
    if key not in doc:
        raise ScenarioError(f"missing field {key!r}")
    return doc[key]


def _state(props: Any, declared: set[str], where: str) -> frozenset:
    if not isinstance(props, list) or not all(isinstance(p, str) for p in props):
        raise ScenarioError(f"{where}: a state is a list of proposition names")
    s = frozenset(props)
    if not s <= declared:
        raise ScenarioError(f"{where}: dangling propositions {sorted(s - declared)}")
    return s


def _parse_node(text: str, tree: DecisionTree) -> Node:
    if text == "root":
        return ()
    steps = []
    for step in text.split(";"):
        pairs = dict(part.split("=", 1) for part in step.split(",") if "=" in part)
        if set(pairs) != set(tree.others):
            raise ScenarioError(f"node {text!r}: each step must name every other agent {list(tree.others)}")
        steps.append(tuple(pairs[o] for o in tree.others))
    return tuple(steps)


def _strategy_from_doc(d: MAS, agent: str, label: str, spec: Mapping[str, str]) -> StrategyTree:
    tree = reachable_nodes(d, agent)
    chosen: dict[Node, str] = {}
    default = spec.get("*")
    for key, action in spec.items():
        if key == "*":
            continue
        node = _parse_node(key, tree)
        if node not in tree.index:
            raise ScenarioError(f"strategy {label!r}: {key!r} is not a decision node of {agent}")
        chosen[node] = action
    choices = []
    for node in tree.nodes:
        action = chosen.get(node, default)
        if action is None:
            raise ScenarioError(f"strategy {label!r} of {agent} has no action at node {node_label(tree, node)!r}")
        if action not in d.mts.available_to(agent):
            raise ScenarioError(f"strategy {label!r}: action {action!r} is not available to {agent}")
        choices.append(action)
    return StrategyTree(agent, tuple(choices), tree, label)


def load_scenario(document: Mapping | str | Path, strategy_cap: int | None = None) -> Scenario:
    """Validate a document (or a path to one) and build its moral action system.

    Matrix documents are compiled with :func:`compile_matrix`. Value-base
    consistency problems become warnings on the returned scenario.

    Raises:
        ScenarioError: malformed document, dangling reference, non-total
            transitions, horizon below 1, unparsable value formula.
    """
    if isinstance(document, (str, Path)):
        try:
            document = json.loads(Path(document).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"not a JSON document: {exc}") from None
    if not isinstance(document, Mapping):
        raise ScenarioError("a scenario document is a JSON object")
    kind = document.get("kind", "scenario")
    if kind == "matrix":
        return compile_matrix(document, strategy_cap=strategy_cap)
    if kind != "scenario":
        raise ScenarioError(f"unknown document kind {kind!r}")
    try:
        return _load(document, strategy_cap)
    except (ModelError, FormulaSyntaxError) as exc:
        raise ScenarioError(str(exc)) from None
    except (TypeError, AttributeError) as exc:
        raise ScenarioError(f"malformed document: {exc}") from None


def _load(doc: Mapping, strategy_cap: int | None) -> Scenario:
    agents = tuple(_require(doc, "agents"))
    props = tuple(_require(doc, "propositions"))
    actions = tuple(_require(doc, "actions"))
    declared = set(props)
    availability = doc.get("availability", {})
    for a in availability:
        if a not in agents:
            raise ScenarioError(f"availability names unknown agent {a!r}")
    available = tuple(tuple(availability.get(a, actions)) for a in agents)

    rows = []
    for n, row in enumerate(_require(doc, "transitions")):
        where = f"transition {n}"
        src = row.get("from", "*")
        source = None if src == "*" else _state(src, declared, where)
        joint_doc = row.get("joint", {})
        for a in joint_doc:
            if a not in agents:
                raise ScenarioError(f"{where}: unknown agent {a!r}")
        joint = tuple(None if joint_doc.get(a, "*") == "*" else joint_doc[a] for a in agents)
        rows.append(Transition(source, joint, _state(_require(row, "to"), declared, where)))

    levels = []
    for level in _require(doc, "values"):
        vals = []
        for v in level:
            f = parse_formula(_require(v, "formula"))
            missing = atoms(f) - declared
            if missing:
                raise ScenarioError(f"value {v['name']!r} uses undeclared propositions {sorted(missing)}")
            vals.append(Value(_require(v, "name"), f, v["formula"]))
        levels.append(tuple(vals))

    horizon = _require(doc, "horizon")
    if not isinstance(horizon, int) or horizon < 1:
        raise ScenarioError("horizon must be an integer of at least 1")
    try:
        mts = MTS(props, agents, actions, tuple(rows), available)
        vb = ValueBase(tuple(levels))
        extra = {} if strategy_cap is None else {"strategy_cap": strategy_cap}
        mas = MAS(mts, _state(_require(doc, "s0"), declared, "s0"), horizon, vb, **extra)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    try:
        check_total(mas)
    except ModelError as exc:
        raise ScenarioError(f"transition table is not total: {exc}") from None

    named: dict[str, dict[str, StrategyTree]] = {}
    for agent, table in doc.get("strategies", {}).items():
        if agent not in agents:
            raise ScenarioError(f"strategies given for unknown agent {agent!r}")
        named[agent] = {label: _strategy_from_doc(mas, agent, label, spec) for label, spec in table.items()}

    return Scenario(
        doc.get("name", ""),
        mas,
        named,
        check_value_base(mas).warnings,
        doc.get("description", ""),
    )


def compile_matrix(m: Mapping, strategy_cap: int | None = None) -> Scenario:
    """Compile a two-agent normal-form table into a horizon-1 system.

    Value ``w`` becomes proposition ``p_w`` and formula ``F p_w``; the cell
    at (row r, column c) is the successor of the empty start state under
    the r-th and c-th actions. Labels map one-to-one onto actions ``a1..an``.
    """
    rows, cols, cells = list(_require(m, "rows")), list(_require(m, "cols")), _require(m, "cells")
    if not rows or not cols:
        raise ScenarioError("empty matrix")
    if len(cells) != len(rows) or any(len(r) != len(cols) for r in cells):
        raise ScenarioError("cells must form a rows x cols rectangle")
    levels = _require(m, "values")
    names = [v for level in levels for v in level]
    for r in cells:
        for cell in r:
            bad = set(cell) - set(names)
            if bad:
                raise ScenarioError(f"cell mentions undeclared values {sorted(bad)}")
    row_agent, col_agent = _require(m, "row_agent"), _require(m, "col_agent")
    actions = [f"a{n + 1}" for n in range(max(len(rows), len(cols)))]
    row_act = dict(zip(rows, actions))
    col_act = dict(zip(cols, actions))
    row_avail = m.get("row_available", rows)
    col_avail = m.get("col_available", cols)
    for lab in row_avail:
        if lab not in row_act:
            raise ScenarioError(f"unknown row label {lab!r}")
    for lab in col_avail:
        if lab not in col_act:
            raise ScenarioError(f"unknown column label {lab!r}")
    doc = {
        "kind": "scenario",
        "name": m.get("name", ""),
        "description": m.get("description", ""),
        "agents": [row_agent, col_agent],
        "propositions": [f"p_{v}" for v in names],
        "actions": actions,
        "availability": {
            row_agent: [row_act[lab] for lab in row_avail],
            col_agent: [col_act[lab] for lab in col_avail],
        },
        "transitions": [
            {
                "from": [],
                "joint": {row_agent: row_act[r], col_agent: col_act[c]},
                "to": sorted(f"p_{v}" for v in cells[i][j]),
            }
            for i, r in enumerate(rows)
            for j, c in enumerate(cols)
        ],
        "s0": [],
        "horizon": 1,
        "values": [[{"name": v, "formula": f"F p_{v}"} for v in level] for level in levels],
        "strategies": {
            row_agent: {lab: {"root": row_act[lab]} for lab in row_avail},
            col_agent: {lab: {"root": col_act[lab]} for lab in col_avail},
        },
    }
    return load_scenario(doc, strategy_cap=strategy_cap)


def dump_scenario(sc: Scenario) -> dict:
    """Canonical scenario document for ``sc`` (matrix sources come back as scenarios)."""
    d = sc.mas
    mts = d.mts
    rows = []
    for t in mts.transitions:
        rows.append(
            {
                "from": "*" if t.source is None else sorted(t.source),
                "joint": {a: "*" if w is None else w for a, w in zip(mts.agents, t.joint)},
                "to": sorted(t.target),
            }
        )
    doc: dict[str, Any] = {
        "kind": "scenario",
        "name": sc.name,
        "agents": list(mts.agents),
        "propositions": list(mts.propositions),
        "actions": list(mts.actions),
        "availability": {a: list(acts) for a, acts in zip(mts.agents, mts.available)},
        "transitions": rows,
        "s0": sorted(d.s0),
        "horizon": d.horizon,
        "values": [[{"name": v.name, "formula": v.text} for v in level] for level in d.values.levels],
        "strategies": {
            agent: {label: tree.as_dict() for label, tree in table.items()}
            for agent, table in sc.strategies.items()
        },
    }
    if sc.description:
        doc["description"] = sc.description
    return doc


def strategy_index(sc: Scenario, tree: StrategyTree) -> int:
    return enumerate_strategies(sc.mas, tree.owner).index(tree)


# --------------------------------------------------------------------------
# fixtures

def _matrix(name, rows, cols, cells, values, description="", **extra) -> dict:
    doc = {
        "kind": "matrix",
        "name": name,
        "description": description,
        "row_agent": "A",
        "rows": rows,
        "col_agent": "B",
        "cols": cols,
        "cells": cells,
        "values": values,
    }
    doc.update(extra)
    return doc


_SHOP_TASKS = {"garden": ("plants", "litter"), "hall": ("bins", "floor"), "glass": ("windows",)}


def _shop_step(state: frozenset, anna: str, ben: str) -> frozenset:
    done = set(_SHOP_TASKS[anna])
    if ben == "block_bins":
        done.discard("bins")
    out = set(state) | done
    if ben == "drop_litter":
        out.discard("litter")
    return frozenset(out)


def _shopping_centre() -> dict:
    agents = ["Anna", "Ben"]
    anna_acts = ["garden", "hall", "glass"]
    ben_acts = ["idle", "block_bins", "drop_litter"]
    horizon = 2
    frontier = {frozenset()}
    rows = []
    for _ in range(horizon):
        nxt = set()
        for s in sorted(frontier, key=sorted):
            for a, b in itertools.product(anna_acts, ben_acts):
                t = _shop_step(s, a, b)
                rows.append({"from": sorted(s), "joint": {"Anna": a, "Ben": b}, "to": sorted(t)})
                nxt.add(t)
        frontier = nxt
    seen, unique = set(), []
    for r in rows:
        key = json.dumps(r, sort_keys=True)
        if key not in seen:
            seen.add(key)
            unique.append(r)
    return {
        "kind": "scenario",
        "name": "shopping_centre",
        "description": (
            "Illustrative cleaning-robot model. Anna picks one job area per step; "
            "Ben may block the bins or drop litter. The transition system is "
            "designed for this artifact; only the five values come from the example."
        ),
        "agents": agents,
        "propositions": ["plants", "bins", "windows", "litter", "floor"],
        "actions": anna_acts + ben_acts,
        "availability": {"Anna": anna_acts, "Ben": ben_acts},
        "transitions": unique,
        "s0": [],
        "horizon": horizon,
        "values": [
            [
                {"name": "w1", "formula": "F plants"},
                {"name": "w2", "formula": "F bins"},
                {"name": "w3", "formula": "F windows"},
                {"name": "w4", "formula": "F (litter & !X true)"},
                {"name": "w5", "formula": "F floor"},
            ]
        ],
        "strategies": {
            "Anna": {
                "garden_then_hall": {"root": "garden", "*": "hall"},
                "hall_then_garden": {"root": "hall", "*": "garden"},
                "hall_then_glass": {"root": "hall", "*": "glass"},
            },
            "Ben": {
                "idle": {"*": "idle"},
                "blocker": {"*": "block_bins"},
                "litterbug": {"root": "idle", "*": "drop_litter"},
            },
        },
    }


def fixture_documents() -> dict[str, dict]:
    """The shipped fixture corpus, as documents."""
    t1_rows = ["sA", "sA'", "sA''", "sA'''"]
    t1_cells = [[[]], [["w1"]], [["w2"]], [["w1", "w2"]]]
    t1 = dict(rows=t1_rows, cols=["sB"], cells=t1_cells, values=[["w1", "w2"]])
    docs = {
        "table1a": _matrix("table1a", description="Scenario A: Anna has sA and sA' only.",
                           row_available=t1_rows[:2], **t1),
        "table1b": _matrix("table1b", description="Scenario B: Anna also has sA''.",
                           row_available=t1_rows[:3], **t1),
        "table1c": _matrix("table1c", description="Scenario C: all four strategies.", **t1),
        "table2": _matrix(
            "table2",
            ["sA", "sA'"],
            ["sB", "sB'"],
            [[["w1", "w2"], ["w3"]], [[], ["w1", "w2"]]],
            [["w1", "w2", "w3"]],
            "Completeness of responsibility sets.",
        ),
        "table3": _matrix(
            "table3",
            ["sA", "sA'"],
            ["sB", "sB'"],
            [[["w1", "w2"], []], [[], ["w1", "w2"]]],
            [["w1", "w2"]],
            "Symmetric risk; motivates excuses.",
        ),
        "table4": _matrix(
            "table4",
            ["sA", "sA'", "sA''"],
            ["sB", "sB'", "sB''"],
            [
                [["w1", "w2", "w3"], ["w1", "w2"], []],
                [[], ["w1", "w2", "w3"], ["w1", "w2"]],
                [["w1", "w2"], [], ["w1", "w2", "w3"]],
            ],
            [["w1", "w2", "w3"]],
            "Cyclic preferences induced by strong excuses.",
        ),
        "table5": _matrix(
            "table5",
            ["sA", "sA'", "sA''"],
            ["sB", "sB'", "sB''"],
            [
                [["w1", "w2", "w3", "w4"], ["w1", "w2", "w3", "w5"], ["w1", "w2", "w4", "w5"]],
                [["w1", "w2", "w3"], ["w1", "w2", "w3"], ["w1", "w2", "w3"]],
                [["w5"], ["w4"], ["w3"]],
            ],
            [["w1", "w2", "w3", "w4", "w5"]],
            "Pooling responsibility across histories misranks a dominant strategy.",
        ),
        "table6": _matrix(
            "table6",
            ["sA", "sA'"],
            ["sB", "sB'"],
            [[[], ["w1"]], [[], []]],
            [["w1"]],
            "Best-case anticipation cannot separate a weakly dominant strategy.",
        ),
        "shopping_centre": _shopping_centre(),
        "regret_explanation": _matrix(
            "regret_explanation",
            ["s", "s'"],
            ["c", "c'"],
            [[["w2"], ["w1", "w2"]], [["w1"], ["w2"]]],
            [["w1"], ["w2"]],
            "Two levels; both strategies risk violating w1 but s compensates with w2.",
        ),
    }
    assert tuple(docs) == FIXTURE_NAMES
    return docs


def fixture_dir() -> Path:
    return Path(str(resources.files("mvresp") / "fixtures"))


def fixture_path(name: str) -> Path:
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}")
    return fixture_dir() / f"{name}.json"


def load_fixture(name: str, strategy_cap: int | None = None) -> Scenario:
    return load_scenario(fixture_path(name), strategy_cap=strategy_cap)


def write_fixtures(directory: Path | None = None) -> list[Path]:
    directory = directory or fixture_dir()
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for name, doc in fixture_documents().items():
        path = directory / f"{name}.json"
        path.write_text(canonical_json(doc), encoding="utf-8")
        out.append(path)
    return out


def resolve(path_or_name: str, strategy_cap: int | None = None) -> Scenario:
    """Load a scenario from a file path, or a shipped fixture by name."""
    p = Path(path_or_name)
    if p.exists():
        return load_scenario(p, strategy_cap=strategy_cap)
    if path_or_name in FIXTURE_NAMES:
        return load_fixture(path_or_name, strategy_cap=strategy_cap)
    raise FileNotFoundError(f"no scenario file or fixture named {path_or_name!r}")


__all__ = [
    "FIXTURE_NAMES",
    "Scenario",
    "ScenarioError",
    "canonical_json",
    "compile_matrix",
    "dump_scenario",
    "fixture_documents",
    "fixture_path",
    "load_fixture",
    "load_scenario",
    "resolve",
    "strategy_index",
    "write_fixtures",
]
