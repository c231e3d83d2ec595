"""Responsibility attribution and anticipation for agents with prioritised LTLf values."""

from .ltlf import Formula, FormulaSyntaxError, eval_at, holds, parse_formula, to_text
from .responsibility import (
    accusations,
    anticipate,
    inexcusable_attributions,
    liable,
    naive_union_diagnostic,
    passive_attributions,
    recommend,
    responsibility_minimising_set,
    responsible_via,
    strong_excuse,
    weak_excuse,
)
from .scenario_io import Scenario, ScenarioError, compile_matrix, load_fixture, load_scenario
from .strategy import (
    JointStrategy,
    StrategyTree,
    anticipated_regret,
    enumerate_joint,
    enumerate_strategies,
    non_dominated,
    regret_minimising_set,
    weakly_dominates,
)
from .system import MAS, MTS, CapExceeded, History, JointAction, ModelError, play, prefix, reachable_nodes, successor
from .values import Literal, ValueBase, check_value_base, leq, relative_regret, satset, score_vector, strictly_less

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "Formula",
    "FormulaSyntaxError",
    "History",
    "JointAction",
    "JointStrategy",
    "Literal",
    "MAS",
    "MTS",
    "ModelError",
    "Scenario",
    "ScenarioError",
    "StrategyTree",
    "ValueBase",
    "accusations",
    "anticipate",
    "anticipated_regret",
    "check_value_base",
    "compile_matrix",
    "enumerate_joint",
    "enumerate_strategies",
    "eval_at",
    "holds",
    "inexcusable_attributions",
    "leq",
    "liable",
    "load_fixture",
    "load_scenario",
    "naive_union_diagnostic",
    "non_dominated",
    "parse_formula",
    "passive_attributions",
    "play",
    "prefix",
    "reachable_nodes",
    "recommend",
    "regret_minimising_set",
    "relative_regret",
    "responsibility_minimising_set",
    "responsible_via",
    "satset",
    "score_vector",
    "strictly_less",
    "strong_excuse",
    "successor",
    "to_text",
    "weak_excuse",
    "weakly_dominates",
]
