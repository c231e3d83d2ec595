"""Command-line front end: ``mvresp <command> --scenario <file|fixture> ...``.

Exit codes: 0 success, 1 internal error, 2 validation or usage error,
3 a theorem check failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable, Sequence

from . import oracle
from . import responsibility as resp
from . import strategy as strat
from .ltlf import FormulaSyntaxError, parse_formula
from .scenario_io import Scenario, ScenarioError, canonical_json, resolve
from .strategy import JointStrategy, StrategyTree
from .system import CapExceeded, ModelError, StrategyError, history_count, play, strategy_count
from .values import OutcomeSet, canonical, format_outcome, format_score, score_vector

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_THEOREM = 0, 1, 2, 3


class UsageError(ValueError):
    """A selector or flag that does not resolve against the scenario."""


# --------------------------------------------------------------------------
# selectors and rendering

def _agent(sc: Scenario, name: str | None) -> str:
    agents = sc.mas.agents
    if name is None:
        return agents[0]
    if name not in agents:
        raise UsageError(f"unknown agent {name!r}; agents: {', '.join(agents)}")
    return name


def _strategy(sc: Scenario, agent: str, selector: str) -> StrategyTree:
    """A named strategy label, or an index into the enumeration order."""
    named = sc.strategies.get(agent, {})
    if selector in named:
        return named[selector]
    pool = strat.enumerate_strategies(sc.mas, agent)
    try:
        i = int(selector)
    except ValueError:
        known = ", ".join(named) or "none"
        raise UsageError(f"no strategy {selector!r} for {agent} (named: {known}; or an index 0..{len(pool) - 1})") from None
    if not 0 <= i < len(pool):
        raise UsageError(f"strategy index {i} out of range 0..{len(pool) - 1} for {agent}")
    return sc.label_of(pool[i])


def _joint(sc: Scenario, text: str | None) -> JointStrategy:
    if not text:
        raise UsageError("--joint is required, e.g. --joint \"A=sA,B=sB'\"")
    picks: dict[str, StrategyTree] = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        agent, sep, sel = part.partition("=")
        if not sep:
            raise UsageError(f"bad joint selector {part!r}; expected agent=strategy")
        agent = _agent(sc, agent.strip())
        picks[agent] = _strategy(sc, agent, sel.strip())
    missing = [a for a in sc.mas.agents if a not in picks]
    if missing:
        raise UsageError(f"--joint misses a strategy for {', '.join(missing)}")
    return JointStrategy(tuple(picks[a] for a in sc.mas.agents))


def _name(sc: Scenario, tree: StrategyTree) -> str:
    return str(sc.label_of(tree))


def _joint_doc(sc: Scenario, js: JointStrategy) -> dict:
    return {t.owner: _name(sc, t) for t in js.members}


def _joint_text(sc: Scenario, js: JointStrategy) -> str:
    return "(" + ", ".join(_name(sc, t) for t in js.members) + ")" if js.members else "()"


def _set_doc(sc: Scenario, X: OutcomeSet) -> dict:
    vb = sc.mas.values
    return {"literals": [str(lit) for lit in canonical(X, vb)], "score": list(score_vector(X, vb))}


def _set_text(sc: Scenario, X: OutcomeSet) -> str:
    vb = sc.mas.values
    return f"{format_outcome(X, vb)} {format_score(score_vector(X, vb))}"


def _sorted_sets(sc: Scenario, sets) -> list[OutcomeSet]:
    vb = sc.mas.values
    return sorted(sets, key=lambda X: (score_vector(X, vb), [str(lit) for lit in canonical(X, vb)]))


# --------------------------------------------------------------------------
# commands; each returns (structured data, text lines, exit code)

Result = tuple[dict, list[str], int]


def cmd_validate(sc: Scenario, args: argparse.Namespace) -> Result:
    d = sc.mas
    counts = {a: strategy_count(d, a) for a in d.agents}
    data = {
        "scenario": sc.name,
        "ok": True,
        "agents": list(d.agents),
        "horizon": d.horizon,
        "levels": [[v.name for v in level] for level in d.values.levels],
        "strategies": counts,
        "histories": history_count(d),
        "warnings": list(sc.warnings),
    }
    lines = [
        f"{sc.name}: OK",
        f"agents: {', '.join(d.agents)}; horizon {d.horizon}; {data['histories']} histories",
        "values: " + " > ".join("{" + ", ".join(level) + "}" for level in data["levels"]),
        "strategies: " + ", ".join(f"{a}={n}" for a, n in counts.items()),
    ]
    lines += [f"warning: {w}" for w in sc.warnings]
    return data, lines, EXIT_OK


def cmd_play(sc: Scenario, args: argparse.Namespace) -> Result:
    js = _joint(sc, args.joint)
    h = play(js, sc.mas)
    X = strat.history_satset(sc.mas, js)
    steps = [sorted(s) for s in h.states]
    actions = [str(j) for j in h.actions]
    data = {"joint": _joint_doc(sc, js), "states": steps, "actions": actions, "satisfied": _set_doc(sc, X)}
    lines = [f"play {_joint_text(sc, js)}"]
    for t, state in enumerate(steps):
        lines.append(f"  s{t} = {{{', '.join(state)}}}")
        if t < len(actions):
            lines.append(f"    {actions[t]}")
    lines.append(f"satset: {_set_text(sc, X)}")
    return data, lines, EXIT_OK


def cmd_attribute(sc: Scenario, args: argparse.Namespace) -> Result:
    d = sc.mas
    js = _joint(sc, args.joint)
    agent = _agent(sc, args.agent)
    if args.value:
        return _liability(sc, js, agent, args.value)
    rows = resp.attributions(d, js, agent)
    if args.kind == "inexcusable":
        rows = [a for a in rows if a.excuse is None]
        attributed = resp.inexcusable_attributions(d, js, agent)
    else:
        attributed = resp.passive_attributions(d, js, agent)
    sets = _sorted_sets(sc, attributed)
    data = {
        "agent": agent,
        "joint": _joint_doc(sc, js),
        "kind": args.kind,
        "attributed": [_set_doc(sc, X) for X in sets],
        "via": [
            {
                "alternative": _name(sc, a.via),
                "outcome": _set_doc(sc, a.outcome),
                "excuse": None
                if a.excuse is None
                else {"witness": _joint_doc(sc, a.excuse.witness), "gain": _set_doc(sc, a.excuse.gain)},
            }
            for a in rows
        ],
    }
    lines = [f"{args.kind} responsibility of {agent} in {_joint_text(sc, js)}:"]
    lines += [f"  {_set_text(sc, X)}" for X in sets]
    lines.append("via:")
    for a in rows:
        note = "no weak excuse"
        if a.excuse is not None:
            note = f"excused by {_joint_text(sc, a.excuse.witness)}, gaining {_set_text(sc, a.excuse.gain)}"
        lines.append(f"  {_name(sc, a.via)}: {_set_text(sc, a.outcome)}; {note}")
    return data, lines, EXIT_OK


def _liability(sc: Scenario, js: JointStrategy, agent: str, text: str) -> Result:
    """``--value w1`` asks about w1, ``--value '!w1'`` about its violation."""
    d = sc.mas
    raw = text.strip()
    negated = raw.startswith("!")
    name = raw.lstrip("!").strip()
    if name in d.values.names:
        omega = resp.value_formula(d, name, positive=not negated)
    else:
        omega = parse_formula(raw)
    lia = resp.liable(d, js, agent, omega)
    data = {
        "agent": agent,
        "joint": _joint_doc(sc, js),
        "formula": raw,
        "liable": lia.liable,
        "via": None if lia.via is None else _name(sc, lia.via),
    }
    verdict = f"liable via {_name(sc, lia.via)}" if lia else "not liable"
    return data, [f"{agent} in {_joint_text(sc, js)} for {raw}: {verdict}"], EXIT_OK


def cmd_anticipate(sc: Scenario, args: argparse.Namespace) -> Result:
    d = sc.mas
    agent = _agent(sc, args.agent)
    sigma = _strategy(sc, agent, _need(args.strategy, "--strategy"))
    a = resp.anticipate(d, agent, sigma, args.kind, all_witnesses=args.all_witnesses)
    data = {
        "agent": agent,
        "strategy": _name(sc, sigma),
        "kind": args.kind,
        "anticipated": _set_doc(sc, a.outcome),
        "witness": {"opponents": _joint_doc(sc, a.context), "accuser": _name(sc, a.via)},
    }
    lines = [
        f"{args.kind} anticipation of {_name(sc, sigma)}: {_set_text(sc, a.outcome)}",
        f"  against {_joint_text(sc, a.context)}, via {_name(sc, a.via)}",
    ]
    if args.all_witnesses:
        data["ties"] = [
            {"outcome": _set_doc(sc, X), "opponents": _joint_doc(sc, c), "accuser": _name(sc, v)} for X, c, v in a.ties
        ]
        lines += [f"  tie: {_set_text(sc, X)} against {_joint_text(sc, c)}, via {_name(sc, v)}" for X, c, v in a.ties]
    return data, lines, EXIT_OK


def cmd_dominance(sc: Scenario, args: argparse.Namespace) -> Result:
    d = sc.mas
    agent = _agent(sc, args.agent)
    t = strat.outcome_table(d, agent)
    nd = strat.non_dominated_set(d, agent)
    strict = []
    for s in t.strategies:
        for s2 in t.strategies:
            if strat.weakly_dominates(d, agent, s, s2) and not strat.weakly_dominates(d, agent, s2, s):
                strict.append((s, s2))
    data = {
        "agent": agent,
        "non_dominated": [_name(sc, s) for s in nd],
        "dominated_by": [{"strategy": _name(sc, a), "by": _name(sc, b)} for a, b in strict],
    }
    lines = [f"non-dominated strategies of {agent}: {', '.join(data['non_dominated'])}"]
    lines += [f"  {_name(sc, a)} is dominated by {_name(sc, b)}" for a, b in strict]
    return data, lines, EXIT_OK


def cmd_regret(sc: Scenario, args: argparse.Namespace) -> Result:
    d = sc.mas
    agent = _agent(sc, args.agent)
    pool = [_strategy(sc, agent, args.strategy)] if args.strategy else strat.enumerate_strategies(d, agent)
    minimisers = strat.regret_minimising_set(d, agent)
    rows, lines = [], [f"anticipated regret for {agent}:"]
    for s in pool:
        r = strat.anticipated_regret(d, agent, s, all_witnesses=args.all_witnesses)
        row = {
            "strategy": _name(sc, s),
            "regret": _set_doc(sc, r.outcome),
            "witness": {"opponents": _joint_doc(sc, r.witness.context), "alternative": _name(sc, r.witness.alternative)},
        }
        lines.append(
            f"  {_name(sc, s)}: {_set_text(sc, r.outcome)} against {_joint_text(sc, r.witness.context)}"
            f" compared with {_name(sc, r.witness.alternative)}"
        )
        if args.all_witnesses:
            row["ties"] = [
                {"outcome": _set_doc(sc, X), "opponents": _joint_doc(sc, w.context), "alternative": _name(sc, w.alternative)}
                for X, w in r.ties
            ]
        rows.append(row)
    data = {"agent": agent, "strategies": rows, "regret_minimising": [_name(sc, s) for s in minimisers]}
    lines.append(f"regret-minimising: {', '.join(data['regret_minimising'])}")
    return data, lines, EXIT_OK


def cmd_recommend(sc: Scenario, args: argparse.Namespace) -> Result:
    rec = resp.recommendation(sc.mas, _agent(sc, args.agent))
    data = {
        "agent": _agent(sc, args.agent),
        "regret_minimising": [_name(sc, s) for s in rec.regret_minimising],
        "non_dominated": [_name(sc, s) for s in rec.non_dominated],
        "recommended": [_name(sc, s) for s in rec.both],
    }
    lines = [
        f"regret-minimising: {', '.join(data['regret_minimising'])}",
        f"non-dominated: {', '.join(data['non_dominated'])}",
        f"recommended: {', '.join(data['recommended']) or '(none)'}",
    ]
    if not rec.both:
        lines.append("error: no strategy is both regret-minimising and non-dominated")
        return data, lines, EXIT_THEOREM
    return data, lines, EXIT_OK


def _names(vb, X: OutcomeSet, positive: bool) -> list[str]:
    return [lit.value for lit in canonical(X, vb) if lit.positive == positive]


def _join(names: list[str]) -> str:
    return names[0] if len(names) == 1 else ", ".join(names[:-1]) + " and " + names[-1]


def explain_pair(vb, a: str, ra: OutcomeSet, b: str, rb: OutcomeSet) -> str:
    """One sentence contrasting the worst-case regrets ``ra`` of ``a`` and ``rb`` of ``b``."""
    va, vb_ = _names(vb, ra, False), _names(vb, rb, False)
    common = [w for w in va if w in vb_]
    only_a = [w for w in va if w not in vb_]
    only_b = [w for w in vb_ if w not in va]
    comp_a = [w for w in _names(vb, ra, True) if w not in _names(vb, rb, True)]
    comp_b = [w for w in _names(vb, rb, True) if w not in _names(vb, ra, True)]
    parts = []
    if common:
        parts.append(f"both {a} and {b} risk the avoidable violation of {_join(common)} in the worst case")
    if only_a:
        parts.append(f"only {a} risks the avoidable violation of {_join(only_a)}")
    if only_b:
        parts.append(f"only {b} risks the avoidable violation of {_join(only_b)}")
    if not parts:
        parts.append(f"neither {a} nor {b} risks an avoidable violation")
    if comp_a:
        parts.append(f"{a} at least has the compensation of satisfying {_join(comp_a)}")
    if comp_b:
        parts.append(f"{b} at least has the compensation of satisfying {_join(comp_b)}")
    return "; ".join(parts)


def cmd_explain(sc: Scenario, args: argparse.Namespace) -> Result:
    d = sc.mas
    vb = d.values
    agent = _agent(sc, args.agent)
    sigma = _strategy(sc, agent, _need(args.strategy, "--strategy"))
    name = _name(sc, sigma)
    mine = strat.anticipated_regret(d, agent, sigma)
    lines = [f"anticipated regret of {name}: {_set_text(sc, mine.outcome)}"]
    if not _names(vb, mine.outcome, False):
        lines.append(f"{name} has no avoidable violations: no alternative avoids a violation it risks")
    dominators = [
        s for s in strat.enumerate_strategies(d, agent)
        if strat.weakly_dominates(d, agent, sigma, s) and not strat.weakly_dominates(d, agent, s, sigma)
    ]
    dominators = [sc.label_of(s) for s in dominators]
    dominators.sort(key=lambda s: s.label is None)
    if dominators:
        lines.append(
            f"{name} is dominated by {_name(sc, dominators[0])}: it does at least as well against every"
            f" choice of the other agents and strictly better against some"
        )
    rivals, seen = [], {strat.outcome_signature(d, agent, sigma)}
    for s in sorted(strat.enumerate_strategies(d, agent), key=lambda s: sc.label_of(s).label is None):
        sig = strat.outcome_signature(d, agent, s)
        if sig in seen:
            continue
        seen.add(sig)
        r = strat.anticipated_regret(d, agent, s)
        rival = _name(sc, s)
        sentence = explain_pair(vb, name, mine.outcome, rival, r.outcome)
        if mine.score > r.score:
            verdict = f"{name} is preferable"
        elif mine.score < r.score:
            verdict = f"{rival} is preferable"
        else:
            verdict = "they are equally good"
        rivals.append(
            {"rival": rival, "rival_regret": _set_doc(sc, r.outcome), "sentence": sentence, "verdict": verdict}
        )
        lines.append(f"vs {rival} {_set_text(sc, r.outcome)}: {sentence}; {verdict}")
    data = {
        "agent": agent,
        "strategy": name,
        "regret": _set_doc(sc, mine.outcome),
        "dominated_by": [_name(sc, s) for s in dominators],
        "rivals": rivals,
        "narrative": lines,
    }
    return data, lines, EXIT_OK


def _need(value: str | None, flag: str) -> str:
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


COMMANDS: dict[str, Callable[[Scenario, argparse.Namespace], Result]] = {
    "validate": cmd_validate,
    "play": cmd_play,
    "attribute": cmd_attribute,
    "anticipate": cmd_anticipate,
    "dominance": cmd_dominance,
    "regret": cmd_regret,
    "recommend": cmd_recommend,
    "explain": cmd_explain,
}


def cmd_fuzz(args: argparse.Namespace) -> Result:
    if args.n < 1:
        raise UsageError("fuzz needs -n of at least 1")
    if args.format == "json" and args.seed is None:
        raise UsageError("--seed is required for fuzz with --format json")
    seed = 0 if args.seed is None else args.seed
    try:
        caps = oracle.InstanceCaps.parse(args.caps or "", seed=seed)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad --caps: {exc}") from None
    report = oracle.fuzz(args.n, caps, seed=seed, jobs=args.jobs)
    data = report.to_dict()
    findings = sum(1 for i in report.instances if i.get("findings"))
    skipped = sum(1 for i in report.instances if i.get("skipped"))
    lines = [f"fuzz: {data['passed']}/{report.n} instances passed (seed {seed})"]
    for name, tally in data["claims"].items():
        lines.append(f"  {name}: {tally['passed']} passed, {tally['failed']} failed")
    if skipped:
        lines.append(f"skipped instances: {skipped}")
    if findings:
        lines.append(f"instances with findings: {findings}")
    for inst in report.instances:
        if not inst["passed"] and not inst.get("skipped"):
            failed = [k for k, ok in inst.get("verdicts", {}).items() if not ok]
            lines.append(f"FAIL seed {inst['seed']}: {', '.join(failed) or inst.get('error', '')}")
    return data, lines, EXIT_OK if report.ok else EXIT_THEOREM


# --------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mvresp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, scenario: bool = True) -> None:
        if scenario:
            p.add_argument("--scenario", required=True, help="scenario file or shipped fixture name")
            p.add_argument("--cap", type=int, default=None, help="strategy enumeration cap")
        p.add_argument("--format", choices=["text", "json", "structured"], default="text")

    for name in COMMANDS:
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--agent")
        p.add_argument("--strategy", help="named strategy or enumeration index")
        p.add_argument("--joint", help="e.g. \"A=sA,B=sB'\"")
        p.add_argument("--kind", choices=list(resp.KINDS), default="passive")
        p.add_argument("--value", help="liability query for a value name, '!name' or an LTLf formula")
        p.add_argument("--all-witnesses", action="store_true")
    p = sub.add_parser("fuzz")
    common(p, scenario=False)
    p.add_argument("-n", type=int, default=100, help="number of instances")
    p.add_argument("--seed", type=int)
    p.add_argument("--caps", help="e.g. agents=2,horizon=2,strategy_ceiling=64")
    p.add_argument("--jobs", type=int, default=1)
    return parser


def _emit(args: argparse.Namespace, data: dict, lines: list[str]) -> None:
    if args.format == "text":
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        sys.stdout.write(canonical_json(data))


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.format == "structured":
        args.format = "json"
    try:
        if args.command == "fuzz":
            data, lines, code = cmd_fuzz(args)
        else:
            sc = resolve(args.scenario, strategy_cap=args.cap)
            data, lines, code = COMMANDS[args.command](sc, args)
    except (UsageError, ScenarioError, ModelError, StrategyError, FormulaSyntaxError, CapExceeded,
            resp.UnsatisfiedError, resp.NotNegativeError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    _emit(args, data, lines)
    return code


def run() -> None:
    sys.exit(main())


__all__ = ["build_parser", "explain_pair", "main", "run"]
