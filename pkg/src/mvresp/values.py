"""Prioritised value bases and the quantitative lexicographic order on outcome sets.

An outcome set is a ``frozenset`` of :class:`Literal` (a value name with a
sign). Comparison goes through per-level score vectors: at each level, the
number of satisfied values minus the number of violated ones, compared
lexicographically from the most important level down.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable

from .ltlf import Formula, holds, neg, to_text

if TYPE_CHECKING:
    from .system import MAS, History

OutcomeSet = frozenset  # of Literal
ScoreVector = tuple  # of int, one entry per level

MODEL_CHECK_LIMIT = 200_000


@dataclass(frozen=True)
class Value:
    name: str
    formula: Formula
    text: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.text:
            object.__setattr__(self, "text", to_text(self.formula))


@dataclass(frozen=True, order=True)
class Literal:
    """``+name`` (the value holds) or ``-name`` (it is violated)."""

    value: str
    positive: bool

    def __str__(self) -> str:
        return ("+" if self.positive else "-") + self.value

    def negated(self) -> Literal:
        return Literal(self.value, not self.positive)


@dataclass(frozen=True)
class ValueBase:
    """Levels of named values; level 0 is the most important."""

    levels: tuple[tuple[Value, ...], ...]
    _where: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        if not self.levels:
            raise ValueError("a value base needs at least one level")
        for n, level in enumerate(self.levels):
            for d, v in enumerate(level):
                if v.name in self._where:
                    raise ValueError(f"duplicate value name {v.name!r}")
                self._where[v.name] = (n, d)

    @classmethod
    def of(cls, *levels: Iterable[tuple[str, Formula]]) -> ValueBase:
        return cls(tuple(tuple(Value(name, f) for name, f in level) for level in levels))

    @property
    def values(self) -> list[Value]:
        return [v for level in self.levels for v in level]

    @property
    def names(self) -> list[str]:
        return [v.name for v in self.values]

    def level_of(self, name: str) -> int:
        try:
            return self._where[name][0]
        except KeyError:
            raise KeyError(f"unknown value {name!r}") from None

    def __getitem__(self, name: str) -> Value:
        n, d = self._where[name]
        return self.levels[n][d]

    def sort_key(self, lit: Literal) -> tuple[int, int, bool]:
        n, d = self._where[lit.value]
        return (n, d, not lit.positive)


def literal_formula(lit: Literal, vb: ValueBase) -> Formula:
    f = vb[lit.value].formula
    return f if lit.positive else neg(f)


def satset(h: History, vb: ValueBase) -> OutcomeSet:
    """Signed literal for every value: ``+w`` if ``h`` satisfies it, else ``-w``."""
    return frozenset(Literal(v.name, holds(v.formula, h)) for v in vb.values)


def score_vector(X: Iterable[Literal], vb: ValueBase) -> ScoreVector:
    scores = [0] * len(vb.levels)
    for lit in X:
        scores[vb.level_of(lit.value)] += 1 if lit.positive else -1
    return tuple(scores)


def leq(X: OutcomeSet, Y: OutcomeSet, vb: ValueBase) -> bool:
    """X ⪯ Y: the first level where the scores differ decides."""
    return score_vector(X, vb) <= score_vector(Y, vb)


def strictly_less(X: OutcomeSet, Y: OutcomeSet, vb: ValueBase) -> bool:
    return score_vector(X, vb) < score_vector(Y, vb)


def equivalent(X: OutcomeSet, Y: OutcomeSet, vb: ValueBase) -> bool:
    return score_vector(X, vb) == score_vector(Y, vb)


def relative_regret(h1: History, h2: History, vb: ValueBase) -> OutcomeSet:
    """What ``h1`` realises that ``h2`` does not: satset(h1) minus satset(h2)."""
    return satset(h1, vb) - satset(h2, vb)


def canonical(X: Iterable[Literal], vb: ValueBase) -> list[Literal]:
    return sorted(X, key=vb.sort_key)


def format_outcome(X: Iterable[Literal], vb: ValueBase) -> str:
    """Signed names grouped by level, e.g. ``{-w1, -w2 | +w3}``."""
    lits = canonical(X, vb)
    if not lits:
        return "{}"
    groups = itertools.groupby(lits, key=lambda lit: vb.level_of(lit.value))
    return "{" + " | ".join(", ".join(str(lit) for lit in g) for _, g in groups) + "}"


def format_score(score: ScoreVector) -> str:
    return "(" + ", ".join(f"{s:+d}" if s else "0" for s in score) + ")"


# --------------------------------------------------------------------------
# consistency diagnostics

@dataclass
class ValueBaseReport:
    duplicates: list[tuple[str, str]] = field(default_factory=list)
    negation_pairs: list[tuple[str, str]] = field(default_factory=list)
    model_negations: list[tuple[str, str]] = field(default_factory=list)
    skipped: str | None = None

    @property
    def warnings(self) -> list[str]:
        out = [f"values {a} and {b} are syntactically identical" for a, b in self.duplicates]
        out += [f"value {b} is the negation of value {a}" for a, b in self.negation_pairs]
        out += [
            f"value {b} is equivalent to the negation of value {a} on every reachable history"
            for a, b in self.model_negations
        ]
        if self.skipped:
            out.append(self.skipped)
        return out

    @property
    def ok(self) -> bool:
        return not (self.duplicates or self.negation_pairs or self.model_negations)


def check_value_base(d: MAS) -> ValueBaseReport:
    """Syntactic and model-relative consistency diagnostics for ``d.values``.

    The model-relative part flags pairs whose truth values are opposite on
    every history reachable in ``d``; it is skipped (with a note) when the
    number of histories exceeds ``MODEL_CHECK_LIMIT``.
    """
    from .system import history_count, histories

    report = ValueBaseReport()
    vals = d.values.values
    for a, b in itertools.combinations(vals, 2):
        if a.formula == b.formula:
            report.duplicates.append((a.name, b.name))
        elif neg(a.formula) == b.formula:
            report.negation_pairs.append((a.name, b.name))

    syntactic = set(report.duplicates) | set(report.negation_pairs)
    candidates = [(a, b) for a, b in itertools.combinations(vals, 2) if (a.name, b.name) not in syntactic]
    if not candidates:
        return report
    if history_count(d) > MODEL_CHECK_LIMIT:
        report.skipped = f"model-relative check skipped: more than {MODEL_CHECK_LIMIT} histories"
        return report
    alive = set(range(len(candidates)))
    for h in histories(d):
        if not alive:
            break
        for idx in list(alive):
            a, b = candidates[idx]
            if holds(a.formula, h) == holds(b.formula, h):
                alive.discard(idx)
    report.model_negations = [(candidates[i][0].name, candidates[i][1].name) for i in sorted(alive)]
    return report
