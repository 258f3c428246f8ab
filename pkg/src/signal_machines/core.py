"""Signal machine model: meta-signals, collision rules, configurations.

Every speed and position is a :class:`fractions.Fraction`; floats are
rejected at construction so that meetings stay exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class SignalMachineError(ValueError):
    """Raised for malformed machines, rules or configurations."""


def as_rational(value: int | str | Fraction) -> Fraction:
    """Coerce an int, a ``p/q`` string or a Fraction; floats are refused."""
    if isinstance(value, bool) or isinstance(value, float):
        raise SignalMachineError(f"inexact value {value!r}; use int, Fraction or 'p/q'")
    if isinstance(value, str):
        text = value.strip()
        if not re.fullmatch(r"-?\d+(/\d+)?", text):
            raise SignalMachineError(f"bad rational literal {value!r}")
        if "/" in text and int(text.split("/")[1]) == 0:
            raise SignalMachineError(f"zero denominator in {value!r}")
        return Fraction(text)
    return Fraction(value)


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class MetaSignal:
    name: str
    speed: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "speed", as_rational(self.speed))
        if not NAME_RE.match(self.name):
            raise SignalMachineError(f"invalid meta-signal name {self.name!r}")


@dataclass(frozen=True)
class CollisionRule:
    """``inputs -> outputs``; both sides hold meta-signal names."""

    inputs: frozenset[str]
    outputs: frozenset[str]

    def __init__(self, inputs: Iterable[str], outputs: Iterable[str]) -> None:
        inputs = tuple(inputs)
        outputs = tuple(outputs)
        if len(set(inputs)) != len(inputs):
            raise SignalMachineError(f"duplicate meta-signal in rule input {sorted(inputs)}")
        if len(set(outputs)) != len(outputs):
            raise SignalMachineError(f"duplicate meta-signal in rule output {sorted(outputs)}")
        object.__setattr__(self, "inputs", frozenset(inputs))
        object.__setattr__(self, "outputs", frozenset(outputs))

    @property
    def is_blank(self) -> bool:
        return self.inputs == self.outputs


@dataclass(frozen=True)
class RuleOutcome:
    inputs: frozenset[str]
    outputs: frozenset[str]
    blank: bool
    declared: bool


@dataclass(frozen=True)
class SignalMachine:
    """Meta-signals plus a set of collision rules.

    Meta-signals are kept sorted by ``(speed, name)`` so that two machines
    with the same content compare equal whatever the declaration order.
    Construction does not validate; call :func:`validate_machine`.
    """

    meta_signals: tuple[MetaSignal, ...]
    rules: frozenset[CollisionRule] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        metas = tuple(sorted(self.meta_signals, key=lambda m: (m.speed, m.name)))
        object.__setattr__(self, "meta_signals", metas)
        object.__setattr__(self, "rules", frozenset(self.rules))

    @classmethod
    def build(
        cls,
        speeds: Mapping[str, int | str | Fraction],
        rules: Iterable[tuple[Iterable[str], Iterable[str]]] = (),
    ) -> SignalMachine:
        metas = tuple(MetaSignal(name, as_rational(v)) for name, v in speeds.items())
        return cls(metas, frozenset(CollisionRule(i, o) for i, o in rules))

    @cached_property
    def speed(self) -> dict[str, Fraction]:
        return {m.name: m.speed for m in self.meta_signals}

    @cached_property
    def _rule_index(self) -> dict[frozenset[str], CollisionRule]:
        index: dict[frozenset[str], CollisionRule] = {}
        for rule in sorted(self.rules, key=self.rule_sort_key):
            index.setdefault(rule.inputs, rule)
        return index

    def by_speed(self, names: Iterable[str]) -> list[str]:
        return sorted(names, key=lambda n: (self.speed[n], n))

    def rule_sort_key(self, rule: CollisionRule) -> tuple:
        def key(names: frozenset[str]) -> tuple:
            return tuple((self.speed.get(n, Fraction(0)), n) for n in sorted(
                names, key=lambda n: (self.speed.get(n, Fraction(0)), n)))

        return (len(rule.inputs), key(rule.inputs), key(rule.outputs))

    def sorted_rules(self) -> list[CollisionRule]:
        return sorted(self.rules, key=self.rule_sort_key)

    def with_rules(self, rules: Iterable[CollisionRule]) -> SignalMachine:
        return SignalMachine(self.meta_signals, frozenset(rules))

    def merged(self, other: SignalMachine) -> SignalMachine:
        """Union of two machines; shared names must agree on speed."""
        metas = {m.name: m for m in self.meta_signals}
        for m in other.meta_signals:
            if m.name in metas and metas[m.name].speed != m.speed:
                raise SignalMachineError(f"conflicting speeds for {m.name}")
            metas[m.name] = m
        return SignalMachine(tuple(metas.values()), self.rules | other.rules)


@dataclass(frozen=True)
class Configuration:
    """Finite map from exact positions to meta-signal names, sorted by position."""

    placements: tuple[tuple[Fraction, str], ...] = ()

    def __post_init__(self) -> None:
        items = sorted((as_rational(x), name) for x, name in self.placements)
        for (x, _), (y, _) in zip(items, items[1:]):
            if x == y:
                raise SignalMachineError(f"two signals at position {format_rational(x)}")
        object.__setattr__(self, "placements", tuple(items))

    @classmethod
    def of(cls, pairs: Mapping | Iterable[tuple[int | str | Fraction, str]]) -> Configuration:
        if isinstance(pairs, Mapping):
            pairs = pairs.items()
        return cls(tuple((as_rational(x), n) for x, n in pairs))

    def __len__(self) -> int:
        return len(self.placements)

    def __iter__(self) -> Iterator[tuple[Fraction, str]]:
        return iter(self.placements)

    def names(self) -> list[str]:
        return [n for _, n in self.placements]

    def positions(self, name: str) -> list[Fraction]:
        return [x for x, n in self.placements if n == name]

    def shifted(self, delta: Fraction) -> Configuration:
        return Configuration(tuple((x + delta, n) for x, n in self.placements))

    def scaled(self, alpha: Fraction) -> Configuration:
        return Configuration(tuple((x * alpha, n) for x, n in self.placements))

    def __or__(self, other: Configuration) -> Configuration:
        return Configuration(self.placements + other.placements)


def validate_machine(machine: SignalMachine) -> list[str]:
    """Return every violated invariant as a message; empty means valid."""
    problems: list[str] = []
    seen: dict[str, Fraction] = {}
    for m in machine.meta_signals:
        if m.name in seen:
            problems.append(f"duplicate meta-signal {m.name}")
        seen[m.name] = m.speed

    by_inputs: dict[frozenset[str], list[CollisionRule]] = {}
    for rule in machine.sorted_rules():
        label = _fmt_rule(machine, rule)
        by_inputs.setdefault(rule.inputs, []).append(rule)
        if len(rule.inputs) < 2:
            problems.append(f"rule {label}: fewer than two inputs")
        undeclared = sorted((rule.inputs | rule.outputs) - seen.keys())
        if undeclared:
            problems.append(f"rule {label}: undeclared meta-signal(s) {', '.join(undeclared)}")
            continue
        for side, names in (("input", rule.inputs), ("output", rule.outputs)):
            speeds = [seen[n] for n in names]
            if len(set(speeds)) != len(speeds):
                problems.append(f"rule {label}: non-distinct {side} speeds")
    for inputs, rules in by_inputs.items():
        if len(rules) > 1:
            problems.append(f"duplicate rule input set {{{','.join(sorted(inputs))}}}")
    return problems


def _fmt_rule(machine: SignalMachine, rule: CollisionRule) -> str:
    def side(names: frozenset[str]) -> str:
        return ",".join(sorted(names, key=lambda n: (machine.speed.get(n, Fraction(0)), n)))

    return f"{{{side(rule.inputs)}}}->{{{side(rule.outputs)}}}"


def resolve_rule(machine: SignalMachine, inputs: Iterable[str]) -> RuleOutcome:
    """Look up the rule for a meeting; undeclared meetings are blank crossings."""
    key = frozenset(inputs)
    if len(key) < 2:
        raise SignalMachineError("a collision needs at least two distinct signals")
    try:
        speeds = [machine.speed[n] for n in key]
    except KeyError as exc:
        raise SignalMachineError(f"undeclared meta-signal {exc.args[0]}") from None
    if len(set(speeds)) != len(speeds):
        raise SignalMachineError(f"signals of equal speed cannot meet: {sorted(key)}")
    rule = machine._rule_index.get(key)
    if rule is None:
        return RuleOutcome(key, key, blank=True, declared=False)
    return RuleOutcome(key, rule.outputs, blank=rule.is_blank, declared=True)


def machine_stats(machine: SignalMachine) -> tuple[int, int]:
    """(number of meta-signals, number of declared non-blank rules)."""
    return len(machine.meta_signals), sum(not r.is_blank for r in machine.rules)
