"""Finite seeds that emit an infinite periodic row of static signals.

Equal spacing: a bouncer (speed 2) runs between two border signals
(speed 1).  Each time it reaches the front border a static ``mu_i`` is left
behind; the rear border then crosses ``mu_i`` and releases a new bouncer.
The border carries the phase, so ``k`` emitted signals cost ``k + 1``
meta-signals and ``2k`` rules.

Unequal spacing: one border meta-signal for both walls and a distinct
way/back pair of bouncers per phase, ``2k + 1`` meta-signals and ``2k``
rules.  The way speed of each phase sets the distance to the next emission.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import (
    CollisionRule,
    Configuration,
    MetaSignal,
    SignalMachine,
    SignalMachineError,
    as_rational,
)


@dataclass(frozen=True)
class PatternSpec:
    """``emitted`` static signals in period order; ``spacing`` is the border gap d.

    ``gaps`` selects the unequal mode: ``gaps[i]`` is the distance from the
    emission of ``emitted[i]`` to the next one.
    """

    emitted: tuple[str, ...]
    spacing: Fraction = Fraction(4)
    gaps: tuple[Fraction, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "emitted", tuple(self.emitted))
        object.__setattr__(self, "spacing", as_rational(self.spacing))
        if not self.emitted:
            raise SignalMachineError("a pattern needs at least one emitted signal")
        if self.spacing <= 0:
            raise SignalMachineError("spacing must be positive")
        if self.gaps is not None:
            gaps = tuple(as_rational(g) for g in self.gaps)
            object.__setattr__(self, "gaps", gaps)
            if len(gaps) != len(self.emitted):
                raise SignalMachineError("one gap per emitted signal")
            if any(g <= self.spacing / 2 for g in gaps):
                raise SignalMachineError("every gap must exceed half the border spacing")


@dataclass(frozen=True)
class PatternGenerator:
    added: tuple[MetaSignal, ...]
    rules: tuple[CollisionRule, ...]
    initial: Configuration
    machine: SignalMachine = field(repr=False)


def _base(spec: PatternSpec, declared: SignalMachine | None) -> dict[str, Fraction]:
    speeds = {name: Fraction(0) for name in spec.emitted}
    if declared is not None:
        for name in spec.emitted:
            if declared.speed.get(name, 0) != 0:
                raise SignalMachineError(f"emitted signal {name} must be static")
    return speeds


def build_pattern_generator(spec: PatternSpec,
                            declared: SignalMachine | None = None) -> PatternGenerator:
    """Return the added signals and rules, the seed, and a runnable machine.

    Names ``boun``, ``bord_<i>``, ``way_<i>``, ``back_<i>`` and ``bord`` are
    reserved; pass ``declared`` to check the emitted signals against an
    existing machine and merge into it.
    """
    speeds = _base(spec, declared)
    mu = spec.emitted
    k = len(mu)
    d = spec.spacing
    added: dict[str, Fraction] = {}
    rules = []
    if spec.gaps is None:
        added["boun"] = Fraction(2)
        for i in range(1, k + 1):
            added[f"bord_{i}"] = Fraction(1)
        for i in range(1, k + 1):
            j = i % k + 1
            rules.append(CollisionRule(("boun", f"bord_{i}"), (mu[j - 1], f"bord_{j}")))
            rules.append(CollisionRule((f"bord_{i}", mu[i - 1]), (mu[i - 1], f"bord_{j}", "boun")))
        seed = [(0, "bord_1"), (d / 2, "boun"), (d, f"bord_{k}")]
    else:
        added["bord"] = Fraction(1)
        for i in range(1, k + 1):
            # way_i leaves the rear border half a spacing after mu_{i-1} is emitted
            gap = spec.gaps[(i - 2) % k]
            added[f"way_{i}"] = 1 + d / (gap - d / 2)
            added[f"back_{i}"] = Fraction(-1)
        for i in range(1, k + 1):
            j = i % k + 1
            rules.append(CollisionRule((f"way_{i}", "bord"), (mu[i - 1], "bord", f"back_{i}")))
            rules.append(CollisionRule(("bord", f"back_{i}"), ("bord", f"way_{j}")))
        seed = [(0, "bord"), (d / 2, "way_1"), (d, "bord")]

    clash = set(added) & set(speeds)
    if declared is not None:
        clash |= set(added) & set(declared.speed)
    if clash:
        raise SignalMachineError(f"reserved names already in use: {sorted(clash)}")
    fragment = SignalMachine.build({**speeds, **added}, [(r.inputs, r.outputs) for r in rules])
    machine = fragment if declared is None else declared.merged(fragment)
    return PatternGenerator(
        tuple(MetaSignal(n, s) for n, s in added.items()),
        tuple(rules),
        Configuration.of(seed),
        machine,
    )


def emission_spacing(spec: PatternSpec) -> Fraction:
    """Distance between consecutive emissions in equal mode (2d)."""
    return 2 * spec.spacing


def first_emission(spec: PatternSpec) -> Fraction:
    """Position of the first emitted signal."""
    d = spec.spacing
    if spec.gaps is None:
        return 3 * d / 2
    # way_1 starts d/2 behind the front border
    speed = 1 + d / (spec.gaps[-1] - d / 2)
    return d + (d / 2) / (speed - 1)


def zeno_machine() -> tuple[SignalMachine, Configuration]:
    """Four signals that bounce infinitely often before time 2.

    A static wall ``A`` at 0, a wall ``B`` closing in at speed -1/2 from 1,
    and a bouncer ``R``/``L`` going back and forth between them.  Every two
    bounces the distance to the accumulation point (0, 2) shrinks by 3.
    """
    machine = SignalMachine.build(
        {"A": 0, "B": Fraction(-1, 2), "R": 1, "L": -1},
        [(("L", "A"), ("A", "R")), (("R", "B"), ("L", "B"))],
    )
    return machine, Configuration.of([(0, "A"), (Fraction(1, 4), "R"), (1, "B")])
