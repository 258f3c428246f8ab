"""Cyclic tag systems and their simulation by a 13 meta-signal machine.

Meta-signals without suffix are static; ``_LL``, ``_R`` and ``_RR`` move at
speeds -2, 1 and 2.  An iteration starts when ``go_LL`` bounces on the left
``last`` as ``go_RR``; that signal erases the first word bit and sends its
value (``zero_R``/``one_R``) to ``first``, where the front appendant is set
in motion, copied into the word when the bit was 1, and rebuilt at the
right end of the list with the same distances.

A halting appendant is a block whose only content is a ``one`` placed at
exactly 2/3 of the block: that is where ``go_LL`` and ``true_R`` meet when
the block is activated by a 1, and the three-signal rule destroys ``go_LL``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import Configuration, SignalMachine, SignalMachineError
from .engine import (
    Outcome,
    RunLimits,
    Simulator,
    SpaceTimeDiagram,
    config_at,
    finish,
)

SPEEDS = {
    "go_LL": -2,
    "zero": 0, "one": 0, "first": 0, "sep": 0, "last": 0,
    "zero_R": 1, "one_R": 1, "false_R": 1, "true_R": 1,
    "zero_RR": 2, "one_RR": 2, "go_RR": 2,
}

RULES = [
    (("go_RR", "zero"), ("last", "zero_R")),
    (("go_RR", "one"), ("last", "one_R")),
    (("go_RR", "first"), ("first",)),
    (("one_RR", "zero"), ("zero", "zero_R", "one_RR")),
    (("one_RR", "one"), ("one", "one_R", "one_RR")),
    (("one_RR", "sep"), ("go_LL", "last", "false_R")),
    (("zero_RR", "zero"), ("zero_R", "zero_RR")),
    (("zero_RR", "one"), ("one_R", "zero_RR")),
    (("zero_RR", "sep"), ("go_LL", "last", "false_R")),
    (("true_R", "last"), ("first", "false_R")),
    (("false_R", "first"), ("sep", "go_RR")),
    (("false_R", "last"), ("first", "one_R")),
    (("false_R", "go_LL"), ("go_LL", "true_R")),
    (("one_R", "first"), ("first", "true_R", "one_RR")),
    (("zero_R", "first"), ("first", "false_R", "zero_RR")),
    (("go_LL", "first"), ("go_LL",)),
    (("go_LL", "last"), ("go_RR",)),
    (("go_RR", "one_R"), ("last",)),
    (("go_RR", "false_R"), ("zero", "go_RR")),
    (("go_RR", "true_R"), ("one", "go_RR")),
]

HALT_RULE = (("true_R", "one", "go_LL"), ("true_R",))

BLANK_PAIRS = [
    ("true_R", "zero"), ("true_R", "one"), ("true_R", "go_LL"),
    ("false_R", "zero"), ("false_R", "one"), ("false_R", "sep"),
    ("one_R", "zero"), ("one_R", "one"), ("one_R", "sep"), ("one_R", "last"), ("one_R", "go_LL"),
    ("zero_R", "zero"), ("zero_R", "one"), ("zero_R", "sep"), ("zero_R", "last"),
    ("zero_R", "go_LL"),
    ("go_LL", "zero"), ("go_LL", "one"),
    ("one_RR", "one_R"), ("one_RR", "false_R"), ("one_RR", "true_R"),
    ("zero_RR", "one_R"), ("zero_RR", "false_R"), ("zero_RR", "true_R"),
    ("zero_R", "zero", "go_LL"), ("zero_R", "one", "go_LL"),
    ("one_R", "zero", "go_LL"), ("one_R", "one", "go_LL"),
]

# Two-signal variant: the halting appendant holds a static ``halt`` that is
# carried around the list like a 1 but, at the end of the rotation, crosses
# ``first`` unchanged instead of spawning lattice signals.
TWO_SIGNAL_SPEEDS = {"halt": 0, "halt_R": 1}
TWO_SIGNAL_RULES = [
    (("one_RR", "halt"), ("halt", "halt_R", "one_RR")),
    (("zero_RR", "halt"), ("halt_R", "zero_RR")),
    (("go_RR", "halt_R"), ("halt", "go_RR")),
    (("go_LL", "halt"), ()),
]
TWO_SIGNAL_BLANKS = [
    ("halt_R", "first"), ("halt_R", "zero"), ("halt_R", "one"), ("halt_R", "sep"),
    ("halt_R", "last"), ("halt_R", "go_LL"), ("halt_R", "halt"),
    ("true_R", "halt"), ("false_R", "halt"), ("one_R", "halt"), ("zero_R", "halt"),
    ("one_RR", "halt_R"), ("zero_RR", "halt_R"),
]

# Garbage left by the end of a rotation: speed-2 signals overtaking the
# rebuilt appendant.  Cleaning makes them vanish on their first crossing.
GARBAGE_PAIRS = [(fast, slow) for fast in ("one_RR", "zero_RR")
                 for slow in ("one_R", "true_R", "false_R")]


def _assemble(speeds, rules, blanks, garbage, clean: bool) -> SignalMachine:
    rules = list(rules)
    if clean:
        blanks = [b for b in blanks if b not in garbage]
        rules.extend(((fast, slow), (slow,)) for fast, slow in garbage)
    rules.extend((b, b) for b in blanks)
    return SignalMachine.build(speeds, rules)


def build_cts_machine(*, clean: bool = False) -> SignalMachine:
    """The 13 meta-signal, 21 non-blank rule halting machine."""
    return _assemble(SPEEDS, RULES + [HALT_RULE], BLANK_PAIRS, GARBAGE_PAIRS, clean)


def build_cts_machine_two_signal(*, clean: bool = False) -> SignalMachine:
    """15 meta-signals, 24 non-blank rules, every rule a two-signal collision."""
    speeds = {**SPEEDS, **TWO_SIGNAL_SPEEDS}
    blanks = [b for b in BLANK_PAIRS if len(b) == 2] + TWO_SIGNAL_BLANKS
    garbage = GARBAGE_PAIRS + [("one_RR", "halt_R"), ("zero_RR", "halt_R")]
    return _assemble(speeds, RULES + TWO_SIGNAL_RULES, blanks, garbage, clean)


# --------------------------------------------------------------------------
# reference interpreter

class CtsStatus(str, enum.Enum):
    RUNNING = "Running"
    HALT_EMPTY_WORD = "HaltEmptyWord"
    HALT_APPENDANT = "HaltAppendant"


@dataclass(frozen=True)
class CyclicTagSystem:
    appendants: tuple[str, ...]
    word: str
    halt_index: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "appendants", tuple(self.appendants))
        if not self.appendants:
            raise SignalMachineError("a cyclic tag system needs at least one appendant")
        for w in (self.word, *self.appendants):
            if set(w) - {"0", "1"}:
                raise SignalMachineError(f"not a binary word: {w!r}")
        if self.halt_index is not None and not 0 <= self.halt_index < len(self.appendants):
            raise SignalMachineError("halt index out of range")


@dataclass(frozen=True)
class StepResult:
    status: CtsStatus
    system: CyclicTagSystem


def cts_step(sys: CyclicTagSystem) -> StepResult:
    if not sys.word:
        return StepResult(CtsStatus.HALT_EMPTY_WORD, sys)
    bit, rest = sys.word[0], sys.word[1:]
    if bit == "1" and sys.halt_index == 0:
        return StepResult(CtsStatus.HALT_APPENDANT, CyclicTagSystem(sys.appendants, rest, 0))
    if bit == "1":
        rest += sys.appendants[0]
    n = len(sys.appendants)
    halt = None if sys.halt_index is None else (sys.halt_index - 1) % n
    rotated = sys.appendants[1:] + sys.appendants[:1]
    return StepResult(CtsStatus.RUNNING, CyclicTagSystem(rotated, rest, halt))


@dataclass(frozen=True)
class CtsTrace:
    words: list[str]  # word after 0, 1, 2, ... completed steps
    status: CtsStatus
    final_word: str


def cts_run(sys: CyclicTagSystem, max_steps: int) -> CtsTrace:
    words = [sys.word]
    for _ in range(max_steps):
        res = cts_step(sys)
        if res.status is not CtsStatus.RUNNING:
            return CtsTrace(words, res.status, res.system.word)
        sys = res.system
        words.append(sys.word)
    return CtsTrace(words, CtsStatus.RUNNING, sys.word)


# --------------------------------------------------------------------------
# encoding

class HaltSafetyError(SignalMachineError):
    """A plain ``one`` would sit where only the halting ``one`` may be."""


@dataclass(frozen=True)
class CtsLayout:
    """Where the encoder puts things.

    ``integer`` reproduces the unit-spaced picture (block length = bits + 1).
    ``dyadic`` gives every block the same power-of-two length ``block``
    (default: enough for the longest appendant) and puts bit j at
    ``(2**j - 1) / 2**j`` of it, so no plain bit can sit at 2/3.
    """

    mode: str = "dyadic"
    block: Fraction | None = None
    go_offset: Fraction = Fraction(1, 5)

    def __post_init__(self) -> None:
        if self.mode not in ("dyadic", "integer"):
            raise SignalMachineError(f"unknown layout mode {self.mode!r}")
        if self.block is not None:
            b = Fraction(self.block)
            if b <= 0 or b.numerator & (b.numerator - 1) or b.denominator & (b.denominator - 1):
                raise SignalMachineError("dyadic block length must be a power of two")
        if not 0 < self.go_offset < 1:
            raise SignalMachineError("go_LL offset must lie strictly between last and the word")


def _blocks(sys: CyclicTagSystem, layout: CtsLayout, halt_name: str,
            halt_offset) -> list[tuple[Fraction, list[tuple[Fraction, str]]]]:
    """(length, [(offset, name)]) per appendant block."""
    plain = [a for i, a in enumerate(sys.appendants) if i != sys.halt_index]
    longest = max((len(a) for a in plain), default=0)
    if layout.mode == "dyadic":
        block = Fraction(layout.block) if layout.block is not None else Fraction(2 ** max(1, longest))
    blocks = []
    for i, app in enumerate(sys.appendants):
        if i == sys.halt_index:
            length = block if layout.mode == "dyadic" else Fraction(3)
            blocks.append((length, [(halt_offset(length), halt_name)]))
            continue
        if layout.mode == "integer":
            length = Fraction(len(app) + 1)
            offsets = [Fraction(j) for j in range(1, len(app) + 1)]
        else:
            length = block
            offsets = [block * (2 ** j - 1) / 2 ** j for j in range(1, len(app) + 1)]
        blocks.append((length, [(o, "one" if b == "1" else "zero") for o, b in zip(offsets, app)]))
    return blocks


def halt_safety_violations(sys: CyclicTagSystem, layout: CtsLayout) -> list[int]:
    """Indices of plain appendants having a ``one`` at 2/3 of their block."""
    bad = []
    for i, (length, bits) in enumerate(_blocks(sys, layout, "one", lambda n: 2 * n / 3)):
        if i == sys.halt_index:
            continue
        if any(name == "one" and 3 * off == 2 * length for off, name in bits):
            bad.append(i)
    return bad


def encode_cts(
    sys: CyclicTagSystem,
    layout: CtsLayout = CtsLayout(),
    *,
    two_signal: bool = False,
    allow_unsafe: bool = False,
) -> Configuration:
    """Initial configuration: last, go_LL, word, first, blocks with sep, last.

    A single-appendant list with a non-empty word is laid out twice: the
    machine needs a ``sep`` after the active block, and rotating ``[a, a]``
    behaves exactly like rotating ``[a]``.
    """
    if sys.halt_index is not None:
        if two_signal:
            halt_name, halt_offset = "halt", (lambda n: n / 2)
        else:
            halt_name, halt_offset = "one", (lambda n: 2 * n / 3)
    else:
        halt_name, halt_offset = "one", None
    if not allow_unsafe and not two_signal:
        bad = halt_safety_violations(sys, layout)
        if bad:
            raise HaltSafetyError(
                f"appendant(s) {bad} put a plain one at 2/3 of their block; use the dyadic layout")
    if len(sys.appendants) == 1 and sys.word:
        sys = CyclicTagSystem(sys.appendants * 2, sys.word,
                              None if sys.halt_index is None else 0)
        if sys.halt_index is not None:
            # both copies are the halting block
            blocks = _blocks(sys, layout, halt_name, halt_offset)
            blocks[1] = blocks[0]
        else:
            blocks = _blocks(sys, layout, halt_name, halt_offset)
    else:
        blocks = _blocks(sys, layout, halt_name, halt_offset)

    placed: list[tuple[Fraction, str]] = [(Fraction(-1), "last")]
    placed.append((1 - layout.go_offset, "go_LL"))
    for j, bit in enumerate(sys.word, start=1):
        placed.append((Fraction(j), "one" if bit == "1" else "zero"))
    x = Fraction(len(sys.word) + 1)
    placed.append((x, "first"))
    for k, (length, bits) in enumerate(blocks):
        placed.extend((x + off, name) for off, name in bits)
        x += length
        placed.append((x, "sep" if k < len(blocks) - 1 else "last"))
    return Configuration(tuple(placed))


def decode_word(config: Configuration, machine: SignalMachine | None = None, *,
                strict: bool = True) -> str:
    """Static bits left of ``first``, read left to right.

    With ``strict`` exactly one ``first`` is required.  Otherwise the word
    is read left of the leftmost one: a rotation finishing at the right end
    of the list, or a fired halting appendant, leaves extra ``first``
    signals further right.
    """
    firsts = config.positions("first")
    if not firsts:
        raise SignalMachineError("no first signal in configuration")
    if strict and len(firsts) > 1:
        raise SignalMachineError(f"{len(firsts)} first signals in configuration")
    return "".join("1" if name == "one" else "0" for x, name in config
                   if x < firsts[0] and name in ("zero", "one"))


# --------------------------------------------------------------------------
# simulation

class SimulationLimitError(RuntimeError):
    def __init__(self, outcome) -> None:
        super().__init__(f"engine stopped early: {outcome.tag.value}")
        self.outcome = outcome


@dataclass
class CtsSimulation:
    words: list[str]
    status: CtsStatus
    final_word: str
    diagram: SpaceTimeDiagram
    bounce_times: list[Fraction] = field(default_factory=list)
    halted: bool = False  # engine reached a stable configuration


def _is(event, *names) -> bool:
    return set(event.inputs) == set(names)


def run_cts_simulation(
    sys: CyclicTagSystem,
    layout: CtsLayout = CtsLayout(),
    max_iterations: int = 30,
    limits: RunLimits = RunLimits(),
    *,
    two_signal: bool = False,
    clean: bool = False,
    allow_unsafe: bool = False,
    machine: SignalMachine | None = None,
) -> CtsSimulation:
    """Run the encoded system and read the word at every iteration boundary.

    The word is sampled just before each ``go_LL``/``last`` bounce, at the
    midpoint between the bounce and the previous collision time.  The run
    ends when the engine is stable or after ``max_iterations + 1`` bounces.
    """
    if machine is None:
        machine = build_cts_machine_two_signal(clean=clean) if two_signal \
            else build_cts_machine(clean=clean)
    config = encode_cts(sys, layout, two_signal=two_signal, allow_unsafe=allow_unsafe)
    sim = Simulator(machine, config)
    bounces: list[Fraction] = []
    tag = Outcome.HALTED
    while True:
        nxt = sim.next_time()
        if nxt is None:
            break
        if limits.max_time is not None and nxt > limits.max_time:
            tag = Outcome.TIME_LIMIT
            break
        if len(sim.events) >= limits.max_collisions:
            tag = Outcome.COLLISION_LIMIT
            break
        batch = sim.step()
        bounces.extend(e.time for e in batch if _is(e, "go_LL", "last"))
        if sim.accumulating(limits.accumulation_events, limits.accumulation_span):
            tag = Outcome.ACCUMULATION
            break
        if len(bounces) > max_iterations:
            tag = None
            break

    outcome = finish(sim, tag or Outcome.TIME_LIMIT, None)
    if tag is not None and tag is not Outcome.HALTED:
        raise SimulationLimitError(outcome)
    diagram = outcome.diagram
    times = diagram.event_times()
    words = []
    for b in bounces[: max_iterations + 1]:
        i = times.index(b)
        before = times[i - 1] if i else Fraction(0)
        words.append(decode_word(config_at(diagram, (before + b) / 2), strict=False))

    if tag is None:
        return CtsSimulation(words, CtsStatus.RUNNING, words[-1], diagram, bounces)
    final_word = decode_word(outcome.final, strict=False)
    if any(_is(e, "go_RR", "first") for e in diagram.events):
        status = CtsStatus.HALT_EMPTY_WORD
    elif any(_is(e, *HALT_RULE[0]) or _is(e, "go_LL", "halt") for e in diagram.events):
        status = CtsStatus.HALT_APPENDANT
    else:
        raise SignalMachineError("engine became stable without a halting collision")
    return CtsSimulation(words, status, final_word, diagram, bounces, halted=True)


# --------------------------------------------------------------------------
# text format

def parse_cts(text: str) -> CyclicTagSystem:
    """``word <bits>``, then ``appendant <bits|-->`` lines, optional ``halt <index>``."""
    word = None
    appendants: list[str] = []
    halt = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SignalMachineError(f"line {lineno}: expected '<keyword> <value>'")
        key, value = parts
        if key == "word":
            word = "" if value == "--" else value
        elif key == "appendant":
            appendants.append("" if value == "--" else value)
        elif key == "halt":
            halt = int(value)
        else:
            raise SignalMachineError(f"line {lineno}: unknown keyword {key!r}")
    if word is None:
        raise SignalMachineError("missing 'word' line")
    return CyclicTagSystem(tuple(appendants), word, halt)


def emit_cts(sys: CyclicTagSystem) -> str:
    lines = [f"word {sys.word or '--'}"]
    lines.extend(f"appendant {a or '--'}" for a in sys.appendants)
    if sys.halt_index is not None:
        lines.append(f"halt {sys.halt_index}")
    return "\n".join(lines) + "\n"


def figure_instance() -> CyclicTagSystem:
    """Word 1011 with appendants [011, 1, 011, 01]."""
    return CyclicTagSystem(("011", "1", "011", "01"), "1011")


__all__: Sequence[str] = [
    "CtsLayout", "CtsSimulation", "CtsStatus", "CtsTrace", "CyclicTagSystem",
    "HaltSafetyError", "SimulationLimitError", "StepResult", "build_cts_machine",
    "build_cts_machine_two_signal", "cts_run", "cts_step", "decode_word", "emit_cts",
    "encode_cts", "figure_instance", "halt_safety_violations", "parse_cts",
    "run_cts_simulation",
]
