"""Seeded random comparison of the encoders against their reference interpreters."""

from __future__ import annotations

import itertools
import random
from collections.abc import Callable, Iterator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .ca import (
    CAWindow,
    CellularAutomaton,
    emit_ca,
    emit_window,
    oracle_rows,
    parse_ca,
    parse_window,
    run_ca_simulation,
)
from .core import SignalMachineError
from .cts import (
    CtsLayout,
    CyclicTagSystem,
    SimulationLimitError,
    cts_run,
    emit_cts,
    run_cts_simulation,
)

CTS_ITERATIONS = 30


@dataclass(frozen=True)
class CaInstance:
    ca: CellularAutomaton
    window: CAWindow
    horizon: int


@dataclass(frozen=True)
class CtsOptions:
    layout: CtsLayout = CtsLayout()
    two_signal: bool = False
    clean: bool = False
    iterations: int = CTS_ITERATIONS


def random_cts(rng: random.Random) -> CyclicTagSystem:
    """At most 4 appendants of length at most 4, word of length at most 6."""
    n = rng.randint(1, 4)
    apps = tuple("".join(rng.choice("01") for _ in range(rng.randint(0, 4))) for _ in range(n))
    word = "".join(rng.choice("01") for _ in range(rng.randint(0, 6)))
    halt = rng.randrange(n) if rng.random() < 0.3 else None
    return CyclicTagSystem(apps, word, halt)


def random_ca(rng: random.Random) -> CaInstance:
    """At most 4 states, window width at most 6, horizon at most 8."""
    states = tuple(str(i) for i in range(rng.randint(1, 4)))
    local = {key: rng.choice(states) for key in itertools.product(states, repeat=3)}

    def word(lo: int, hi: int) -> tuple[str, ...]:
        return tuple(rng.choice(states) for _ in range(rng.randint(lo, hi)))

    window = CAWindow(word(1, 6), word(1, 3), word(1, 3))
    return CaInstance(CellularAutomaton(states, local), window, rng.randint(1, 8))


def check_cts(sys: CyclicTagSystem, options: CtsOptions = CtsOptions()) -> str | None:
    """None when the machine agrees with the interpreter, else a description."""
    want = cts_run(sys, options.iterations)
    try:
        got = run_cts_simulation(sys, options.layout, options.iterations,
                                 two_signal=options.two_signal, clean=options.clean)
    except (SimulationLimitError, SignalMachineError) as exc:
        return f"simulation error: {exc}"
    if got.words != want.words:
        for n, (a, b) in enumerate(zip(got.words, want.words)):
            if a != b:
                return f"word after step {n}: machine {a or '-'} expected {b or '-'}"
        return f"machine read {len(got.words)} words, expected {len(want.words)}"
    if got.status != want.status:
        return f"status {got.status.value}, expected {want.status.value}"
    if got.final_word != want.final_word:
        return f"final word {got.final_word or '-'}, expected {want.final_word or '-'}"
    return None


def check_ca(inst: CaInstance) -> str | None:
    try:
        diagram, rows = run_ca_simulation(inst.ca, inst.window, inst.horizon)
    except SignalMachineError as exc:
        return f"simulation error: {exc}"
    want = oracle_rows(inst.ca, inst.window, inst.horizon)
    for n, (a, b) in enumerate(zip(rows, want), start=1):
        if a != b:
            return f"row {n}: machine {''.join(a)} expected {''.join(b)}"
    bad = [e for e in diagram.events if not e.blank and (len(e.inputs), len(e.outputs)) != (3, 3)]
    if bad:
        return f"collision at ({bad[0].position}, {bad[0].time}) is not 3-to-3"
    return None


def _cts_shrinks(sys: CyclicTagSystem) -> Iterator[CyclicTagSystem]:
    apps = sys.appendants
    if sys.halt_index is not None:
        yield replace(sys, halt_index=None)
    for i in range(len(apps)):
        if len(apps) > 1:
            halt = sys.halt_index
            if halt is not None:
                halt = None if halt == i else halt - (halt > i)
            yield CyclicTagSystem(apps[:i] + apps[i + 1:], sys.word, halt)
    for i, a in enumerate(apps):
        for j in range(len(a)):
            yield replace(sys, appendants=apps[:i] + (a[:j] + a[j + 1:],) + apps[i + 1:])
    for j in range(len(sys.word)):
        yield replace(sys, word=sys.word[:j] + sys.word[j + 1:])


def _ca_shrinks(inst: CaInstance) -> Iterator[CaInstance]:
    if inst.horizon > 1:
        yield replace(inst, horizon=inst.horizon - 1)
    w = inst.window
    for name in ("cells", "left", "right"):
        word = getattr(w, name)
        for j in range(len(word)):
            if len(word) > 1:
                yield replace(inst, window=replace(w, **{name: word[:j] + word[j + 1:]}))


def minimize(instance, failing: Callable[[object], bool], shrinks) -> object:
    """Greedy one-step shrinking until no smaller instance still fails."""
    progress = True
    while progress:
        progress = False
        for smaller in shrinks(instance):
            if failing(smaller):
                instance, progress = smaller, True
                break
    return instance


def serialize_ca(inst: CaInstance) -> str:
    return emit_ca(inst.ca) + emit_window(inst.window) + f"horizon {inst.horizon}\n"


def parse_ca_instance(text: str) -> CaInstance:
    ca_lines, window_lines, horizon = [], [], None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        key = line.split(" ", 1)[0]
        if key in ("states", "local"):
            ca_lines.append(line)
        elif key in ("cells", "left", "right"):
            window_lines.append(line)
        elif key == "horizon":
            horizon = int(line.split()[1])
        elif line:
            raise SignalMachineError(f"cannot parse {line!r}")
    if horizon is None:
        raise SignalMachineError("missing 'horizon' line")
    return CaInstance(parse_ca("\n".join(ca_lines)), parse_window("\n".join(window_lines)), horizon)


@dataclass
class Failure:
    index: int
    detail: str
    instance: str
    minimized: str


@dataclass
class VerifyReport:
    kind: str
    seed: int
    lines: list[str] = field(default_factory=list)
    failures: list[Failure] = field(default_factory=list)
    count: int = 0

    @property
    def passed(self) -> int:
        return self.count - len(self.failures)

    @property
    def ok(self) -> bool:
        return not self.failures

    def text(self) -> str:
        out = [f"verify {self.kind} seed={self.seed} count={self.count}", *self.lines]
        out.append(f"{self.passed}/{self.count} pass")
        return "\n".join(out) + "\n"


def _one_line(text: str) -> str:
    return "; ".join(line for line in text.splitlines() if line)


def _cts_task(args: tuple[CyclicTagSystem, CtsOptions]) -> str | None:
    return check_cts(*args)


def verify(kind: str, count: int, seed: int, *, jobs: int = 1,
           cts_options: CtsOptions = CtsOptions()) -> VerifyReport:
    """Check ``count`` random instances drawn from ``random.Random(seed)``."""
    if count < 1:
        raise SignalMachineError("count must be at least 1")
    rng = random.Random(seed)
    if kind == "cts":
        instances = [random_cts(rng) for _ in range(count)]
        tasks = [(s, cts_options) for s in instances]
        check, show = _cts_task, emit_cts
        failing = lambda s: check_cts(s, cts_options) is not None  # noqa: E731
        shrinks = _cts_shrinks
    elif kind == "ca":
        instances = [random_ca(rng) for _ in range(count)]
        tasks = instances
        check, show = check_ca, serialize_ca
        failing = lambda i: check_ca(i) is not None  # noqa: E731
        shrinks = _ca_shrinks
    else:
        raise SignalMachineError(f"unknown suite {kind!r}")

    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(check, tasks, chunksize=4))
    else:
        results = [check(t) for t in tasks]

    report = VerifyReport(kind, seed, count=count)
    for i, (inst, res) in enumerate(zip(instances, results)):
        desc = _one_line(show(inst))
        if res is None:
            report.lines.append(f"#{i} pass  {desc}")
            continue
        report.lines.append(f"#{i} FAIL  {desc}  -- {res}")
        small = minimize(inst, failing, shrinks)
        report.failures.append(Failure(i, res, show(inst), show(small)))
    return report
