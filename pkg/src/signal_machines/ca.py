"""Radius-1 cellular automata and their 3-signals-per-state simulation.

Each state ``s`` gives a static ``s``, a left-mover ``s_L`` (speed -1) and
a right-mover ``s_R`` (speed 1).  ``f(s, t, u) = v`` becomes the rule
``{s_R, t, u_L} -> {v_L, v, v_R}``.  Cells sit at integer positions; the
movers start a quarter unit off their cell so that the first updates happen
at time 3/4 and then every time unit.  In between, the movers of
neighbouring cells cross blank halfway between the cells (times 1/4 + n).
At the edges of the cone cells lack a neighbour and only see such
two-signal crossings; the valid region shrinks by one cell per side and step.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .core import Configuration, SignalMachine, SignalMachineError
from .engine import Simulator, SpaceTimeDiagram, config_at

QUARTER = Fraction(1, 4)


@dataclass(frozen=True)
class CellularAutomaton:
    """States are named by strings; ``local`` maps every triple to a state."""

    states: tuple[str, ...]
    local: dict[tuple[str, str, str], str]

    def __post_init__(self) -> None:
        for s in self.states:
            if not s.isidentifier() and not s.isdigit():
                raise SignalMachineError(f"bad state name {s!r}")
        missing = [k for k in itertools.product(self.states, repeat=3) if k not in self.local]
        if missing:
            raise SignalMachineError(f"local function undefined on {missing[0]}")

    def __hash__(self) -> int:
        return hash((self.states, tuple(sorted(self.local.items()))))

    def __call__(self, a: str, b: str, c: str) -> str:
        return self.local[a, b, c]


def elementary(number: int) -> CellularAutomaton:
    """Wolfram-numbered two-state CA with states ``"0"`` and ``"1"``."""
    if not 0 <= number <= 255:
        raise SignalMachineError("elementary rule numbers run from 0 to 255")
    local = {}
    for a, b, c in itertools.product((0, 1), repeat=3):
        local[str(a), str(b), str(c)] = str((number >> (4 * a + 2 * b + c)) & 1)
    return CellularAutomaton(("0", "1"), local)


def rule110() -> CellularAutomaton:
    return elementary(110)


@dataclass(frozen=True)
class CAWindow:
    """Finite window ``cells`` starting at ``start``, between ``^w(left)`` and ``(right)^w``."""

    cells: tuple[str, ...]
    left: tuple[str, ...]
    right: tuple[str, ...]
    start: int = 0

    def __post_init__(self) -> None:
        for name in ("cells", "left", "right"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
            if not getattr(self, name):
                raise SignalMachineError(f"{name} must be non-empty")

    @property
    def end(self) -> int:
        return self.start + len(self.cells) - 1

    def cell(self, i: int) -> str:
        if i < self.start:
            return self.left[(i - self.start) % len(self.left)]
        if i > self.end:
            return self.right[(i - self.end - 1) % len(self.right)]
        return self.cells[i - self.start]

    def extended(self, margin: int) -> list[str]:
        return [self.cell(i) for i in range(self.start - margin, self.end + margin + 1)]


def ca_step_window(ca: CellularAutomaton, window: CAWindow, steps: int) -> list[list[str]]:
    """Rows 0..steps over the window widened by ``steps`` cells each side.

    Row t is exact on its central ``len(cells) + 2 * (steps - t)`` cells;
    the edges shrink by one cell per step.
    """
    if steps < 0:
        raise SignalMachineError("steps must be non-negative")
    row = window.extended(steps)
    rows = [row]
    for _ in range(steps):
        row = [row[0]] + [ca(row[i - 1], row[i], row[i + 1])
                          for i in range(1, len(row) - 1)] + [row[-1]]
        rows.append(row)
    return rows


STATE_WORDS = ("zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine")


def state_signal(state: str) -> str:
    """Static meta-signal name of a state: ``zero``, ``one``, ... or ``q_<s>``."""
    if state.isdigit() and int(state) < len(STATE_WORDS):
        return STATE_WORDS[int(state)]
    return f"q_{state}"


def signal_state(name: str) -> str:
    if name in STATE_WORDS:
        return str(STATE_WORDS.index(name))
    if name.startswith("q_"):
        return name[2:]
    raise SignalMachineError(f"{name!r} is not a cell-state signal")


def signal_names(state: str) -> tuple[str, str, str]:
    base = state_signal(state)
    return f"{base}_L", base, f"{base}_R"


def build_ca_machine(ca: CellularAutomaton) -> SignalMachine:
    speeds: dict[str, int] = {}
    for s in ca.states:
        left, static, right = signal_names(s)
        speeds.update({left: -1, static: 0, right: 1})
    rules = []
    for (a, b, c), v in ca.local.items():
        out = signal_names(v)
        rules.append(((signal_names(a)[2], signal_names(b)[1], signal_names(c)[0]), out))
    return SignalMachine.build(speeds, rules)


def encode_ca_cone(ca: CellularAutomaton, window: CAWindow, horizon: int) -> Configuration:
    """Cells ``[start - T, end + T]`` as static/left/right signal triples."""
    if horizon < 1:
        raise SignalMachineError("horizon must be at least 1")
    placed = []
    for i in range(window.start - horizon, window.end + horizon + 1):
        left, static, right = signal_names(window.cell(i))
        placed += [(i - QUARTER, left), (Fraction(i), static), (i + QUARTER, right)]
    return Configuration.of(placed)


def decode_ca_row(diagram: SpaceTimeDiagram, n: int, window: CAWindow,
                  horizon: int) -> list[str]:
    """States of the window cells after ``n`` steps, read at time ``n``."""
    if not 1 <= n <= horizon:
        raise SignalMachineError("step index outside 1..horizon")
    statics = {x: name for x, name in config_at(diagram, n)
               if diagram.machine.speed[name] == 0}
    row = []
    for i in range(window.start, window.end + 1):
        name = statics.get(Fraction(i))
        if name is None:
            raise SignalMachineError(f"no static signal on cell {i} at time {n}")
        row.append(signal_state(name))
    return row


def run_ca_simulation(ca: CellularAutomaton, window: CAWindow,
                      horizon: int) -> tuple[SpaceTimeDiagram, list[list[str]]]:
    """Run the cone encoding up to time ``horizon``; rows 1..horizon decoded."""
    machine = build_ca_machine(ca)
    sim = Simulator(machine, encode_ca_cone(ca, window, horizon))
    end = Fraction(horizon) + QUARTER
    while sim.next_time() is not None and sim.next_time() < end:
        sim.step()
    diagram = sim.diagram(end)
    return diagram, [decode_ca_row(diagram, n, window, horizon) for n in range(1, horizon + 1)]


def oracle_rows(ca: CellularAutomaton, window: CAWindow, horizon: int) -> list[list[str]]:
    """Oracle rows 1..horizon restricted to the window cells."""
    rows = ca_step_window(ca, window, horizon)
    w = len(window.cells)
    return [row[horizon:horizon + w] for row in rows[1:]]


def parse_ca(text: str) -> CellularAutomaton:
    """``states <k>`` then ``local s t u -> v`` lines; states are 0..k-1."""
    states = None
    local = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "states" and len(parts) == 2:
            states = tuple(str(i) for i in range(int(parts[1])))
        elif parts[0] == "local" and len(parts) == 6 and parts[4] == "->":
            local[tuple(parts[1:4])] = parts[5]
        else:
            raise SignalMachineError(f"line {lineno}: cannot parse {line!r}")
    if states is None:
        raise SignalMachineError("missing 'states' line")
    return CellularAutomaton(states, local)


def emit_ca(ca: CellularAutomaton) -> str:
    lines = [f"states {len(ca.states)}"]
    lines += [f"local {a} {b} {c} -> {ca.local[a, b, c]}"
              for a, b, c in itertools.product(ca.states, repeat=3)]
    return "\n".join(lines) + "\n"


def parse_window(text: str) -> CAWindow:
    """``cells <digits>``, ``left <digits>``, ``right <digits>``."""
    fields = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            key, _, value = line.partition(" ")
            fields[key] = tuple(value.strip())
    try:
        return CAWindow(fields["cells"], fields["left"], fields["right"])
    except KeyError as exc:
        raise SignalMachineError(f"missing '{exc.args[0]}' line") from None


def emit_window(window: CAWindow) -> str:
    return (f"cells {''.join(window.cells)}\nleft {''.join(window.left)}\n"
            f"right {''.join(window.right)}\n")


def figure_window() -> CAWindow:
    """``11`` framed by ``^w(10)`` and ``(011)^w``."""
    return CAWindow(("1", "1"), ("1", "0"), ("0", "1", "1"))
