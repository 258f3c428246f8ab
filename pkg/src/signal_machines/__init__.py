"""Exact simulation of one-dimensional signal machines.

Positions and times are :class:`fractions.Fraction` throughout; nothing is
ever rounded.
"""

from .ca import CAWindow, CellularAutomaton, build_ca_machine, decode_ca_row, encode_ca_cone
from .core import (
    CollisionRule,
    Configuration,
    MetaSignal,
    SignalMachine,
    SignalMachineError,
    machine_stats,
    resolve_rule,
    validate_machine,
)
from .cts import (
    CtsLayout,
    CtsStatus,
    CyclicTagSystem,
    build_cts_machine,
    build_cts_machine_two_signal,
    cts_run,
    decode_word,
    encode_cts,
    run_cts_simulation,
)
from .engine import Outcome, RunLimits, RunOutcome, Simulator, SpaceTimeDiagram, run
from .metrics import space_cut, time_complexity
from .patterns import PatternSpec, build_pattern_generator, zeno_machine
from .textio import emit_machine, parse_machine

__all__ = [
    "CAWindow", "CellularAutomaton", "CollisionRule", "Configuration", "CtsLayout",
    "CtsStatus", "CyclicTagSystem", "MetaSignal", "Outcome", "PatternSpec", "RunLimits",
    "RunOutcome", "SignalMachine", "SignalMachineError", "Simulator", "SpaceTimeDiagram",
    "build_ca_machine", "build_cts_machine", "build_cts_machine_two_signal",
    "build_pattern_generator", "cts_run", "decode_ca_row", "decode_word", "emit_machine",
    "encode_ca_cone", "encode_cts", "machine_stats", "parse_machine", "resolve_rule",
    "run", "run_cts_simulation", "space_cut", "time_complexity", "validate_machine",
    "zeno_machine",
]
