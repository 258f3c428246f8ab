"""Line-oriented text format for machines and initial configurations.

::

    # comment
    speed a 1
    speed b -1/2
    rule a b -> c        # inputs (two or more) -> outputs (possibly none)
    init 0 a
    init 1/3 b
"""

from __future__ import annotations

from fractions import Fraction

from .core import (
    NAME_RE,
    CollisionRule,
    Configuration,
    MetaSignal,
    SignalMachine,
    SignalMachineError,
    as_rational,
    format_rational,
)


class ParseError(SignalMachineError):
    def __init__(self, lineno: int, message: str) -> None:
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def parse_machine(text: str) -> tuple[SignalMachine, Configuration | None]:
    metas: dict[str, MetaSignal] = {}
    rules: list[tuple[int, CollisionRule]] = []
    placements: dict[Fraction, str] = {}
    init_lines: list[tuple[int, str]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, *args = line.split()
        try:
            if keyword == "speed":
                if len(args) != 2:
                    raise ParseError(lineno, "expected 'speed <name> <rational>'")
                name, value = args
                if not NAME_RE.match(name):
                    raise ParseError(lineno, f"invalid name {name!r}")
                if name in metas:
                    raise ParseError(lineno, f"meta-signal {name} declared twice")
                metas[name] = MetaSignal(name, as_rational(value))
            elif keyword == "rule":
                if args.count("->") != 1:
                    raise ParseError(lineno, "expected 'rule <name>+ -> <name>*'")
                arrow = args.index("->")
                ins, outs = args[:arrow], args[arrow + 1:]
                if len(ins) < 2:
                    raise ParseError(lineno, "a rule needs at least two inputs")
                rules.append((lineno, CollisionRule(ins, outs)))
            elif keyword == "init":
                if len(args) != 2:
                    raise ParseError(lineno, "expected 'init <rational> <name>'")
                x = as_rational(args[0])
                if x in placements:
                    raise ParseError(lineno, f"duplicate position {format_rational(x)}")
                placements[x] = args[1]
                init_lines.append((lineno, args[1]))
            else:
                raise ParseError(lineno, f"unknown keyword {keyword!r}")
        except ParseError:
            raise
        except SignalMachineError as exc:
            raise ParseError(lineno, str(exc)) from None

    for lineno, rule in rules:
        for name in sorted(rule.inputs | rule.outputs):
            if name not in metas:
                raise ParseError(lineno, f"undeclared meta-signal {name}")
    for lineno, name in init_lines:
        if name not in metas:
            raise ParseError(lineno, f"undeclared meta-signal {name}")

    machine = SignalMachine(tuple(metas.values()), frozenset(r for _, r in rules))
    config = Configuration(tuple(placements.items())) if placements else None
    return machine, config


def parse_init(text: str, machine: SignalMachine) -> Configuration:
    """Read a file of ``init`` lines against an already known machine."""
    header = emit_machine(machine)
    skip = header.count("\n")
    try:
        _, config = parse_machine(header + text)
    except ParseError as exc:
        raise ParseError(exc.lineno - skip, str(exc).split(": ", 1)[1]) from None
    if config is None:
        raise SignalMachineError("no 'init' lines")
    return config


def emit_machine(machine: SignalMachine, config: Configuration | None = None) -> str:
    """Canonical text: sorted declarations, rules and placements."""
    lines = [f"speed {m.name} {format_rational(m.speed)}" for m in machine.meta_signals]
    for rule in machine.sorted_rules():
        ins = " ".join(machine.by_speed(rule.inputs))
        outs = " ".join(machine.by_speed(rule.outputs))
        lines.append(f"rule {ins} -> {outs}".rstrip())
    text = "\n".join(lines) + "\n"
    return text + emit_init(config) if config is not None else text


def emit_init(config: Configuration) -> str:
    return "".join(f"init {format_rational(x)} {name}\n" for x, name in config)
