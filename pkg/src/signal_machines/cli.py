"""Command-line front end.

Exit status: 0 success, 1 validation failure or oracle mismatch, 2 engine
limit or suspected accumulation, 64 usage error, 74 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import ca as ca_mod
from . import cts as cts_mod
from .core import (
    Configuration,
    SignalMachine,
    SignalMachineError,
    as_rational,
    format_rational,
    machine_stats,
    validate_machine,
)
from .engine import Outcome, RunLimits, run
from .metrics import space_cut, time_complexity
from .patterns import PatternSpec, build_pattern_generator
from .svg import parse_style, render_svg
from .textio import emit_init, emit_machine, parse_init, parse_machine
from .verify import CtsOptions, verify

EXIT_OK, EXIT_FAIL, EXIT_LIMIT, EXIT_USAGE, EXIT_IO = 0, 1, 2, 64, 74


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2
        raise UsageError(message)


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load(args) -> tuple[SignalMachine, Configuration | None]:
    if args.machine is None:
        raise UsageError("--machine is required")
    machine, config = parse_machine(_read(args.machine))
    if getattr(args, "init", None):
        config = parse_init(_read(args.init), machine)
    return machine, config


def _limits(args) -> RunLimits:
    return RunLimits(
        max_collisions=args.max_collisions,
        max_time=None if args.max_time is None else as_rational(args.max_time),
    )


def _layout(args) -> cts_mod.CtsLayout:
    return cts_mod.CtsLayout(mode=args.layout)


def _emit_pair(args, machine: SignalMachine, config: Configuration) -> None:
    """Machine and init to separate files with --init, else one text."""
    if args.init:
        _write(args.machine, emit_machine(machine))
        _write(args.init, emit_init(config))
    else:
        _write(args.machine, emit_machine(machine, config))


def cmd_validate(args) -> int:
    machine, _ = _load(args)
    problems = validate_machine(machine)
    for p in problems:
        print(p)
    if problems:
        return EXIT_FAIL
    print("ok")
    return EXIT_OK


def cmd_stats(args) -> int:
    machine, _ = _load(args)
    n_meta, n_rules = machine_stats(machine)
    print(f"{n_meta} meta-signals, {n_rules} non-blank rules")
    return EXIT_OK


def _run(args):
    machine, config = _load(args)
    if config is None:
        raise UsageError("no initial configuration (give 'init' lines or --init)")
    problems = validate_machine(machine)
    if problems:
        for p in problems:
            print(p, file=sys.stderr)
        return None
    return run(machine, config, _limits(args))


def cmd_run(args) -> int:
    outcome = _run(args)
    if outcome is None:
        return EXIT_FAIL
    d = outcome.diagram
    print(f"{outcome.tag.value}, {len(d.events)} collisions")
    print(f"time complexity {time_complexity(d)}")
    print(f"space cut {space_cut(d)}")
    print(f"final configuration at t={format_rational(outcome.time)}")
    for x, name in outcome.final:
        print(f"  {format_rational(x)} {name}")
    if args.svg:
        _render(args, outcome)
    return EXIT_OK if outcome.tag is Outcome.HALTED else EXIT_LIMIT


def _render(args, outcome) -> None:
    style = parse_style(_read(args.style)) if args.style else None
    _write(args.svg, render_svg(outcome.diagram, style))


def cmd_render(args) -> int:
    if not args.svg:
        raise UsageError("render needs --svg")
    outcome = _run(args)
    if outcome is None:
        return EXIT_FAIL
    _render(args, outcome)
    print(f"{outcome.tag.value}, {len(outcome.diagram.events)} collisions")
    return EXIT_OK if outcome.tag is Outcome.HALTED else EXIT_LIMIT


def cmd_encode_cts(args) -> int:
    system = cts_mod.parse_cts(_read(args.instance))
    if args.two_signal:
        machine = cts_mod.build_cts_machine_two_signal(clean=args.clean)
    else:
        machine = cts_mod.build_cts_machine(clean=args.clean)
    config = cts_mod.encode_cts(system, _layout(args), two_signal=args.two_signal,
                                allow_unsafe=args.allow_unsafe)
    _emit_pair(args, machine, config)
    return EXIT_OK


def cmd_encode_ca(args) -> int:
    automaton = ca_mod.parse_ca(_read(args.automaton))
    window = ca_mod.parse_window(_read(args.window))
    machine = ca_mod.build_ca_machine(automaton)
    config = ca_mod.encode_ca_cone(automaton, window, args.horizon)
    _emit_pair(args, machine, config)
    return EXIT_OK


def cmd_gen_pattern(args) -> int:
    names = tuple(f"mu_{i}" for i in range(1, args.period + 1))
    gaps = None
    if args.gaps:
        gaps = tuple(as_rational(g) for g in args.gaps.split(","))
    gen = build_pattern_generator(PatternSpec(names, as_rational(args.spacing), gaps))
    _emit_pair(args, gen.machine, gen.initial)
    return EXIT_OK


def _cmd_verify(kind: str, args) -> int:
    options = CtsOptions(_layout(args), two_signal=args.two_signal, clean=args.clean)
    report = verify(kind, args.count, args.seed, jobs=args.jobs, cts_options=options)
    _write(args.report, report.text())
    if report.ok:
        return EXIT_OK
    repro = args.repro or f"verify-{kind}-repro.txt"
    first = report.failures[0]
    _write(repro, f"# instance {first.index}: {first.detail}\n{first.minimized}")
    print(f"{len(report.failures)} mismatches; minimized reproduction in {repro}",
          file=sys.stderr)
    return EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="signal-machines", description="Exact signal machine simulator.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def machine_args(q, init=True):
        q.add_argument("--machine", help="machine file ('-' for stdin)")
        if init:
            q.add_argument("--init", help="initial configuration file")

    def limit_args(q):
        q.add_argument("--max-collisions", type=int, default=RunLimits.max_collisions)
        q.add_argument("--max-time", help="rational time bound")

    def cts_args(q):
        q.add_argument("--layout", choices=("dyadic", "integer"), default="dyadic")
        q.add_argument("--clean", action="store_true", help="destroy right-escaping garbage")
        q.add_argument("--two-signal", action="store_true", help="use only 2-signal rules")

    q = sub.add_parser("validate", help="check a machine for structural problems")
    machine_args(q)
    q.set_defaults(func=cmd_validate)

    q = sub.add_parser("stats", help="count meta-signals and non-blank rules")
    machine_args(q)
    q.set_defaults(func=cmd_stats)

    for name, func, helptext in (("run", cmd_run, "run to completion or a limit"),
                                 ("render", cmd_render, "run and draw the diagram as SVG")):
        q = sub.add_parser(name, help=helptext)
        machine_args(q)
        limit_args(q)
        q.add_argument("--svg", help="SVG output path")
        q.add_argument("--style", help="style file: <name> <color> <dash> <width> per line")
        q.set_defaults(func=func)

    q = sub.add_parser("encode-cts", help="encode a cyclic tag system")
    q.add_argument("instance", help="cyclic tag system file")
    machine_args(q)
    cts_args(q)
    q.add_argument("--allow-unsafe", action="store_true",
                   help="encode even if a plain bit sits at the halt position")
    q.set_defaults(func=cmd_encode_cts)

    q = sub.add_parser("encode-ca", help="encode a cellular automaton window")
    q.add_argument("automaton", help="CA file")
    q.add_argument("window", help="window file")
    q.add_argument("--horizon", type=int, required=True)
    machine_args(q)
    q.set_defaults(func=cmd_encode_ca)

    q = sub.add_parser("gen-pattern", help="build a periodic pattern generator")
    q.add_argument("--period", type=int, default=3)
    q.add_argument("--spacing", default="4")
    q.add_argument("--gaps", help="comma-separated gaps for the unequal variant")
    machine_args(q)
    q.set_defaults(func=cmd_gen_pattern)

    for kind in ("cts", "ca"):
        q = sub.add_parser(f"verify-{kind}", help=f"compare the {kind} encoder with its oracle")
        q.add_argument("--count", type=int, default=200 if kind == "cts" else 100)
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--jobs", type=int, default=1)
        q.add_argument("--report", help="report path (default stdout)")
        q.add_argument("--repro", help="where to write a minimized failing instance")
        cts_args(q)
        q.set_defaults(func=lambda a, k=kind: _cmd_verify(k, a))
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "encode-ca" and args.horizon < 1:
            raise UsageError("--horizon must be at least 1")
        if args.command in ("verify-cts", "verify-ca") and (args.count < 1 or args.jobs < 1):
            raise UsageError("--count and --jobs must be at least 1")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SignalMachineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
