from fractions import Fraction
from xml.etree import ElementTree

import networkx as nx
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from signal_machines.core import Configuration, SignalMachine, SignalMachineError
from signal_machines.engine import (
    Outcome,
    RunLimits,
    Simulator,
    audit_diagram,
    config_at,
    is_stable,
    next_event_batch,
    rule_sequence,
    run,
)
from signal_machines.metrics import causality_edges, space_cut, time_complexity
from signal_machines.patterns import zeno_machine
from signal_machines.svg import LineStyle, parse_style, render_svg

F = Fraction


def machine_abc():
    return SignalMachine.build({"a": 2, "b": 1, "c": -1, "s": 0, "u": 1})


def test_batch_simple_meeting():
    m = machine_abc()
    t, groups = next_event_batch(m, Configuration.of([(0, "a"), (4, "b")]))
    assert t == 4 and groups == [(8, ("b", "a"))]


def test_batch_parallel_none():
    m = machine_abc()
    assert next_event_batch(m, Configuration.of([(0, "b"), (4, "u")])) is None


def test_batch_three_way():
    m = SignalMachine.build({"a": 1, "b": 0, "c": -1})
    t, groups = next_event_batch(m, Configuration.of([(0, "a"), (2, "b"), (4, "c")]))
    assert t == 2 and groups == [(2, ("c", "b", "a"))]


def test_batch_reports_every_group():
    m = SignalMachine.build({"a": 1, "c": -1})
    config = Configuration.of([(0, "a"), (2, "c"), (10, "a"), (12, "c")])
    assert next_event_batch(m, config, F(3)) == (F(4), [(1, ("c", "a")), (11, ("c", "a"))])


def test_single_signal_halts_immediately():
    out = run(machine_abc(), Configuration.of([(0, "a")]))
    assert out.tag is Outcome.HALTED and out.diagram.events == ()
    assert list(out.final) == [(out.time * 2, "a")]


def test_annihilation():
    m = SignalMachine.build({"a": 1, "b": -1}, [(("a", "b"), ())])
    out = run(m, Configuration.of([(0, "a"), (4, "b")]))
    assert out.tag is Outcome.HALTED
    (ev,) = out.diagram.events
    assert (ev.position, ev.time, ev.outputs) == (2, 2, ())
    assert len(out.final) == 0


def test_blank_crossing_is_an_event():
    m = SignalMachine.build({"a": 1, "b": -1})
    out = run(m, Configuration.of([(0, "a"), (4, "b")]))
    (ev,) = out.diagram.events
    assert ev.blank and set(ev.outputs) == {"a", "b"}
    assert out.final.names() == ["b", "a"] and is_stable(out.final, m)


def test_simultaneous_groups_processed_together():
    m = SignalMachine.build({"a": 1, "b": -1, "c": 0}, [(("a", "b"), ("c",))])
    out = run(m, Configuration.of([(0, "a"), (2, "b"), (10, "a"), (12, "b")]))
    assert [(e.time, e.position) for e in out.diagram.events] == [(1, 1), (1, 11)]


def test_time_limit_and_collision_limit():
    m, c = zeno_machine()
    out = run(m, c, RunLimits(max_time=F(1)))
    assert out.tag is Outcome.TIME_LIMIT and all(e.time <= 1 for e in out.diagram.events)
    out = run(m, c, RunLimits(max_collisions=5))
    assert out.tag is Outcome.COLLISION_LIMIT and len(out.diagram.events) == 5


def test_limits_validation():
    with pytest.raises(SignalMachineError):
        RunLimits(max_collisions=0)
    with pytest.raises(SignalMachineError):
        RunLimits(accumulation_span=0)


def test_config_at():
    m = SignalMachine.build({"a": 2, "b": -1}, [(("a", "b"), ())])
    out = run(m, Configuration.of([(0, "a"), (30, "b")]))
    d = out.diagram
    assert config_at(d, 0) == d.initial
    assert list(config_at(d, 3)) == [(6, "a"), (27, "b")]
    with pytest.raises(SignalMachineError):
        config_at(d, 10)
    assert len(config_at(d, 11)) == 0


@pytest.mark.parametrize("pairs, stable", [
    ([(0, "a")], True),
    ([(0, "c"), (1, "b")], True),
    ([(0, "b"), (1, "c")], False),
])
def test_is_stable(pairs, stable):
    assert is_stable(Configuration.of(pairs), machine_abc()) is stable


def test_halted_implies_stable():
    m = SignalMachine.build({"a": 1, "b": -1, "c": 0}, [(("a", "b"), ("c",))])
    out = run(m, Configuration.of([(0, "a"), (2, "b"), (5, "c")]))
    assert out.tag is Outcome.HALTED and is_stable(out.final, m)


# accumulation guard

def test_zeno_is_caught():
    m, c = zeno_machine()
    out = run(m, c)
    assert out.tag is Outcome.ACCUMULATION
    times = [e.time for e in out.diagram.events]
    assert times[:4] == [F(1, 2), F(5, 4), F(3, 2), F(7, 4)]
    gaps = [2 - t for t in times]
    assert all(gaps[i + 2] == gaps[i] / 3 for i in range(len(gaps) - 2))
    assert times[-1] < 2


def test_guard_leaves_steady_runs_alone():
    # two signals bouncing between walls forever with a fixed period
    m = SignalMachine.build(
        {"W": 0, "V": 0, "R": 1, "L": -1},
        [(("L", "W"), ("W", "R")), (("R", "V"), ("L", "V"))],
    )
    out = run(m, Configuration.of([(0, "W"), (F(1, 2), "R"), (1, "V")]), RunLimits(max_collisions=500))
    assert out.tag is Outcome.COLLISION_LIMIT


# metrics

def test_metrics_trivial_cases():
    m = machine_abc()
    out = run(m, Configuration.of([(0, "a"), (5, "c"), (9, "u")]))
    assert space_cut(out.diagram) == 3
    empty = run(m, Configuration.of([(0, "a")])).diagram
    assert time_complexity(empty) == 0 and space_cut(empty) == 1


def test_space_cut_merging_rule():
    m = SignalMachine.build({"a": 1, "b": -1, "c": 0}, [(("a", "b"), ("c",))])
    d = run(m, Configuration.of([(0, "a"), (2, "b")])).diagram
    assert space_cut(d) == 2


def test_chain_complexity():
    # r eats n static walls in turn; each collision emits the r of the next
    n = 6
    speeds = {"r": 1, **{f"w{i}": 0 for i in range(n)}}
    m = SignalMachine.build(speeds, [(("r", f"w{i}"), ("r",)) for i in range(n)])
    d = run(m, Configuration.of([(0, "r")] + [(i + 1, f"w{i}") for i in range(n)])).diagram
    assert len(d.events) == n and time_complexity(d) == n


def test_blank_flag_in_complexity():
    m = SignalMachine.build({"a": 1, "b": -1, "c": 0}, [(("a", "c"), ("a",))])
    # b crosses a (blank), then a absorbs c
    d = run(m, Configuration.of([(0, "a"), (2, "b"), (3, "c")])).diagram
    assert [e.blank for e in d.events] == [True, False]
    assert time_complexity(d) == 2
    assert time_complexity(d, include_blank=False) == 1


# random machines for property tests

SPEEDS = [F(-2), F(-1), F(-1, 2), F(0), F(1, 3), F(1), F(2)]


@st.composite
def runs(draw):
    k = draw(st.integers(2, 5))
    speeds = draw(st.lists(st.sampled_from(SPEEDS), min_size=k, max_size=k, unique=True))
    names = [f"s{i}" for i in range(k)]
    rules, seen = [], set()
    for _ in range(draw(st.integers(0, 6))):
        ins = frozenset(draw(st.lists(st.sampled_from(names), min_size=2, max_size=3, unique=True)))
        if ins in seen:
            continue
        seen.add(ins)
        outs = draw(st.lists(st.sampled_from(names), max_size=3, unique=True))
        rules.append((ins, outs))
    m = SignalMachine.build(dict(zip(names, speeds)), rules)
    xs = draw(st.lists(st.fractions(-10, 10, max_denominator=6), min_size=1, max_size=8, unique=True))
    config = Configuration.of([(x, draw(st.sampled_from(names))) for x in xs])
    return m, config


LIMITS = RunLimits(max_collisions=150, accumulation_span=F(10**9))
fast = settings(max_examples=80, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@fast
@given(runs())
def test_audit_and_exactness(mc):
    m, c = mc
    d = run(m, c, LIMITS).diagram
    assert audit_diagram(d) == []
    for seg in d.segments:
        if seg.end is not None:
            assert seg.end[0] - seg.start[0] == seg.speed * (seg.end[1] - seg.start[1])
            assert isinstance(seg.end[0], Fraction)


@fast
@given(runs())
def test_determinism(mc):
    m, c = mc
    assert run(m, c, LIMITS).diagram.events == run(m, c, LIMITS).diagram.events


@fast
@given(runs())
def test_translation(mc):
    m, c = mc
    delta = F(7, 3)
    a = run(m, c, LIMITS)
    b = run(m, c.shifted(delta), LIMITS)
    assert a.tag == b.tag
    assert [(e.time, e.position + delta) for e in a.diagram.events] == \
           [(e.time, e.position) for e in b.diagram.events]
    assert rule_sequence(a.diagram) == rule_sequence(b.diagram)
    assert causality_edges(a.diagram) == causality_edges(b.diagram)


@fast
@given(runs())
def test_scaling(mc):
    m, c = mc
    alpha = F(3, 2)
    a = run(m, c, LIMITS)
    b = run(m, c.scaled(alpha), LIMITS)
    assert [(e.time * alpha, e.position * alpha) for e in a.diagram.events] == \
           [(e.time, e.position) for e in b.diagram.events]
    assert rule_sequence(a.diagram) == rule_sequence(b.diagram)


def _nx_longest(d, include_blank):
    g = nx.DiGraph()
    g.add_node("root")
    for e in d.events:
        g.add_edge("root", e.id, weight=int(include_blank or not e.blank))
    for a, b in causality_edges(d):
        g.add_edge(a, b, weight=int(include_blank or not d.events[b].blank))
    return nx.dag_longest_path_length(g, weight="weight", default_weight=0)


@fast
@given(runs())
def test_time_complexity_matches_networkx(mc):
    m, c = mc
    d = run(m, c, LIMITS).diagram
    g = nx.DiGraph(causality_edges(d))
    assert nx.is_directed_acyclic_graph(g)
    assert all(d.events[a].time < d.events[b].time for a, b in g.edges)
    assert time_complexity(d) == _nx_longest(d, True)
    assert time_complexity(d, include_blank=False) == _nx_longest(d, False)


def _sweep(d):
    """Count segments crossing a horizontal line between every two event times."""
    times = d.event_times()
    probes = [times[0] / 2] if times else [F(1)]
    probes += [(a + b) / 2 for a, b in zip(times, times[1:])]
    if times:
        probes.append((times[-1] + d.horizon) / 2 if d.horizon is not None else times[-1] + 1)
    best = len(d.initial)
    for t in probes:
        alive = sum(1 for s in d.segments if s.start[1] < t and (s.end is None or s.end[1] > t))
        best = max(best, alive)
    return best


@fast
@given(runs())
def test_space_cut_matches_sweep(mc):
    m, c = mc
    d = run(m, c, LIMITS).diagram
    assert space_cut(d) == _sweep(d)


# rendering

def _lines(svg):
    root = ElementTree.fromstring(svg)
    return root.findall(".//{http://www.w3.org/2000/svg}line")


def test_svg_one_line_per_segment():
    m, c = zeno_machine()
    d = run(m, c).diagram
    svg = render_svg(d)
    assert len(_lines(svg)) == len(d.segments)
    assert render_svg(d) == svg


def test_svg_empty_canvas():
    d = run(SignalMachine.build({}), Configuration.of([])).diagram
    svg = render_svg(d)
    root = ElementTree.fromstring(svg)
    assert root.tag.endswith("svg") and _lines(svg) == []


def test_svg_time_goes_up():
    m = SignalMachine.build({"a": 1})
    d = run(m, Configuration.of([(0, "a")]), RunLimits(max_time=F(5))).diagram
    (line,) = _lines(render_svg(d, legend=False))
    assert float(line.get("y2")) < float(line.get("y1"))
    assert float(line.get("x2")) > float(line.get("x1"))


def test_style_file():
    styles = parse_style("# comment\na #ff0000 dashed 2\nb blue dotted 0.5\n")
    assert styles["a"] == LineStyle("#ff0000", "dashed", 2.0)
    with pytest.raises(SignalMachineError):
        parse_style("a red wavy 1\n")
    m, c = zeno_machine()
    svg = render_svg(run(m, c).diagram, {"A": styles["a"]})
    assert 'stroke="#ff0000"' in svg and 'stroke-dasharray="6,3"' in svg


def test_simulator_step_api():
    m, c = zeno_machine()
    sim = Simulator(m, c)
    assert sim.next_time() == F(1, 2)
    (ev,) = sim.step()
    assert set(ev.inputs) == {"R", "B"} and ev.position == F(3, 4)
    assert sim.now == F(1, 2)
