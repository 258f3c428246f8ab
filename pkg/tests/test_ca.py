import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from signal_machines.ca import (
    CAWindow,
    CellularAutomaton,
    build_ca_machine,
    ca_step_window,
    decode_ca_row,
    elementary,
    emit_ca,
    emit_window,
    encode_ca_cone,
    figure_window,
    oracle_rows,
    parse_ca,
    parse_window,
    rule110,
    run_ca_simulation,
    signal_names,
)
from signal_machines.core import CollisionRule, SignalMachineError, machine_stats, validate_machine
from signal_machines.engine import Simulator, config_at
from signal_machines.verify import random_ca

F = Fraction


def test_rule110_table():
    f = rule110()
    assert f("0", "1", "0") == "1"
    assert f("1", "1", "1") == "0" and f("0", "0", "0") == "0"
    assert [f(*k) for k in itertools.product("01", repeat=3)] == list("01110110")


def test_quiescent_window_stays_zero():
    rows = ca_step_window(rule110(), CAWindow("000", "0", "0"), 5)
    assert all(set(r) == {"0"} for r in rows)
    assert [len(r) for r in rows] == [13] * 6


def test_window_background():
    w = figure_window()
    assert [w.cell(i) for i in range(-4, 6)] == list("1010" "11" "0110")


def test_window_validation():
    with pytest.raises(SignalMachineError):
        CAWindow("", "0", "0")
    with pytest.raises(SignalMachineError):
        CellularAutomaton(("0", "1"), {})
    with pytest.raises(SignalMachineError):
        elementary(256)


def test_step_window_rows():
    rows = ca_step_window(rule110(), figure_window(), 1)
    # rule 110 on ...1 0 [1 1] 0 1... : cells 0 and 1 become f(0,1,1), f(1,1,0)
    assert rows[0] == ["0", "1", "1", "0"]
    assert rows[1][1:3] == ["1", "1"]


def test_machine_shape():
    m = build_ca_machine(rule110())
    assert len(m.meta_signals) == 6 and len(m.rules) == 8
    assert CollisionRule(("zero_R", "one", "zero_L"), ("one_L", "one", "one_R")) in m.rules
    assert validate_machine(m) == []
    assert {n: int(v) for n, v in m.speed.items()} == {
        "zero_L": -1, "zero": 0, "zero_R": 1, "one_L": -1, "one": 0, "one_R": 1}


def test_rule110_stats():
    # Expected count kept as stated.  The quiescent entry f(0,0,0)=0 gives
    # {zero_R, zero, zero_L} -> {zero_L, zero, zero_R}, whose outputs equal
    # its inputs, and machine_stats counts such rules as blank: this
    # currently yields (6, 7) with 8 declared rules.
    assert machine_stats(build_ca_machine(rule110())) == (6, 8)


def test_three_states():
    states = ("0", "1", "2")
    ca = CellularAutomaton(states, {k: str(sum(map(int, k)) % 3) for k in itertools.product(states, repeat=3)})
    m = build_ca_machine(ca)
    assert len(m.meta_signals) == 9 and len(m.rules) == 27
    assert validate_machine(m) == []
    assert signal_names("2") == ("two_L", "two", "two_R")


def test_cone_size_and_positions():
    w = CAWindow("0110", "0", "1")
    config = encode_ca_cone(rule110(), w, 3)
    assert len(config) == 3 * (4 + 2 * 3)
    fracs = {x - (x.numerator // x.denominator) for x, _ in config}
    assert fracs == {0, F(1, 4), F(3, 4)}


def test_first_update():
    ca = rule110()
    w = CAWindow("1", "0", "0")
    sim = Simulator(build_ca_machine(ca), encode_ca_cone(ca, w, 1))
    # movers of neighbouring cells first cross blank halfway between cells
    crossings = sim.step()
    assert sim.now == F(1, 4) and all(e.blank and len(e.inputs) == 2 for e in crossings)
    assert {e.position for e in crossings} == {F(-1, 2), F(1, 2)}
    batch = sim.step()
    assert sim.now == F(3, 4)
    center = [e for e in batch if e.position == 0]
    (ev,) = center
    assert set(ev.inputs) == {"zero_R", "one", "zero_L"}
    assert set(ev.outputs) == {"one_L", "one", "one_R"}


def test_figure_instance_three_steps():
    diagram, rows = run_ca_simulation(rule110(), figure_window(), 3)
    assert rows == oracle_rows(rule110(), figure_window(), 3)
    assert [decode_ca_row(diagram, n, figure_window(), 3) for n in (1, 2, 3)] == rows


def test_updates_at_quarter_past():
    ca = rule110()
    diagram, _ = run_ca_simulation(ca, figure_window(), 4)
    for e in diagram.events:
        if not e.blank:
            assert (e.time - F(3, 4)).denominator == 1
            assert len(e.inputs) == 3 and len(e.outputs) == 3


def test_one_update_per_cell_per_step():
    ca = rule110()
    w = CAWindow("1101", "0", "1")
    T = 4
    diagram, _ = run_ca_simulation(ca, w, T)
    for n in range(1, T + 1):
        t = n - 1 + F(3, 4)
        three = [e for e in diagram.events if e.time == t and len(e.inputs) == 3]
        # the cone shrinks by one cell per side and step
        assert len(three) == len(w.cells) + 2 * (T - n)


def test_decode_errors():
    ca = rule110()
    diagram, _ = run_ca_simulation(ca, figure_window(), 2)
    with pytest.raises(SignalMachineError):
        decode_ca_row(diagram, 3, figure_window(), 2)
    wide = CAWindow("11111111", "1", "1")
    with pytest.raises(SignalMachineError):
        decode_ca_row(diagram, 1, wide, 2)
    assert config_at(diagram, 1)


def test_quiescent_cone():
    _, rows = run_ca_simulation(rule110(), CAWindow("000", "0", "0"), 4)
    assert rows == [["0"] * 3] * 4


def test_text_formats():
    ca = rule110()
    text = emit_ca(ca)
    assert text.startswith("states 2\nlocal 0 0 0 -> 0\n")
    assert parse_ca(text) == ca
    w = parse_window("cells 11\nleft 10\nright 011\n")
    assert w == figure_window()
    assert parse_window(emit_window(w)) == w
    with pytest.raises(SignalMachineError):
        parse_ca("local 0 0 0 -> 0\n")
    with pytest.raises(SignalMachineError):
        parse_window("cells 1\n")


def test_random_instances():
    rng = random.Random(2)
    for _ in range(30):
        inst = random_ca(rng)
        _, rows = run_ca_simulation(inst.ca, inst.window, inst.horizon)
        assert rows == oracle_rows(inst.ca, inst.window, inst.horizon)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 255), st.text("01", min_size=1, max_size=5),
       st.text("01", min_size=1, max_size=3), st.text("01", min_size=1, max_size=3),
       st.integers(1, 5))
def test_elementary_equivalence(number, cells, left, right, horizon):
    ca = elementary(number)
    w = CAWindow(cells, left, right)
    diagram, rows = run_ca_simulation(ca, w, horizon)
    assert rows == oracle_rows(ca, w, horizon)
    assert validate_machine(diagram.machine) == []
