"""Exact event-driven execution of signal machines.

Between two collisions the left-to-right order of signals cannot change,
so only neighbouring signals need a scheduled meeting time.  Meetings are
kept in a heap keyed by ``(time, position)``; stale entries (a member died
or the pair is no longer adjacent) are discarded when popped.  All
meetings sharing the earliest time are applied together, one collision per
distinct position, left to right.
"""

from __future__ import annotations

import enum
import heapq
import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import (
    Configuration,
    SignalMachine,
    SignalMachineError,
    as_rational,
    resolve_rule,
)

Point = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class CollisionEvent:
    id: int
    time: Fraction
    position: Fraction
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    blank: bool

    @property
    def rule(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return self.inputs, self.outputs


@dataclass(frozen=True)
class SignalSegment:
    """Trace of one signal.

    ``origin`` is the id of the creating collision, or None for a signal of
    the initial configuration.  ``terminus`` is the id of the collision
    that consumed it; None with ``end`` set means the segment was cut at
    the diagram horizon, None with ``end`` None means it runs forever.
    """

    meta: str
    speed: Fraction
    start: Point
    origin: int | None
    end: Point | None
    terminus: int | None

    def position_at(self, t: Fraction) -> Fraction:
        x0, t0 = self.start
        return x0 + self.speed * (t - t0)


@dataclass(frozen=True)
class SpaceTimeDiagram:
    machine: SignalMachine
    initial: Configuration
    events: tuple[CollisionEvent, ...]
    segments: tuple[SignalSegment, ...]
    horizon: Fraction | None  # None: the run halted, traces are unbounded

    def event_times(self) -> list[Fraction]:
        return sorted({e.time for e in self.events})


class Outcome(str, enum.Enum):
    HALTED = "Halted"
    TIME_LIMIT = "TimeLimit"
    COLLISION_LIMIT = "CollisionLimit"
    ACCUMULATION = "AccumulationSuspected"


@dataclass(frozen=True)
class RunLimits:
    max_collisions: int = 100_000
    max_time: Fraction | None = None
    accumulation_events: int = 64
    accumulation_span: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        if self.max_collisions < 1:
            raise SignalMachineError("max_collisions must be at least 1")
        if self.accumulation_events < 8:
            raise SignalMachineError("accumulation window needs at least 8 events")
        object.__setattr__(self, "accumulation_span", as_rational(self.accumulation_span))
        if self.accumulation_span <= 0:
            raise SignalMachineError("accumulation span must be positive")
        if self.max_time is not None:
            object.__setattr__(self, "max_time", as_rational(self.max_time))


@dataclass(frozen=True)
class RunOutcome:
    tag: Outcome
    final: Configuration
    time: Fraction  # instant at which ``final`` is sampled
    diagram: SpaceTimeDiagram


class _Node:
    __slots__ = ("meta", "speed", "base", "seg", "prev", "next", "alive")

    def __init__(self, meta: str, speed: Fraction, base: Fraction, seg: int) -> None:
        self.meta = meta
        self.speed = speed
        self.base = base  # position extrapolated to time 0
        self.seg = seg
        self.prev: _Node | None = None
        self.next: _Node | None = None
        self.alive = True

    def at(self, t: Fraction) -> Fraction:
        return self.base + self.speed * t


class Simulator:
    """Incremental engine; :func:`run` is the usual entry point."""

    def __init__(self, machine: SignalMachine, initial: Configuration) -> None:
        self.machine = machine
        self.initial = initial
        self.now = Fraction(0)
        self.events: list[CollisionEvent] = []
        self._segs: list[list] = []
        self._heap: list = []
        self._tick = itertools.count()
        self._batches: deque[tuple[Fraction, Fraction, Fraction]] = deque()
        self.live = len(initial)

        speed = machine.speed
        prev = None
        self._head: _Node | None = None
        for x, name in initial:
            if name not in speed:
                raise SignalMachineError(f"undeclared meta-signal {name} in configuration")
            node = self._spawn(name, x, Fraction(0), None)
            if prev is None:
                self._head = node
            else:
                prev.next, node.prev = node, prev
                self._schedule(prev, node)
            prev = node

    def _spawn(self, name: str, x: Fraction, t: Fraction, origin: int | None) -> _Node:
        v = self.machine.speed[name]
        self._segs.append([name, v, (x, t), origin, None, None])
        return _Node(name, v, x - v * t, len(self._segs) - 1)

    def _schedule(self, left: _Node | None, right: _Node | None) -> None:
        if left is None or right is None or left.speed <= right.speed:
            return
        t = (right.base - left.base) / (left.speed - right.speed)
        if t > self.now:
            heapq.heappush(self._heap, (t, left.at(t), next(self._tick), left, right))

    def _prune(self) -> None:
        heap = self._heap
        while heap:
            _, _, _, left, right = heap[0]
            if left.alive and right.alive and left.next is right:
                return
            heapq.heappop(heap)

    def next_time(self) -> Fraction | None:
        self._prune()
        return self._heap[0][0] if self._heap else None

    def step(self) -> list[CollisionEvent]:
        """Apply every collision happening at the next event time."""
        t = self.next_time()
        if t is None:
            return []
        heap = self._heap
        starts: list[tuple[Fraction, _Node]] = []
        while heap and heap[0][0] == t:
            _, x, _, left, right = heapq.heappop(heap)
            if left.alive and right.alive and left.next is right:
                starts.append((x, left))
        self.now = t

        groups: list[tuple[Fraction, list[_Node]]] = []
        claimed: set[int] = set()
        for x, left in sorted(starts, key=lambda item: item[0]):
            if id(left) in claimed:
                continue
            first = left
            while first.prev is not None and first.prev.at(t) == x:
                first = first.prev
            group = [first]
            while group[-1].next is not None and group[-1].next.at(t) == x:
                group.append(group[-1].next)
            claimed.update(id(n) for n in group)
            groups.append((x, group))

        new_events = []
        for x, group in groups:
            new_events.append(self._collide(t, x, group))
        lo = min(e.position for e in new_events)
        hi = max(e.position for e in new_events)
        self._batches.append((t, lo, hi))
        return new_events

    def _collide(self, t: Fraction, x: Fraction, group: list[_Node]) -> CollisionEvent:
        machine = self.machine
        outcome = resolve_rule(machine, (n.meta for n in group))
        eid = len(self.events)
        event = CollisionEvent(
            eid,
            t,
            x,
            tuple(machine.by_speed(outcome.inputs)),
            tuple(machine.by_speed(outcome.outputs)),
            outcome.blank,
        )
        self.events.append(event)
        for n in group:
            n.alive = False
            seg = self._segs[n.seg]
            seg[4], seg[5] = (x, t), eid

        left, right = group[0].prev, group[-1].next
        outs = [self._spawn(name, x, t, eid) for name in event.outputs]
        chain = [left, *outs, right]
        for a, b in zip(chain, chain[1:]):
            if a is not None:
                a.next = b
            if b is not None:
                b.prev = a
        if left is None:
            self._head = outs[0] if outs else right
        self._schedule(outs[-1] if outs else left, right)
        if outs:
            self._schedule(left, outs[0])
        self.live += len(outs) - len(group)
        return event

    def accumulating(self, count: int, span: Fraction) -> bool:
        """Heuristic Zeno test over the last ``count`` event times.

        Fires when those times fit in ``span`` and, cut into four blocks,
        each block lasts at most half of the previous one while its events
        stay inside the spatial hull of the previous block.
        """
        batches = self._batches
        while len(batches) > count:
            batches.popleft()
        if len(batches) < count or batches[-1][0] - batches[0][0] > span:
            return False
        items = list(batches)
        q = count // 4
        blocks = [items[i * q:(i + 1) * q + 1] for i in range(4)]
        spans = [b[-1][0] - b[0][0] for b in blocks]
        hulls = [(min(e[1] for e in b), max(e[2] for e in b)) for b in blocks]
        for i in range(3):
            if not 0 < 2 * spans[i + 1] <= spans[i]:
                return False
            (lo, hi), (lo2, hi2) = hulls[i], hulls[i + 1]
            if not lo <= lo2 <= hi2 <= hi:
                return False
        return True

    def configuration_at(self, t: Fraction) -> Configuration:
        """Live signals at ``t``; only valid for ``now < t < next_time()``."""
        pairs = []
        node = self._head
        while node is not None:
            pairs.append((node.at(t), node.meta))
            node = node.next
        return Configuration(tuple(pairs))

    def diagram(self, horizon: Fraction | None) -> SpaceTimeDiagram:
        segments = []
        for name, v, start, origin, end, terminus in self._segs:
            if end is None and horizon is not None:
                end = (start[0] + v * (horizon - start[1]), horizon)
            segments.append(SignalSegment(name, v, start, origin, end, terminus))
        return SpaceTimeDiagram(self.machine, self.initial, tuple(self.events),
                                tuple(segments), horizon)

    def settle_time(self) -> Fraction:
        """A time after every processed event and before any pending one."""
        nxt = self.next_time()
        if nxt is None:
            return self.now + 1
        return (self.now + nxt) / 2


def run(
    machine: SignalMachine,
    initial: Configuration,
    limits: RunLimits = RunLimits(),
) -> RunOutcome:
    """Run from ``initial`` until stable, a limit, or suspected accumulation."""
    sim = Simulator(machine, initial)
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
        sim.step()
        if sim.accumulating(limits.accumulation_events, limits.accumulation_span):
            tag = Outcome.ACCUMULATION
            break
    return finish(sim, tag, limits.max_time)


def finish(sim: Simulator, tag: Outcome, max_time: Fraction | None = None) -> RunOutcome:
    """Package a simulator's state as a :class:`RunOutcome`."""
    if tag is Outcome.HALTED:
        return RunOutcome(tag, sim.configuration_at(sim.now + 1), sim.now + 1, sim.diagram(None))
    when = sim.settle_time()
    if tag is Outcome.TIME_LIMIT and max_time is not None and sim.now < max_time:
        when = max_time
    return RunOutcome(tag, sim.configuration_at(when), when, sim.diagram(when))


def next_event_batch(
    machine: SignalMachine, config: Configuration, now: Fraction = Fraction(0)
) -> tuple[Fraction, list[tuple[Fraction, tuple[str, ...]]]] | None:
    """Earliest meeting time after ``now`` and every meeting group at that time.

    ``config`` gives positions at time ``now``.  Written as a plain scan over
    neighbouring pairs, independent of :class:`Simulator`.
    """
    now = as_rational(now)
    placed = list(config)
    speed = machine.speed
    best: Fraction | None = None
    for (xa, a), (xb, b) in zip(placed, placed[1:]):
        if speed[a] > speed[b]:
            dt = (xb - xa) / (speed[a] - speed[b])
            best = dt if best is None else min(best, dt)
    if best is None:
        return None
    at = {}
    for x, name in placed:
        at.setdefault(x + speed[name] * best, []).append(name)
    groups = [(x, tuple(machine.by_speed(names))) for x, names in sorted(at.items())
              if len(names) > 1]
    return now + best, groups


def config_at(diagram: SpaceTimeDiagram, t: Fraction | int | str) -> Configuration:
    t = as_rational(t)
    if t < 0:
        raise SignalMachineError("negative time")
    if diagram.horizon is not None and t > diagram.horizon:
        raise SignalMachineError("time beyond the diagram horizon")
    if any(e.time == t for e in diagram.events):
        raise SignalMachineError(f"t={t} is a collision time; configuration is not a signal set")
    pairs = []
    for seg in diagram.segments:
        if seg.start[1] > t:
            continue
        if seg.end is not None and (seg.end[1] < t or (seg.end[1] == t and seg.terminus is not None)):
            continue
        pairs.append((seg.position_at(t), seg.meta))
    return Configuration(tuple(pairs))


def is_stable(config: Configuration, machine: SignalMachine) -> bool:
    speeds = [machine.speed[n] for n in config.names()]
    return all(a <= b for a, b in zip(speeds, speeds[1:]))


def audit_diagram(diagram: SpaceTimeDiagram) -> list[str]:
    """Check the trace against the space-time diagram conditions.

    Returns human-readable violations; an empty list means the diagram is
    consistent (exact motion, endpoints at collisions carrying the signal,
    collisions on distinct points, outputs matching the rule set).
    """
    problems = []
    events = diagram.events
    machine = diagram.machine
    ends: dict[int, list[str]] = {e.id: [] for e in events}
    starts: dict[int, list[str]] = {e.id: [] for e in events}
    initial = sorted(((s.start[0], s.meta) for s in diagram.segments if s.origin is None))
    if initial != sorted(diagram.initial):
        problems.append("initial segments differ from the initial configuration")
    for i, seg in enumerate(diagram.segments):
        if seg.speed != machine.speed[seg.meta]:
            problems.append(f"segment {i}: wrong speed")
        if seg.origin is None and seg.start[1] != 0:
            problems.append(f"segment {i}: initial signal not at t=0")
        if seg.origin is not None:
            ev = events[seg.origin]
            if (ev.position, ev.time) != seg.start:
                problems.append(f"segment {i}: start off its origin collision")
            starts[ev.id].append(seg.meta)
        if seg.end is not None:
            dx = seg.end[0] - seg.start[0]
            dt = seg.end[1] - seg.start[1]
            if dt < 0 or dx != seg.speed * dt:
                problems.append(f"segment {i}: not a uniform motion")
        if seg.terminus is not None:
            ev = events[seg.terminus]
            if (ev.position, ev.time) != seg.end:
                problems.append(f"segment {i}: end off its terminal collision")
            ends[ev.id].append(seg.meta)
        elif seg.end is not None and seg.end[1] != diagram.horizon:
            problems.append(f"segment {i}: dangling end before the horizon")
    seen_points = set()
    for ev in events:
        if (ev.position, ev.time) in seen_points:
            problems.append(f"event {ev.id}: two collisions at the same point")
        seen_points.add((ev.position, ev.time))
        if sorted(ends[ev.id]) != sorted(ev.inputs):
            problems.append(f"event {ev.id}: consumed signals differ from inputs")
        if sorted(starts[ev.id]) != sorted(ev.outputs):
            problems.append(f"event {ev.id}: emitted signals differ from outputs")
        expected = resolve_rule(machine, ev.inputs)
        if set(ev.outputs) != expected.outputs or ev.blank != expected.blank:
            problems.append(f"event {ev.id}: outputs disagree with the rule set")
    times = [e.time for e in events]
    if times != sorted(times) or any(t <= 0 for t in times):
        problems.append("events are not in time order")
    return problems


def rule_sequence(diagram: SpaceTimeDiagram) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    return [e.rule for e in diagram.events]


def events_in(diagram: SpaceTimeDiagram, names: Iterable[str]) -> list[CollisionEvent]:
    """Events whose input set is exactly ``names``."""
    key = set(names)
    return [e for e in diagram.events if set(e.inputs) == key]
