"""Complexity measures over a finished space-time diagram."""

from __future__ import annotations

from .engine import SpaceTimeDiagram


def causality_edges(diagram: SpaceTimeDiagram) -> list[tuple[int, int]]:
    """(a, b) for every signal emitted by collision a and consumed by b."""
    return [(s.origin, s.terminus) for s in diagram.segments
            if s.origin is not None and s.terminus is not None]


def time_complexity(diagram: SpaceTimeDiagram, *, include_blank: bool = True) -> int:
    """Longest chain of collisions linked by signals.

    With ``include_blank=False`` blank crossings are transparent: they
    pass their parents' depth through without adding a link.
    """
    parents: dict[int, list[int]] = {e.id: [] for e in diagram.events}
    for a, b in causality_edges(diagram):
        parents[b].append(a)
    depth: dict[int, int] = {}
    # ids are dense in time order and edges go forward in time
    for ev in diagram.events:
        base = max((depth[p] for p in parents[ev.id]), default=0)
        depth[ev.id] = base + (1 if include_blank or not ev.blank else 0)
    return max(depth.values(), default=0)


def space_cut(diagram: SpaceTimeDiagram) -> int:
    """Largest number of signals alive together between two collision times."""
    count = best = len(diagram.initial)
    events = diagram.events
    i = 0
    while i < len(events):
        t = events[i].time
        while i < len(events) and events[i].time == t:
            count += len(events[i].outputs) - len(events[i].inputs)
            i += 1
        best = max(best, count)
    return best
