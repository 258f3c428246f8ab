"""SVG rendering of space-time diagrams (space to the right, time upward)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from xml.sax.saxutils import escape

from .core import SignalMachineError, as_rational
from .engine import SpaceTimeDiagram

PALETTE = ("#1f3a93", "#a31515", "#1e7b34", "#6a1b9a", "#000000", "#b35900", "#00838f")
DASHES = {"solid": None, "dashed": "6,3", "dotted": "1.5,2.5"}


@dataclass(frozen=True)
class LineStyle:
    color: str = "#000000"
    dash: str = "solid"
    width: float = 1.0


def parse_style(text: str) -> dict[str, LineStyle]:
    """Read ``<meta-signal> <css-color> <solid|dashed|dotted> <stroke-width>`` lines."""
    styles = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):  # colors may contain '#', so no trailing comments
            continue
        parts = line.split()
        if len(parts) != 4 or parts[2] not in DASHES:
            raise SignalMachineError(f"style line {lineno}: expected '<name> <color> <dash> <width>'")
        try:
            width = float(parts[3])
        except ValueError:
            raise SignalMachineError(f"style line {lineno}: bad stroke width") from None
        styles[parts[0]] = LineStyle(parts[1], parts[2], width)
    return styles


def _num(q: Fraction) -> str:
    return f"{float(q):.3f}".rstrip("0").rstrip(".")


def render_svg(
    diagram: SpaceTimeDiagram,
    style: dict[str, LineStyle] | None = None,
    scale: float | Fraction = 20,
    *,
    show_events: bool = True,
    legend: bool = True,
) -> str:
    """One ``<line>`` per segment; open traces are drawn up to the top margin."""
    style = dict(style or {})
    names = [m.name for m in diagram.machine.meta_signals]
    for i, name in enumerate(names):
        style.setdefault(name, LineStyle(PALETTE[i % len(PALETTE)]))
    scale = as_rational(Fraction(scale).limit_denominator(1000))

    times = [e.time for e in diagram.events]
    top = diagram.horizon if diagram.horizon is not None else (max(times, default=0) + 2)
    if top == 0:
        top = Fraction(1)
    xs = [x for x, _ in diagram.initial] + [e.position for e in diagram.events]
    spans = []
    for seg in diagram.segments:
        end = seg.end if seg.end is not None else (seg.position_at(top), top)
        spans.append((seg, seg.start, end))
        xs.extend((seg.start[0], end[0]))
    left = min(xs, default=Fraction(0)) - 1
    right = max(xs, default=Fraction(0)) + 1
    legend_h = 16 * len(names) + 10 if legend else 0
    width = (right - left) * scale
    height = top * scale

    def px(x: Fraction) -> str:
        return _num((x - left) * scale)

    def py(t: Fraction) -> str:
        return _num(height - t * scale + 10)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_num(width)}" height="{_num(height + 20 + legend_h)}">',
        '<g id="segments" fill="none">',
    ]
    for seg, (x0, t0), (x1, t1) in spans:
        st = style[seg.meta]
        dash = DASHES[st.dash]
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(
            f'<line x1="{px(x0)}" y1="{py(t0)}" x2="{px(x1)}" y2="{py(t1)}" '
            f'stroke="{escape(st.color)}" stroke-width="{st.width:g}"{extra}>'
            f"<title>{escape(seg.meta)}</title></line>"
        )
    out.append("</g>")
    if show_events and diagram.events:
        out.append('<g id="collisions">')
        for ev in diagram.events:
            fill = "#ffffff" if ev.blank else "#000000"
            out.append(f'<circle cx="{px(ev.position)}" cy="{py(ev.time)}" r="1.5" '
                       f'fill="{fill}" stroke="#000000" stroke-width="0.5"/>')
        out.append("</g>")
    if legend and names:
        out.append('<g id="legend" font-family="sans-serif" font-size="11">')
        y0 = height + 20
        for i, name in enumerate(names):
            st = style[name]
            y = y0 + 16 * i + 8
            dash = DASHES[st.dash]
            extra = f' stroke-dasharray="{dash}"' if dash else ""
            out.append(f'<path d="M 4 {_num(y)} h 24" stroke="{escape(st.color)}" '
                       f'stroke-width="{st.width:g}"{extra}/>')
            speed = diagram.machine.speed[name]
            out.append(f'<text x="34" y="{_num(y + 4)}">{escape(name)} ({speed})</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
