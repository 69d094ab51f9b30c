"""Frame export: one picture per recorded timestep of a trace.

Ascii frames are meant for terminals and golden tests; svg frames for
inspection of the multi-door runs, where the motion arrows and splice
re-links are the interesting part.  Both renderers work from the trace
alone, so any saved run can be re-drawn without the engine.

Ascii legend: '#' obstacle, 'D' door, '.' never visited, ':' visited and
currently empty, 'o' working robot, 'L' leader, 'X' settled robot (the
pixel is done).  Doors draw as 'D' even while occupied; they are never
empty after the start, so the glyph loses nothing.
"""
from __future__ import annotations

import io
from typing import Dict, List, Set, Tuple

from .grid import Environment, Pixel
from .trace import Splice, Trace

_CELL = 24
_PAD = 10

# one fill per cell state; robots are drawn on top as circles
_INK = {
    "wall": "#3a3a42",
    "fresh": "#f5f2e9",
    "seen": "#dfe8df",
    "done": "#b9bec4",
    "door": "#b8860b",
    "robot": "#2f6fa7",
    "leader": "#c4372f",
    "flow": "#1f7a33",
    "splice": "#c4372f",
}


def _cell_glyph(env: Environment, p: Pixel, occ, seen: Set[Pixel]) -> str:
    if p in env.door_set:
        return "D"
    if p not in env.free:
        return "#"
    hit = occ.get(p)
    if hit is not None:
        role = hit[1]
        if role == "stopped":
            return "X"
        if role == "leader":
            return "L"
        return "o"
    return ":" if p in seen else "."


def ascii_frames(tr: Trace) -> List[str]:
    """One string per timestep, rows newline-joined, trailing newline."""
    env = tr.env
    frames: List[str] = []
    seen: Set[Pixel] = set()
    for t in range(len(tr.steps)):
        occ = tr.positions(t)
        seen.update(occ)
        rows = [
            "".join(_cell_glyph(env, (i, j), occ, seen) for i in range(env.width))
            for j in range(env.height)
        ]
        frames.append("\n".join(rows) + "\n")
    return frames


def _center(p: Pixel) -> Tuple[float, float]:
    return (_PAD + (p[0] + 0.5) * _CELL, _PAD + (p[1] + 0.5) * _CELL)


def _svg_frame(
    tr: Trace,
    t: int,
    occ,
    seen: Set[Pixel],
    moved: List[Tuple[Pixel, Pixel]],
    splices: List[Splice],
) -> str:
    env = tr.env
    w = env.width * _CELL + 2 * _PAD
    h = env.height * _CELL + 2 * _PAD
    out = io.StringIO()
    out.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">\n'
    )
    out.write(f"<title>t={t}</title>\n")
    out.write(
        "<defs>"
        '<marker id="flowhead" viewBox="0 0 10 10" refX="8" refY="5" '
        'markerWidth="5" markerHeight="5" orient="auto">'
        f'<path d="M0,0 L10,5 L0,10 z" fill="{_INK["flow"]}"/></marker>'
        '<marker id="splicehead" viewBox="0 0 10 10" refX="8" refY="5" '
        'markerWidth="5" markerHeight="5" orient="auto">'
        f'<path d="M0,0 L10,5 L0,10 z" fill="{_INK["splice"]}"/></marker>'
        "</defs>\n"
    )
    out.write(f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>\n')
    for j in range(env.height):
        for i in range(env.width):
            p = (i, j)
            x, y = _PAD + i * _CELL, _PAD + j * _CELL
            if p not in env.free:
                fill = _INK["wall"]
            else:
                hit = occ.get(p)
                if hit is not None and hit[1] == "stopped":
                    fill = _INK["done"]
                elif p in seen:
                    fill = _INK["seen"]
                else:
                    fill = _INK["fresh"]
            out.write(
                f'<rect x="{x}" y="{y}" width="{_CELL}" height="{_CELL}" '
                f'fill="{fill}" stroke="#ffffff" stroke-width="1"/>\n'
            )
    for d in env.doors:
        x, y = _PAD + d[0] * _CELL, _PAD + d[1] * _CELL
        out.write(
            f'<rect x="{x + 1.5}" y="{y + 1.5}" width="{_CELL - 3}" height="{_CELL - 3}" '
            f'fill="none" stroke="{_INK["door"]}" stroke-width="3"/>\n'
        )
    for src, dst in moved:
        (x1, y1), (x2, y2) = _center(src), _center(dst)
        out.write(
            f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
            f'stroke="{_INK["flow"]}" stroke-width="2" marker-end="url(#flowhead)"/>\n'
        )
    for s in splices:
        (x1, y1), (x2, y2) = _center(s.tip), _center(s.target)
        out.write(
            f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
            f'stroke="{_INK["splice"]}" stroke-width="2" stroke-dasharray="4 3" '
            f'marker-end="url(#splicehead)"/>\n'
        )
        if s.cut is not None:
            cx, cy = _center(s.cut)
            r = _CELL * 0.22
            for sx, sy in ((-r, -r), (-r, r)):
                out.write(
                    f'<line x1="{cx + sx}" y1="{cy + sy}" x2="{cx - sx}" y2="{cy - sy}" '
                    f'stroke="{_INK["splice"]}" stroke-width="2"/>\n'
                )
    for p, (rid, role) in sorted(occ.items()):
        if role == "stopped" or p in env.door_set:
            continue
        cx, cy = _center(p)
        fill = _INK["leader"] if role == "leader" else _INK["robot"]
        out.write(f'<circle cx="{cx}" cy="{cy}" r="{_CELL * 0.32}" fill="{fill}"/>\n')
        if role == "waiting":
            out.write(
                f'<circle cx="{cx}" cy="{cy}" r="{_CELL * 0.14}" fill="#ffffff"/>\n'
            )
    out.write("</svg>\n")
    return out.getvalue()


def svg_frames(tr: Trace) -> List[str]:
    """One svg document per timestep.

    Motion arrows and splice re-links are drawn only for flow-network runs;
    the chain strategies read fine from occupancy alone.
    """
    frames: List[str] = []
    seen: Set[Pixel] = set()
    prev: Dict[int, Pixel] = {}
    by_t: Dict[int, List[Splice]] = {}
    for s in tr.splices:
        by_t.setdefault(s.t, []).append(s)
    draw_flow = tr.strategy == "lflf"
    for t in range(len(tr.steps)):
        occ = tr.positions(t)
        seen.update(occ)
        cur = {rid: (i, j) for rid, i, j, _ in tr.steps[t]}
        moved = []
        if draw_flow:
            moved = [
                (prev[rid], p)
                for rid, p in sorted(cur.items())
                if rid in prev and prev[rid] != p
            ]
        frames.append(_svg_frame(tr, t, occ, seen, moved, by_t.get(t, [])))
        prev = cur
    return frames


def write_frames(frames: List[str], out_dir: str, ext: str) -> List[str]:
    """Write frame_0000.<ext>, frame_0001.<ext>, ... and return the paths."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for t, body in enumerate(frames):
        path = os.path.join(out_dir, f"frame_{t:04d}.{ext}")
        with open(path, "w") as fh:
            fh.write(body)
        paths.append(path)
    return paths
