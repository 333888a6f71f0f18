"""Deterministic SVG rendering of configurations and trace frames.

Fixed layout: a node (q, r) maps to x = q + r/2, y = -r*sqrt(3)/2, scaled
by UNIT pixels. All coordinates are emitted with two decimals, so equal
configurations produce byte-identical documents.
"""

from __future__ import annotations

import math
import os
from typing import Iterable, Iterator, Optional

from . import grid
from .engine import Trace
from .grid import BoundingBox, Node
from .model import Configuration

UNIT = 40.0
_SQ3_2 = math.sqrt(3.0) / 2.0

DOT_RADIUS = 3.0
BODY_RADIUS = 14.0
TARGET_RADIUS = 9.0
EDGE_WIDTH = 10.0

COLORS = {
    "lattice": "#d0d0d0",
    "floor": "#c0392b",
    "box": "#8e44ad",
    "edge": "#f0a030",
    "body": "#2c7fb8",
    "body_rim": "#1a4f73",
    "semi": "#f0a030",
}


def _xy(v: Node) -> tuple[float, float]:
    q, r = v
    return (UNIT * (q + r / 2.0), UNIT * (-r * _SQ3_2))


def _f(x: float) -> str:
    # avoid "-0.00"
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


def frame_bounds(nodes: Iterable[Node], margin: int = 1) -> BoundingBox:
    box = grid.bounding_box(nodes)
    return BoundingBox(
        box.q_min - margin, box.q_max + margin,
        box.r_min - margin, box.r_max + margin,
    )


def svg_config(
    config: Configuration,
    floor: Optional[int] = None,
    bounds: Optional[BoundingBox] = None,
    box: Optional[BoundingBox] = None,
) -> str:
    """One SVG document for one configuration.

    bounds fixes the drawn lattice window (so animation frames align);
    box, when given, outlines that bounding parallelogram.
    """
    targets = [
        config.expansion_target(v)
        for v in sorted(config.bodies())
        if config.state(v) is not None
    ]
    if bounds is None:
        bounds = frame_bounds(list(config.bodies()) + targets)
    corners = [
        _xy((q, r))
        for q in (bounds.q_min, bounds.q_max)
        for r in (bounds.r_min, bounds.r_max)
    ]
    pad = UNIT * 0.6
    x0 = min(x for x, _ in corners) - pad
    x1 = max(x for x, _ in corners) + pad
    y0 = min(y for _, y in corners) - pad
    y1 = max(y for _, y in corners) + pad
    w, h = x1 - x0, y1 - y0

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_f(x0)} {_f(y0)} {_f(w)} {_f(h)}" '
        f'width="{_f(w)}" height="{_f(h)}">'
    ]
    for r in range(bounds.r_max, bounds.r_min - 1, -1):
        for q in range(bounds.q_min, bounds.q_max + 1):
            x, y = _xy((q, r))
            out.append(
                f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(DOT_RADIUS)}" '
                f'fill="{COLORS["lattice"]}"/>'
            )
    if floor is not None:
        y = _xy((0, floor))[1]
        out.append(
            f'<line x1="{_f(x0)}" y1="{_f(y)}" x2="{_f(x1)}" y2="{_f(y)}" '
            f'stroke="{COLORS["floor"]}" stroke-width="2" '
            f'stroke-dasharray="8 6"/>'
        )
    if box is not None:
        pts = [
            _xy((box.q_min, box.r_min)),
            _xy((box.q_max, box.r_min)),
            _xy((box.q_max, box.r_max)),
            _xy((box.q_min, box.r_max)),
        ]
        path = " ".join(f"{_f(x)},{_f(y)}" for x, y in pts)
        out.append(
            f'<polygon points="{path}" fill="none" '
            f'stroke="{COLORS["box"]}" stroke-width="1.5" '
            f'stroke-dasharray="3 5"/>'
        )
    for v in sorted(config.bodies()):
        s = config.state(v)
        if s is None:
            continue
        (x1e, y1e), (x2e, y2e) = _xy(v), _xy(config.expansion_target(v))
        out.append(
            f'<line x1="{_f(x1e)}" y1="{_f(y1e)}" x2="{_f(x2e)}" y2="{_f(y2e)}" '
            f'stroke="{COLORS["edge"]}" stroke-width="{_f(EDGE_WIDTH)}" '
            f'stroke-linecap="round"/>'
        )
    semi = sorted(t for t in targets if not config.occupied(t))
    for t in semi:
        x, y = _xy(t)
        out.append(
            f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(TARGET_RADIUS)}" '
            f'fill="none" stroke="{COLORS["semi"]}" stroke-width="2.5" '
            f'stroke-dasharray="4 3"/>'
        )
    for v in sorted(config.bodies()):
        x, y = _xy(v)
        out.append(
            f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(BODY_RADIUS)}" '
            f'fill="{COLORS["body"]}" stroke="{COLORS["body_rim"]}" '
            f'stroke-width="2"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def iterate_configurations(trace: Trace) -> Iterator[tuple[int, Configuration]]:
    """(round, configuration) after each record, starting at (0, initial)."""
    particles = dict(trace.initial.particles)
    positions = sorted(particles)
    yield 0, trace.initial
    for rec in trace.records:
        for pid, target in rec.contractions:
            del particles[positions[pid]]
            particles[target] = None
            positions[pid] = target
        for pid, d in rec.expansions:
            particles[positions[pid]] = d
        yield rec.round, Configuration(dict(particles))


def render_frames(trace: Trace, outdir, prefix: str = "round") -> list[str]:
    """One aligned SVG per round (plus the initial one); returns the paths."""
    os.makedirs(outdir, exist_ok=True)
    nodes = list(trace.initial.bodies())
    if trace.summary is not None:
        ub = trace.summary.union_bbox
        nodes.extend(
            ((ub.q_min, ub.r_min), (ub.q_max, ub.r_max))
        )
    else:
        for _, config in iterate_configurations(trace):
            nodes.extend(config.bodies())
    bounds = frame_bounds(nodes)
    paths = []
    for rnd, config in iterate_configurations(trace):
        doc = svg_config(config, floor=trace.floor, bounds=bounds)
        path = os.path.join(outdir, f"{prefix}{rnd:04d}.svg")
        with open(path, "w", newline="\n") as fp:
            fp.write(doc)
        paths.append(path)
    return paths
