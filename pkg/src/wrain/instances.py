"""Instance files and instance generators.

File format: one particle per line, "q r" for contracted or "q r DIR"
for expanded (DIR in E W NE NW SE SW); '#' starts a comment, blank lines
are skipped.
"""

from __future__ import annotations

from typing import Iterable

from . import grid
from .grid import Node
from .model import Configuration, from_nodes
from .rng import SplitMix64

SHAPES = ("hex", "vline", "hline", "random")

# ring walk order: E, SE, SW, W, NW, NE starting from the ring's NW corner
_RING_WALK = (grid.E, grid.SE, grid.SW, grid.W, grid.NW, grid.NE)


class InstanceError(ValueError):
    pass


def parse_instance(text: str) -> Configuration:
    particles: dict[Node, str | None] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise InstanceError(f"line {lineno}: expected 'q r' or 'q r DIR'")
        try:
            q, r = int(parts[0]), int(parts[1])
        except ValueError:
            raise InstanceError(f"line {lineno}: bad coordinates") from None
        state = None
        if len(parts) == 3:
            state = parts[2].upper()
            if state not in grid.OFFSETS:
                raise InstanceError(f"line {lineno}: bad direction {parts[2]!r}")
        if (q, r) in particles:
            raise InstanceError(f"line {lineno}: duplicate node ({q}, {r})")
        particles[(q, r)] = state
    config = Configuration(particles)
    problems = config.validate()
    if problems:
        raise InstanceError("; ".join(problems))
    return config


def format_instance(config: Configuration, comment: str = "") -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    for v in sorted(config.bodies()):
        s = config.state(v)
        lines.append(f"{v[0]} {v[1]}" if s is None else f"{v[0]} {v[1]} {s}")
    return "\n".join(lines) + "\n"


def load_instance(path) -> Configuration:
    with open(path) as fp:
        return parse_instance(fp.read())


def save_instance(config: Configuration, path, comment: str = "") -> None:
    with open(path, "w", newline="\n") as fp:
        fp.write(format_instance(config, comment))


def spiral(count: int) -> list[Node]:
    """First `count` nodes of the hexagonal spiral around the origin."""
    nodes: list[Node] = [(0, 0)]
    k = 0
    while len(nodes) < count:
        k += 1
        v = (-k, k)
        for d in _RING_WALK:
            for _ in range(k):
                if len(nodes) < count:
                    nodes.append(v)
                v = grid.neighbor(v, d)
    return nodes[:count]


def gen_hex(n: int) -> Configuration:
    """Compact blob: the spiral prefix, so diameter stays near 2*sqrt(n)."""
    return from_nodes(spiral(n))


def gen_vline(n: int) -> Configuration:
    return from_nodes((0, r) for r in range(n))


def gen_hline(n: int) -> Configuration:
    return from_nodes((q, 0) for q in range(n))


def gen_random(n: int, seed: int) -> Configuration:
    """Connected blob grown by uniform attachment to the frontier."""
    rng = SplitMix64(seed)
    nodes = {(0, 0)}
    frontier = sorted(grid.neighbors((0, 0)))
    while len(nodes) < n:
        v = frontier.pop(rng.randrange(len(frontier)))
        nodes.add(v)
        for w in grid.neighbors(v):
            if w not in nodes and w not in frontier:
                frontier.append(w)
        frontier.sort()
    return _normalize(nodes)


def _normalize(nodes: Iterable[Node]) -> Configuration:
    box = grid.bounding_box(nodes)
    return from_nodes((q - box.q_min, r - box.r_min) for q, r in nodes)


def generate(shape: str, n: int, seed: int = 0) -> Configuration:
    if n < 1:
        raise InstanceError("n must be at least 1")
    if shape == "hex":
        return gen_hex(n)
    if shape == "vline":
        return gen_vline(n)
    if shape == "hline":
        return gen_hline(n)
    if shape == "random":
        return gen_random(n, seed)
    raise InstanceError(f"unknown shape {shape!r}; pick one of {', '.join(SHAPES)}")
