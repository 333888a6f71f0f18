"""Particle configurations and the local predicates that drive decisions.

A configuration maps body nodes to particle states: ``None`` for a
contracted particle, or a direction string for a particle expanded along
the edge toward that direction. Expanded particles keep their body node;
the node across the expansion edge, if empty, is "semi-occupied".

Predicates (occupied, semi_occupied, pointed, near, upper, lower) are
defined both on full configurations and on View values. A View captures
exactly what a particle can sense, the states of all nodes within two
hops, so any rule written against View cannot peek further out.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping, Optional

from . import grid
from .grid import (
    BALL_OFFSETS,
    DIRECTIONS,
    LOWER_POSITIONS,
    OFFSETS,
    OPPOSITE,
    TWO_HOP_OFFSETS,
    UPPER_POSITIONS,
    Node,
)

# View cell encoding: "" empty, "." contracted, direction string expanded.
EMPTY = ""
CONTRACTED = "."

# Enumerated position of each unit neighbor, by direction.
UNIT_POSITION: dict[str, int] = {
    d: next(k for k, off in TWO_HOP_OFFSETS.items() if off == OFFSETS[d])
    for d in DIRECTIONS
}

_UPPER_IDX = tuple(k - 1 for k in UPPER_POSITIONS)
_LOWER_IDX = tuple(k - 1 for k in LOWER_POSITIONS)

_OFFSET_TO_POSITION = {off: k for k, off in TWO_HOP_OFFSETS.items()}


def _pointers_into(d: str) -> tuple[tuple[int, str], ...]:
    # All (position, direction) pairs whose expansion edge ends on the unit
    # neighbor at d. Position 0 stands for the view's center node.
    u = OFFSETS[d]
    out = []
    for src in ((0, 0),) + BALL_OFFSETS:
        for pd in DIRECTIONS:
            if (src[0] + OFFSETS[pd][0], src[1] + OFFSETS[pd][1]) == u:
                out.append((_OFFSET_TO_POSITION.get(src, 0), pd))
    return tuple(out)


_POINTERS_INTO: dict[str, tuple[tuple[int, str], ...]] = {
    d: _pointers_into(d) for d in DIRECTIONS
}


class Configuration:
    """An immutable particle placement: body node -> state.

    State is ``None`` for contracted, or one of the six direction strings
    for a particle expanded along that edge. Treat instances as values;
    build successors with new dicts rather than mutating.
    """

    __slots__ = ("_particles", "_expanded", "_key")

    def __init__(self, particles: Mapping[Node, Optional[str]]):
        items = {}
        expanded = 0
        for node, state in particles.items():
            if state is not None:
                if state not in OFFSETS:
                    raise ValueError(f"unknown expansion direction: {state!r}")
                expanded += 1
            items[(int(node[0]), int(node[1]))] = state
        self._particles = items
        self._expanded = expanded
        self._key: Optional[str] = None

    @property
    def particles(self) -> Mapping[Node, Optional[str]]:
        return self._particles

    @property
    def n(self) -> int:
        return len(self._particles)

    @property
    def expanded_count(self) -> int:
        return self._expanded

    def bodies(self) -> Iterable[Node]:
        return self._particles.keys()

    def state(self, v: Node) -> Optional[str]:
        return self._particles[v]

    def occupied(self, v: Node) -> bool:
        return v in self._particles

    def expansion_target(self, v: Node) -> Node:
        d = self._particles[v]
        if d is None:
            raise ValueError(f"particle at {v} is contracted")
        return grid.neighbor(v, d)

    def pointed(self, v: Node) -> bool:
        """Some adjacent particle is expanded along the edge ending at v."""
        P = self._particles
        for d in DIRECTIONS:
            if P.get(grid.neighbor(v, d)) == OPPOSITE[d]:
                return True
        return False

    def semi_occupied(self, u: Node) -> bool:
        return u not in self._particles and self.pointed(u)

    def near(self, v: Node) -> bool:
        """Some empty neighbor of v is semi-occupied."""
        for u in grid.neighbors(v):
            if u not in self._particles and self.pointed(u):
                return True
        return False

    def upper(self, v: Node) -> bool:
        P = self._particles
        q, r = v
        for dq, dr in grid.UPPER_OFFSETS:
            if (q + dq, r + dr) in P:
                return True
        return False

    def lower(self, v: Node) -> bool:
        P = self._particles
        q, r = v
        for dq, dr in grid.LOWER_OFFSETS:
            if (q + dq, r + dr) in P:
                return True
        return False

    def is_connected(self) -> bool:
        P = self._particles
        if not P:
            raise ValueError("connectivity of an empty configuration")
        start = next(iter(P))
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in grid.neighbors(v):
                if w in P and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(P)

    def is_initial(self) -> bool:
        return self._expanded == 0 and self.is_connected()

    def is_final(self, floor: int) -> bool:
        if self._expanded:
            return False
        if any(r != floor for _, r in self._particles):
            return False
        return self.is_connected()

    def bounding_box(self) -> grid.BoundingBox:
        return grid.bounding_box(self._particles.keys())

    def translate(self, dq: int, dr: int) -> "Configuration":
        return Configuration(
            {(q + dq, r + dr): s for (q, r), s in self._particles.items()}
        )

    def canonical_key(self, mode: str = "absolute") -> str:
        """Deterministic text key; equal keys iff equal configurations.

        "absolute" keys distinguish translates; "translated" keys shift
        q_min,r_min to the origin first.
        """
        if mode == "absolute":
            if self._key is None:
                self._key = self._format_key(0, 0)
            return self._key
        if mode == "translated":
            box = self.bounding_box()
            return self._format_key(-box.q_min, -box.r_min)
        raise ValueError(f"unknown key mode: {mode!r}")

    def _format_key(self, dq: int, dr: int) -> str:
        entries = sorted(
            (q + dq, r + dr, s or CONTRACTED)
            for (q, r), s in self._particles.items()
        )
        return ";".join(f"{q},{r},{s}" for q, r, s in entries)

    def validate(self) -> list[str]:
        """Invariant violations, empty when the configuration is well formed."""
        problems = []
        if not self._particles:
            problems.append("no particles (need n >= 1)")
        edges = set()
        for v, s in self._particles.items():
            if s is None:
                continue
            t = grid.neighbor(v, s)
            edge = (min(v, t), max(v, t))
            if edge in edges:
                problems.append(f"two expansions on edge {edge[0]}-{edge[1]}")
            edges.add(edge)
        return problems

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return self._particles == other._particles

    def __hash__(self) -> int:
        return hash(self.canonical_key())

    def __repr__(self) -> str:
        return f"Configuration({self.canonical_key()!r})"


class View:
    """The 2-hop sensing snapshot around a center node.

    cells[k-1] holds the state of enumerated position k (1..18) using the
    EMPTY / CONTRACTED / direction encoding; center_state likewise for the
    center itself. Predicates computed here can only depend on what a
    particle is allowed to sense.
    """

    __slots__ = ("center", "center_state", "cells")

    def __init__(self, center: Node, center_state: str, cells: tuple[str, ...]):
        if len(cells) != 18:
            raise ValueError("a view has exactly 18 surrounding cells")
        self.center = center
        self.center_state = center_state
        self.cells = cells

    @classmethod
    def from_config(cls, config: Configuration, center: Node) -> "View":
        P = config.particles
        q, r = center
        center_state = P.get(center, EMPTY)
        if center_state is None:
            center_state = CONTRACTED
        cells = []
        for dq, dr in BALL_OFFSETS:
            s = P.get((q + dq, r + dr), EMPTY)
            cells.append(CONTRACTED if s is None else s)
        return cls(center, center_state, tuple(cells))

    def cell(self, k: int) -> str:
        if not 1 <= k <= 18:
            raise ValueError(f"view position out of range: {k}")
        return self.cells[k - 1]

    def occupied_at(self, k: int) -> bool:
        return self.cell(k) != EMPTY

    def upper(self) -> bool:
        cells = self.cells
        return any(cells[i] != EMPTY for i in _UPPER_IDX)

    def lower(self) -> bool:
        cells = self.cells
        return any(cells[i] != EMPTY for i in _LOWER_IDX)

    def pointed(self) -> bool:
        cells = self.cells
        for d in DIRECTIONS:
            if cells[UNIT_POSITION[d] - 1] == OPPOSITE[d]:
                return True
        return False

    def near(self) -> bool:
        cells = self.cells
        for d in DIRECTIONS:
            if cells[UNIT_POSITION[d] - 1] != EMPTY:
                continue
            for src, pd in _POINTERS_INTO[d]:
                s = self.center_state if src == 0 else cells[src - 1]
                if s == pd:
                    return True
        return False


def view_of(config: Configuration, center: Node) -> View:
    return View.from_config(config, center)


def occupied(config: Configuration, v: Node) -> bool:
    return config.occupied(v)


def semi_occupied(config: Configuration, u: Node) -> bool:
    return config.semi_occupied(u)


def pointed(config: Configuration, v: Node) -> bool:
    return config.pointed(v)


def near(config: Configuration, v: Node) -> bool:
    return config.near(v)


def upper(config: Configuration, v: Node) -> bool:
    return config.upper(v)


def lower(config: Configuration, v: Node) -> bool:
    return config.lower(v)


def is_connected(config: Configuration) -> bool:
    return config.is_connected()


def from_nodes(nodes: Iterable[Node]) -> Configuration:
    """All-contracted configuration on the given nodes."""
    return Configuration({(q, r): None for q, r in nodes})


def components(nodes: Iterable[Node]) -> Iterator[frozenset[Node]]:
    """Connected components of a node set under 1-hop adjacency."""
    remaining = set(nodes)
    while remaining:
        start = remaining.pop()
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in grid.neighbors(v):
                if w in remaining:
                    remaining.remove(w)
                    comp.add(w)
                    stack.append(w)
        yield frozenset(comp)
