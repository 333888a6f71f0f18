"""Axial-coordinate geometry for the infinite triangular lattice.

Nodes are integer pairs (q, r): q runs along the W-E axis, r along the
SW-NE axis. With this embedding the W-E / SW-NE bounding parallelogram of
a particle set is an axis-aligned box in (q, r), so box and floor queries
are plain min/max.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

Node = tuple[int, int]
Direction = str

E, W, NE, SW, NW, SE = "E", "W", "NE", "SW", "NW", "SE"
DIRECTIONS: tuple[Direction, ...] = (E, W, NE, SW, NW, SE)

OFFSETS: dict[Direction, Node] = {
    E: (1, 0),
    W: (-1, 0),
    NE: (0, 1),
    SW: (0, -1),
    NW: (-1, 1),
    SE: (1, -1),
}

OPPOSITE: dict[Direction, Direction] = {E: W, W: E, NE: SW, SW: NE, NW: SE, SE: NW}

# Enumeration of the 18 visible positions around a node, row-major from the
# top row down, west to east within a row:
#   r=+2: 1..3, r=+1: 4..7, r=0 (center excluded): 8..11,
#   r=-1: 12..15, r=-2: 16..18.
# This table is the single source of truth for position indices; the
# surrounding code only ever derives from it.
TWO_HOP_OFFSETS: dict[int, Node] = {
    1: (-2, 2), 2: (-1, 2), 3: (0, 2),
    4: (-2, 1), 5: (-1, 1), 6: (0, 1), 7: (1, 1),
    8: (-2, 0), 9: (-1, 0), 10: (1, 0), 11: (2, 0),
    12: (-1, -1), 13: (0, -1), 14: (1, -1), 15: (2, -1),
    16: (0, -2), 17: (1, -2), 18: (2, -2),
}

# Position sets driving the decision rule: the upper-west trapezoid and its
# point reflection, the lower-east trapezoid.
UPPER_POSITIONS: tuple[int, ...] = (1, 2, 4, 5, 6)
LOWER_POSITIONS: tuple[int, ...] = (13, 14, 15, 17, 18)

UPPER_OFFSETS: tuple[Node, ...] = tuple(TWO_HOP_OFFSETS[k] for k in UPPER_POSITIONS)
LOWER_OFFSETS: tuple[Node, ...] = tuple(TWO_HOP_OFFSETS[k] for k in LOWER_POSITIONS)
BALL_OFFSETS: tuple[Node, ...] = tuple(TWO_HOP_OFFSETS[k] for k in range(1, 19))


def offset(d: Direction) -> Node:
    return OFFSETS[d]


def neighbor(v: Node, d: Direction) -> Node:
    dq, dr = OFFSETS[d]
    return (v[0] + dq, v[1] + dr)


def neighbors(v: Node) -> list[Node]:
    """The six 1-hop neighbors of v, in DIRECTIONS order."""
    q, r = v
    return [(q + dq, r + dr) for dq, dr in (OFFSETS[d] for d in DIRECTIONS)]


def distance(u: Node, v: Node) -> int:
    """Hop distance on the lattice."""
    dq = v[0] - u[0]
    dr = v[1] - u[1]
    return (abs(dq) + abs(dr) + abs(dq + dr)) // 2


def two_hop_position(v: Node, k: int) -> Node:
    """The node at enumerated position k (1..18) relative to v."""
    if not 1 <= k <= 18:
        raise ValueError(f"two-hop position index out of range: {k}")
    dq, dr = TWO_HOP_OFFSETS[k]
    return (v[0] + dq, v[1] + dr)


def two_hop_ball(v: Node) -> list[Node]:
    """All 18 visible nodes around v, in enumeration order."""
    q, r = v
    return [(q + dq, r + dr) for dq, dr in BALL_OFFSETS]


class BoundingBox(NamedTuple):
    q_min: int
    q_max: int
    r_min: int
    r_max: int

    @property
    def q_side(self) -> int:
        """W-E side length, in edge lengths."""
        return self.q_max - self.q_min

    @property
    def r_side(self) -> int:
        """SW-NE side length, in edge lengths."""
        return self.r_max - self.r_min

    def union(self, other: "BoundingBox") -> "BoundingBox":
        return BoundingBox(
            min(self.q_min, other.q_min),
            max(self.q_max, other.q_max),
            min(self.r_min, other.r_min),
            max(self.r_max, other.r_max),
        )

    def extend(self, nodes: Iterable[Node]) -> "BoundingBox":
        box = self
        for q, r in nodes:
            box = BoundingBox(
                min(box.q_min, q), max(box.q_max, q),
                min(box.r_min, r), max(box.r_max, r),
            )
        return box


def bounding_box(nodes: Iterable[Node]) -> BoundingBox:
    """Smallest W-E / SW-NE parallelogram containing the nodes."""
    it = iter(nodes)
    try:
        q, r = next(it)
    except StopIteration:
        raise ValueError("bounding box of an empty node set") from None
    box = BoundingBox(q, q, r, r)
    return box.extend(it)


def floor_row(nodes: Iterable[Node]) -> int:
    """r of the southern bounding-box side."""
    return bounding_box(nodes).r_min
