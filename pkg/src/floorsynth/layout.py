"""Room/relation types, layout graphs, and room boxes.

Grid cells index a 5x5 subdivision of the boundary bounding box as
``(row, col)`` with row 0 at the top.  Relation types describe the
source node relative to the destination node: an edge
``(a, b, LeftOf)`` reads "room a is left of room b".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

GRID_K = 5
NUM_SIZE_BINS = 10
SIZE_BIN_SPAN = 0.5  # ratios above this clamp into the last bin


class RoomType(IntEnum):
    LivingRoom = 0
    MasterRoom = 1
    SecondRoom = 2
    GuestRoom = 3
    ChildRoom = 4
    StudyRoom = 5
    DiningRoom = 6
    Bathroom = 7
    Kitchen = 8
    Balcony = 9
    Storage = 10
    WallIn = 11
    Entrance = 12


BEDROOM_TYPES = frozenset(
    {RoomType.MasterRoom, RoomType.SecondRoom, RoomType.GuestRoom, RoomType.ChildRoom, RoomType.StudyRoom}
)


class RelationType(IntEnum):
    LeftOf = 0
    RightOf = 1
    Above = 2
    Below = 3
    LeftAbove = 4
    RightAbove = 5
    LeftBelow = 6
    RightBelow = 7
    Inside = 8
    Outside = 9

    @property
    def inverse(self) -> "RelationType":
        return _INVERSE[self]

    def rotated(self, k: int) -> "RelationType":
        """Relation after rotating the plan by k x 90 degrees clockwise."""
        if self in (RelationType.Inside, RelationType.Outside):
            return self
        r = self
        for _ in range(k % 4):
            r = _ROT_CW[r]
        return r


_INVERSE = {
    RelationType.LeftOf: RelationType.RightOf,
    RelationType.RightOf: RelationType.LeftOf,
    RelationType.Above: RelationType.Below,
    RelationType.Below: RelationType.Above,
    RelationType.LeftAbove: RelationType.RightBelow,
    RelationType.RightBelow: RelationType.LeftAbove,
    RelationType.RightAbove: RelationType.LeftBelow,
    RelationType.LeftBelow: RelationType.RightAbove,
    RelationType.Inside: RelationType.Outside,
    RelationType.Outside: RelationType.Inside,
}

_ROT_CW = {
    RelationType.LeftOf: RelationType.Above,
    RelationType.Above: RelationType.RightOf,
    RelationType.RightOf: RelationType.Below,
    RelationType.Below: RelationType.LeftOf,
    RelationType.LeftAbove: RelationType.RightAbove,
    RelationType.RightAbove: RelationType.RightBelow,
    RelationType.RightBelow: RelationType.LeftBelow,
    RelationType.LeftBelow: RelationType.LeftAbove,
}

# octant order starting at "east", counter-clockwise in up-positive angles
_OCTANTS = (
    RelationType.RightOf,
    RelationType.RightAbove,
    RelationType.Above,
    RelationType.LeftAbove,
    RelationType.LeftOf,
    RelationType.LeftBelow,
    RelationType.Below,
    RelationType.RightBelow,
)


def relation_from_offset(dx: float, dy: float) -> RelationType:
    """Octant relation of a point offset ``(dx, dy)`` in raster coords (y down).

    Reads "source is <relation> of destination" for
    ``(dx, dy) = center(src) - center(dst)``.
    """
    if dx == 0.0 and dy == 0.0:
        return RelationType.LeftOf  # degenerate; caller breaks the tie by id order
    theta = math.degrees(math.atan2(-dy, dx))
    idx = int(math.floor(((theta + 22.5) % 360.0) / 45.0)) % 8
    return _OCTANTS[idx]


def size_bin_of(ratio: float) -> int:
    if ratio <= 0:
        return 0
    return min(NUM_SIZE_BINS - 1, int(ratio / (SIZE_BIN_SPAN / NUM_SIZE_BINS)))


def rotate_cell(cell: tuple[int, int], k: int) -> tuple[int, int]:
    """Grid cell after k x 90-degree clockwise rotations of the plan."""
    r, c = cell
    for _ in range(k % 4):
        r, c = c, GRID_K - 1 - r
    return (r, c)


@dataclass(frozen=True)
class RoomNode:
    id: int
    rtype: RoomType
    grid_cell: tuple[int, int]
    size_ratio: float
    size_bin: int = field(default=-1)

    def __post_init__(self):
        r, c = self.grid_cell
        if not (0 <= r < GRID_K and 0 <= c < GRID_K):
            raise ValueError(f"grid cell {self.grid_cell} outside {GRID_K}x{GRID_K} grid")
        if not (0 < self.size_ratio <= 1):
            raise ValueError(f"size_ratio {self.size_ratio} outside (0, 1]")
        if self.size_bin < 0:
            object.__setattr__(self, "size_bin", size_bin_of(self.size_ratio))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "type": self.rtype.name,
            "cell": list(self.grid_cell),
            "size_ratio": self.size_ratio,
            "size_bin": self.size_bin,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RoomNode":
        return cls(
            id=int(d["id"]),
            rtype=RoomType[d["type"]],
            grid_cell=(int(d["cell"][0]), int(d["cell"][1])),
            size_ratio=float(d["size_ratio"]),
            size_bin=int(d.get("size_bin", -1)),
        )


Edge = tuple[int, int, RelationType]


class GraphInvariantError(ValueError):
    """A layout graph violates its structural invariants."""


@dataclass(frozen=True)
class LayoutGraph:
    nodes: tuple[RoomNode, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise GraphInvariantError("duplicate node ids")
        idset = set(ids)
        seen_pairs = set()
        for src, dst, rel in self.edges:
            if src == dst:
                raise GraphInvariantError(f"self-edge on node {src}")
            if src not in idset or dst not in idset:
                raise GraphInvariantError(f"edge ({src}, {dst}) references missing node")
            pair = frozenset((src, dst))
            if pair in seen_pairs:
                raise GraphInvariantError(f"duplicate edge between {src} and {dst}")
            seen_pairs.add(pair)
        object.__setattr__(
            self, "edges", tuple((int(s), int(d), RelationType(r)) for s, d, r in self.edges)
        )

    def node(self, node_id: int) -> RoomNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def has_edge(self, a: int, b: int) -> bool:
        return any({s, d} == {a, b} for s, d, _ in self.edges)

    def to_dict(self) -> dict:
        return {
            "nodes": [n.to_dict() for n in self.nodes],
            "edges": [[s, d, r.name] for s, d, r in self.edges],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LayoutGraph":
        return cls(
            nodes=tuple(RoomNode.from_dict(n) for n in d["nodes"]),
            edges=tuple((int(s), int(t), RelationType[r]) for s, t, r in d["edges"]),
        )


@dataclass(frozen=True)
class RoomBox:
    """Axis-aligned box in raster coordinates, center + size form."""

    x: float
    y: float
    w: float
    h: float
    room_id: int = -1

    @property
    def x0(self) -> float:
        return self.x - self.w / 2.0

    @property
    def x1(self) -> float:
        return self.x + self.w / 2.0

    @property
    def y0(self) -> float:
        return self.y - self.h / 2.0

    @property
    def y1(self) -> float:
        return self.y + self.h / 2.0

    @property
    def area(self) -> float:
        return self.w * self.h

    @classmethod
    def from_corners(cls, x0: float, y0: float, x1: float, y1: float, room_id: int = -1) -> "RoomBox":
        return cls(x=(x0 + x1) / 2.0, y=(y0 + y1) / 2.0, w=x1 - x0, h=y1 - y0, room_id=room_id)

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h, "room_id": self.room_id}

    @classmethod
    def from_dict(cls, d: dict) -> "RoomBox":
        return cls(x=float(d["x"]), y=float(d["y"]), w=float(d["w"]), h=float(d["h"]), room_id=int(d["room_id"]))


def grid_cell_of_point(x: float, y: float, bbox: tuple[float, float, float, float]) -> tuple[int, int]:
    """5x5 cell of a point relative to a bounding box."""
    min_x, min_y, max_x, max_y = bbox
    w = max(max_x - min_x, 1e-9)
    h = max(max_y - min_y, 1e-9)
    col = min(GRID_K - 1, max(0, int((x - min_x) / w * GRID_K)))
    row = min(GRID_K - 1, max(0, int((y - min_y) / h * GRID_K)))
    return (row, col)
