"""Rectilinear building boundaries and the shape machinery built on them.

Coordinate conventions (used throughout the package):

* Raster arrays are row-major with shape ``(resolution, resolution)``;
  the pixel at ``(row, col)`` has its center at ``(x, y) = (col + 0.5,
  row + 0.5)``.  x grows rightwards, y grows downwards.
* Polygon vertices are ``(x, y)`` pairs in pixel units.  Boundaries are
  stored in screen-clockwise order (positive shoelace sum in the
  y-down frame), with every edge horizontal or vertical.
* Turning functions are anchored at the front door and traverse the
  polygon clockwise; convex corners turn +90 degrees, reflex corners
  -90, so a full loop accumulates +360.
* ``door_direction`` alone reports an up-positive vector (y flipped)
  so that a door on the top edge points "up" = (0, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

Point = tuple[float, float]

_EPS = 1e-9


class BoundaryError(ValueError):
    """The polygon/door input does not describe a valid boundary."""


class DegenerateDoorError(ValueError):
    """Front-door center coincides with the bounding-box center."""


def _shoelace(vertices: tuple[Point, ...]) -> float:
    s = 0.0
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return 0.5 * s


def _segments_intersect(p1, p2, q1, q2) -> bool:
    """Proper or touching intersection between two axis-aligned segments."""
    ax1, ax2 = sorted((p1[0], p2[0]))
    ay1, ay2 = sorted((p1[1], p2[1]))
    bx1, bx2 = sorted((q1[0], q2[0]))
    by1, by2 = sorted((q1[1], q2[1]))
    return (
        ax1 <= bx2 + _EPS
        and bx1 <= ax2 + _EPS
        and ay1 <= by2 + _EPS
        and by1 <= ay2 + _EPS
    )


def _point_on_segment(p: Point, a: Point, b: Point) -> bool:
    cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
    if abs(cross) > 1e-6:
        return False
    lo_x, hi_x = sorted((a[0], b[0]))
    lo_y, hi_y = sorted((a[1], b[1]))
    return lo_x - _EPS <= p[0] <= hi_x + _EPS and lo_y - _EPS <= p[1] <= hi_y + _EPS


@dataclass(frozen=True)
class Boundary:
    """Simple rectilinear polygon plus a front door lying on one edge.

    Vertices are normalized to clockwise order on construction.
    """

    vertices: tuple[Point, ...]
    front_door: tuple[Point, Point]
    resolution: int = 128

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(verts) < 4:
            raise BoundaryError("boundary needs at least 4 vertices")
        area2 = _shoelace(verts)
        if abs(area2) < _EPS:
            raise BoundaryError("degenerate polygon (zero area)")
        if area2 < 0:  # normalize to screen-clockwise (positive in y-down frame)
            verts = verts[::-1]
        n = len(verts)
        for i in range(n):
            x1, y1 = verts[i]
            x2, y2 = verts[(i + 1) % n]
            if not (0 <= x1 < self.resolution and 0 <= y1 < self.resolution):
                raise BoundaryError(f"vertex {verts[i]} outside [0, {self.resolution})")
            dx, dy = x2 - x1, y2 - y1
            if (abs(dx) > _EPS) == (abs(dy) > _EPS):
                raise BoundaryError(f"edge {verts[i]}->{verts[(i + 1) % n]} is not axis-aligned")
        for i in range(n):
            x0, y0 = verts[(i - 1) % n]
            x1, y1 = verts[i]
            x2, y2 = verts[(i + 1) % n]
            # consecutive edges must turn: collinear runs are disallowed
            if abs((x1 - x0) * (y2 - y1) - (y1 - y0) * (x2 - x1)) < _EPS:
                raise BoundaryError(f"collinear vertex {verts[i]}")
        for i in range(n):
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue
                if _segments_intersect(verts[i], verts[(i + 1) % n], verts[j], verts[(j + 1) % n]):
                    raise BoundaryError("self-intersecting polygon")
        door = (tuple(map(float, self.front_door[0])), tuple(map(float, self.front_door[1])))
        if math.dist(door[0], door[1]) < _EPS:
            raise BoundaryError("front door has zero length")
        on_edges = [
            i
            for i in range(n)
            if _point_on_segment(door[0], verts[i], verts[(i + 1) % n])
            and _point_on_segment(door[1], verts[i], verts[(i + 1) % n])
        ]
        if len(on_edges) != 1:
            raise BoundaryError("front door must lie on exactly one boundary edge")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "front_door", door)
        object.__setattr__(self, "_door_edge", on_edges[0])

    @property
    def door_edge_index(self) -> int:
        return self._door_edge  # type: ignore[attr-defined]

    def bbox(self) -> tuple[float, float, float, float]:
        """(min_x, min_y, max_x, max_y) of the polygon."""
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def perimeter(self) -> float:
        n = len(self.vertices)
        return sum(
            math.dist(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)
        )

    def area(self) -> float:
        return abs(_shoelace(self.vertices))

    def to_dict(self) -> dict:
        return {
            "vertices": [list(v) for v in self.vertices],
            "door": [list(self.front_door[0]), list(self.front_door[1])],
            "resolution": self.resolution,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Boundary":
        return cls(
            vertices=tuple(tuple(v) for v in d["vertices"]),
            front_door=(tuple(d["door"][0]), tuple(d["door"][1])),
            resolution=int(d.get("resolution", 128)),
        )


@dataclass(frozen=True)
class TurningFunction:
    """Door-anchored step function of cumulative turning angle.

    ``breakpoints[k] = (arc_length_fraction, cumulative_angle_deg)``;
    the function value on ``[frac_k, frac_{k+1})`` is ``angle_k``.
    The first breakpoint is ``(0.0, 0.0)`` and the final cumulative
    angle is 360 for a clockwise simple polygon.
    """

    breakpoints: tuple[tuple[float, float], ...]
    total_perimeter: float

    def value_at(self, s: float) -> float:
        v = 0.0
        for frac, ang in self.breakpoints:
            if frac <= s:
                v = ang
            else:
                break
        return v


@dataclass(frozen=True)
class BoundaryRaster:
    inside_mask: np.ndarray
    boundary_mask: np.ndarray
    door_mask: np.ndarray

    def __post_init__(self):
        for m in (self.inside_mask, self.boundary_mask, self.door_mask):
            m.setflags(write=False)


def compute_turning_function(b: Boundary) -> TurningFunction:
    """Turning function anchored at the clockwise-first side of the door.

    The traversal starts at the door endpoint that lies further along
    the clockwise direction of its edge, so the first stretch walks
    away from the door.
    """
    verts = b.vertices
    n = len(verts)
    e = b.door_edge_index
    a, c = verts[e], verts[(e + 1) % n]
    elen = math.dist(a, c)
    t0 = math.dist(a, b.front_door[0]) / elen
    t1 = math.dist(a, b.front_door[1]) / elen
    t_start = max(t0, t1)
    start = (a[0] + (c[0] - a[0]) * t_start, a[1] + (c[1] - a[1]) * t_start)

    return _turning_from_corners(b, start, b.perimeter())


def _turning_from_corners(b: Boundary, start: Point, perim: float) -> TurningFunction:
    verts = b.vertices
    n = len(verts)
    e = b.door_edge_index
    # ordered corner list starting after `start` on edge e, clockwise
    order = [(e + 1 + i) % n for i in range(n)]
    breakpoints: list[tuple[float, float]] = [(0.0, 0.0)]
    arc = math.dist(start, verts[order[0]])
    angle = 0.0
    # incoming direction at the first corner is the door edge direction
    d1 = (verts[(e + 1) % n][0] - verts[e][0], verts[(e + 1) % n][1] - verts[e][1])
    for idx in order:
        v1 = verts[idx]
        v2 = verts[(idx + 1) % n]
        d2 = (v2[0] - v1[0], v2[1] - v1[1])
        cross = d1[0] * d2[1] - d1[1] * d2[0]
        angle += 90.0 if cross > 0 else -90.0
        breakpoints.append((arc / perim, angle))
        arc += math.dist(v1, v2)
        d1 = d2
    return TurningFunction(breakpoints=tuple(breakpoints), total_perimeter=perim)


def turning_distance(a: TurningFunction, b: TurningFunction) -> float:
    """L2 norm of the step-function difference over normalized arc length.

    No shift minimization: both functions are door-anchored.
    """
    fa = a.breakpoints
    fb = b.breakpoints
    cuts = sorted({p for p, _ in fa} | {p for p, _ in fb} | {1.0})
    total = 0.0
    ia = ib = 0
    for k in range(len(cuts) - 1):
        s0, s1 = cuts[k], cuts[k + 1]
        while ia + 1 < len(fa) and fa[ia + 1][0] <= s0 + _EPS:
            ia += 1
        while ib + 1 < len(fb) and fb[ib + 1][0] <= s0 + _EPS:
            ib += 1
        diff = fa[ia][1] - fb[ib][1]
        total += diff * diff * (s1 - s0)
    return math.sqrt(total)


def door_center(b: Boundary) -> Point:
    (x1, y1), (x2, y2) = b.front_door
    return ((x1 + x2) / 2.0, (y1 + y2) / 2.0)


def door_direction(b: Boundary) -> tuple[float, float]:
    """Unit vector from bbox center to door center, up-positive."""
    min_x, min_y, max_x, max_y = b.bbox()
    cx, cy = (min_x + max_x) / 2.0, (min_y + max_y) / 2.0
    dx_, dy_ = door_center(b)
    vx, vy = dx_ - cx, -(dy_ - cy)
    norm = math.hypot(vx, vy)
    if norm < _EPS:
        raise DegenerateDoorError("door center coincides with bounding-box center")
    return (vx / norm, vy / norm)


def _rot_point(p: Point, res: int) -> Point:
    # 90 degrees screen-clockwise; matches np.rot90(mask, k=-1) on pixel centers
    return (res - p[1], p[0])


def rotate_boundary(b: Boundary, k: int) -> Boundary:
    """Rotate boundary and door by k x 90 degrees (screen-clockwise)."""
    k = k % 4
    verts = list(b.vertices)
    door = list(b.front_door)
    res = b.resolution
    for _ in range(k):
        verts = [_rot_point(p, res) for p in verts]
        door = [_rot_point(p, res) for p in door]
        # points that came from y=0 land on x=res; slide back into range
        max_x = max(p[0] for p in verts + door)
        max_y = max(p[1] for p in verts + door)
        shift_x = max(0.0, max_x - (res - 1e-9))
        shift_y = max(0.0, max_y - (res - 1e-9))
        if shift_x or shift_y:
            shift_x = math.ceil(shift_x) if shift_x else 0.0
            shift_y = math.ceil(shift_y) if shift_y else 0.0
            verts = [(p[0] - shift_x, p[1] - shift_y) for p in verts]
            door = [(p[0] - shift_x, p[1] - shift_y) for p in door]
    return Boundary(vertices=tuple(verts), front_door=(door[0], door[1]), resolution=res)


def _point_in_polygon_mask(verts: tuple[Point, ...], res: int) -> np.ndarray:
    """Parity mask of pixel centers strictly inside the polygon."""
    cols = np.arange(res) + 0.5
    rows = np.arange(res) + 0.5
    X, Y = np.meshgrid(cols, rows)
    inside = np.zeros((res, res), dtype=bool)
    n = len(verts)
    for i in range(n):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % n]
        if abs(x1 - x2) < _EPS:  # vertical edge: ray cast towards +x
            y_lo, y_hi = min(y1, y2), max(y1, y2)
            hit = (Y >= y_lo) & (Y < y_hi) & (X < x1)
            inside ^= hit
    return inside


def _distance_to_edges(verts_or_seg, res: int) -> np.ndarray:
    cols = np.arange(res) + 0.5
    rows = np.arange(res) + 0.5
    X, Y = np.meshgrid(cols, rows)
    dist = np.full((res, res), np.inf)
    segs = verts_or_seg
    for (x1, y1), (x2, y2) in segs:
        px = np.clip(X, min(x1, x2), max(x1, x2))
        py = np.clip(Y, min(y1, y2), max(y1, y2))
        d = np.hypot(X - px, Y - py)
        dist = np.minimum(dist, d)
    return dist


@lru_cache(maxsize=512)
def rasterize_boundary(b: Boundary) -> BoundaryRaster:
    """Three binary masks: strictly-inside, near-edge, near-door pixels.

    A pixel is inside iff its center is strictly inside the polygon;
    boundary pixels have centers within 0.5 px of an edge; door pixels
    within 0.5 px of the front-door segment (and on the boundary).
    """
    res = b.resolution
    verts = b.vertices
    n = len(verts)
    edges = [(verts[i], verts[(i + 1) % n]) for i in range(n)]
    edge_dist = _distance_to_edges(edges, res)
    inside = _point_in_polygon_mask(verts, res) & (edge_dist > _EPS)
    boundary_mask = edge_dist <= 0.5
    door_dist = _distance_to_edges([b.front_door], res)
    door_mask = (door_dist <= 0.5) & boundary_mask
    return BoundaryRaster(inside_mask=inside, boundary_mask=boundary_mask, door_mask=door_mask)


def interior_area(b: Boundary) -> int:
    """Number of strictly-interior pixels."""
    return int(rasterize_boundary(b).inside_mask.sum())
