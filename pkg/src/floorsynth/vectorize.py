"""Snap boxes, trace room regions into polygons, place doors/windows.

The vectorization contract: the emitted room polygons are rectilinear,
pairwise interior-disjoint at the pixel level, and their union equals
the boundary interior exactly.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

from .compose import EMPTY, EXTERIOR, FloorplanRaster
from .geometry import Boundary, _point_in_polygon_mask, rasterize_boundary
from .layout import LayoutGraph, RelationType, RoomBox, RoomType

log = logging.getLogger(__name__)

SNAP_TAU = 6.0
DOOR_WIDTH = 4.0
WINDOW_MIN_WALL = 6.0
WINDOW_MAX_LEN = 12.0
MIN_SIDE = 2.0

Point = tuple[float, float]
Segment = tuple[Point, Point]


class VectorizeError(RuntimeError):
    pass


@dataclass(frozen=True)
class RoomPolygon:
    room_id: int
    rtype: RoomType
    polygon: tuple[Point, ...]

    @property
    def area(self) -> float:
        s = 0.0
        n = len(self.polygon)
        for i in range(n):
            x1, y1 = self.polygon[i]
            x2, y2 = self.polygon[(i + 1) % n]
            s += x1 * y2 - x2 * y1
        return abs(s) / 2.0


@dataclass(frozen=True)
class DoorSegment:
    room_a: int
    room_b: int | None  # None: front door to the exterior
    segment: Segment


@dataclass(frozen=True)
class WindowSegment:
    room_id: int
    segment: Segment


@dataclass(frozen=True)
class VectorFloorplan:
    boundary: Boundary
    rooms: tuple[RoomPolygon, ...]
    doors: tuple[DoorSegment, ...] = ()
    windows: tuple[WindowSegment, ...] = ()
    unsatisfied_adjacencies: tuple[tuple[int, int], ...] = ()

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "boundary": self.boundary.to_dict(),
            "rooms": [
                {"room_id": r.room_id, "type": r.rtype.name, "polygon": [list(p) for p in r.polygon]}
                for r in self.rooms
            ],
            "doors": [
                {"room_a": d.room_a, "room_b": d.room_b, "segment": [list(d.segment[0]), list(d.segment[1])]}
                for d in self.doors
            ],
            "windows": [
                {"room_id": w.room_id, "segment": [list(w.segment[0]), list(w.segment[1])]}
                for w in self.windows
            ],
            "unsatisfied_adjacencies": [list(p) for p in self.unsatisfied_adjacencies],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VectorFloorplan":
        return cls(
            boundary=Boundary.from_dict(d["boundary"]),
            rooms=tuple(
                RoomPolygon(
                    room_id=int(r["room_id"]),
                    rtype=RoomType[r["type"]],
                    polygon=tuple((float(x), float(y)) for x, y in r["polygon"]),
                )
                for r in d["rooms"]
            ),
            doors=tuple(
                DoorSegment(
                    room_a=int(x["room_a"]),
                    room_b=None if x["room_b"] is None else int(x["room_b"]),
                    segment=(tuple(x["segment"][0]), tuple(x["segment"][1])),
                )
                for x in d["doors"]
            ),
            windows=tuple(
                WindowSegment(room_id=int(x["room_id"]), segment=(tuple(x["segment"][0]), tuple(x["segment"][1])))
                for x in d["windows"]
            ),
            unsatisfied_adjacencies=tuple((int(a), int(b)) for a, b in d.get("unsatisfied_adjacencies", [])),
        )


# ---------------------------------------------------------------------------
# snapping


class _SnapBox:
    __slots__ = ("x0", "y0", "x1", "y1", "room_id", "fixed")

    def __init__(self, b: RoomBox):
        self.x0, self.y0, self.x1, self.y1 = b.x0, b.y0, b.x1, b.y1
        self.room_id = b.room_id
        self.fixed = {"left": False, "right": False, "top": False, "bottom": False}

    def to_box(self) -> RoomBox:
        return RoomBox.from_corners(self.x0, self.y0, self.x1, self.y1, self.room_id)


def _boundary_edges(b: Boundary) -> tuple[list, list]:
    vert, horiz = [], []
    n = len(b.vertices)
    for i in range(n):
        (x1, y1), (x2, y2) = b.vertices[i], b.vertices[(i + 1) % n]
        if abs(x1 - x2) < 1e-9:
            vert.append((x1, min(y1, y2), max(y1, y2)))
        else:
            horiz.append((y1, min(x1, x2), max(x1, x2)))
    return vert, horiz


def _overlap(a0, a1, b0, b1) -> float:
    return min(a1, b1) - max(a0, b0)


def _snap_box_to_boundary(s: _SnapBox, vert, horiz, tau: float) -> None:
    def nearest(value, lo, hi, edges):
        best = None
        for coord, e_lo, e_hi in edges:
            if _overlap(lo, hi, e_lo, e_hi) <= 0:
                continue
            d = abs(coord - value)
            if d <= tau and (best is None or d < abs(best - value)):
                best = coord
        return best

    for side, attr, edges, lo_attr, hi_attr in (
        ("left", "x0", vert, "y0", "y1"),
        ("right", "x1", vert, "y0", "y1"),
        ("top", "y0", horiz, "x0", "x1"),
        ("bottom", "y1", horiz, "x0", "x1"),
    ):
        val = getattr(s, attr)
        tgt = nearest(val, getattr(s, lo_attr), getattr(s, hi_attr), edges)
        if tgt is None or tgt == val:
            if tgt is not None:
                s.fixed[side] = True
            continue
        trial = {attr: tgt}
        new_w = (trial.get("x1", s.x1)) - (trial.get("x0", s.x0))
        new_h = (trial.get("y1", s.y1)) - (trial.get("y0", s.y0))
        if new_w < MIN_SIDE or new_h < MIN_SIDE:
            continue
        setattr(s, attr, tgt)
        s.fixed[side] = True


def snap_to_boundary(boxes: list[RoomBox], b: Boundary, tau: float = SNAP_TAU) -> list[RoomBox]:
    """Move box edges onto nearby parallel boundary edges (within tau)."""
    vert, horiz = _boundary_edges(b)
    out = []
    for box in boxes:
        s = _SnapBox(box)
        _snap_box_to_boundary(s, vert, horiz, tau)
        out.append(s.to_box())
    return out


def _pair_snap(sa: _SnapBox, ea: str, sb: _SnapBox, eb: str, attr_a: str, attr_b: str, tau: float) -> None:
    va, vb = getattr(sa, attr_a), getattr(sb, attr_b)
    if abs(va - vb) > tau:
        return
    fa, fb = sa.fixed[ea], sb.fixed[eb]
    if fa and fb:
        return
    if fa:
        target_a, target_b = va, va
    elif fb:
        target_a, target_b = vb, vb
    else:
        m = (va + vb) / 2.0
        target_a = target_b = m
    for s, attr, tgt in ((sa, attr_a, target_a), (sb, attr_b, target_b)):
        trial = dict(x0=s.x0, x1=s.x1, y0=s.y0, y1=s.y1)
        trial[attr] = tgt
        if trial["x1"] - trial["x0"] < MIN_SIDE or trial["y1"] - trial["y0"] < MIN_SIDE:
            return
    setattr(sa, attr_a, target_a)
    setattr(sb, attr_b, target_b)
    sa.fixed[ea] = True
    sb.fixed[eb] = True


# facing edges per relation, from the edge's (src, dst) point of view
_FACING = {
    RelationType.LeftOf: (("right", "x1"), ("left", "x0")),
    RelationType.RightOf: (("left", "x0"), ("right", "x1")),
    RelationType.Above: (("bottom", "y1"), ("top", "y0")),
    RelationType.Below: (("top", "y0"), ("bottom", "y1")),
}

_LATERAL = {
    RelationType.LeftOf: (("top", "y0"), ("bottom", "y1")),
    RelationType.RightOf: (("top", "y0"), ("bottom", "y1")),
    RelationType.Above: (("left", "x0"), ("right", "x1")),
    RelationType.Below: (("left", "x0"), ("right", "x1")),
}


def _snap_adjacent_state(state: dict[int, _SnapBox], g: LayoutGraph, tau: float) -> None:
    for src, dst, rel in sorted(g.edges, key=lambda e: (e[0], e[1])):
        if rel not in _FACING or src not in state or dst not in state:
            continue
        sa, sb = state[src], state[dst]
        (ea, attr_a), (eb, attr_b) = _FACING[rel]
        _pair_snap(sa, ea, sb, eb, attr_a, attr_b, tau)
        for edge, attr in _LATERAL[rel]:
            _pair_snap(sa, edge, sb, edge, attr, attr, tau)


def snap_adjacent(boxes: list[RoomBox], g: LayoutGraph, tau: float = SNAP_TAU) -> list[RoomBox]:
    """Unify facing edges of graph-adjacent boxes (cardinal relations)."""
    state = {b.room_id: _SnapBox(b) for b in boxes}
    _snap_adjacent_state(state, g, tau)
    return [state[b.room_id].to_box() for b in boxes]


def align_rooms(boxes: list[RoomBox], b: Boundary, g: LayoutGraph, tau: float = SNAP_TAU) -> list[RoomBox]:
    """Boundary snapping (edges become fixed) followed by adjacency snapping."""
    vert, horiz = _boundary_edges(b)
    state = {}
    for box in boxes:
        s = _SnapBox(box)
        _snap_box_to_boundary(s, vert, horiz, tau)
        state[box.room_id] = s
    _snap_adjacent_state(state, g, tau)
    return [state[b_.room_id].to_box() for b_ in boxes]


# ---------------------------------------------------------------------------
# pixel-region tracing


def trace_region(mask: np.ndarray) -> tuple[Point, ...]:
    """Outer rectilinear contour of a 4-connected, hole-free pixel region.

    Vertices are lattice corners in screen-clockwise order; shoelace
    area of the result equals the pixel count.  Lattice points touched
    by two diagonal pixels are resolved by taking the sharpest
    clockwise turn, which keeps the traced loop from crossing itself.
    """
    if not mask.any():
        raise VectorizeError("empty region")
    rows, cols = np.nonzero(mask)
    edges: dict[tuple[int, int], list[tuple[int, int]]] = {}

    padded = np.zeros((mask.shape[0] + 2, mask.shape[1] + 2), dtype=bool)
    padded[1:-1, 1:-1] = mask
    core = padded[1:-1, 1:-1]
    up = ~padded[:-2, 1:-1] & core
    down = ~padded[2:, 1:-1] & core
    left = ~padded[1:-1, :-2] & core
    right = ~padded[1:-1, 2:] & core

    def add(p, q):
        edges.setdefault(p, []).append(q)

    for r, c in zip(*np.nonzero(up)):
        add((c, r), (c + 1, r))
    for r, c in zip(*np.nonzero(down)):
        add((c + 1, r + 1), (c, r + 1))
    for r, c in zip(*np.nonzero(left)):
        add((c, r + 1), (c, r))
    for r, c in zip(*np.nonzero(right)):
        add((c + 1, r), (c + 1, r + 1))

    r0 = int(rows.min())
    c0 = int(cols[rows == r0].min())
    start = (c0, r0)
    path = [start]
    cur = start
    d = (1, 0)  # top edge of the topmost-leftmost pixel heads +x
    total_edges = sum(len(v) for v in edges.values())
    for _ in range(total_edges + 1):
        outs = edges.get(cur, [])
        if not outs:
            raise VectorizeError("broken contour (region not hole-free/4-connected?)")
        # prefer right turn, then straight, then left turn (screen-clockwise)
        pref = [(-d[1], d[0]), d, (d[1], -d[0])]
        nxt = None
        for pd in pref:
            cand = (cur[0] + pd[0], cur[1] + pd[1])
            if cand in outs:
                nxt = cand
                break
        if nxt is None:
            nxt = outs[0]
        outs.remove(nxt)
        d = (nxt[0] - cur[0], nxt[1] - cur[1])
        cur = nxt
        if cur == start:
            break
        path.append(cur)
    else:
        raise VectorizeError("contour did not close")
    if sum(len(v) for v in edges.values()) != 0:
        raise VectorizeError("region has holes or extra components")
    # drop collinear lattice points
    out: list[Point] = []
    n = len(path)
    for i in range(n):
        p0, p1, p2 = path[(i - 1) % n], path[i], path[(i + 1) % n]
        if (p1[0] - p0[0]) * (p2[1] - p1[1]) - (p1[1] - p0[1]) * (p2[0] - p1[0]) != 0:
            out.append((float(p1[0]), float(p1[1])))
    return tuple(out)


def repair_labels(raster: FloorplanRaster) -> FloorplanRaster:
    """Make every room region 4-connected and hole-free.

    Stray components are re-assigned to the dominant neighboring room;
    a room fully enclosed by another gets a vertical corridor cut so
    both regions touch.  Pixel partition of the interior is preserved.
    """
    labels = raster.labels.copy()
    struct = ndimage.generate_binary_structure(2, 1)
    for _ in range(16):
        changed = False
        for rid in sorted(int(v) for v in np.unique(labels) if v >= 0):
            region = labels == rid
            comp, ncomp = ndimage.label(region, structure=struct)
            if ncomp > 1:
                sizes = ndimage.sum(region, comp, index=range(1, ncomp + 1))
                keep = int(np.argmax(sizes)) + 1
                stray = region & (comp != keep)
                labels = _absorb(labels, stray, exclude=rid)
                changed = True
        for rid in sorted(int(v) for v in np.unique(labels) if v >= 0):
            region = labels == rid
            filled = ndimage.binary_fill_holes(region, structure=struct)
            holes = filled & ~region
            if holes.any():
                labels = _cut_corridor(labels, rid, holes)
                changed = True
        if not changed:
            break
    else:
        raise VectorizeError("label repair did not converge")
    return FloorplanRaster(labels=labels)


def _absorb(labels: np.ndarray, stray: np.ndarray, exclude: int) -> np.ndarray:
    labels = labels.copy()
    pending = stray.copy()
    for _ in range(labels.size):
        if not pending.any():
            break
        assigned_any = False
        rs, cs = np.nonzero(pending)
        for r, c in zip(rs, cs):
            votes = []
            for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                if 0 <= rr < labels.shape[0] and 0 <= cc < labels.shape[1]:
                    v = int(labels[rr, cc])
                    if v >= 0 and v != exclude and not pending[rr, cc]:
                        votes.append(v)
            if votes:
                labels[r, c] = min(votes, key=lambda v: (-votes.count(v), v))
                pending[r, c] = False
                assigned_any = True
        if not assigned_any:
            # isolated pocket inside its own room: give it back
            labels[pending] = exclude
            break
    return labels


def _cut_corridor(labels: np.ndarray, outer: int, holes: np.ndarray) -> np.ndarray:
    """Open each enclosed pocket upward through the surrounding room."""
    labels = labels.copy()
    comp, ncomp = ndimage.label(holes, structure=ndimage.generate_binary_structure(2, 1))
    for idx in range(1, ncomp + 1):
        hole = comp == idx
        rs, cs = np.nonzero(hole)
        top = int(rs.min())
        top_cols = cs[rs == top]
        inner_votes = [int(labels[top, c]) for c in top_cols if labels[top, c] >= 0]
        inner = min(inner_votes, key=lambda v: (-inner_votes.count(v), v)) if inner_votes else outer
        c0, c1 = int(top_cols.min()), int(top_cols.max())
        r = top - 1
        while r >= 0 and np.all(labels[r, c0 : c1 + 1] == outer):
            labels[r, c0 : c1 + 1] = inner
            r -= 1
    return labels


def clip_and_polygonize(raster: FloorplanRaster) -> list[tuple[int, tuple[Point, ...], int]]:
    """Trace each room's pixel region; returns (room_id, polygon, pixels).

    Rooms that lost all their pixels during overlap resolution are
    dropped with a warning.
    """
    fixed = repair_labels(raster)
    out = []
    for rid in fixed.room_ids:
        region = fixed.labels == rid
        count = int(region.sum())
        if count == 0:
            log.warning("room %d has no pixels after resolution; dropped", rid)
            continue
        out.append((rid, trace_region(region), count))
    present = set(fixed.room_ids)
    for rid in raster.room_ids:
        if rid not in present:
            log.warning("room %d has no pixels after resolution; dropped", rid)
    return out


def rasterize_rooms(vf: VectorFloorplan) -> np.ndarray:
    """Label raster reconstructed from the room polygons."""
    res = vf.boundary.resolution
    labels = np.full((res, res), EXTERIOR, dtype=np.int16)
    inside = rasterize_boundary(vf.boundary).inside_mask
    labels[inside] = EMPTY
    for room in vf.rooms:
        mask = _point_in_polygon_mask(room.polygon, res)
        labels[mask] = room.room_id
    return labels


# ---------------------------------------------------------------------------
# doors and windows


def _wall_runs(labels: np.ndarray):
    """Maximal straight runs of lattice edges between differing labels.

    Yields ((label_a, label_b), segment) with label_b possibly EXTERIOR;
    labels are ordered so a < b never holds for the exterior side.
    """
    res_r, res_c = labels.shape
    padded = np.full((res_r + 2, res_c + 2), EXTERIOR, dtype=labels.dtype)
    padded[1:-1, 1:-1] = labels
    runs = []
    # vertical interfaces at x = c between (r, c-1) and (r, c)
    for c in range(res_c + 1):
        left_col = padded[1:-1, c]
        right_col = padded[1:-1, c + 1]
        diff = (left_col != right_col) & ((left_col >= 0) | (right_col >= 0))
        r = 0
        while r < res_r:
            if not diff[r]:
                r += 1
                continue
            key = (int(left_col[r]), int(right_col[r]))
            r0 = r
            while r < res_r and diff[r] and (int(left_col[r]), int(right_col[r])) == key:
                r += 1
            runs.append((key, ((float(c), float(r0)), (float(c), float(r)))))
    # horizontal interfaces at y = r between (r-1, c) and (r, c)
    for r in range(res_r + 1):
        top_row = padded[r, 1:-1]
        bot_row = padded[r + 1, 1:-1]
        diff = (top_row != bot_row) & ((top_row >= 0) | (bot_row >= 0))
        c = 0
        while c < res_c:
            if not diff[c]:
                c += 1
                continue
            key = (int(top_row[c]), int(bot_row[c]))
            c0 = c
            while c < res_c and diff[c] and (int(top_row[c]), int(bot_row[c])) == key:
                c += 1
            runs.append((key, ((float(c0), float(r)), (float(c), float(r)))))
    return runs


def _seg_len(seg: Segment) -> float:
    return math.dist(seg[0], seg[1])


def _centered_subsegment(seg: Segment, length: float) -> Segment:
    (x1, y1), (x2, y2) = seg
    total = _seg_len(seg)
    t0 = (total - length) / 2.0 / total
    t1 = (total + length) / 2.0 / total
    return (
        (x1 + (x2 - x1) * t0, y1 + (y2 - y1) * t0),
        (x1 + (x2 - x1) * t1, y1 + (y2 - y1) * t1),
    )


def _segments_touch(a: Segment, b: Segment) -> bool:
    ax = sorted((a[0][0], a[1][0]))
    ay = sorted((a[0][1], a[1][1]))
    bx = sorted((b[0][0], b[1][0]))
    by = sorted((b[0][1], b[1][1]))
    return ax[0] <= bx[1] and bx[0] <= ax[1] and ay[0] <= by[1] and by[0] <= ay[1]


def place_doors_windows(
    vf: VectorFloorplan, g: LayoutGraph, labels: np.ndarray | None = None
) -> VectorFloorplan:
    """One door per satisfiable graph edge, windows on long exterior walls.

    Graph edges with no shared wall of at least the door width are
    reported in ``unsatisfied_adjacencies``.
    """
    if labels is None:
        labels = rasterize_rooms(vf)
    runs = _wall_runs(labels)
    shared: dict[frozenset, list[Segment]] = {}
    exterior: dict[int, list[Segment]] = {}
    for (a, b), seg in runs:
        if a >= 0 and b >= 0:
            shared.setdefault(frozenset((a, b)), []).append(seg)
        elif a >= 0 or b >= 0:
            exterior.setdefault(max(a, b), []).append(seg)
    doors: list[DoorSegment] = []
    unsatisfied: list[tuple[int, int]] = []
    for src, dst, _rel in sorted(g.edges, key=lambda e: (e[0], e[1])):
        segs = shared.get(frozenset((src, dst)), [])
        best = max(segs, key=_seg_len, default=None)
        if best is None or _seg_len(best) < DOOR_WIDTH:
            unsatisfied.append((src, dst))
            continue
        doors.append(DoorSegment(room_a=src, room_b=dst, segment=_centered_subsegment(best, DOOR_WIDTH)))
    # front door: attach to the room owning the most pixels beside it
    front = vf.boundary.front_door
    door_mask = rasterize_boundary(vf.boundary).door_mask
    beside = labels[door_mask]
    beside = beside[beside >= 0]
    owner = int(np.bincount(beside).argmax()) if beside.size else -1
    doors.append(DoorSegment(room_a=owner, room_b=None, segment=front))
    windows: list[WindowSegment] = []
    for rid in sorted(exterior):
        for seg in sorted(exterior[rid], key=lambda s: (s[0], s[1])):
            if _seg_len(seg) < WINDOW_MIN_WALL:
                continue
            if _segments_touch(seg, front):
                continue
            win = _centered_subsegment(seg, min(_seg_len(seg) / 2.0, WINDOW_MAX_LEN))
            windows.append(WindowSegment(room_id=rid, segment=win))
    return replace(vf, doors=tuple(doors), windows=tuple(windows), unsatisfied_adjacencies=tuple(unsatisfied))


# ---------------------------------------------------------------------------
# export

PALETTE = {
    RoomType.LivingRoom: "#f4b183",
    RoomType.MasterRoom: "#ffd966",
    RoomType.SecondRoom: "#ffe699",
    RoomType.GuestRoom: "#fff2cc",
    RoomType.ChildRoom: "#fce4a8",
    RoomType.StudyRoom: "#e2c572",
    RoomType.DiningRoom: "#dfa67b",
    RoomType.Bathroom: "#9dc3e6",
    RoomType.Kitchen: "#c55a11",
    RoomType.Balcony: "#a9d18e",
    RoomType.Storage: "#b4a7d6",
    RoomType.WallIn: "#d9d2e9",
    RoomType.Entrance: "#eeeeee",
}


def export(vf: VectorFloorplan, format: str) -> str:
    if format == "json":
        return json.dumps(vf.to_dict(), sort_keys=True)
    if format == "svg":
        return _to_svg(vf)
    raise ValueError(f"unknown export format: {format!r}")


def import_json(data: "str | bytes") -> VectorFloorplan:
    if isinstance(data, bytes):
        data = data.decode()
    return VectorFloorplan.from_dict(json.loads(data))


def _path_d(polygon: tuple[Point, ...]) -> str:
    cmds = [f"M {polygon[0][0]:g} {polygon[0][1]:g}"]
    cmds += [f"L {x:g} {y:g}" for x, y in polygon[1:]]
    return " ".join(cmds) + " Z"


def _to_svg(vf: VectorFloorplan) -> str:
    res = vf.boundary.resolution
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {res} {res}" '
        f'width="512" height="512">',
        f'<rect width="{res}" height="{res}" fill="#ffffff"/>',
    ]
    for room in vf.rooms:
        color = PALETTE[room.rtype]
        parts.append(
            f'<path d="{_path_d(room.polygon)}" fill="{color}" stroke="#333333" '
            f'stroke-width="0.8" data-room-id="{room.room_id}" data-room-type="{room.rtype.name}"/>'
        )
    parts.append(f'<path d="{_path_d(vf.boundary.vertices)}" fill="none" stroke="#000000" stroke-width="1.5"/>')
    for w in vf.windows:
        (x1, y1), (x2, y2) = w.segment
        parts.append(
            f'<line x1="{x1:g}" y1="{y1:g}" x2="{x2:g}" y2="{y2:g}" stroke="#2e75b6" stroke-width="1.6"/>'
        )
    for d in vf.doors:
        (x1, y1), (x2, y2) = d.segment
        color = "#c00000" if d.room_b is None else "#7f6000"
        parts.append(
            f'<line x1="{x1:g}" y1="{y1:g}" x2="{x2:g}" y2="{y2:g}" stroke="{color}" stroke-width="1.6"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
