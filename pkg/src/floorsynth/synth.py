"""Synthetic floorplan corpus: guillotine partitions inside carved footprints.

Each record starts from a rectangle split recursively into rooms with
axis-aligned cuts; zero, one, or two corner rooms are then carved away
so the remaining footprint is a rectilinear polygon with 4..12 corners.
The surviving rooms are exact rectangles that partition the interior
gap-free, which gives clean ground truth for the solver and the
vectorizer.  Generation is deterministic in the seed.
"""

from __future__ import annotations

import random

import numpy as np

from .corpus import FloorplanRecord, extract_layout_graph
from .geometry import Boundary, compute_turning_function
from .layout import LayoutGraph, RoomBox, RoomNode, RoomType, grid_cell_of_point
from .vectorize import trace_region

RESOLUTION = 128
MIN_ROOM_SIDE = 12
MIN_ROOMS = 3
MAX_ROOMS = 8
MAX_CORNERS = 12
DOOR_LEN = 4

_EXTRA_TYPES = (
    RoomType.MasterRoom,
    RoomType.SecondRoom,
    RoomType.Bathroom,
    RoomType.Balcony,
    RoomType.DiningRoom,
    RoomType.Storage,
    RoomType.StudyRoom,
    RoomType.GuestRoom,
)

Rect = tuple[int, int, int, int]  # x0, y0, x1, y1


def _split_rects(rng: random.Random, base: Rect, count: int) -> list[Rect] | None:
    rects = [base]
    guard = 0
    while len(rects) < count:
        guard += 1
        if guard > 200:
            return None
        splittable = [
            (i, r)
            for i, r in enumerate(rects)
            if (r[2] - r[0]) >= 2 * MIN_ROOM_SIDE or (r[3] - r[1]) >= 2 * MIN_ROOM_SIDE
        ]
        if not splittable:
            return None
        weights = [(r[2] - r[0]) * (r[3] - r[1]) for _, r in splittable]
        i, rect = rng.choices(splittable, weights=weights)[0]
        x0, y0, x1, y1 = rect
        w, h = x1 - x0, y1 - y0
        can_v = w >= 2 * MIN_ROOM_SIDE
        can_h = h >= 2 * MIN_ROOM_SIDE
        if can_v and (not can_h or rng.random() < w / (w + h)):
            cut = rng.randint(x0 + MIN_ROOM_SIDE, x1 - MIN_ROOM_SIDE)
            parts = [(x0, y0, cut, y1), (cut, y0, x1, y1)]
        else:
            cut = rng.randint(y0 + MIN_ROOM_SIDE, y1 - MIN_ROOM_SIDE)
            parts = [(x0, y0, x1, cut), (x0, cut, x1, y1)]
        rects[i : i + 1] = parts
    return rects


def _rect_mask(rects: list[Rect], res: int) -> np.ndarray:
    mask = np.zeros((res, res), dtype=bool)
    for x0, y0, x1, y1 in rects:
        mask[y0:y1, x0:x1] = True
    return mask


def _connected(rects: list[Rect]) -> bool:
    if not rects:
        return False
    seen = {0}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for j in range(len(rects)):
            if j in seen:
                continue
            a, b = rects[i], rects[j]
            touch_x = min(a[2], b[2]) - max(a[0], b[0])
            touch_y = min(a[3], b[3]) - max(a[1], b[1])
            if (touch_x == 0 and touch_y > 0) or (touch_y == 0 and touch_x > 0) or (touch_x > 0 and touch_y > 0):
                seen.add(j)
                frontier.append(j)
    return len(seen) == len(rects)


def _assign_types(rng: random.Random, rects: list[Rect]) -> list[RoomType]:
    areas = [(r[2] - r[0]) * (r[3] - r[1]) for r in rects]
    living = int(np.argmax(areas))
    types: list[RoomType | None] = [None] * len(rects)
    types[living] = RoomType.LivingRoom
    others = [i for i in range(len(rects)) if i != living]
    rng.shuffle(others)
    if others:
        types[others[0]] = RoomType.Kitchen
    if len(others) > 1:
        types[others[1]] = RoomType.Bathroom
    for i in others[2:]:
        types[i] = rng.choice(_EXTRA_TYPES)
    return types  # type: ignore[return-value]


def _pick_door(rng: random.Random, boundary_polygon: tuple) -> tuple:
    n = len(boundary_polygon)
    edges = []
    for i in range(n):
        a, b = boundary_polygon[i], boundary_polygon[(i + 1) % n]
        length = abs(a[0] - b[0]) + abs(a[1] - b[1])
        if length >= DOOR_LEN + 2:
            edges.append((a, b, length))
    a, b, length = edges[rng.randrange(len(edges))]
    margin = (length - DOOR_LEN) / 2.0
    off = rng.uniform(1.0, max(1.0, margin * 2 - 1.0)) if margin > 1 else margin
    ux = (b[0] - a[0]) / length
    uy = (b[1] - a[1]) / length
    p = (a[0] + ux * off, a[1] + uy * off)
    q = (a[0] + ux * (off + DOOR_LEN), a[1] + uy * (off + DOOR_LEN))
    return (p, q)


def generate_record(record_id: str, rng: random.Random) -> FloorplanRecord | None:
    res = RESOLUTION
    bw = rng.randint(64, 112)
    bh = rng.randint(64, 112)
    x0 = rng.randint(4, res - bw - 4)
    y0 = rng.randint(4, res - bh - 4)
    base: Rect = (x0, y0, x0 + bw, y0 + bh)
    n_rooms = rng.randint(MIN_ROOMS, MAX_ROOMS)
    n_carve = rng.choice((0, 1, 1, 2))
    rects = _split_rects(rng, base, n_rooms + n_carve)
    if rects is None:
        return None
    if n_carve:
        corners = [(base[0], base[1]), (base[2], base[1]), (base[0], base[3]), (base[2], base[3])]
        corner_idx = [
            i
            for i, r in enumerate(rects)
            if any((cx in (r[0], r[2])) and (cy in (r[1], r[3])) and _rect_has_corner(r, cx, cy) for cx, cy in corners)
        ]
        rng.shuffle(corner_idx)
        removed = 0
        for i in sorted(corner_idx[:n_carve], reverse=True):
            trial = rects[:i] + rects[i + 1 :]
            if _connected(trial):
                rects = trial
                removed += 1
        if len(rects) != n_rooms + n_carve - removed:
            return None
    if len(rects) < MIN_ROOMS:
        return None
    mask = _rect_mask(rects, res)
    try:
        polygon = trace_region(mask)
    except Exception:
        return None
    if not (4 <= len(polygon) <= MAX_CORNERS):
        return None
    door = _pick_door(rng, polygon)
    try:
        boundary = Boundary(vertices=polygon, front_door=door, resolution=res)
    except ValueError:
        return None
    bbox = boundary.bbox()
    total_area = float(mask.sum())
    types = _assign_types(rng, rects)
    boxes = []
    nodes = []
    for i, (rx0, ry0, rx1, ry1) in enumerate(rects):
        box = RoomBox.from_corners(float(rx0), float(ry0), float(rx1), float(ry1), room_id=i)
        boxes.append(box)
        ratio = (rx1 - rx0) * (ry1 - ry0) / total_area
        nodes.append(
            RoomNode(
                id=i,
                rtype=types[i],
                grid_cell=grid_cell_of_point(box.x, box.y, bbox),
                size_ratio=min(1.0, ratio),
            )
        )
    record = FloorplanRecord(
        id=record_id,
        boundary=boundary,
        graph=LayoutGraph(nodes=tuple(nodes), edges=()),
        gt_boxes=tuple(boxes),
        turning=compute_turning_function(boundary),
    )
    graph = extract_layout_graph(record, door_segments=[])
    return FloorplanRecord(
        id=record_id,
        boundary=boundary,
        graph=graph,
        gt_boxes=record.gt_boxes,
        turning=record.turning,
    )


def _rect_has_corner(r: Rect, cx: int, cy: int) -> bool:
    return cx in (r[0], r[2]) and cy in (r[1], r[3])


def generate_synthetic_corpus(n: int, seed: int) -> list[FloorplanRecord]:
    """``n`` valid records, deterministic in ``seed``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    records = []
    i = 0
    attempt = 0
    while len(records) < n:
        rng = random.Random(f"{seed}:{attempt}")
        attempt += 1
        if attempt > 50 * n + 1000:
            raise RuntimeError("synthetic generation stalled")
        rec = generate_record(f"synth-{seed}-{i:05d}", rng)
        if rec is not None:
            records.append(rec)
            i += 1
    return records
