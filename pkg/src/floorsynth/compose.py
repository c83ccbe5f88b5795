"""Rasterize solved boxes into a room-label image and order overlaps.

Label raster conventions: ``EXTERIOR`` (-2) outside the boundary,
``EMPTY`` (-1) for interior pixels not yet claimed, room ids otherwise.
Rooms earlier in the drawing order are painted first and lose overlap
regions to later rooms.  All "random" choices from the ordering
procedure are replaced by lowest-id picks for reproducibility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Boundary, rasterize_boundary
from .layout import RoomBox
from .solver import _d_in_sq, _inside_box, _pixel_centers, boxes_to_array

EXTERIOR = -2
EMPTY = -1


@dataclass(frozen=True)
class FloorplanRaster:
    labels: np.ndarray  # int16 (res, res)

    def __post_init__(self):
        self.labels.setflags(write=False)

    @property
    def room_ids(self) -> list[int]:
        return sorted(int(v) for v in np.unique(self.labels) if v >= 0)


@dataclass(frozen=True)
class OrderGraph:
    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]  # (r2, r1): r1 must be drawn before r2


def _box_pixel_mask(box: RoomBox, res: int) -> np.ndarray:
    px, py = _pixel_centers(res)
    return _inside_box(px, py, np.array([box.x, box.y, box.w, box.h])).reshape(res, res)


def overlap_pairs(boxes: list[RoomBox], res: int = 128) -> list[tuple[int, int, np.ndarray]]:
    """Unordered room-id pairs with positive-area box intersection.

    The returned region is the boolean pixel mask of the intersection.
    """
    out = []
    masks = {b.room_id: _box_pixel_mask(b, res) for b in boxes}
    ordered = sorted(masks)
    for i, a in enumerate(ordered):
        for b in ordered[i + 1 :]:
            region = masks[a] & masks[b]
            if region.any():
                out.append((a, b, region))
    return out


def rasterize_priors(priors: list[RoomBox], boundary: Boundary) -> FloorplanRaster:
    """Reference raster: priors painted in descending area order.

    Stands in for a learned global layout image when voting on the
    drawing order of overlapping rooms.
    """
    res = boundary.resolution
    labels = np.full((res, res), EXTERIOR, dtype=np.int16)
    inside = rasterize_boundary(boundary).inside_mask
    labels[inside] = EMPTY
    for b in sorted(priors, key=lambda b: (-b.area, b.room_id)):
        mask = _box_pixel_mask(b, res) & inside
        labels[mask] = b.room_id
    return FloorplanRaster(labels=labels)


def vote_order(
    pair: tuple[int, int, np.ndarray],
    reference: FloorplanRaster,
    areas: dict[int, float],
) -> tuple[int, int]:
    """Directed edge (later, earlier): ``earlier`` is drawn first.

    The room with the smaller pixel count inside the overlap region of
    the reference raster is drawn first; count ties go to the larger
    total box area, then to the lower id.
    """
    a, b, region = pair
    labels = reference.labels[region]
    count_a = int((labels == a).sum())
    count_b = int((labels == b).sum())
    if count_a < count_b:
        first = a
    elif count_b < count_a:
        first = b
    elif areas.get(a, 0.0) != areas.get(b, 0.0):
        first = a if areas[a] > areas[b] else b
    else:
        first = min(a, b)
    later = b if first == a else a
    return (later, first)


def drawing_order(og: OrderGraph) -> list[int]:
    """Paint order honoring every (later, earlier) edge of a DAG.

    Repeatedly emits the lowest-id node with outdegree zero; cycles are
    broken by deleting the lowest-id node of minimal outdegree.
    """
    remaining = set(og.nodes)
    outdeg = {n: 0 for n in og.nodes}
    incoming: dict[int, set[int]] = {n: set() for n in og.nodes}  # nodes pointing at key
    outgoing: dict[int, set[int]] = {n: set() for n in og.nodes}
    for later, earlier in og.edges:
        if earlier not in outgoing[later]:
            outgoing[later].add(earlier)
            incoming[earlier].add(later)
            outdeg[later] += 1
    order: list[int] = []
    while remaining:
        ready = [n for n in remaining if outdeg[n] == 0]
        if ready:
            n = min(ready)
        else:  # cycle: drop the lowest-id node with minimal outdegree
            min_deg = min(outdeg[n] for n in remaining)
            n = min(x for x in remaining if outdeg[x] == min_deg)
        order.append(n)
        remaining.discard(n)
        for src in incoming[n]:
            if src in remaining:
                outdeg[src] -= 1
        incoming[n].clear()
    return order


def resolve(boxes: list[RoomBox], order: list[int], b: Boundary) -> FloorplanRaster:
    """Paint boxes in order, clip to the interior, fill leftover pixels.

    Interior pixels covered by no box are assigned to the room with the
    smallest ``d_in`` (ties to the lower id), so no interior pixel stays
    empty.
    """
    res = b.resolution
    inside = rasterize_boundary(b).inside_mask
    labels = np.full((res, res), EXTERIOR, dtype=np.int16)
    labels[inside] = EMPTY
    by_id = {box.room_id: box for box in boxes}
    if set(order) != set(by_id):
        raise ValueError("order must cover exactly the given room ids")
    for rid in order:
        mask = _box_pixel_mask(by_id[rid], res) & inside
        labels[mask] = rid
    empty = (labels == EMPTY)
    if empty.any():
        px, py = _pixel_centers(res)
        sel = empty.ravel()
        ids = sorted(by_id)
        d = np.stack([_d_in_sq(px[sel], py[sel], boxes_to_array([by_id[r]])[0]) for r in ids])
        nearest = np.asarray(ids, dtype=np.int16)[d.argmin(axis=0)]
        flat = labels.ravel().copy()
        flat[sel] = nearest
        labels = flat.reshape(res, res)
    return FloorplanRaster(labels=labels)


def order_rooms(boxes: list[RoomBox], priors: list[RoomBox], boundary: Boundary) -> list[int]:
    """Full ordering step: overlaps -> votes -> topological order."""
    reference = rasterize_priors(priors, boundary)
    areas = {b.room_id: b.area for b in boxes}
    pairs = overlap_pairs(boxes, boundary.resolution)
    edges = tuple(vote_order(p, reference, areas) for p in pairs)
    og = OrderGraph(nodes=tuple(sorted(areas)), edges=edges)
    return drawing_order(og)
