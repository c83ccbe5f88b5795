"""Floorplan records: ingestion, layout-graph extraction, persistence.

The corpus file format is versioned JSON-lines (``.g2pl``): a header
line followed by one record per line.  Records are immutable after
load; ingestion is single-writer.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import Boundary, TurningFunction, compute_turning_function
from .layout import (
    LayoutGraph,
    RelationType,
    RoomBox,
    RoomNode,
    RoomType,
    grid_cell_of_point,
    relation_from_offset,
)

CORPUS_FORMAT = "floorsynth-corpus"
CORPUS_VERSION = 1

# adjacency threshold: gap <= max(3 px, 10% of the smaller room's shorter side)
ADJ_GAP_FLOOR = 3.0
ADJ_GAP_FRACTION = 0.10
CONTAINMENT_FRACTION = 0.95


class CorpusFormatError(ValueError):
    """Corrupt corpus file, version mismatch, or malformed raster input."""


@dataclass(frozen=True)
class FloorplanRecord:
    id: str
    boundary: Boundary
    graph: LayoutGraph
    gt_boxes: tuple[RoomBox, ...]
    turning: TurningFunction

    def __post_init__(self):
        if len(self.gt_boxes) != len(self.graph.nodes):
            raise CorpusFormatError(f"record {self.id}: {len(self.gt_boxes)} boxes for {len(self.graph.nodes)} nodes")

    def box_for(self, node_id: int) -> RoomBox:
        for b in self.gt_boxes:
            if b.room_id == node_id:
                return b
        raise KeyError(node_id)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "boundary": self.boundary.to_dict(),
            "graph": self.graph.to_dict(),
            "gt_boxes": [b.to_dict() for b in self.gt_boxes],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FloorplanRecord":
        boundary = Boundary.from_dict(d["boundary"])
        return cls(
            id=str(d["id"]),
            boundary=boundary,
            graph=LayoutGraph.from_dict(d["graph"]),
            gt_boxes=tuple(RoomBox.from_dict(b) for b in d["gt_boxes"]),
            turning=compute_turning_function(boundary),
        )


def _box_gap(a: RoomBox, b: RoomBox) -> tuple[float, float, float, float]:
    """(gap_x, gap_y, overlap_x, overlap_y) between two boxes."""
    gap_x = max(0.0, abs(a.x - b.x) - (a.w + b.w) / 2.0)
    gap_y = max(0.0, abs(a.y - b.y) - (a.h + b.h) / 2.0)
    ov_x = min(a.x1, b.x1) - max(a.x0, b.x0)
    ov_y = min(a.y1, b.y1) - max(a.y0, b.y0)
    return gap_x, gap_y, ov_x, ov_y


def rooms_adjacent(a: RoomBox, b: RoomBox, threshold: float | None = None) -> bool:
    """Side-by-side proximity: small gap along one axis, overlap along the other."""
    if threshold is None:
        shorter = min(a.w, a.h, b.w, b.h)
        threshold = max(ADJ_GAP_FLOOR, ADJ_GAP_FRACTION * shorter)
    gap_x, gap_y, ov_x, ov_y = _box_gap(a, b)
    return (gap_x <= threshold and ov_y > 0) or (gap_y <= threshold and ov_x > 0)


def _containment_fraction(inner: RoomBox, outer: RoomBox) -> float:
    ix = max(0.0, min(inner.x1, outer.x1) - max(inner.x0, outer.x0))
    iy = max(0.0, min(inner.y1, outer.y1) - max(inner.y0, outer.y0))
    return (ix * iy) / inner.area if inner.area > 0 else 0.0


def relation_between(a: RoomBox, b: RoomBox) -> RelationType:
    """Relation of room a relative to room b (containment beats octants)."""
    if _containment_fraction(a, b) >= CONTAINMENT_FRACTION:
        return RelationType.Inside
    if _containment_fraction(b, a) >= CONTAINMENT_FRACTION:
        return RelationType.Outside
    dx, dy = a.x - b.x, a.y - b.y
    if dx == 0.0 and dy == 0.0:
        return RelationType.LeftOf if a.room_id < b.room_id else RelationType.RightOf
    return relation_from_offset(dx, dy)


def _door_touches(box: RoomBox, seg: tuple[tuple[float, float], tuple[float, float]], slack: float = 1.5) -> bool:
    (x1, y1), (x2, y2) = seg
    lo_x, hi_x = min(x1, x2) - slack, max(x1, x2) + slack
    lo_y, hi_y = min(y1, y2) - slack, max(y1, y2) + slack
    return box.x1 >= lo_x and box.x0 <= hi_x and box.y1 >= lo_y and box.y0 <= hi_y


def extract_layout_graph(
    record: "FloorplanRecord",
    door_segments: list[tuple[tuple[float, float], tuple[float, float]]] | None = None,
    threshold: float | None = None,
    seed: int | None = None,
) -> LayoutGraph:
    """Adjacency graph over the record's rooms.

    Edges join rooms on the two sides of an interior door plus rooms
    whose boxes are within the proximity threshold.  Each edge's
    direction is sampled once with a generator seeded from the record
    id, so extraction is deterministic per record.
    """
    boxes = record.gt_boxes
    nodes = record.graph.nodes
    rng = random.Random(seed if seed is not None else f"edges:{record.id}")
    pairs: set[tuple[int, int]] = set()
    ordered = sorted(boxes, key=lambda b: b.room_id)
    for i, a in enumerate(ordered):
        for b in ordered[i + 1 :]:
            if rooms_adjacent(a, b, threshold):
                pairs.add((a.room_id, b.room_id))
    for seg in door_segments or []:
        touching = [b.room_id for b in ordered if _door_touches(b, seg)]
        for i, a in enumerate(touching):
            for b in touching[i + 1 :]:
                pairs.add((min(a, b), max(a, b)))
    by_id = {b.room_id: b for b in boxes}
    edges = []
    for a, b in sorted(pairs):
        rel = relation_between(by_id[a], by_id[b])
        if rng.random() < 0.5:
            edges.append((a, b, rel))
        else:
            edges.append((b, a, rel.inverse))
    return LayoutGraph(nodes=nodes, edges=tuple(edges))


# ---------------------------------------------------------------------------
# raster import (RPLAN-compatible 4-channel layout)


def import_raster_floorplan(
    image: np.ndarray,
    record_id: str = "imported",
    door_segments: list | None = None,
    regularize: bool = True,
) -> FloorplanRecord:
    """Build a record from a 4-channel label grid.

    Channel order: inside/outside (nonzero inside), boundary (1 on the
    outline, 2 on the entrance door), room-type label, instance index
    (0 = no room).  Ground-truth boxes are per-instance bounding boxes,
    regularized with the room-alignment pass so wall gaps close.
    """
    from .vectorize import align_rooms, trace_region

    if image.ndim != 3 or image.shape[2] != 4:
        raise CorpusFormatError(f"expected (H, W, 4) label grid, got {image.shape}")
    res = image.shape[0]
    inside = image[:, :, 0] > 0
    if not inside.any():
        raise CorpusFormatError("empty inside mask")
    try:
        polygon = trace_region(inside)
    except Exception as exc:
        raise CorpusFormatError(f"cannot trace boundary: {exc}") from exc
    door_px = np.argwhere(image[:, :, 1] == 2)
    if door_px.size == 0:
        raise CorpusFormatError("no entrance door marked in the boundary channel")
    door = _door_segment_from_pixels(door_px, polygon)
    boundary = Boundary(vertices=polygon, front_door=door, resolution=res)

    instances = image[:, :, 3]
    labels = image[:, :, 2]
    boxes: list[RoomBox] = []
    nodes: list[RoomNode] = []
    bbox = boundary.bbox()
    total_area = float(inside.sum())
    for inst in sorted(int(v) for v in np.unique(instances) if v > 0):
        mask = instances == inst
        room_labels = np.unique(labels[mask])
        if room_labels.size != 1:
            raise CorpusFormatError(f"instance {inst} carries {room_labels.size} room labels")
        rtype = RoomType(int(room_labels[0]))
        rs, cs = np.nonzero(mask)
        box = RoomBox.from_corners(float(cs.min()), float(rs.min()), float(cs.max() + 1), float(rs.max() + 1), room_id=len(nodes))
        boxes.append(box)
        ratio = float(mask.sum()) / total_area
        nodes.append(
            RoomNode(
                id=box.room_id,
                rtype=rtype,
                grid_cell=grid_cell_of_point(box.x, box.y, bbox),
                size_ratio=min(1.0, max(ratio, 1e-6)),
            )
        )
    graph = LayoutGraph(nodes=tuple(nodes), edges=())
    record = FloorplanRecord(
        id=record_id,
        boundary=boundary,
        graph=graph,
        gt_boxes=tuple(boxes),
        turning=compute_turning_function(boundary),
    )
    graph = extract_layout_graph(record, door_segments=door_segments)
    boxes_out = tuple(align_rooms(list(record.gt_boxes), boundary, graph)) if regularize else record.gt_boxes
    return FloorplanRecord(
        id=record_id,
        boundary=boundary,
        graph=graph,
        gt_boxes=boxes_out,
        turning=record.turning,
    )


def _door_segment_from_pixels(door_px: np.ndarray, polygon) -> tuple[tuple[float, float], tuple[float, float]]:
    rows = door_px[:, 0]
    cols = door_px[:, 1]
    if np.ptp(cols) >= np.ptp(rows):  # horizontal door
        r = float(round(np.median(rows)))
        seg = ((float(cols.min()), r), (float(cols.max() + 1), r))
    else:
        c = float(round(np.median(cols)))
        seg = ((c, float(rows.min())), (c, float(rows.max() + 1)))
    return _project_onto_polygon_edge(seg, polygon)


def _project_onto_polygon_edge(seg, polygon) -> tuple[tuple[float, float], tuple[float, float]]:
    """Snap a door segment onto the nearest parallel polygon edge."""
    n = len(polygon)
    horizontal = abs(seg[0][1] - seg[1][1]) < abs(seg[0][0] - seg[1][0])
    best, best_d = None, float("inf")
    for i in range(n):
        a, b = polygon[i], polygon[(i + 1) % n]
        edge_horizontal = abs(a[1] - b[1]) < 1e-9
        if edge_horizontal != horizontal:
            continue
        if horizontal:
            lo, hi = min(a[0], b[0]), max(a[0], b[0])
            mid = (seg[0][0] + seg[1][0]) / 2.0
            if not (lo <= mid <= hi):
                continue
            d = abs(a[1] - seg[0][1])
            if d < best_d:
                x0 = max(lo, min(seg[0][0], seg[1][0]))
                x1 = min(hi, max(seg[0][0], seg[1][0]))
                best, best_d = ((x0, a[1]), (x1, a[1])), d
        else:
            lo, hi = min(a[1], b[1]), max(a[1], b[1])
            mid = (seg[0][1] + seg[1][1]) / 2.0
            if not (lo <= mid <= hi):
                continue
            d = abs(a[0] - seg[0][0])
            if d < best_d:
                y0 = max(lo, min(seg[0][1], seg[1][1]))
                y1 = min(hi, max(seg[0][1], seg[1][1]))
                best, best_d = ((a[0], y0), (a[0], y1)), d
    if best is None:
        raise CorpusFormatError("entrance door does not lie near any boundary edge")
    return best


# ---------------------------------------------------------------------------
# persistence


def save_corpus(records: list[FloorplanRecord], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({"format": CORPUS_FORMAT, "version": CORPUS_VERSION}, sort_keys=True) + "\n")
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")


def load_corpus(path: str | Path) -> list[FloorplanRecord]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line:
            raise CorpusFormatError("empty corpus file")
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"corrupt corpus header: {exc}") from exc
        if header.get("format") != CORPUS_FORMAT:
            raise CorpusFormatError(f"not a corpus file: {header!r}")
        if header.get("version") != CORPUS_VERSION:
            raise CorpusFormatError(f"unsupported corpus version {header.get('version')}")
        records = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                records.append(FloorplanRecord.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise CorpusFormatError(f"corrupt record at line {lineno}: {exc}") from exc
    return records
