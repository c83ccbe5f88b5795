"""End-to-end floorplan synthesis: retrieve, transfer, solve, vectorize.

``generate`` strings the stage functions together and records per-stage
wall-clock timings so callers (service, CLI, evaluation) share one code
path.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import compose, solver, transfer, vectorize
from .corpus import FloorplanRecord
from .geometry import Boundary, rotate_boundary
from .layout import LayoutGraph, RoomBox
from .retrieval import Constraints, retrieve
from .solver import LossBreakdown, SolverConfig


@dataclass(frozen=True)
class GenerateResult:
    floorplan: vectorize.VectorFloorplan
    boxes: tuple
    priors: tuple
    trace: tuple
    timings: dict

    @property
    def final_loss(self) -> LossBreakdown:
        return self.trace[-1]


def _rotate_box(box: RoomBox, k: int, res: int) -> RoomBox:
    """Rotate a box by k quarter turns clockwise about the grid center."""
    x0, y0, x1, y1 = box.x0, box.y0, box.x1, box.y1
    for _ in range(k % 4):
        x0, y0, x1, y1 = res - y1, x0, res - y0, x1
    return RoomBox.from_corners(x0, y0, x1, y1, room_id=box.room_id)


def _rescale_box(box: RoomBox, src: tuple, dst: tuple) -> RoomBox:
    """Map a box through the affine transform taking bbox src onto dst."""
    sx0, sy0, sx1, sy1 = src
    dx0, dy0, dx1, dy1 = dst
    fx = (dx1 - dx0) / max(sx1 - sx0, 1e-9)
    fy = (dy1 - dy0) / max(sy1 - sy0, 1e-9)
    return RoomBox.from_corners(
        dx0 + (box.x0 - sx0) * fx,
        dy0 + (box.y0 - sy0) * fy,
        dx0 + (box.x1 - sx0) * fx,
        dy0 + (box.y1 - sy0) * fy,
        room_id=box.room_id,
    )


def transfer_priors(record: FloorplanRecord, target: Boundary) -> tuple[LayoutGraph, list[RoomBox], int]:
    """Adapt a retrieved record to a target boundary.

    Returns the adjusted layout graph, prior boxes mapped into the
    target (rotated to the aligned orientation, then rescaled from the
    source bounding box onto the target's), and the rotation used.
    """
    k = transfer.align_rotation(record.boundary, target)
    g = transfer.transfer_nodes(record.graph, k, target)
    g = transfer.adjust_node_positions(g, target)
    res = record.boundary.resolution
    rotated_src = rotate_boundary(record.boundary, k)
    src_bbox = rotated_src.bbox()
    dst_bbox = target.bbox()
    priors = [
        _rescale_box(_rotate_box(b, k, res), src_bbox, dst_bbox) for b in record.gt_boxes
    ]
    by_id = {n.id for n in g.nodes}
    priors = [p for p in priors if p.room_id in by_id]
    return g, priors, k


def priors_for_graph(g: LayoutGraph, priors: list[RoomBox], boundary: Boundary) -> list[RoomBox]:
    """Prior boxes for every node of g, initializing nodes that lack one.

    Editing can add rooms with no counterpart in the retrieved record;
    those get their default initial box as prior.
    """
    have = {p.room_id: p for p in priors}
    init = {b.room_id: b for b in solver.init_boxes(g, boundary)}
    return [have.get(n.id, init[n.id]) for n in g.nodes]


def generate(
    g: LayoutGraph,
    boundary: Boundary,
    priors: list[RoomBox] | None = None,
    cfg: SolverConfig | None = None,
) -> GenerateResult:
    """Solve room boxes for a layout graph and vectorize the result."""
    cfg = cfg or SolverConfig()
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    if priors is None:
        priors = solver.init_boxes(g, boundary)
    else:
        priors = priors_for_graph(g, priors, boundary)
    start = solver.boxes_to_array(priors)
    boxes, trace = solver.solve(g, boundary, priors, cfg, start=start)
    timings["solve"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    boxes = vectorize.snap_to_boundary(boxes, boundary)
    boxes = vectorize.snap_adjacent(boxes, g)
    order = compose.order_rooms(boxes, priors, boundary)
    raster = compose.resolve(boxes, order, boundary)
    timings["compose"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    regions = vectorize.clip_and_polygonize(raster)
    by_id = {n.id: n for n in g.nodes}
    rooms = [
        vectorize.RoomPolygon(room_id=rid, rtype=by_id[rid].rtype, polygon=poly)
        for rid, poly, _count in regions
    ]
    vf = vectorize.VectorFloorplan(boundary=boundary, rooms=tuple(rooms), doors=(), windows=())
    vf = vectorize.place_doors_windows(vf, g, labels=raster.labels)
    timings["vectorize"] = time.perf_counter() - t0

    return GenerateResult(
        floorplan=vf,
        boxes=tuple(boxes),
        priors=tuple(priors),
        trace=tuple(trace),
        timings=timings,
    )


def generate_from_record(
    record: FloorplanRecord,
    target: Boundary,
    cfg: SolverConfig | None = None,
) -> GenerateResult:
    """Retrieve-free path: transfer one known record onto a boundary."""
    g, priors, _k = transfer_priors(record, target)
    return generate(g, target, priors=priors, cfg=cfg)


def generate_from_corpus(
    corpus: list[FloorplanRecord],
    target: Boundary,
    constraints: Constraints | None = None,
    cfg: SolverConfig | None = None,
) -> GenerateResult:
    """Full pipeline: retrieve the best template and synthesize."""
    constraints = constraints or Constraints()
    candidates = retrieve(corpus, target, constraints, k=1)
    if not candidates:
        raise LookupError("no corpus record satisfies the constraints")
    return generate_from_record(candidates[0], target, cfg=cfg)


def reconstruct(record: FloorplanRecord, cfg: SolverConfig | None = None) -> GenerateResult:
    """Re-synthesize a record inside its own boundary from its own graph."""
    return generate(record.graph, record.boundary, priors=list(record.gt_boxes), cfg=cfg)
