"""Quality metrics and corpus-level evaluation reports.

Measures how closely synthesized plans reproduce held-out ground truth
(box IoU before vectorization, region IoU after), plus structural
health checks: interior coverage, room overlap, and stage timings.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import pipeline
from .compose import _box_pixel_mask
from .corpus import FloorplanRecord
from .geometry import rasterize_boundary
from .layout import RoomBox
from .retrieval import Constraints, retrieve
from .solver import SolverConfig
from .vectorize import VectorFloorplan, rasterize_rooms


def box_iou(a: RoomBox, b: RoomBox) -> float:
    """Intersection over union of two axis-aligned boxes."""
    ix = max(0.0, min(a.x1, b.x1) - max(a.x0, b.x0))
    iy = max(0.0, min(a.y1, b.y1) - max(a.y0, b.y0))
    inter = ix * iy
    union = a.area + b.area - inter
    return inter / union if union > 0 else 0.0


def mask_iou(a: np.ndarray, b: np.ndarray) -> float:
    union = int((a | b).sum())
    if union == 0:
        return 0.0
    return int((a & b).sum()) / union


def plan_iou_boxes(boxes: list[RoomBox], gt: list[RoomBox]) -> float:
    """Mean per-room box IoU, matched by room id (unmatched scores 0)."""
    by_id = {b.room_id: b for b in boxes}
    vals = [box_iou(by_id[g.room_id], g) if g.room_id in by_id else 0.0 for g in gt]
    return float(np.mean(vals)) if vals else 0.0


def plan_iou_regions(vf: VectorFloorplan, gt: list[RoomBox], res: int) -> float:
    """Mean per-room pixel IoU of the vectorized plan against gt boxes."""
    labels = rasterize_rooms(vf)
    vals = []
    for g in gt:
        gt_mask = _box_pixel_mask(g, res)
        vals.append(mask_iou(labels == g.room_id, gt_mask))
    return float(np.mean(vals)) if vals else 0.0


def partition_stats(vf: VectorFloorplan) -> dict:
    """Coverage and overlap of the vectorized plan's interior partition."""
    labels = rasterize_rooms(vf)
    ras = rasterize_boundary(vf.boundary)
    interior = ras.inside_mask
    covered = labels >= 0
    n_int = int(interior.sum())
    uncovered = int((interior & ~covered).sum())
    outside = int((covered & ~interior).sum())
    # per-room rasterization is exclusive by construction; overlap is
    # measured from the source polygons directly
    counts = np.zeros(labels.shape, dtype=np.int32)
    for room in vf.rooms:
        one = VectorFloorplan(boundary=vf.boundary, rooms=(room,), doors=(), windows=())
        counts += (rasterize_rooms(one) >= 0).astype(np.int32)
    overlap = int((counts > 1).sum())
    return {
        "interior_pixels": n_int,
        "coverage": 1.0 - (uncovered / n_int if n_int else 0.0),
        "uncovered_pixels": uncovered,
        "overlap_pixels": overlap,
        "outside_pixels": outside,
    }


@dataclass
class EvalReport:
    n_records: int
    mean_iou_boxes: float
    mean_iou_regions: float
    mean_coverage: float
    total_overlap_pixels: int
    mean_time_s: float
    per_record: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n_records": self.n_records,
            "mean_iou_boxes": self.mean_iou_boxes,
            "mean_iou_regions": self.mean_iou_regions,
            "mean_coverage": self.mean_coverage,
            "total_overlap_pixels": self.total_overlap_pixels,
            "mean_time_s": self.mean_time_s,
            "per_record": self.per_record,
        }


def split_corpus(
    corpus: list[FloorplanRecord], holdout_fraction: float = 0.15, seed: int = 0
) -> tuple[list[FloorplanRecord], list[FloorplanRecord]]:
    """Deterministic train/holdout split by shuffled record order."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(corpus))
    n_hold = max(1, int(round(len(corpus) * holdout_fraction)))
    hold = {int(i) for i in order[:n_hold]}
    train = [r for i, r in enumerate(corpus) if i not in hold]
    held = [r for i, r in enumerate(corpus) if i in hold]
    return train, held


def evaluate_self_reconstruction(
    records: list[FloorplanRecord], cfg: SolverConfig | None = None
) -> EvalReport:
    """Re-synthesize each record in its own boundary and compare to gt."""
    rows = []
    for rec in records:
        t0 = time.perf_counter()
        result = pipeline.reconstruct(rec, cfg)
        dt = time.perf_counter() - t0
        gt = list(rec.gt_boxes)
        stats = partition_stats(result.floorplan)
        rows.append(
            {
                "id": rec.id,
                "iou_boxes": plan_iou_boxes(list(result.boxes), gt),
                "iou_regions": plan_iou_regions(result.floorplan, gt, rec.boundary.resolution),
                "coverage": stats["coverage"],
                "overlap_pixels": stats["overlap_pixels"],
                "time_s": dt,
            }
        )
    return _aggregate(rows)


def evaluate_cross_reconstruction(
    train: list[FloorplanRecord],
    held: list[FloorplanRecord],
    cfg: SolverConfig | None = None,
) -> EvalReport:
    """Synthesize each held-out boundary from its best training template.

    Ground truth for a transferred layout does not exist, so quality is
    scored against the transferred prior boxes: the solver and
    vectorizer should stay close to the retrieved template while fixing
    overlaps and gaps.
    """
    rows = []
    for rec in held:
        t0 = time.perf_counter()
        best = retrieve(train, rec.boundary, Constraints(), k=1)
        if not best:
            continue
        result = pipeline.generate_from_record(best[0], rec.boundary, cfg)
        dt = time.perf_counter() - t0
        priors = list(result.priors)
        stats = partition_stats(result.floorplan)
        rows.append(
            {
                "id": rec.id,
                "template": best[0].id,
                "iou_boxes": plan_iou_boxes(list(result.boxes), priors),
                "iou_regions": plan_iou_regions(
                    result.floorplan, priors, rec.boundary.resolution
                ),
                "coverage": stats["coverage"],
                "overlap_pixels": stats["overlap_pixels"],
                "time_s": dt,
            }
        )
    return _aggregate(rows)


def _aggregate(rows: list[dict]) -> EvalReport:
    if not rows:
        return EvalReport(0, 0.0, 0.0, 0.0, 0, 0.0, [])
    return EvalReport(
        n_records=len(rows),
        mean_iou_boxes=float(np.mean([r["iou_boxes"] for r in rows])),
        mean_iou_regions=float(np.mean([r["iou_regions"] for r in rows])),
        mean_coverage=float(np.mean([r["coverage"] for r in rows])),
        total_overlap_pixels=int(sum(r["overlap_pixels"] for r in rows)),
        mean_time_s=float(np.mean([r["time_s"] for r in rows])),
        per_record=rows,
    )


def evaluate_corpus(
    corpus: list[FloorplanRecord],
    holdout_fraction: float = 0.15,
    seed: int = 0,
    cfg: SolverConfig | None = None,
) -> dict:
    """Full report: self reconstruction on holdout plus cross transfer."""
    train, held = split_corpus(corpus, holdout_fraction, seed)
    return {
        "n_corpus": len(corpus),
        "n_train": len(train),
        "n_holdout": len(held),
        "self_reconstruction": evaluate_self_reconstruction(held, cfg).to_dict(),
        "cross_reconstruction": evaluate_cross_reconstruction(train, held, cfg).to_dict(),
    }
