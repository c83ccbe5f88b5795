import math
import random

import numpy as np
import pytest

from floorsynth.geometry import Boundary, rasterize_boundary
from floorsynth.layout import RoomBox
from floorsynth.solver import (
    SolverConfig,
    SolverError,
    boxes_to_array,
    d_in,
    d_out,
    gradient_check,
    init_boxes,
    is_smooth_configuration,
    loss_breakdown,
    loss_coverage,
    loss_interior,
    loss_match,
    loss_mutex,
    loss_terms,
    solve,
)


def small_square(res=32):
    return Boundary(
        vertices=((4, 4), (28, 4), (28, 28), (4, 28)),
        front_door=((10, 4), (14, 4)),
        resolution=res,
    )


def small_l(res=32):
    return Boundary(
        vertices=((4, 4), (28, 4), (28, 16), (16, 16), (16, 28), (4, 28)),
        front_door=((6, 4), (10, 4)),
        resolution=res,
    )


# ---------------------------------------------------------------------------
# independent per-pixel oracle: plain loops, scalar arithmetic


def _oracle_d_in(px, py, box):
    if box.x0 <= px <= box.x1 and box.y0 <= py <= box.y1:
        return 0.0
    cx = min(max(px, box.x0), box.x1)
    cy = min(max(py, box.y0), box.y1)
    return math.dist((px, py), (cx, cy))


def _oracle_d_out(px, py, box):
    if not (box.x0 < px < box.x1 and box.y0 < py < box.y1):
        return 0.0
    return min(px - box.x0, box.x1 - px, py - box.y0, box.y1 - py)


def _interior_pixels(boundary):
    mask = rasterize_boundary(boundary).inside_mask
    return [(c + 0.5, r + 0.5) for r, c in np.argwhere(mask)]


def _all_pixels(res):
    return [(c + 0.5, r + 0.5) for r in range(res) for c in range(res)]


def _strictly_inside(px, py, box):
    return abs(px - box.x) < box.w / 2.0 and abs(py - box.y) < box.h / 2.0


def oracle_coverage(boxes, boundary):
    pts = _interior_pixels(boundary)
    if not pts:
        return 0.0
    return sum(min(_oracle_d_in(px, py, b) ** 2 for b in boxes) for px, py in pts) / len(pts)


def oracle_interior(boxes, boundary):
    min_x, min_y, max_x, max_y = boundary.bbox()
    bbox = RoomBox.from_corners(min_x, min_y, max_x, max_y)
    total, count = 0.0, 0
    for b in boxes:
        for px, py in _all_pixels(boundary.resolution):
            if _strictly_inside(px, py, b):
                total += _oracle_d_in(px, py, bbox) ** 2
                count += 1
    return total / count if count else 0.0


def oracle_mutex(boxes, res):
    n = len(boxes)
    if n <= 1:
        return 0.0
    total, count = 0.0, 0
    for i, bi in enumerate(boxes):
        for px, py in _all_pixels(res):
            if not _strictly_inside(px, py, bi):
                continue
            count += n - 1
            for j, bj in enumerate(boxes):
                if j != i:
                    total += _oracle_d_out(px, py, bj) ** 2
    return total / count if count else 0.0


def oracle_match(boxes, priors, res):
    t1, c1, t2, c2 = 0.0, 0, 0.0, 0
    for b, p in zip(boxes, priors):
        for px, py in _all_pixels(res):
            if _strictly_inside(px, py, b):
                t1 += _oracle_d_in(px, py, p) ** 2
                c1 += 1
            if _strictly_inside(px, py, p):
                t2 += _oracle_d_in(px, py, b) ** 2
                c2 += 1
    return (t1 / c1 if c1 else 0.0) + (t2 / c2 if c2 else 0.0)


def _random_boxes(rng, n, lo=2.0, hi=30.0):
    out = []
    for i in range(n):
        w = rng.uniform(2.0, 14.0)
        h = rng.uniform(2.0, 14.0)
        x = rng.uniform(lo + w / 2, hi - w / 2)
        y = rng.uniform(lo + h / 2, hi - h / 2)
        out.append(RoomBox(x=x, y=y, w=w, h=h, room_id=i))
    return out


# ---------------------------------------------------------------------------


def test_scalar_distances_match_oracle():
    rng = random.Random(0)
    for _ in range(200):
        box = _random_boxes(rng, 1)[0]
        px, py = rng.uniform(0, 32), rng.uniform(0, 32)
        assert d_in(px, py, box) == pytest.approx(_oracle_d_in(px, py, box), abs=1e-12)
        assert d_out(px, py, box) == pytest.approx(_oracle_d_out(px, py, box), abs=1e-12)


def test_loss_zero_sets():
    b = small_square()
    # one box covering the whole interior zeroes coverage
    full = [RoomBox.from_corners(4, 4, 28, 28, room_id=0)]
    assert loss_coverage(full, b) <= 1e-12
    assert loss_interior(full, b) <= 1e-12  # inside the bbox everywhere
    assert loss_mutex(full, b) == 0.0  # single box
    assert loss_match(full, full, b) <= 1e-12  # box equals its prior
    # disjoint boxes have zero mutex
    two = [
        RoomBox.from_corners(5, 5, 15, 15, room_id=0),
        RoomBox.from_corners(16, 16, 27, 27, room_id=1),
    ]
    assert loss_mutex(two, b) == 0.0


def test_losses_positive_off_zero_set():
    b = small_square()
    shrunk = [RoomBox.from_corners(10, 10, 20, 20, room_id=0)]
    assert loss_coverage(shrunk, b) > 0
    hanging = [RoomBox.from_corners(20, 20, 40, 40, room_id=0)]  # leaves the bbox
    assert loss_interior(hanging, b) > 0
    overlapping = [
        RoomBox.from_corners(5, 5, 20, 20, room_id=0),
        RoomBox.from_corners(10, 10, 25, 25, room_id=1),
    ]
    assert loss_mutex(overlapping, b) > 0
    moved = [RoomBox.from_corners(6, 6, 16, 16, room_id=0)]
    prior = [RoomBox.from_corners(12, 12, 22, 22, room_id=0)]
    assert loss_match(moved, prior, b) > 0


@pytest.mark.parametrize("boundary_fn", [small_square, small_l])
def test_losses_match_pixel_oracle(boundary_fn):
    b = boundary_fn()
    rng = random.Random(42)
    for _ in range(8):
        n = rng.randint(1, 4)
        boxes = _random_boxes(rng, n)
        priors = _random_boxes(rng, n)
        for got, want in [
            (loss_coverage(boxes, b), oracle_coverage(boxes, b)),
            (loss_interior(boxes, b), oracle_interior(boxes, b)),
            (loss_mutex(boxes, b), oracle_mutex(boxes, b.resolution)),
            (loss_match(boxes, priors, b), oracle_match(boxes, priors, b.resolution)),
        ]:
            if want == 0.0:
                assert got <= 1e-12
            else:
                assert abs(got - want) / want < 1e-9


def test_gradient_check_smooth_configs():
    b = small_l()
    rng = random.Random(7)
    checked = 0
    while checked < 20:
        n = rng.randint(1, 4)
        boxes = _random_boxes(rng, n)
        priors = _random_boxes(rng, n)
        arr = boxes_to_array(boxes)
        if not is_smooth_configuration(arr, b.resolution, 0.05, boxes_to_array(priors)):
            continue
        for term in loss_terms(b, priors):
            assert gradient_check(term, boxes) < 1e-4, term.name
        checked += 1


def test_solve_reduces_loss_and_is_deterministic(corpus20):
    rec = corpus20[0]
    priors = list(rec.gt_boxes)
    cfg = SolverConfig(max_iters=80)
    boxes1, trace1 = solve(rec.graph, rec.boundary, priors, cfg)
    boxes2, trace2 = solve(rec.graph, rec.boundary, priors, cfg)
    assert [b.to_dict() for b in boxes1] == [b.to_dict() for b in boxes2]
    assert trace1[-1].total <= trace1[0].total
    totals = [t.total for t in trace1]
    assert all(b <= a + 1e-12 for a, b in zip(totals, totals[1:]))


def test_solve_respects_projection(corpus20):
    rec = corpus20[1]
    cfg = SolverConfig(max_iters=60)
    boxes, _ = solve(rec.graph, rec.boundary, list(rec.gt_boxes), cfg)
    res = rec.boundary.resolution
    for b in boxes:
        assert b.w >= cfg.min_box_side and b.h >= cfg.min_box_side
        assert 1.0 <= b.x <= res - 1.0
        assert 1.0 <= b.y <= res - 1.0


def test_init_boxes_cover_each_node(corpus20):
    rec = corpus20[2]
    boxes = init_boxes(rec.graph, rec.boundary)
    assert {b.room_id for b in boxes} == {n.id for n in rec.graph.nodes}
    for b in boxes:
        assert b.w >= 2 and b.h >= 2


def test_breakdown_weights():
    b = small_square()
    boxes = [RoomBox.from_corners(10, 10, 20, 20, room_id=0)]
    cfg = SolverConfig(w_coverage=2.0)
    lb = loss_breakdown(boxes, b, priors=boxes, cfg=cfg)
    assert lb.coverage == pytest.approx(2.0 * loss_coverage(boxes, b))
    assert lb.total == pytest.approx(lb.coverage + lb.interior + lb.mutex + lb.match)


def test_mismatched_priors_raise():
    b = small_square()
    boxes = _random_boxes(random.Random(1), 3)
    with pytest.raises(SolverError):
        loss_match(boxes, boxes[:2], b)
