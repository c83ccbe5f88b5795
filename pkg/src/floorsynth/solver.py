"""Room-box layout by direct minimization of a geometric loss.

Four grid-averaged squared-distance terms are summed:

* coverage  - every interior pixel should fall inside some box;
* interior  - box pixels should stay inside the boundary bounding box;
* mutex     - boxes should not share interior pixels;
* match     - each box should cover the same region as its prior box.

All terms are evaluated over pixel centers of the ``resolution**2``
grid.  Gradients are analytic with pixel memberships held fixed, which
is the almost-everywhere gradient of the piecewise-smooth objective:
terms whose only dependence on a box is through its pixel set
(interior, and the first match summand) therefore contribute zero
gradient and act through the accept-if-improved line search instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import Boundary, rasterize_boundary
from .layout import GRID_K, LayoutGraph, RoomBox

MIN_BOX_SIDE = 2.0


class SolverError(RuntimeError):
    """Non-finite loss or invalid solver input."""


@dataclass(frozen=True)
class LossBreakdown:
    coverage: float
    interior: float
    mutex: float
    match: float

    @property
    def total(self) -> float:
        return self.coverage + self.interior + self.mutex + self.match

    def to_dict(self) -> dict:
        return {
            "coverage": self.coverage,
            "interior": self.interior,
            "mutex": self.mutex,
            "match": self.match,
            "total": self.total,
        }


@dataclass(frozen=True)
class SolverConfig:
    grid_resolution: int = 128
    max_iters: int = 300
    step_size: float = 0.25
    step_decay: float = 0.5
    min_box_side: float = MIN_BOX_SIDE
    seed: int = 0
    w_coverage: float = 1.0
    w_interior: float = 1.0
    w_mutex: float = 1.0
    w_match: float = 1.0

    def __post_init__(self):
        if min(self.grid_resolution, self.max_iters) <= 0 or min(
            self.step_size, self.step_decay, self.min_box_side
        ) <= 0:
            raise ValueError("solver config values must be positive")


def boxes_to_array(boxes: list[RoomBox] | np.ndarray) -> np.ndarray:
    if isinstance(boxes, np.ndarray):
        return np.asarray(boxes, dtype=float)
    return np.array([[b.x, b.y, b.w, b.h] for b in boxes], dtype=float)


def array_to_boxes(arr: np.ndarray, room_ids: list[int]) -> list[RoomBox]:
    return [
        RoomBox(x=float(x), y=float(y), w=float(w), h=float(h), room_id=rid)
        for (x, y, w, h), rid in zip(arr, room_ids)
    ]


def d_in(px: float, py: float, b: RoomBox) -> float:
    """0 inside the box, else distance to the box boundary."""
    dx = max(abs(px - b.x) - b.w / 2.0, 0.0)
    dy = max(abs(py - b.y) - b.h / 2.0, 0.0)
    return math.hypot(dx, dy)


def d_out(px: float, py: float, b: RoomBox) -> float:
    """0 outside the box, else distance to the nearest box edge."""
    mx = b.w / 2.0 - abs(px - b.x)
    my = b.h / 2.0 - abs(py - b.y)
    if mx <= 0 or my <= 0:
        return 0.0
    return min(mx, my)


def _pixel_centers(res: int) -> tuple[np.ndarray, np.ndarray]:
    c = np.arange(res) + 0.5
    X, Y = np.meshgrid(c, c)
    return X.ravel(), Y.ravel()


def _d_in_sq(px: np.ndarray, py: np.ndarray, box: np.ndarray) -> np.ndarray:
    x, y, w, h = box
    dx = np.maximum(np.abs(px - x) - w / 2.0, 0.0)
    dy = np.maximum(np.abs(py - y) - h / 2.0, 0.0)
    return dx * dx + dy * dy


def _d_out_sq(px: np.ndarray, py: np.ndarray, box: np.ndarray) -> np.ndarray:
    x, y, w, h = box
    mx = w / 2.0 - np.abs(px - x)
    my = h / 2.0 - np.abs(py - y)
    inside = (mx > 0) & (my > 0)
    m = np.minimum(mx, my)
    return np.where(inside, m * m, 0.0)


def _inside_box(px: np.ndarray, py: np.ndarray, box: np.ndarray) -> np.ndarray:
    x, y, w, h = box
    return (np.abs(px - x) < w / 2.0) & (np.abs(py - y) < h / 2.0)


class _Grid:
    """Cached per-boundary pixel sets for loss evaluation."""

    def __init__(self, boundary: Boundary):
        self.res = boundary.resolution
        px, py = _pixel_centers(self.res)
        inside = rasterize_boundary(boundary).inside_mask.ravel()
        self.px_all, self.py_all = px, py
        self.px_in, self.py_in = px[inside], py[inside]
        self.bbox = boundary.bbox()
        min_x, min_y, max_x, max_y = self.bbox
        self.bbox_box = np.array(
            [(min_x + max_x) / 2.0, (min_y + max_y) / 2.0, max_x - min_x, max_y - min_y]
        )


_grid_cache: dict[Boundary, _Grid] = {}


def _grid(boundary: Boundary) -> _Grid:
    g = _grid_cache.get(boundary)
    if g is None:
        g = _Grid(boundary)
        if len(_grid_cache) > 256:
            _grid_cache.clear()
        _grid_cache[boundary] = g
    return g


def loss_coverage(boxes, boundary: Boundary) -> float:
    arr = boxes_to_array(boxes)
    if arr.shape[0] == 0:
        raise SolverError("coverage loss needs at least one box")
    g = _grid(boundary)
    if g.px_in.size == 0:
        return 0.0
    d = np.stack([_d_in_sq(g.px_in, g.py_in, b) for b in arr])
    return float(d.min(axis=0).mean())


def loss_interior(boxes, boundary: Boundary) -> float:
    arr = boxes_to_array(boxes)
    if arr.shape[0] == 0:
        raise SolverError("interior loss needs at least one box")
    g = _grid(boundary)
    total = 0.0
    count = 0
    for b in arr:
        mask = _inside_box(g.px_all, g.py_all, b)
        count += int(mask.sum())
        if mask.any():
            total += float(_d_in_sq(g.px_all[mask], g.py_all[mask], g.bbox_box).sum())
    return total / count if count else 0.0


def loss_mutex(boxes, boundary: Boundary | None = None) -> float:
    arr = boxes_to_array(boxes)
    n = arr.shape[0]
    if n <= 1:
        return 0.0
    res = boundary.resolution if boundary is not None else 128
    px, py = _pixel_centers(res)
    total = 0.0
    count = 0
    for i in range(n):
        mask = _inside_box(px, py, arr[i])
        m = int(mask.sum())
        count += m * (n - 1)
        if m == 0:
            continue
        for j in range(n):
            if j != i:
                total += float(_d_out_sq(px[mask], py[mask], arr[j]).sum())
    return total / count if count else 0.0


def loss_match(boxes, priors, boundary: Boundary | None = None) -> float:
    arr = boxes_to_array(boxes)
    pri = boxes_to_array(priors)
    if arr.shape != pri.shape:
        raise SolverError(f"boxes/priors length mismatch: {arr.shape[0]} vs {pri.shape[0]}")
    res = boundary.resolution if boundary is not None else 128
    px, py = _pixel_centers(res)
    t1 = t2 = 0.0
    c1 = c2 = 0
    for b, p in zip(arr, pri):
        m_b = _inside_box(px, py, b)
        m_p = _inside_box(px, py, p)
        c1 += int(m_b.sum())
        c2 += int(m_p.sum())
        if m_b.any():
            t1 += float(_d_in_sq(px[m_b], py[m_b], p).sum())
        if m_p.any():
            t2 += float(_d_in_sq(px[m_p], py[m_p], b).sum())
    return (t1 / c1 if c1 else 0.0) + (t2 / c2 if c2 else 0.0)


def loss_breakdown(boxes, boundary: Boundary, priors=None, cfg: SolverConfig | None = None) -> LossBreakdown:
    cfg = cfg or SolverConfig()
    match = cfg.w_match * loss_match(boxes, priors, boundary) if priors is not None else 0.0
    return LossBreakdown(
        coverage=cfg.w_coverage * loss_coverage(boxes, boundary),
        interior=cfg.w_interior * loss_interior(boxes, boundary),
        mutex=cfg.w_mutex * loss_mutex(boxes, boundary),
        match=match,
    )


# ---------------------------------------------------------------------------
# analytic gradients (pixel memberships held fixed)


def _grad_d_in_sq(px: np.ndarray, py: np.ndarray, box: np.ndarray) -> np.ndarray:
    """Per-pixel gradient of d_in^2 w.r.t. (x, y, w, h); shape (npix, 4)."""
    x, y, w, h = box
    ux, uy = px - x, py - y
    dx = np.maximum(np.abs(ux) - w / 2.0, 0.0)
    dy = np.maximum(np.abs(uy) - h / 2.0, 0.0)
    sx = np.sign(ux)
    sy = np.sign(uy)
    g = np.empty((px.size, 4))
    g[:, 0] = 2.0 * dx * (-sx)
    g[:, 1] = 2.0 * dy * (-sy)
    g[:, 2] = 2.0 * dx * (-0.5)
    g[:, 3] = 2.0 * dy * (-0.5)
    return g


def _grad_d_out_sq(px: np.ndarray, py: np.ndarray, box: np.ndarray) -> np.ndarray:
    """Per-pixel gradient of d_out^2 w.r.t. the box parameters."""
    x, y, w, h = box
    ux, uy = px - x, py - y
    mx = w / 2.0 - np.abs(ux)
    my = h / 2.0 - np.abs(uy)
    inside = (mx > 0) & (my > 0)
    use_x = inside & (mx <= my)
    use_y = inside & ~use_x
    g = np.zeros((px.size, 4))
    g[use_x, 0] = 2.0 * mx[use_x] * np.sign(ux[use_x])
    g[use_x, 2] = mx[use_x]
    g[use_y, 1] = 2.0 * my[use_y] * np.sign(uy[use_y])
    g[use_y, 3] = my[use_y]
    return g


def grad_coverage(arr: np.ndarray, boundary: Boundary) -> np.ndarray:
    g = _grid(boundary)
    n = arr.shape[0]
    out = np.zeros((n, 4))
    if g.px_in.size == 0:
        return out
    d = np.stack([_d_in_sq(g.px_in, g.py_in, b) for b in arr])
    winner = d.argmin(axis=0)
    for i in range(n):
        sel = winner == i
        if sel.any():
            out[i] = _grad_d_in_sq(g.px_in[sel], g.py_in[sel], arr[i]).sum(axis=0)
    return out / g.px_in.size


def grad_interior(arr: np.ndarray, boundary: Boundary) -> np.ndarray:
    # depends on the boxes only through their pixel sets: zero a.e.
    return np.zeros((arr.shape[0], 4))


def grad_mutex(arr: np.ndarray, boundary: Boundary) -> np.ndarray:
    n = arr.shape[0]
    out = np.zeros((n, 4))
    if n <= 1:
        return out
    res = boundary.resolution
    px, py = _pixel_centers(res)
    masks = [_inside_box(px, py, arr[i]) for i in range(n)]
    count = sum(int(m.sum()) for m in masks) * (n - 1)
    if count == 0:
        return out
    for i in range(n):
        if not masks[i].any():
            continue
        qx, qy = px[masks[i]], py[masks[i]]
        for j in range(n):
            if j != i:
                out[j] += _grad_d_out_sq(qx, qy, arr[j]).sum(axis=0)
    return out / count


def grad_match(arr: np.ndarray, pri: np.ndarray, boundary: Boundary) -> np.ndarray:
    n = arr.shape[0]
    out = np.zeros((n, 4))
    res = boundary.resolution
    px, py = _pixel_centers(res)
    c2 = 0
    masks_p = []
    for p in pri:
        m = _inside_box(px, py, p)
        masks_p.append(m)
        c2 += int(m.sum())
    if c2 == 0:
        return out
    for i in range(n):
        m = masks_p[i]
        if m.any():
            out[i] = _grad_d_in_sq(px[m], py[m], arr[i]).sum(axis=0)
    return out / c2


def total_gradient(arr: np.ndarray, boundary: Boundary, pri: np.ndarray | None, cfg: SolverConfig) -> np.ndarray:
    g = cfg.w_coverage * grad_coverage(arr, boundary)
    g += cfg.w_mutex * grad_mutex(arr, boundary)
    if pri is not None:
        g += cfg.w_match * grad_match(arr, pri, boundary)
    return g


# ---------------------------------------------------------------------------


def init_boxes(g: LayoutGraph, b: Boundary) -> list[RoomBox]:
    """One square box per node at its grid-cell center, area-proportional side."""
    min_x, min_y, max_x, max_y = b.bbox()
    cw = (max_x - min_x) / GRID_K
    ch = (max_y - min_y) / GRID_K
    area = float(rasterize_boundary(b).inside_mask.sum())
    out = []
    for node in g.nodes:
        r, c = node.grid_cell
        cx = min_x + (c + 0.5) * cw
        cy = min_y + (r + 0.5) * ch
        side = max(MIN_BOX_SIDE, math.sqrt(node.size_ratio * area))
        out.append(RoomBox(x=cx, y=cy, w=side, h=side, room_id=node.id))
    return out


def _project(arr: np.ndarray, res: int, min_side: float) -> np.ndarray:
    arr = arr.copy()
    arr[:, 2] = np.maximum(arr[:, 2], min_side)
    arr[:, 3] = np.maximum(arr[:, 3], min_side)
    arr[:, 0] = np.clip(arr[:, 0], 1.0, res - 1.0)
    arr[:, 1] = np.clip(arr[:, 1], 1.0, res - 1.0)
    return arr


def solve(
    g: LayoutGraph,
    b: Boundary,
    priors: list[RoomBox],
    cfg: SolverConfig | None = None,
    start: list[RoomBox] | None = None,
) -> tuple[list[RoomBox], list[LossBreakdown]]:
    """Projected gradient descent with accept-if-improved backtracking.

    Returns the solved boxes (one per node, id-aligned with the graph)
    and the loss trace of accepted iterations, starting at the initial
    configuration.  Deterministic: no randomness is involved.
    """
    cfg = cfg or SolverConfig()
    room_ids = [n.id for n in g.nodes]
    start_boxes = start if start is not None else init_boxes(g, b)
    if len(start_boxes) != len(priors):
        raise SolverError("priors must align with graph nodes")
    arr = _project(boxes_to_array(start_boxes), b.resolution, cfg.min_box_side)
    pri = boxes_to_array(priors)

    def total(a: np.ndarray) -> LossBreakdown:
        return loss_breakdown(array_to_boxes(a, room_ids), b, array_to_boxes(pri, room_ids), cfg)

    cur = total(arr)
    trace = [cur]
    if not math.isfinite(cur.total):
        raise SolverError(f"non-finite initial loss: {cur.to_dict()}")
    lr = cfg.step_size
    for _ in range(cfg.max_iters):
        if cur.total <= 1e-12:
            break
        grad = total_gradient(arr, b, pri, cfg)
        gnorm = float(np.abs(grad).max())
        if not math.isfinite(gnorm):
            raise SolverError("non-finite gradient")
        if gnorm < 1e-12:
            break
        improved = False
        t = lr
        for _ in range(20):
            cand = _project(arr - t * grad, b.resolution, cfg.min_box_side)
            nxt = total(cand)
            if not math.isfinite(nxt.total):
                raise SolverError(f"non-finite loss at candidate step: {nxt.to_dict()}")
            if nxt.total < cur.total - 1e-12:
                arr, cur = cand, nxt
                trace.append(cur)
                improved = True
                lr = min(t * 1.5, cfg.step_size * 8)
                break
            t *= cfg.step_decay
        if not improved:
            break
    return array_to_boxes(arr, room_ids), trace


# ---------------------------------------------------------------------------
# gradient validation


@dataclass(frozen=True)
class LossTerm:
    """Value/gradient pair for one loss term, for finite-difference checks."""

    name: str
    value: callable
    grad: callable


def loss_terms(boundary: Boundary, priors: np.ndarray | None = None) -> list[LossTerm]:
    pri = boxes_to_array(priors) if priors is not None else None
    terms = [
        LossTerm("coverage", lambda a: loss_coverage(a, boundary), lambda a: grad_coverage(a, boundary)),
        LossTerm("interior", lambda a: loss_interior(a, boundary), lambda a: grad_interior(a, boundary)),
        LossTerm("mutex", lambda a: loss_mutex(a, boundary), lambda a: grad_mutex(a, boundary)),
    ]
    if pri is not None:
        terms.append(
            LossTerm("match", lambda a: loss_match(a, pri, boundary), lambda a: grad_match(a, pri, boundary))
        )
    return terms


def is_smooth_configuration(
    arr: np.ndarray, res: int, margin: float, pri: np.ndarray | None = None
) -> bool:
    """True when no pixel center sits within ``margin`` of a kink.

    Kinks: pixel centers on box edges (membership flips and d_in
    corners), d_out ties between the x- and y-slack, and non-degenerate
    coverage argmin ties.
    """
    px, py = _pixel_centers(res)
    all_boxes = arr if pri is None else np.vstack([arr, pri])
    for box in all_boxes:
        x, y, w, h = box
        ex = np.abs(np.abs(px - x) - w / 2.0)
        ey = np.abs(np.abs(py - y) - h / 2.0)
        if (ex < margin).any() or (ey < margin).any():
            return False
        mx = w / 2.0 - np.abs(px - x)
        my = h / 2.0 - np.abs(py - y)
        inside = (mx > 0) & (my > 0)
        if (np.abs(mx[inside] - my[inside]) < margin).any():
            return False
    if arr.shape[0] >= 2:
        d = np.stack([_d_in_sq(px, py, b) for b in arr])
        d.sort(axis=0)
        gap = d[1] - d[0]
        tie = (gap < margin) & (d[0] > margin)
        if tie.any():
            return False
    return True


def gradient_check(term: LossTerm, boxes, epsilon: float = 1e-3) -> float:
    """Max relative error between analytic and central-difference gradients."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    arr = boxes_to_array(boxes)
    analytic = term.grad(arr)
    worst = 0.0
    for i in range(arr.shape[0]):
        for j in range(4):
            hi = arr.copy()
            lo = arr.copy()
            hi[i, j] += epsilon
            lo[i, j] -= epsilon
            fd = (term.value(hi) - term.value(lo)) / (2.0 * epsilon)
            an = analytic[i, j]
            scale = max(abs(fd), abs(an))
            if scale < 1e-6:
                continue
            worst = max(worst, abs(fd - an) / scale)
    return worst
