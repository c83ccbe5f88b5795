"""Transfer a retrieved layout graph into a new boundary, plus graph edits.

Rotation alignment keeps the front doors of the source and target
pointing the same way (within 45 degrees whenever the directions are
axis-aligned); node grid cells are then rotated and cascaded into
interior cells of the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .geometry import Boundary, door_direction, rasterize_boundary, rotate_boundary
from .layout import (
    GRID_K,
    LayoutGraph,
    RelationType,
    RoomNode,
    RoomType,
    relation_from_offset,
    rotate_cell,
    size_bin_of,
)

INTERIOR_CELL_FRACTION = 0.30


class InfeasibleBoundaryError(ValueError):
    """The boundary has no grid cell with enough interior pixels."""


class GraphEditError(ValueError):
    """An edit references missing ids, duplicates an edge, or leaves the grid."""


def align_rotation(source: Boundary, target: Boundary) -> int:
    """k in 0..3 minimizing the angle between the rotated source door
    direction and the target door direction (ties to the smaller k)."""
    tx, ty = door_direction(target)
    best_k, best_angle = 0, float("inf")
    for k in range(4):
        sx, sy = door_direction(rotate_boundary(source, k))
        dot = max(-1.0, min(1.0, sx * tx + sy * ty))
        angle = math.degrees(math.acos(dot))
        if angle < best_angle - 1e-9:
            best_k, best_angle = k, angle
    return best_k


def transfer_nodes(g: LayoutGraph, k: int, target: Boundary) -> LayoutGraph:
    """Rotate grid cells and edge relations by k x 90 degrees clockwise."""
    nodes = tuple(replace(n, grid_cell=rotate_cell(n.grid_cell, k)) for n in g.nodes)
    edges = tuple((s, d, rel.rotated(k)) for s, d, rel in g.edges)
    return LayoutGraph(nodes=nodes, edges=edges)


def interior_cells(target: Boundary) -> np.ndarray:
    """Boolean (GRID_K, GRID_K) mask of cells with >= 30% interior pixels."""
    inside = rasterize_boundary(target).inside_mask
    min_x, min_y, max_x, max_y = target.bbox()
    mask = np.zeros((GRID_K, GRID_K), dtype=bool)
    for r in range(GRID_K):
        for c in range(GRID_K):
            cx0 = min_x + c * (max_x - min_x) / GRID_K
            cx1 = min_x + (c + 1) * (max_x - min_x) / GRID_K
            cy0 = min_y + r * (max_y - min_y) / GRID_K
            cy1 = min_y + (r + 1) * (max_y - min_y) / GRID_K
            px0, px1 = int(math.floor(cx0)), max(int(math.ceil(cx1)), int(math.floor(cx0)) + 1)
            py0, py1 = int(math.floor(cy0)), max(int(math.ceil(cy1)), int(math.floor(cy0)) + 1)
            cell = inside[max(py0, 0) : py1, max(px0, 0) : px1]
            if cell.size and cell.mean() >= INTERIOR_CELL_FRACTION:
                mask[r, c] = True
    return mask


def _cascade_step(cell: tuple[int, int], origin: tuple[int, int]) -> tuple[int, int]:
    """Unit grid step along the dominant axis of origin -> cell."""
    dr, dc = cell[0] - origin[0], cell[1] - origin[1]
    if abs(dc) >= abs(dr):
        return (0, 1 if dc >= 0 else -1)
    return (1 if dr >= 0 else -1, 0)


def adjust_node_positions(g: LayoutGraph, target: Boundary) -> LayoutGraph:
    """Move nodes in exterior cells to the closest interior cell.

    Prefers the closest *empty* interior cell (ties in row-major
    order).  When every interior cell is occupied the closest one is
    taken and its occupant is pushed one cell along the displacement
    direction, cascading; a push that runs off the interior leaves both
    nodes sharing the last cell.  Deterministic and idempotent.
    """
    ok = interior_cells(target)
    if not ok.any():
        raise InfeasibleBoundaryError("no grid cell has enough interior pixels")
    cells = {n.id: n.grid_cell for n in g.nodes}
    occupancy: dict[tuple[int, int], list[int]] = {}
    for n in g.nodes:
        occupancy.setdefault(n.grid_cell, []).append(n.id)
    interior_list = [(r, c) for r in range(GRID_K) for c in range(GRID_K) if ok[r, c]]
    for node in sorted(g.nodes, key=lambda n: n.id):
        cell = cells[node.id]
        if ok[cell]:
            continue
        empty = [c for c in interior_list if not occupancy.get(c)]
        pool = empty if empty else interior_list
        dest = min(pool, key=lambda c: ((c[0] - cell[0]) ** 2 + (c[1] - cell[1]) ** 2, c))
        occupancy[cell].remove(node.id)
        step = _cascade_step(dest, cell)
        _place(node.id, dest, step, cells, occupancy, ok)
    nodes = tuple(replace(n, grid_cell=cells[n.id]) for n in g.nodes)
    return LayoutGraph(nodes=nodes, edges=g.edges)


def _place(node_id, cell, step, cells, occupancy, ok) -> None:
    occupants = occupancy.setdefault(cell, [])
    evicted = occupants[0] if occupants else None
    occupants.append(node_id)
    cells[node_id] = cell
    if evicted is None:
        return
    nxt = (cell[0] + step[0], cell[1] + step[1])
    if not (0 <= nxt[0] < GRID_K and 0 <= nxt[1] < GRID_K) or not ok[nxt]:
        return  # push reached the last interior cell: the two nodes share it
    occupants.remove(evicted)
    _place(evicted, nxt, step, cells, occupancy, ok)


# ---------------------------------------------------------------------------
# interactive edits


@dataclass(frozen=True)
class AddNode:
    rtype: RoomType
    grid_cell: tuple[int, int]
    size_ratio: float = 0.1


@dataclass(frozen=True)
class DeleteNode:
    node_id: int


@dataclass(frozen=True)
class MoveNode:
    node_id: int
    grid_cell: tuple[int, int]


@dataclass(frozen=True)
class AddEdge:
    a: int
    b: int


@dataclass(frozen=True)
class DeleteEdge:
    a: int
    b: int


Edit = AddNode | DeleteNode | MoveNode | AddEdge | DeleteEdge


def _cell_relation(a: tuple[int, int], b: tuple[int, int]) -> RelationType:
    dr, dc = a[0] - b[0], a[1] - b[1]
    if dr == 0 and dc == 0:
        return RelationType.LeftOf
    return relation_from_offset(float(dc), float(dr))


def apply_edit(g: LayoutGraph, edit: Edit) -> LayoutGraph:
    """Apply one interactive edit, preserving all graph invariants."""
    if isinstance(edit, AddNode):
        new_id = max((n.id for n in g.nodes), default=-1) + 1
        r, c = edit.grid_cell
        if not (0 <= r < GRID_K and 0 <= c < GRID_K):
            raise GraphEditError(f"cell {edit.grid_cell} outside the grid")
        node = RoomNode(
            id=new_id,
            rtype=edit.rtype,
            grid_cell=(r, c),
            size_ratio=edit.size_ratio,
            size_bin=size_bin_of(edit.size_ratio),
        )
        return LayoutGraph(nodes=g.nodes + (node,), edges=g.edges)
    if isinstance(edit, DeleteNode):
        if not any(n.id == edit.node_id for n in g.nodes):
            raise GraphEditError(f"unknown node {edit.node_id}")
        nodes = tuple(n for n in g.nodes if n.id != edit.node_id)
        edges = tuple(e for e in g.edges if edit.node_id not in (e[0], e[1]))
        return LayoutGraph(nodes=nodes, edges=edges)
    if isinstance(edit, MoveNode):
        if not any(n.id == edit.node_id for n in g.nodes):
            raise GraphEditError(f"unknown node {edit.node_id}")
        r, c = edit.grid_cell
        if not (0 <= r < GRID_K and 0 <= c < GRID_K):
            raise GraphEditError(f"cell {edit.grid_cell} outside the grid")
        nodes = tuple(replace(n, grid_cell=(r, c)) if n.id == edit.node_id else n for n in g.nodes)
        # recompute relations of edges incident to the moved node
        cells = {n.id: n.grid_cell for n in nodes}
        edges = tuple(
            (s, d, _cell_relation(cells[s], cells[d])) if edit.node_id in (s, d) else (s, d, rel)
            for s, d, rel in g.edges
        )
        return LayoutGraph(nodes=nodes, edges=edges)
    if isinstance(edit, AddEdge):
        ids = {n.id for n in g.nodes}
        if edit.a not in ids or edit.b not in ids:
            raise GraphEditError(f"edge ({edit.a}, {edit.b}) references a missing node")
        if edit.a == edit.b:
            raise GraphEditError("self-edges are not allowed")
        if g.has_edge(edit.a, edit.b):
            raise GraphEditError(f"edge between {edit.a} and {edit.b} already exists")
        cells = {n.id: n.grid_cell for n in g.nodes}
        rel = _cell_relation(cells[edit.a], cells[edit.b])
        return LayoutGraph(nodes=g.nodes, edges=g.edges + ((edit.a, edit.b, rel),))
    if isinstance(edit, DeleteEdge):
        if not g.has_edge(edit.a, edit.b):
            raise GraphEditError(f"no edge between {edit.a} and {edit.b}")
        edges = tuple(e for e in g.edges if {e[0], e[1]} != {edit.a, edit.b})
        return LayoutGraph(nodes=g.nodes, edges=edges)
    raise GraphEditError(f"unknown edit type: {type(edit).__name__}")


def edit_from_dict(d: dict) -> Edit:
    """Parse a JSON edit command (the service API wire format)."""
    op = d.get("op")
    try:
        if op == "add_node":
            return AddNode(
                rtype=RoomType[d["type"]],
                grid_cell=(int(d["cell"][0]), int(d["cell"][1])),
                size_ratio=float(d.get("size_ratio", 0.1)),
            )
        if op == "delete_node":
            return DeleteNode(node_id=int(d["node_id"]))
        if op == "move_node":
            return MoveNode(node_id=int(d["node_id"]), grid_cell=(int(d["cell"][0]), int(d["cell"][1])))
        if op == "add_edge":
            return AddEdge(a=int(d["a"]), b=int(d["b"]))
        if op == "delete_edge":
            return DeleteEdge(a=int(d["a"]), b=int(d["b"]))
    except (KeyError, ValueError, TypeError, IndexError) as exc:
        raise GraphEditError(f"malformed edit command: {exc}") from exc
    raise GraphEditError(f"unknown edit op: {op!r}")
