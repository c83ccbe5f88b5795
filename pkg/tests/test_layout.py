import pytest

from floorsynth.layout import (
    GRID_K,
    GraphInvariantError,
    LayoutGraph,
    RelationType,
    RoomBox,
    RoomNode,
    RoomType,
    grid_cell_of_point,
    relation_from_offset,
    rotate_cell,
    size_bin_of,
)


def test_relation_octants_cardinals():
    # "a is rel of b": a left of b means the offset a-b points -x
    assert relation_from_offset(-10, 0) == RelationType.LeftOf
    assert relation_from_offset(10, 0) == RelationType.RightOf
    assert relation_from_offset(0, -10) == RelationType.Above  # y down
    assert relation_from_offset(0, 10) == RelationType.Below


def test_relation_octants_diagonals():
    assert relation_from_offset(10, -10) == RelationType.RightAbove
    assert relation_from_offset(-10, -10) == RelationType.LeftAbove
    assert relation_from_offset(-10, 10) == RelationType.LeftBelow
    assert relation_from_offset(10, 10) == RelationType.RightBelow


def test_relation_octant_boundaries():
    # 22.5 degrees either side of each axis belongs to the cardinal
    assert relation_from_offset(100, 30) == RelationType.RightOf
    assert relation_from_offset(100, -30) == RelationType.RightOf
    assert relation_from_offset(100, 50) == RelationType.RightBelow


def test_relation_inverse_round_trip():
    for rel in RelationType:
        assert rel.inverse.inverse == rel


def test_relation_rotation_cycles():
    assert RelationType.LeftOf.rotated(1) == RelationType.Above
    assert RelationType.Above.rotated(1) == RelationType.RightOf
    assert RelationType.LeftAbove.rotated(1) == RelationType.RightAbove
    for rel in RelationType:
        assert rel.rotated(4) == rel
    assert RelationType.Inside.rotated(1) == RelationType.Inside
    assert RelationType.Outside.rotated(3) == RelationType.Outside


def test_rotate_cell_quarter_turn():
    # (row, col) -> (col, K-1-row) under one clockwise turn
    assert rotate_cell((0, 0), 1) == (0, GRID_K - 1)
    assert rotate_cell((0, GRID_K - 1), 1) == (GRID_K - 1, GRID_K - 1)
    for r in range(GRID_K):
        for c in range(GRID_K):
            assert rotate_cell((r, c), 4) == (r, c)


def test_grid_cell_of_point():
    bbox = (0.0, 0.0, 100.0, 100.0)
    assert grid_cell_of_point(0.0, 0.0, bbox) == (0, 0)
    assert grid_cell_of_point(99.9, 99.9, bbox) == (4, 4)
    assert grid_cell_of_point(50.0, 10.0, bbox) == (0, 2)
    # points outside the box clamp to the edge cells
    assert grid_cell_of_point(150.0, -5.0, bbox) == (0, 4)


def test_size_bins():
    assert size_bin_of(0.0) == 0
    assert size_bin_of(0.049) == 0
    assert size_bin_of(0.05) == 1
    assert size_bin_of(0.49) == 9
    assert size_bin_of(0.9) == 9  # clamped to the last bin


def test_room_node_validation():
    node = RoomNode(id=0, rtype=RoomType.Kitchen, grid_cell=(2, 3), size_ratio=0.12)
    assert node.size_bin == size_bin_of(0.12)
    with pytest.raises(ValueError):
        RoomNode(id=0, rtype=RoomType.Kitchen, grid_cell=(9, 0), size_ratio=0.1)
    with pytest.raises(ValueError):
        RoomNode(id=0, rtype=RoomType.Kitchen, grid_cell=(0, 0), size_ratio=-0.1)


def _two_node_graph():
    a = RoomNode(id=0, rtype=RoomType.LivingRoom, grid_cell=(2, 2), size_ratio=0.4)
    b = RoomNode(id=1, rtype=RoomType.Bathroom, grid_cell=(2, 0), size_ratio=0.1)
    return LayoutGraph(nodes=(a, b), edges=((1, 0, RelationType.LeftOf),))


def test_layout_graph_invariants():
    g = _two_node_graph()
    assert g.has_edge(0, 1) and g.has_edge(1, 0)
    with pytest.raises(GraphInvariantError):  # duplicate node id
        n = g.nodes[0]
        LayoutGraph(nodes=(n, n), edges=())
    with pytest.raises(GraphInvariantError):  # edge to unknown node
        LayoutGraph(nodes=g.nodes, edges=((0, 7, RelationType.LeftOf),))
    with pytest.raises(GraphInvariantError):  # self edge
        LayoutGraph(nodes=g.nodes, edges=((0, 0, RelationType.LeftOf),))


def test_layout_graph_dict_round_trip():
    g = _two_node_graph()
    assert LayoutGraph.from_dict(g.to_dict()).to_dict() == g.to_dict()


def test_room_box_geometry():
    box = RoomBox(x=10, y=20, w=4, h=6, room_id=3)
    assert (box.x0, box.x1, box.y0, box.y1) == (8, 12, 17, 23)
    assert box.area == 24
    assert RoomBox.from_corners(8, 17, 12, 23, room_id=3) == box
    assert RoomBox.from_dict(box.to_dict()) == box
