import numpy as np
import pytest

from floorsynth.geometry import compute_turning_function, turning_distance
from floorsynth.retrieval import (
    BEDROOM,
    ConstraintError,
    Constraints,
    TurningIndex,
    filter as filter_records,
    rank,
    rank_with_distances,
    retrieve,
)
from floorsynth.layout import RoomType


def test_constraints_validation():
    with pytest.raises(ConstraintError):
        Constraints(room_counts=(("Garage", (1, 2)),))
    with pytest.raises(ConstraintError):
        Constraints(room_counts=(("Kitchen", (3, 1)),))
    with pytest.raises(ConstraintError):
        Constraints(required_locations=(("Kitchen", (7, 0)),))


def test_constraints_dict_round_trip():
    c = Constraints(
        room_counts=(("Bedroom", (2, 4)), ("Bathroom", (1, 1))),
        required_locations=(("Kitchen", (0, 2)),),
        required_adjacencies=(("LivingRoom", "Bedroom"),),
    )
    assert Constraints.from_dict(c.to_dict()) == c


def test_empty_constraints_pass_everything(corpus20):
    assert filter_records(corpus20, Constraints()) == list(corpus20)


def test_room_count_filter(corpus20):
    c = Constraints(room_counts=((RoomType.Kitchen, (1, 99)),))
    kept = filter_records(corpus20, c)
    assert kept
    for rec in kept:
        assert any(n.rtype == RoomType.Kitchen for n in rec.graph.nodes)
    dropped = set(r.id for r in corpus20) - set(r.id for r in kept)
    for rec in corpus20:
        if rec.id in dropped:
            assert not any(n.rtype == RoomType.Kitchen for n in rec.graph.nodes)


def test_bedroom_cluster_counts(corpus20):
    from floorsynth.layout import BEDROOM_TYPES

    c = Constraints(room_counts=((BEDROOM, (1, 99)),))
    for rec in filter_records(corpus20, c):
        assert any(n.rtype in BEDROOM_TYPES for n in rec.graph.nodes)


def test_adjacency_filter_is_undirected(corpus20):
    a = Constraints(required_adjacencies=(("LivingRoom", "Kitchen"),))
    b = Constraints(required_adjacencies=(("Kitchen", "LivingRoom"),))
    assert [r.id for r in filter_records(corpus20, a)] == [
        r.id for r in filter_records(corpus20, b)
    ]


def test_batch_distances_match_pairwise(corpus60):
    # oracle: the one-pair integral evaluated per record
    query = compute_turning_function(corpus60[7].boundary)
    index = TurningIndex([r.turning for r in corpus60])
    batch = index.distances(query)
    pairwise = np.array([turning_distance(query, r.turning) for r in corpus60])
    assert np.abs(batch - pairwise).max() < 1e-9


def test_rank_self_first(corpus60):
    for rec in corpus60[:10]:
        ranked = rank(list(corpus60), rec.boundary)
        assert turning_distance(
            compute_turning_function(rec.boundary), ranked[0].turning
        ) == pytest.approx(0.0, abs=1e-5)
        top = rank_with_distances(list(corpus60), rec.boundary)[0]
        assert top[1] == pytest.approx(0.0, abs=1e-5)


def test_rank_ties_break_by_id(corpus60):
    # ranking the same corpus twice gives identical, deterministic order
    ranked1 = [r.id for r in rank(list(corpus60), corpus60[0].boundary)]
    ranked2 = [r.id for r in rank(list(reversed(corpus60)), corpus60[0].boundary)]
    assert ranked1 == ranked2


def test_retrieve_truncates(corpus60):
    got = retrieve(list(corpus60), corpus60[0].boundary, Constraints(), k=5)
    assert len(got) == 5
    assert retrieve(list(corpus60), corpus60[0].boundary, Constraints(), k=0) == []
