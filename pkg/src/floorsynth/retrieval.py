"""Constraint filtering and boundary-similarity ranking over a corpus.

Ranking is a linear scan of door-anchored turning distances; the batch
scorer evaluates the exact piecewise-constant L2 integral against the
whole corpus with a handful of vectorized passes, which keeps an 80K
scan well under the latency budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import FloorplanRecord
from .geometry import Boundary, TurningFunction, compute_turning_function
from .layout import BEDROOM_TYPES, GRID_K, RoomType

RoomSelector = "RoomType | str"  # a RoomType or the "Bedroom" cluster
BEDROOM = "Bedroom"


class ConstraintError(ValueError):
    pass


def _norm_selector(sel) -> "RoomType | str":
    if isinstance(sel, RoomType):
        return sel
    if isinstance(sel, str):
        if sel == BEDROOM:
            return BEDROOM
        try:
            return RoomType[sel]
        except KeyError as exc:
            raise ConstraintError(f"unknown room selector {sel!r}") from exc
    raise ConstraintError(f"unknown room selector {sel!r}")


def _matches(rtype: RoomType, sel) -> bool:
    if sel == BEDROOM:
        return rtype in BEDROOM_TYPES
    return rtype == sel


@dataclass(frozen=True)
class Constraints:
    """User constraints; every field optional, empty means no filtering.

    ``room_counts`` maps a room type (or "Bedroom") to an inclusive
    (min, max) occurrence range.  Location and adjacency selectors
    treat all bedroom variants as the "Bedroom" cluster when that
    selector is used; count constraints may still target fine types.
    """

    room_counts: tuple = ()
    required_locations: tuple = ()
    required_adjacencies: tuple = ()

    def __post_init__(self):
        counts = []
        for sel, rng in dict(self.room_counts).items() if isinstance(self.room_counts, dict) else self.room_counts:
            lo, hi = int(rng[0]), int(rng[1])
            if lo > hi or lo < 0:
                raise ConstraintError(f"bad count range {rng} for {sel}")
            counts.append((_norm_selector(sel), (lo, hi)))
        locs = []
        for sel, cell in self.required_locations:
            r, c = int(cell[0]), int(cell[1])
            if not (0 <= r < GRID_K and 0 <= c < GRID_K):
                raise ConstraintError(f"grid cell {cell} outside the {GRID_K}x{GRID_K} grid")
            locs.append((_norm_selector(sel), (r, c)))
        adjs = [(_norm_selector(a), _norm_selector(b)) for a, b in self.required_adjacencies]
        object.__setattr__(self, "room_counts", tuple(counts))
        object.__setattr__(self, "required_locations", tuple(locs))
        object.__setattr__(self, "required_adjacencies", tuple(adjs))

    @property
    def empty(self) -> bool:
        return not (self.room_counts or self.required_locations or self.required_adjacencies)

    def satisfied_by(self, record: FloorplanRecord) -> bool:
        nodes = record.graph.nodes
        for sel, (lo, hi) in self.room_counts:
            n = sum(1 for node in nodes if _matches(node.rtype, sel))
            if not (lo <= n <= hi):
                return False
        for sel, cell in self.required_locations:
            if not any(_matches(node.rtype, sel) and node.grid_cell == cell for node in nodes):
                return False
        by_id = {node.id: node for node in nodes}
        for sel_a, sel_b in self.required_adjacencies:
            found = False
            for s, d, _rel in record.graph.edges:
                ta, tb = by_id[s].rtype, by_id[d].rtype
                if (_matches(ta, sel_a) and _matches(tb, sel_b)) or (
                    _matches(ta, sel_b) and _matches(tb, sel_a)
                ):
                    found = True
                    break
            if not found:
                return False
        return True

    def to_dict(self) -> dict:
        def name(sel):
            return sel if isinstance(sel, str) else sel.name

        return {
            "room_counts": {name(s): list(r) for s, r in self.room_counts},
            "required_locations": [[name(s), list(c)] for s, c in self.required_locations],
            "required_adjacencies": [[name(a), name(b)] for a, b in self.required_adjacencies],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Constraints":
        return cls(
            room_counts=tuple((k, tuple(v)) for k, v in d.get("room_counts", {}).items()),
            required_locations=tuple((s, tuple(c)) for s, c in d.get("required_locations", [])),
            required_adjacencies=tuple((a, b) for a, b in d.get("required_adjacencies", [])),
        )


def filter(corpus: list[FloorplanRecord], c: Constraints) -> list[FloorplanRecord]:
    """Records satisfying every constraint clause (all of them if empty)."""
    if c.empty:
        return list(corpus)
    return [r for r in corpus if c.satisfied_by(r)]


class TurningIndex:
    """Padded breakpoint arrays for batch turning-distance evaluation."""

    def __init__(self, functions: list[TurningFunction]):
        self.n = len(functions)
        k = max((len(f.breakpoints) for f in functions), default=1) + 1
        self.fracs = np.ones((self.n, k))
        self.angles = np.zeros((self.n, k))
        for i, f in enumerate(functions):
            bp = f.breakpoints
            m = len(bp)
            self.fracs[i, :m] = [p for p, _ in bp]
            self.angles[i, :m] = [a for _, a in bp]
            self.angles[i, m:] = bp[-1][1]
        # segment widths of each row's step function, last segment ends at 1
        nxt = np.hstack([self.fracs[:, 1:], np.ones((self.n, 1))])
        self.widths = np.maximum(nxt - self.fracs, 0.0)
        self.self_sq = (self.angles**2 * self.widths).sum(axis=1)

    def distances(self, q: TurningFunction) -> np.ndarray:
        """Exact L2 distances of every indexed function to the query."""
        qf = np.array([p for p, _ in q.breakpoints])
        qa = np.array([a for _, a in q.breakpoints])
        q_widths = np.diff(np.append(qf, 1.0))
        q_sq = float((qa**2 * q_widths).sum())
        # cumulative integral of the query step function
        cum = np.concatenate([[0.0], np.cumsum(qa * np.clip(q_widths, 0, None))])

        def q_integral(x: np.ndarray) -> np.ndarray:
            idx = np.searchsorted(qf, x, side="right") - 1
            idx = np.clip(idx, 0, len(qf) - 1)
            return cum[idx] + qa[idx] * (x - qf[idx])

        left = self.fracs
        right = np.hstack([self.fracs[:, 1:], np.ones((self.n, 1))])
        cross = (self.angles * (q_integral(right) - q_integral(left))).sum(axis=1)
        sq = self.self_sq + q_sq - 2.0 * cross
        return np.sqrt(np.maximum(sq, 0.0))


def rank(
    candidates: list[FloorplanRecord],
    query: Boundary,
    index: TurningIndex | None = None,
) -> list[FloorplanRecord]:
    """Candidates ordered by ascending turning distance; ties by record id.

    Pass a prebuilt ``TurningIndex`` over the same candidates to amortize
    index construction across queries.
    """
    return [rec for rec, _ in rank_with_distances(candidates, query, index)]


def rank_with_distances(
    candidates: list[FloorplanRecord],
    query: Boundary,
    index: TurningIndex | None = None,
) -> list[tuple[FloorplanRecord, float]]:
    if not candidates:
        return []
    q = compute_turning_function(query)
    if index is None:
        index = TurningIndex([r.turning for r in candidates])
    dists = index.distances(q)
    order = sorted(range(len(candidates)), key=lambda i: (dists[i], candidates[i].id))
    return [(candidates[i], float(dists[i])) for i in order]


def retrieve(
    corpus: list[FloorplanRecord], query: Boundary, c: Constraints, k: int
) -> list[FloorplanRecord]:
    """filter -> rank -> truncate to the top k."""
    if k <= 0:
        return []
    return rank(filter(corpus, c), query)[:k]
