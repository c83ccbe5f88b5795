"""Interactive floorplan synthesis from layout graphs and boundaries."""

from .geometry import (
    Boundary,
    BoundaryError,
    TurningFunction,
    compute_turning_function,
    rotate_boundary,
    turning_distance,
)
from .layout import LayoutGraph, RelationType, RoomBox, RoomNode, RoomType
from .corpus import FloorplanRecord, load_corpus, save_corpus
from .retrieval import Constraints, retrieve
from .solver import SolverConfig, solve
from .vectorize import VectorFloorplan, export, import_json
from .pipeline import generate, generate_from_corpus, generate_from_record

__version__ = "0.1.0"

__all__ = [
    "Boundary",
    "BoundaryError",
    "Constraints",
    "FloorplanRecord",
    "LayoutGraph",
    "RelationType",
    "RoomBox",
    "RoomNode",
    "RoomType",
    "SolverConfig",
    "TurningFunction",
    "VectorFloorplan",
    "compute_turning_function",
    "export",
    "generate",
    "generate_from_corpus",
    "generate_from_record",
    "import_json",
    "load_corpus",
    "retrieve",
    "rotate_boundary",
    "save_corpus",
    "solve",
    "turning_distance",
    "__version__",
]
