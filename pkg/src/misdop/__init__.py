"""misdop: exact geometry and the container-DP pipeline for maximum
independent sets of d-directional convex polygons."""

from .polygon import DirectionSystem, Polygon, make_polygon, intersects, touches
from .instance import Instance, generate, parse, serialize, conflict_graph

__all__ = [
    "DirectionSystem", "Polygon", "make_polygon", "intersects", "touches",
    "Instance", "generate", "parse", "serialize", "conflict_graph",
]
__version__ = "0.1.0"
