"""Minimum Shared Edges routing toolkit.

Decides and witnesses MSE/DMSE instances (p s-t paths sharing at most k
edges), provides linear-time decision and constructive witnesses on bounded
grids, and compiles vertex-cover hardness gadgets and OR-compositions into
concrete, verifiable instances.
"""

from .core import (
    DIRECTED,
    UNDIRECTED,
    Expansion,
    FormatError,
    Graph,
    Instance,
    PathSeq,
    Solution,
    SuperEdge,
    Verdict,
    check_grid_embedding,
    distance,
    expand_chains,
    parse_instance,
    parse_solution,
    serialize_instance,
    serialize_solution,
    verify_solution,
)

__all__ = [
    "DIRECTED",
    "UNDIRECTED",
    "Expansion",
    "FormatError",
    "Graph",
    "Instance",
    "PathSeq",
    "Solution",
    "SuperEdge",
    "Verdict",
    "check_grid_embedding",
    "distance",
    "expand_chains",
    "parse_instance",
    "parse_solution",
    "serialize_instance",
    "serialize_solution",
    "verify_solution",
]
