"""Random-centre graph renormalisation.

Centres are drawn uniformly from the not-yet-covered vertices (seeded
SplitMix64; pick = next_u64 mod count over the sorted remaining list).
Each centre absorbs every remaining vertex within ``r`` hops (full-graph
metric) into one supervertex; supervertices are connected iff some
original edge crosses their blocks.  The whole procedure is a
deterministic function of (graph, radius, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boxdim import estimate_dimension
from .graphs import Graph, bfs_distances, disjoint_union
from .rng import SplitMix64

DEFAULT_RADIUS = 1


@dataclass(frozen=True)
class RenormResult:
    """Renormalised graph plus the vertex -> supervertex assignment."""

    super_graph: Graph
    assignment: np.ndarray
    radius: int
    seed: int

    @property
    def blocks(self) -> list[np.ndarray]:
        return [
            np.flatnonzero(self.assignment == i)
            for i in range(self.super_graph.n_vertices)
        ]


@dataclass(frozen=True)
class AugmentedView:
    """Disjoint union of a graph with its renormalisation."""

    graph: Graph
    original_size: int
    renorm_size: int


@dataclass(frozen=True)
class DeltaSample:
    """Per-graph record of the dimension gap after one renormalisation.

    ``gated`` samples (input graph below the diameter gate, or a
    renormalised graph that falls below it) are recorded but must be
    excluded from statistics.
    """

    graph_id: int
    diameter: int
    dim_g: float
    dim_r: float
    delta: float
    gated: bool


def renormalise(g: Graph, r: int, seed: int) -> RenormResult:
    """Collapse random radius-r balls into supervertices until every vertex
    is assigned; connect supervertices that share a crossing edge."""
    if r < 1:
        raise ValueError("radius must be >= 1 (r=0 would be the identity)")
    n = g.n_vertices
    if n == 0:
        raise ValueError("cannot renormalise an empty graph")
    rng = SplitMix64(seed)
    remaining = np.arange(n, dtype=np.int64)
    assignment = np.full(n, -1, dtype=np.int64)
    block_id = 0
    while remaining.size:
        centre = int(remaining[rng.next_below(remaining.size)])
        dist = bfs_distances(g, centre, max_depth=r)
        in_ball = dist >= 0
        block = remaining[in_ball[remaining]]
        assignment[block] = block_id
        block_id += 1
        remaining = remaining[~in_ball[remaining]]
    edges = g.edges_array()
    if len(edges):
        bu = assignment[edges[:, 0]]
        bv = assignment[edges[:, 1]]
        cross = bu != bv
        su = np.minimum(bu[cross], bv[cross])
        sv = np.maximum(bu[cross], bv[cross])
        super_edges = np.unique(np.column_stack((su, sv)), axis=0)
    else:
        super_edges = np.empty((0, 2), dtype=np.int64)
    super_graph = Graph.from_edges(block_id, super_edges)
    return RenormResult(
        super_graph=super_graph, assignment=assignment, radius=r, seed=seed
    )


def augment(g: Graph, r: int, seed: int) -> AugmentedView:
    """Augmentation view: the graph together with its renormalisation as a
    disjoint union (no cross edges)."""
    result = renormalise(g, r, seed)
    return AugmentedView(
        graph=disjoint_union(g, result.super_graph),
        original_size=g.n_vertices,
        renorm_size=result.super_graph.n_vertices,
    )


def delta_dimension(g: Graph, r: int, seed: int, *, graph_id: int = -1) -> DeltaSample:
    """Dimension gap dim(G) - dim(R(G)) for one random renormalisation.

    The input must pass the diameter gate; if the renormalised graph falls
    below the gate the sample is flagged so callers can exclude it.
    """
    est_g = estimate_dimension(g)
    if est_g.gated:
        raise ValueError(
            f"graph is gated (diameter {est_g.diameter_used} <= 9); "
            "no dimension gap is defined"
        )
    result = renormalise(g, r, seed)
    est_r = estimate_dimension(result.super_graph)
    return DeltaSample(
        graph_id=graph_id,
        diameter=int(est_g.diameter_used or 0),
        dim_g=est_g.dimension,
        dim_r=est_r.dimension,
        delta=est_g.dimension - est_r.dimension,
        gated=est_r.gated,
    )
