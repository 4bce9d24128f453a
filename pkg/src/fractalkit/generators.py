"""Deterministic synthetic graph families.

The plain families (paths, cycles, grids, complete graphs, balanced trees)
serve as oracles with known metric structure.  The iterated-graph-system
generator grows self-similar graphs by edge substitution and is the family
used to probe dimension statistics at increasing diameter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Graph, components


def path(n: int) -> Graph:
    if n < 1:
        raise ValueError("path needs n >= 1")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def grid(w: int, h: int) -> Graph:
    """w x h lattice with 4-neighbourhood; vertex (r, c) has id r*w + c."""
    if w < 1 or h < 1:
        raise ValueError("grid needs w, h >= 1")
    edges = []
    for r in range(h):
        for c in range(w):
            v = r * w + c
            if c + 1 < w:
                edges.append((v, v + 1))
            if r + 1 < h:
                edges.append((v, v + w))
    return Graph.from_edges(w * h, edges)


def complete(n: int) -> Graph:
    if n < 1:
        raise ValueError("complete needs n >= 1")
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def balanced_tree(branching: int, depth: int) -> Graph:
    """Rooted tree with ``branching`` children per node and ``depth`` levels
    below the root; ids are assigned in BFS order."""
    if branching < 1:
        raise ValueError("balanced_tree needs branching >= 1")
    if depth < 0:
        raise ValueError("balanced_tree needs depth >= 0")
    edges = []
    level = [0]
    next_id = 1
    for _ in range(depth):
        new_level = []
        for parent in level:
            for _ in range(branching):
                edges.append((parent, next_id))
                new_level.append(next_id)
                next_id += 1
        level = new_level
    return Graph.from_edges(next_id, edges)


@dataclass(frozen=True)
class MotifSpec:
    """Substitution rule: every edge is replaced by a copy of ``motif`` with
    ``anchor_a``/``anchor_b`` glued onto the edge's endpoints."""

    motif: Graph
    anchor_a: int
    anchor_b: int

    def __post_init__(self) -> None:
        n = self.motif.n_vertices
        if not (0 <= self.anchor_a < n and 0 <= self.anchor_b < n):
            raise ValueError("anchors must be valid motif vertex ids")
        if self.anchor_a == self.anchor_b:
            raise ValueError("anchors must be distinct")
        if components(self.motif).component_count != 1:
            raise ValueError("motif must be connected")


@dataclass(frozen=True)
class IgsGraph:
    graph: Graph
    iteration: int
    motif: MotifSpec


def default_motif() -> MotifSpec:
    """H-shaped motif: path a-x-y-b with pendant edges x-p and y-q.

    Vertices 0..5 = (a, x, y, b, p, q); anchors a=0, b=3; 5 edges.
    Iterating it from a single edge yields visibly fractal graphs with a
    non-integer estimated dimension (log 5 / log 3 asymptotically).
    """
    motif = Graph.from_edges(6, [(0, 1), (1, 2), (2, 3), (1, 4), (2, 5)])
    return MotifSpec(motif=motif, anchor_a=0, anchor_b=3)


def igs_iterate(motif: MotifSpec, k: int) -> IgsGraph:
    """Iterated graph system: start from a single edge and substitute every
    edge by the motif, ``k`` times.

    Edges are processed in sorted order and fresh interior vertices are
    allocated ascending per processed edge, so vertex numbering is
    bit-reproducible.  Edge count after k steps is E(motif)**k.
    """
    if k < 0:
        raise ValueError("iteration count must be >= 0")
    g = path(2)  # the seed: a single edge
    interior = [
        v for v in range(motif.motif.n_vertices) if v not in (motif.anchor_a, motif.anchor_b)
    ]
    motif_edges = motif.motif.edges_array()
    for _ in range(k):
        edges = g.edges_array()
        n_old = g.n_vertices
        mapping = np.empty(motif.motif.n_vertices, dtype=np.int64)
        new_edges = np.empty((len(edges) * len(motif_edges), 2), dtype=np.int64)
        pos = 0
        for e_idx, (u, v) in enumerate(edges):
            mapping[motif.anchor_a] = u
            mapping[motif.anchor_b] = v
            base = n_old + e_idx * len(interior)
            for j, w in enumerate(interior):
                mapping[w] = base + j
            new_edges[pos : pos + len(motif_edges)] = mapping[motif_edges]
            pos += len(motif_edges)
        g = Graph.from_edges(n_old + len(edges) * len(interior), new_edges)
    return IgsGraph(graph=g, iteration=k, motif=motif)
