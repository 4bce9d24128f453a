"""Immutable undirected graphs in compressed-adjacency form, plus the
shortest-path primitives everything else is built on.

Vertex ids are dense 0-based integers.  Graphs are simple (no self-loops,
no parallel edges) and unweighted; all distances are hop counts.
Disconnected inputs are legal: ``diameter`` works on the largest connected
component and reports a flag, because several downstream quantities
(box counts, dimensions) are meaningless across components.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

#: Sentinel used in distance arrays for unreachable vertices.
UNREACHABLE = -1


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph stored as CSR adjacency.

    ``indptr`` has length ``n+1``; the neighbours of vertex ``v`` are
    ``indices[indptr[v]:indptr[v+1]]``, sorted ascending.  Instances are
    immutable and safe to share across threads.
    """

    indptr: np.ndarray
    indices: np.ndarray

    @property
    def n_vertices(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return int(self.indices.size) // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def edges_array(self) -> np.ndarray:
        """All edges as an (E, 2) array with u < v, sorted lexicographically."""
        n = self.n_vertices
        rows = np.repeat(np.arange(n, dtype=self.indices.dtype), self.degrees)
        mask = self.indices > rows
        return np.column_stack((rows[mask], self.indices[mask]))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Graph(n={self.n_vertices}, m={self.edge_count})"

    @staticmethod
    def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph from an edge list.

        Raises ``ValueError`` on self-loops, duplicate edges or vertex ids
        outside ``0..n-1``.  Callers that ingest dirty data (e.g. the TU
        parser) must clean the list first.
        """
        if n < 0:
            raise ValueError("vertex count must be >= 0")
        edge_arr = np.asarray(list(edges), dtype=np.int64)
        if edge_arr.size == 0:
            edge_arr = edge_arr.reshape(0, 2)
        if edge_arr.ndim != 2 or edge_arr.shape[1] != 2:
            raise ValueError("edges must be (u, v) pairs")
        if edge_arr.size and (edge_arr.min() < 0 or edge_arr.max() >= n):
            raise ValueError(f"edge endpoint out of range for n={n}")
        if edge_arr.size and np.any(edge_arr[:, 0] == edge_arr[:, 1]):
            raise ValueError("self-loops are not allowed")
        u = np.minimum(edge_arr[:, 0], edge_arr[:, 1])
        v = np.maximum(edge_arr[:, 0], edge_arr[:, 1])
        key = u * n + v
        if np.unique(key).size != key.size:
            raise ValueError("duplicate edges are not allowed")
        heads = np.concatenate((u, v))
        tails = np.concatenate((v, u))
        order = np.lexsort((tails, heads))
        heads, tails = heads[order], tails[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, heads + 1, 1)
        np.cumsum(indptr, out=indptr)
        return Graph(indptr=indptr, indices=tails.astype(np.int64))


@dataclass(frozen=True)
class ComponentInfo:
    """Connected-component labelling; ids are assigned in order of the
    first-seen vertex, so they are deterministic."""

    labels: np.ndarray
    component_count: int
    largest_component_vertices: np.ndarray


@dataclass
class GraphCollection:
    """An ordered list of graphs with optional integer labels."""

    graphs: list[Graph]
    labels: list[int] | None = None
    name: str = ""
    report: object | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.labels is not None and len(self.labels) != len(self.graphs):
            raise ValueError("labels length must match number of graphs")

    def __len__(self) -> int:
        return len(self.graphs)


def _gather_neighbors(g: Graph, frontier: np.ndarray) -> np.ndarray:
    """Concatenated neighbour lists of the frontier (vectorised CSR gather)."""
    starts = g.indptr[frontier]
    counts = g.indptr[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=g.indices.dtype)
    offsets = np.repeat(starts, counts)
    within = np.arange(total, dtype=np.int64) - np.repeat(
        np.cumsum(counts) - counts, counts
    )
    return g.indices[offsets + within]


def bfs_distances(g: Graph, source: int, max_depth: int | None = None) -> np.ndarray:
    """Hop counts from ``source``; unreachable vertices get ``UNREACHABLE``.

    ``max_depth`` truncates the search: vertices further than that are
    reported unreachable (used for ball computations).
    """
    n = g.n_vertices
    if not 0 <= source < n:
        raise ValueError(f"source {source} out of range for n={n}")
    dist = np.full(n, UNREACHABLE, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    depth = 0
    while frontier.size and (max_depth is None or depth < max_depth):
        nbrs = _gather_neighbors(g, frontier)
        new = nbrs[dist[nbrs] == UNREACHABLE]
        if new.size == 0:
            break
        new = np.unique(new)
        depth += 1
        dist[new] = depth
        frontier = new
    return dist


def ball(g: Graph, source: int, radius: int) -> np.ndarray:
    """Sorted vertices within ``radius`` hops of ``source`` (inclusive)."""
    dist = bfs_distances(g, source, max_depth=radius)
    return np.flatnonzero(dist >= 0)


def components(g: Graph) -> ComponentInfo:
    n = g.n_vertices
    labels = np.full(n, -1, dtype=np.int64)
    count = 0
    for v in range(n):
        if labels[v] >= 0:
            continue
        labels[v] = count
        frontier = np.array([v], dtype=np.int64)
        while frontier.size:
            nbrs = _gather_neighbors(g, frontier)
            new = np.unique(nbrs[labels[nbrs] < 0])
            labels[new] = count
            frontier = new
        count += 1
    if count == 0:
        largest = np.empty(0, dtype=np.int64)
    else:
        sizes = np.bincount(labels, minlength=count)
        best = int(np.argmax(sizes))  # ties: lowest component id
        largest = np.flatnonzero(labels == best)
    return ComponentInfo(labels=labels, component_count=count, largest_component_vertices=largest)


def induced_subgraph(g: Graph, vertices: np.ndarray) -> Graph:
    """Subgraph induced by ``vertices`` (sorted ids), relabelled 0..k-1
    in the same order."""
    vertices = np.asarray(vertices, dtype=np.int64)
    keep = np.zeros(g.n_vertices, dtype=bool)
    keep[vertices] = True
    relabel = np.full(g.n_vertices, -1, dtype=np.int64)
    relabel[vertices] = np.arange(vertices.size)
    edges = g.edges_array()
    if edges.size:
        mask = keep[edges[:, 0]] & keep[edges[:, 1]]
        edges = relabel[edges[mask]]
    return Graph.from_edges(int(vertices.size), edges)


def _ifub_diameter(g: Graph) -> int:
    """Exact diameter of a connected graph.

    Trees get the classic double BFS sweep (exact there).  Everything else
    uses the iterative fringe upper bound scheme: BFS from a max-degree
    root, then sweep fringe levels downward, tightening a lower bound with
    per-vertex eccentricities until it beats the bound ``2*(level-1)``.
    Worst case O(n) BFS runs; on the families handled here, a handful.
    """
    n = g.n_vertices
    if n == 1:
        return 0
    if g.edge_count == n - 1:  # connected + n-1 edges == tree
        far = int(np.argmax(bfs_distances(g, 0)))
        return int(bfs_distances(g, far).max())
    root = int(np.argmax(g.degrees))
    levels = bfs_distances(g, root)
    ecc_root = int(levels.max())
    lb = ecc_root
    i = ecc_root
    # Pairs not touching a processed fringe level lie within levels <= i,
    # hence at distance <= 2i; stop once the lower bound reaches that.
    while i > 0 and lb < 2 * i:
        for v in np.flatnonzero(levels == i):
            ecc = int(bfs_distances(g, int(v)).max())
            if ecc > lb:
                lb = ecc
        i -= 1
    return lb


def diameter(g: Graph) -> tuple[int, bool]:
    """Exact diameter and a flag that is true iff the graph was disconnected
    (in which case the value refers to the largest component)."""
    if g.n_vertices == 0:
        raise ValueError("diameter of an empty graph is undefined")
    info = components(g)
    if info.component_count > 1:
        sub = induced_subgraph(g, info.largest_component_vertices)
        return _ifub_diameter(sub), True
    return _ifub_diameter(g), False


def disjoint_union(g1: Graph, g2: Graph) -> Graph:
    """Concatenate two graphs; ``g2``'s vertex ids are offset by ``g1.n``."""
    n1 = g1.n_vertices
    indptr = np.concatenate((g1.indptr, g1.indptr[-1] + g2.indptr[1:]))
    indices = np.concatenate((g1.indices, g2.indices + n1))
    return Graph(indptr=indptr, indices=indices)


def to_canonical_dict(g: Graph) -> dict:
    """Canonical JSON form: ``{"n": int, "edges": [[u, v], ...]}`` with u < v,
    edges sorted lexicographically."""
    return {"n": g.n_vertices, "edges": g.edges_array().tolist()}


def graph_to_json(g: Graph) -> str:
    return json.dumps(to_canonical_dict(g), separators=(",", ":")) + "\n"


def graph_from_dict(obj: dict) -> Graph:
    if not isinstance(obj, dict) or "n" not in obj or "edges" not in obj:
        raise ValueError('graph JSON must be an object with "n" and "edges"')
    return Graph.from_edges(int(obj["n"]), [(int(u), int(v)) for u, v in obj["edges"]])


def graph_from_json(text: str) -> Graph:
    return graph_from_dict(json.loads(text))


def load_graph_json(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return graph_from_json(fh.read())


def save_graph_json(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(graph_to_json(g))
