"""Shared, independent oracles for the test suite.

Everything here deliberately avoids the library's fast paths: distances by
Floyd-Warshall, coverings by direct argmax transcription over sets, and the
minimum cover by exhaustive bitmask DP.  These stay slow and obvious so
they can judge the optimised implementations.
"""

from __future__ import annotations

import functools
import random

import numpy as np

from fractalkit import Graph

INF = float("inf")


def floyd_warshall(g: Graph) -> np.ndarray:
    n = g.n_vertices
    dist = np.full((n, n), INF)
    np.fill_diagonal(dist, 0.0)
    for u, v in g.edges_array():
        dist[u, v] = dist[v, u] = 1.0
    for k in range(n):
        dist = np.minimum(dist, dist[:, k : k + 1] + dist[k : k + 1, :])
    return dist


def brute_diameter_largest_component(g: Graph) -> int:
    dist = floyd_warshall(g)
    n = g.n_vertices
    # components from reachability
    seen = np.zeros(n, dtype=bool)
    best = -1
    best_idx: np.ndarray | None = None
    for v in range(n):
        if seen[v]:
            continue
        comp = np.flatnonzero(dist[v] < INF)
        seen[comp] = True
        if comp.size > best:
            best = comp.size
            best_idx = comp
    sub = dist[np.ix_(best_idx, best_idx)]
    return int(sub.max())


def naive_greedy_count(g: Graph, scale: int) -> int:
    """Direct transcription of the covering rule over python sets."""
    n = g.n_vertices
    r = scale // 2 if scale % 2 == 0 else (scale - 1) // 2
    dist = floyd_warshall(g)
    ball = dist <= r
    edges = [(int(u), int(v)) for u, v in g.edges_array()]
    remaining = set(range(n))
    count = 0
    while remaining:
        box = None
        if scale % 2 == 1:
            best = -1
            for u, v in edges:  # edges are lexicographically sorted
                if u in remaining and v in remaining:
                    cand = {w for w in remaining if ball[u][w] or ball[v][w]}
                    if len(cand) > best:
                        best, box = len(cand), cand
        if box is None:
            best = -1
            for v in sorted(remaining):
                cand = {w for w in remaining if ball[v][w]}
                if len(cand) > best:
                    best, box = len(cand), cand
        remaining -= box
        count += 1
    return count


def minimum_cover_size(g: Graph, scale: int) -> int:
    """Exact minimum number of diameter-<=scale sets covering V
    (full-graph metric), by DP over vertex bitmasks.  n <= ~14."""
    n = g.n_vertices
    if n > 16:
        raise ValueError("exhaustive cover oracle is for small graphs")
    dist = floyd_warshall(g)
    ok_sets = []
    for mask in range(1, 1 << n):
        members = [v for v in range(n) if mask >> v & 1]
        diam = max(
            (dist[a][b] for i, a in enumerate(members) for b in members[i + 1 :]),
            default=0.0,
        )
        if diam <= scale:
            ok_sets.append(mask)
    # keep only maximal sets; any cover can be enlarged to use them
    maximal = [
        m
        for m in ok_sets
        if not any(m != other and m & other == m for other in ok_sets)
    ]
    by_pivot: dict[int, list[int]] = {v: [] for v in range(n)}
    for m in maximal:
        for v in range(n):
            if m >> v & 1:
                by_pivot[v].append(m)

    @functools.lru_cache(maxsize=None)
    def solve(mask: int) -> int:
        if mask == 0:
            return 0
        pivot = (mask & -mask).bit_length() - 1
        return 1 + min(solve(mask & ~s) for s in by_pivot[pivot])

    return solve((1 << n) - 1)


def random_connected_graph(rng: random.Random, n_lo: int, n_hi: int, chord_frac: float = 0.3) -> Graph:
    """Random tree plus a few chords; always connected."""
    n = rng.randint(n_lo, n_hi)
    edges = {(rng.randrange(i), i) for i in range(1, n)}
    for _ in range(int(n * chord_frac)):
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(n, edges)


def random_graph_maybe_disconnected(rng: random.Random, n_lo: int, n_hi: int) -> Graph:
    n = rng.randint(n_lo, n_hi)
    edges = set()
    for i in range(1, n):
        if rng.random() < 0.85:  # skip some attachments -> components
            edges.add((rng.randrange(i), i))
    for _ in range(n // 4):
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(n, edges)


def check_covering_valid(g: Graph, cov) -> None:
    """Assert the partition + centred-ball invariants of one covering."""
    import fractalkit as fk

    n = g.n_vertices
    labels = cov.labels
    assert labels.min() >= 0, "not a partition: unassigned vertex"
    r = cov.scale // 2 if cov.scale % 2 == 0 else (cov.scale - 1) // 2
    seen = 0
    for box_id, centre in enumerate(cov.centres):
        members = np.flatnonzero(labels == box_id)
        assert members.size > 0
        seen += members.size
        allowed = np.zeros(n, dtype=bool)
        for c in centre:
            d = fk.bfs_distances(g, int(c), max_depth=r)
            allowed |= d >= 0
        assert allowed[members].all(), "box member outside its centre ball(s)"
        if len(centre) == 2:
            u, v = centre
            assert v in g.neighbors(u), "pair centres must be adjacent"
    assert seen == n, "boxes do not partition the vertex set"


def plain_infonce(sim: np.ndarray, tau: float) -> np.ndarray:
    """Reference InfoNCE with the positive pair excluded from the sum."""
    n = sim.shape[0]
    out = np.empty(n)
    for i in range(n):
        negatives = np.delete(sim[i], i)
        out[i] = -sim[i, i] / tau + np.log(np.exp(negatives / tau).sum())
    return out
