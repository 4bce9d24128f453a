"""Reader for the TU text layout of graph-classification datasets.

A dataset directory holds ``<DS>_A.txt`` (comma-separated 1-indexed edge
list), ``<DS>_graph_indicator.txt`` (one graph id per node line) and
optionally ``<DS>_graph_labels.txt``.  Node ids are remapped to dense
0-based ids per graph; duplicate and reversed edge lines are collapsed and
self-loops dropped, with counts reported.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graphs import Graph, GraphCollection


class FormatError(ValueError):
    """Malformed dataset content (bad ids, bad lines); carries the line number."""


@dataclass(frozen=True)
class TuParseReport:
    self_loops_dropped: int
    duplicate_edges_dropped: int


def _require(directory: Path, filename: str) -> Path:
    path = directory / filename
    if not path.is_file():
        raise FileNotFoundError(f"missing required dataset file: {path}")
    return path


def parse_tu_dataset(directory, name: str) -> GraphCollection:
    """Read ``<name>_A.txt`` / ``<name>_graph_indicator.txt`` (and labels,
    when present) from ``directory`` into a GraphCollection."""
    directory = Path(directory)
    a_path = _require(directory, f"{name}_A.txt")
    ind_path = _require(directory, f"{name}_graph_indicator.txt")

    indicator = []
    for lineno, raw in enumerate(ind_path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            indicator.append(int(line))
        except ValueError as exc:
            raise FormatError(f"{ind_path.name}:{lineno}: not an integer: {raw!r}") from exc
    if not indicator:
        raise FormatError(f"{ind_path.name}: empty indicator file")
    indicator_arr = np.asarray(indicator, dtype=np.int64)
    n_nodes = indicator_arr.size
    graph_ids = np.unique(indicator_arr)
    n_graphs = graph_ids.size
    graph_index = {int(gid): i for i, gid in enumerate(graph_ids)}

    # Dense per-graph node numbering, in ascending global node id order.
    local_id = np.zeros(n_nodes, dtype=np.int64)
    node_counts = np.zeros(n_graphs, dtype=np.int64)
    graph_of_node = np.array([graph_index[int(gid)] for gid in indicator_arr])
    for node in range(n_nodes):
        gi = graph_of_node[node]
        local_id[node] = node_counts[gi]
        node_counts[gi] += 1

    edge_sets: list[set[tuple[int, int]]] = [set() for _ in range(n_graphs)]
    self_loops = 0
    duplicates = 0
    for lineno, raw in enumerate(a_path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise FormatError(f"{a_path.name}:{lineno}: expected 'i, j', got {raw!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise FormatError(f"{a_path.name}:{lineno}: non-integer ids: {raw!r}") from exc
        if not (1 <= i <= n_nodes and 1 <= j <= n_nodes):
            raise FormatError(
                f"{a_path.name}:{lineno}: node id not in graph_indicator "
                f"(have {n_nodes} nodes): {raw!r}"
            )
        gi, gj = graph_of_node[i - 1], graph_of_node[j - 1]
        if gi != gj:
            raise FormatError(
                f"{a_path.name}:{lineno}: edge spans graphs "
                f"{int(graph_ids[gi])} and {int(graph_ids[gj])}"
            )
        if i == j:
            self_loops += 1
            continue
        u, v = int(local_id[i - 1]), int(local_id[j - 1])
        edge = (min(u, v), max(u, v))
        if edge in edge_sets[gi]:
            duplicates += 1
        else:
            edge_sets[gi].add(edge)

    graphs = [
        Graph.from_edges(int(node_counts[gi]), sorted(edge_sets[gi]))
        for gi in range(n_graphs)
    ]

    labels = None
    labels_path = directory / f"{name}_graph_labels.txt"
    if labels_path.is_file():
        labels = []
        for lineno, raw in enumerate(labels_path.read_text().splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                labels.append(int(float(line)))
            except ValueError as exc:
                raise FormatError(
                    f"{labels_path.name}:{lineno}: not a number: {raw!r}"
                ) from exc
        if len(labels) != n_graphs:
            raise FormatError(
                f"{labels_path.name}: {len(labels)} labels for {n_graphs} graphs"
            )

    report = TuParseReport(
        self_loops_dropped=self_loops, duplicate_edges_dropped=duplicates
    )
    return GraphCollection(graphs=graphs, labels=labels, name=name, report=report)
