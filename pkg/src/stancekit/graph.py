"""Weighted directed endorsement (retweet) graph."""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp


class EndorsementGraph:
    """Directed graph with positive integer edge weights; an edge a -> b means a retweeted b.

    Nodes are kept in sorted order so that every derived array is deterministic.
    """

    def __init__(self, edges: Mapping[tuple[str, str], int] | None = None, nodes: Iterable[str] = ()):
        self._edges: dict[tuple[str, str], int] = {}
        self._out: dict[str, dict[str, int]] = defaultdict(dict)
        self._in: dict[str, dict[str, int]] = defaultdict(dict)
        node_set = set(nodes)
        for (a, b), w in (edges or {}).items():
            if a == b:
                raise ValueError(f"self-loop on {a!r}")
            if w <= 0:
                raise ValueError(f"non-positive weight on {a!r}->{b!r}")
            self._edges[(a, b)] = int(w)
            self._out[a][b] = int(w)
            self._in[b][a] = int(w)
            node_set.update((a, b))
        self.nodes: list[str] = sorted(node_set)
        self.index: dict[str, int] = {u: i for i, u in enumerate(self.nodes)}

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, node) -> bool:
        return node in self.index

    def __eq__(self, other) -> bool:
        return isinstance(other, EndorsementGraph) and self.nodes == other.nodes and self._edges == other._edges

    def __repr__(self) -> str:
        return f"EndorsementGraph(n_nodes={len(self.nodes)}, n_edges={len(self._edges)})"

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def edges(self) -> list[tuple[str, str, int]]:
        return sorted((a, b, w) for (a, b), w in self._edges.items())

    def weight(self, a: str, b: str) -> int:
        return self._edges.get((a, b), 0)

    def out_neighbors(self, u: str) -> dict[str, int]:
        return self._out.get(u, {})

    def in_neighbors(self, u: str) -> dict[str, int]:
        return self._in.get(u, {})

    def in_degree(self, u: str) -> int:
        return len(self._in.get(u, ()))

    def out_degree(self, u: str) -> int:
        return len(self._out.get(u, ()))

    def adjacency(self) -> sp.csr_matrix:
        """Directed weighted adjacency in node-index order."""
        n = len(self.nodes)
        if not self._edges:
            return sp.csr_matrix((n, n), dtype=np.float64)
        rows, cols, vals = zip(*((self.index[a], self.index[b], w) for (a, b), w in self._edges.items()))
        return sp.csr_matrix((vals, (rows, cols)), shape=(n, n), dtype=np.float64)

    def symmetric_adjacency(self) -> sp.csr_matrix:
        """Undirected weights: w(a,b) + w(b,a)."""
        a = self.adjacency()
        s = (a + a.T).tocsr()
        s.sort_indices()
        return s

    def subgraph(self, members: Iterable[str]) -> "EndorsementGraph":
        """Induced subgraph: edges with both endpoints in ``members``."""
        keep = set(members) & set(self.index)
        edges = {(a, b): w for (a, b), w in self._edges.items() if a in keep and b in keep}
        return EndorsementGraph(edges, keep)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["source", "target", "weight"])
            w.writerows(self.edges())

    @classmethod
    def from_csv(cls, path: str | Path) -> "EndorsementGraph":
        edges = {}
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                edges[(row["source"], row["target"])] = int(row["weight"])
        return cls(edges)


def build_endorsement_graph(posts, users: Iterable[str] | None = None, min_weight: int = 2) -> EndorsementGraph:
    """Count retweets between kept users and drop edges lighter than ``min_weight``.

    ``users=None`` keeps every author.
    """
    if min_weight < 1:
        raise ValueError("min_weight must be >= 1")
    kept = None if users is None else set(users)
    counts = Counter()
    for p in posts:
        a, b = p.user_id, p.retweeted_user_id
        if b is None or a == b:
            continue
        if kept is not None and (a not in kept or b not in kept):
            continue
        counts[(a, b)] += 1
    return EndorsementGraph({e: w for e, w in counts.items() if w >= min_weight})


def weak_components(g: EndorsementGraph) -> list[list[str]]:
    """Weakly connected components, largest first; ties by smallest member id."""
    if not g.nodes:
        return []
    from scipy.sparse.csgraph import connected_components

    _, labels = connected_components(g.adjacency(), directed=True, connection="weak")
    groups = defaultdict(list)
    for node, lab in zip(g.nodes, labels):
        groups[lab].append(node)
    comps = list(groups.values())  # members already sorted
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


def giant_component(g: EndorsementGraph) -> frozenset[str]:
    comps = weak_components(g)
    return frozenset(comps[0]) if comps else frozenset()


def out_edge_induced_subgraph(g: EndorsementGraph, members: Iterable[str]) -> EndorsementGraph:
    """Keep every edge whose source is in ``members``; targets may lie outside."""
    keep = set(members)
    missing = keep - set(g.index)
    if missing:
        raise ValueError(f"{len(missing)} members not in graph")
    edges = {(a, b): w for (a, b), w in g._edges.items() if a in keep}
    return EndorsementGraph(edges, keep)
