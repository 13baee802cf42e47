"""Newman modularity and Louvain community detection on symmetrized weights."""

from __future__ import annotations

from collections import defaultdict
from typing import Mapping

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, ClusterMixin

from ..graph import EndorsementGraph


def modularity_matrix_form(adj: sp.spmatrix, labels) -> float:
    """Q of a labelling on a symmetric weighted adjacency (self-loops allowed)."""
    adj = sp.csr_matrix(adj)
    two_m = adj.sum()
    if two_m <= 0:
        raise ValueError("modularity undefined on a graph without edges")
    labels = np.asarray(labels)
    _, comm = np.unique(labels, return_inverse=True)
    k = comm.max() + 1
    onehot = sp.csr_matrix((np.ones(len(comm)), (np.arange(len(comm)), comm)), shape=(len(comm), k))
    inner = (onehot.T @ adj @ onehot).diagonal()  # twice the intra-group weight
    deg = np.asarray(onehot.T @ np.asarray(adj.sum(axis=1)).ravel()).ravel()
    return float((inner / two_m - (deg / two_m) ** 2).sum())


def modularity(g: EndorsementGraph, assignment: Mapping[str, object]) -> float:
    """Newman modularity after symmetrizing directed weights (w(a,b) + w(b,a))."""
    missing = [u for u in g.nodes if u not in assignment]
    if missing:
        raise ValueError(f"{len(missing)} nodes have no group")
    if not g.nodes:
        raise ValueError("empty graph")
    return modularity_matrix_form(g.symmetric_adjacency(), [str(assignment[u]) for u in g.nodes])


def _one_level(nbrs: list[dict[int, float]], k: list[float], two_m: float, order: list[int]):
    """Local-moving phase.  Returns (community per node, improved?)."""
    n = len(nbrs)
    comm = list(range(n))
    tot = list(k)
    improved = False
    while True:
        moved = 0
        for i in order:
            ci = comm[i]
            links: dict[int, float] = defaultdict(float)
            for j, w in nbrs[i].items():
                if j != i:
                    links[comm[j]] += w
            tot[ci] -= k[i]
            best_c = ci
            best_gain = links.get(ci, 0.0) - k[i] * tot[ci] / two_m
            for c in sorted(links):
                gain = links[c] - k[i] * tot[c] / two_m
                if gain > best_gain + 1e-12:
                    best_c, best_gain = c, gain
            tot[best_c] += k[i]
            if best_c != ci:
                comm[i] = best_c
                moved += 1
        if not moved:
            break
        improved = True
    return comm, improved


def louvain_labels(adj: sp.spmatrix, seed: int = 0) -> np.ndarray:
    adj = sp.csr_matrix(adj, dtype=np.float64)
    n = adj.shape[0]
    two_m = float(adj.sum())
    node_comm = np.arange(n)
    if two_m == 0:
        return node_comm
    rng = np.random.default_rng(seed)
    cur = adj
    while True:
        m = cur.shape[0]
        nbrs: list[dict[int, float]] = [dict() for _ in range(m)]
        coo = cur.tocoo()
        for i, j, w in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()):
            nbrs[i][j] = nbrs[i].get(j, 0.0) + w
        k = np.asarray(cur.sum(axis=1)).ravel().tolist()
        comm, improved = _one_level(nbrs, k, two_m, rng.permutation(m).tolist())
        if not improved:
            break
        _, comm = np.unique(np.asarray(comm), return_inverse=True)
        node_comm = comm[node_comm]
        nc = comm.max() + 1
        proj = sp.csr_matrix((np.ones(m), (np.arange(m), comm)), shape=(m, nc))
        cur = (proj.T @ cur @ proj).tocsr()
        if nc == m:
            break
    # renumber by first appearance for stable output
    _, first = np.unique(node_comm, return_index=True)
    remap = {c: r for r, c in enumerate(node_comm[np.sort(first)])}
    return np.array([remap[c] for c in node_comm])


class Louvain(ClusterMixin, BaseEstimator):
    """Greedy modularity maximization (local moving + aggregation).

    ``fit`` accepts an :class:`EndorsementGraph` or a square weight matrix;
    directed weights are symmetrized.
    """

    def __init__(self, random_state=0):
        self.random_state = random_state

    def fit(self, X, y=None):
        if isinstance(X, EndorsementGraph):
            adj, self.nodes_ = X.symmetric_adjacency(), X.nodes
        else:
            a = sp.csr_matrix(X, dtype=np.float64)
            adj, self.nodes_ = (a + a.T).tocsr(), None
        if adj.shape[0] == 0:
            raise ValueError("empty graph")
        self.labels_ = louvain_labels(adj, int(self.random_state))
        self.n_communities_ = int(self.labels_.max()) + 1
        self.modularity_ = modularity_matrix_form(adj, self.labels_) if adj.sum() > 0 else 0.0
        return self


def louvain(g: EndorsementGraph, seed: int = 0) -> tuple[dict[str, int], float]:
    est = Louvain(random_state=seed).fit(g)
    return dict(zip(g.nodes, est.labels_.tolist())), est.modularity_
