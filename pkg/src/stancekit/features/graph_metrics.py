"""Node- and graph-level metrics on endorsement graphs."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..graph import EndorsementGraph


def gini(values) -> float:
    """Mean absolute pairwise difference over twice the mean; 0 for all-equal or all-zero input."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    if x.size == 0:
        raise ValueError("gini of an empty vector")
    if np.any(x < 0):
        raise ValueError("gini needs non-negative values")
    total = x.sum()
    if total == 0:
        return 0.0
    n = x.size
    # sum_i sum_j |x_i - x_j| = 2 * sum_i (2i - n - 1) x_(i) for sorted x, i = 1..n
    ranks = np.arange(1, n + 1)
    return float(np.sum((2 * ranks - n - 1) * x) / (n * total))


def density(g: EndorsementGraph) -> float | None:
    n = len(g.nodes)
    if n < 2:
        return None
    return g.n_edges / (n * (n - 1))


def _simple_undirected(g: EndorsementGraph) -> sp.csr_matrix:
    a = g.adjacency()
    s = ((a + a.T) > 0).astype(np.float64).tocsr()
    s.setdiag(0)
    s.eliminate_zeros()
    return s


def local_clustering(g: EndorsementGraph) -> np.ndarray:
    """Unweighted local clustering on the symmetrized graph (0 for degree < 2)."""
    s = _simple_undirected(g)
    deg = np.asarray(s.sum(axis=1)).ravel()
    tri = np.asarray((s @ s).multiply(s).sum(axis=1)).ravel() / 2.0
    denom = deg * (deg - 1) / 2.0
    out = np.zeros_like(deg)
    mask = denom > 0
    out[mask] = tri[mask] / denom[mask]
    return out


def average_clustering(g: EndorsementGraph) -> float | None:
    if len(g.nodes) < 2:
        return None
    return float(local_clustering(g).mean())


def total_degrees(g: EndorsementGraph) -> dict[str, int]:
    return {u: g.in_degree(u) + g.out_degree(u) for u in g.nodes}


def degree_assortativity(g: EndorsementGraph) -> float | None:
    """Pearson correlation of endpoint total (in + out) degrees over symmetrized edges.

    Each connected unordered pair contributes both orientations.  Needs at
    least two such pairs and non-constant endpoint degrees.
    """
    deg = total_degrees(g)
    pairs = {tuple(sorted((a, b))) for a, b, _ in g.edges()}
    if len(pairs) < 2:
        return None
    x = np.array([deg[a] for a, b in pairs] + [deg[b] for a, b in pairs], dtype=np.float64)
    y = np.array([deg[b] for a, b in pairs] + [deg[a] for a, b in pairs], dtype=np.float64)
    if np.std(x) == 0:
        return None
    return float(np.corrcoef(x, y)[0, 1])


def pagerank(
    g: EndorsementGraph,
    damping: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 10_000,
    teleport: dict[str, float] | None = None,
) -> dict[str, float]:
    """Weighted PageRank by power iteration along retweeter -> retweeted edges.

    Dangling mass and teleportation follow ``teleport`` (uniform by default).
    Iterates until the L1 change drops below ``tol``.
    """
    n = len(g.nodes)
    if n == 0:
        return {}
    a = g.adjacency()
    out_w = np.asarray(a.sum(axis=1)).ravel()
    dangling = out_w == 0
    inv = np.zeros(n)
    inv[~dangling] = 1.0 / out_w[~dangling]
    trans = (sp.diags(inv) @ a).T.tocsr()  # column-stochastic on non-dangling columns
    if teleport is None:
        v = np.full(n, 1.0 / n)
    else:
        v = np.array([teleport.get(u, 0.0) for u in g.nodes], dtype=np.float64)
        if v.sum() <= 0:
            raise ValueError("teleport vector has no mass on graph nodes")
        v /= v.sum()
    x = v.copy()
    for _ in range(max_iter):
        nxt = damping * (trans @ x + x[dangling].sum() * v) + (1 - damping) * v
        nxt /= nxt.sum()
        if np.abs(nxt - x).sum() < tol:
            x = nxt
            break
        x = nxt
    return dict(zip(g.nodes, x.tolist()))
