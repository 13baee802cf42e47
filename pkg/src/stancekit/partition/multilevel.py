"""Multilevel balanced graph bisection.

Heavy-edge matching coarsening, greedy region-growing initial bisection and
Fiduccia-Mattheyses boundary refinement during uncoarsening.  All routines
work on a symmetric CSR matrix plus integer vertex weights.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from sklearn.base import BaseEstimator, ClusterMixin

from ..graph import EndorsementGraph

DEFAULT_TOLERANCE = 0.03
COARSEN_TO = 64


class PartitionError(ValueError):
    pass


def balance_band(total: int, balance_ratio: float, tolerance: float = DEFAULT_TOLERANCE) -> tuple[int, int]:
    """Admissible integer weight range for side 1 given ``side1:side0 = balance_ratio``.

    Each side may deviate from its target by ``tolerance`` of that target
    (at least half a node, so that a feasible integer split always exists).
    """
    if not balance_ratio > 0:
        raise PartitionError("balance_ratio must be positive")
    t1 = total * balance_ratio / (1.0 + balance_ratio)
    t0 = total - t1
    if t1 < 1 or t0 < 1:
        raise PartitionError(f"ratio {balance_ratio} leaves a side with fewer than one node (n={total})")
    slack = min(max(tolerance * t1, 0.5), max(tolerance * t0, 0.5))
    lo = max(1, math.ceil(t1 - slack - 1e-9))
    hi = min(total - 1, math.floor(t1 + slack + 1e-9))
    if lo > hi:
        raise PartitionError("no admissible split for the requested ratio")
    return lo, hi


def cut_weight(adj: sp.csr_matrix, part: np.ndarray) -> float:
    coo = adj.tocoo()
    mask = part[coo.row] != part[coo.col]
    return float(coo.data[mask].sum()) / 2.0


# -- coarsening --------------------------------------------------------------


def heavy_edge_matching(adj: sp.csr_matrix, vwgt: np.ndarray, rng: np.random.Generator, max_vwgt: int):
    """Match each unmatched vertex (random visiting order) with its heaviest unmatched neighbour.

    Returns ``(cmap, n_coarse)`` where ``cmap[v]`` is v's coarse vertex.
    """
    n = adj.shape[0]
    indptr, indices, data = adj.indptr.tolist(), adj.indices.tolist(), adj.data.tolist()
    w = vwgt.tolist()
    match = [-1] * n
    for v in rng.permutation(n).tolist():
        if match[v] != -1:
            continue
        best, best_w = -1, 0.0
        for k in range(indptr[v], indptr[v + 1]):
            u = indices[k]
            if u == v or match[u] != -1 or w[u] + w[v] > max_vwgt:
                continue
            if data[k] > best_w or (data[k] == best_w and u < best):
                best, best_w = u, data[k]
        if best == -1:
            match[v] = v
        else:
            match[v], match[best] = best, v
    cmap = [-1] * n
    nc = 0
    for v in range(n):
        if cmap[v] == -1:
            cmap[v] = cmap[match[v]] = nc
            nc += 1
    return np.asarray(cmap, dtype=np.int64), nc


def contract(adj: sp.csr_matrix, vwgt: np.ndarray, cmap: np.ndarray, nc: int):
    n = adj.shape[0]
    proj = sp.csr_matrix((np.ones(n), (np.arange(n), cmap)), shape=(n, nc))
    coarse = (proj.T @ adj @ proj).tocsr()
    coarse.setdiag(0)
    coarse.eliminate_zeros()
    coarse.sort_indices()
    return coarse, np.bincount(cmap, weights=vwgt, minlength=nc).astype(np.int64)


# -- refinement --------------------------------------------------------------


def _gains(indptr, indices, data, part):
    n = len(part)
    gain = [0.0] * n
    for v in range(n):
        pv = part[v]
        g = 0.0
        for k in range(indptr[v], indptr[v + 1]):
            g += data[k] if part[indices[k]] != pv else -data[k]
        gain[v] = g
    return gain


def fm_pass(adj: sp.csr_matrix, vwgt: np.ndarray, part: np.ndarray, band: tuple[int, int], rng, stall: int | None = None):
    """One Fiduccia-Mattheyses pass on a balanced bisection.

    Vertices move at most once; the pass keeps the best balanced prefix of
    moves, so the returned cut never exceeds the input cut.  Returns
    ``(part, cut)``.
    """
    indptr, indices, data = adj.indptr.tolist(), adj.indices.tolist(), adj.data.tolist()
    p = part.tolist()
    w = vwgt.tolist()
    n = len(p)
    lo, hi = band
    w1 = sum(wi for wi, pi in zip(w, p) if pi == 1)
    gain = _gains(indptr, indices, data, p)
    cut = 0.0
    for v in range(n):
        for k in range(indptr[v], indptr[v + 1]):
            if p[indices[k]] != p[v]:
                cut += data[k]
    cut /= 2.0
    order = rng.permutation(n).tolist()
    rank = [0] * n
    for r, v in enumerate(order):
        rank[v] = r
    heaps = ([], [])
    for v in range(n):
        if gain[v] > -_deg(indptr, data, v) or indptr[v] == indptr[v + 1]:
            heapq.heappush(heaps[p[v]], (-gain[v], rank[v], v))
    locked = [False] * n
    moves = []
    best_cut, best_len = cut, 0
    limit = stall if stall is not None else max(25, n // 20)
    since_best = 0
    while since_best < limit:
        cand = []
        for side in (0, 1):
            h = heaps[side]
            skipped = []
            while h:
                v = h[0][2]
                if locked[v] or p[v] != side or -h[0][0] != gain[v]:
                    heapq.heappop(h)
                    continue
                nw1 = w1 - w[v] if side == 1 else w1 + w[v]
                if lo <= nw1 <= hi:
                    cand.append((-gain[v], rank[v], v))
                    break
                # balance-infeasible head: look a few entries deeper
                skipped.append(heapq.heappop(h))
                if len(skipped) > 8:
                    break
            for item in skipped:
                heapq.heappush(h, item)
        if not cand:
            break
        _, _, v = min(cand)
        side = p[v]
        p[v] = 1 - side
        w1 += -w[v] if side == 1 else w[v]
        cut -= gain[v]
        locked[v] = True
        gain[v] = -gain[v]
        moves.append(v)
        for k in range(indptr[v], indptr[v + 1]):
            u = indices[k]
            if u == v:
                continue
            gain[u] += 2 * data[k] if p[u] == side else -2 * data[k]
            if not locked[u]:
                heapq.heappush(heaps[p[u]], (-gain[u], rank[u], u))
        if cut < best_cut - 1e-12:
            best_cut, best_len, since_best = cut, len(moves), 0
        else:
            since_best += 1
    for v in moves[best_len:]:
        p[v] = 1 - p[v]
    return np.asarray(p, dtype=np.int8), best_cut


def _deg(indptr, data, v):
    return sum(data[indptr[v]:indptr[v + 1]])


def fm_refine(adj, vwgt, part, band, rng, max_passes: int = 8):
    cut = cut_weight(adj, part)
    for _ in range(max_passes):
        part, new_cut = fm_pass(adj, vwgt, part, band, rng)
        if new_cut >= cut - 1e-12:
            cut = min(cut, new_cut)
            break
        cut = new_cut
    return part, cut


def rebalance(adj: sp.csr_matrix, vwgt: np.ndarray, part: np.ndarray, band: tuple[int, int]) -> np.ndarray:
    """Greedily move best-gain vertices off the overweight side until side 1 lies in ``band``."""
    part = part.copy()
    lo, hi = band
    indptr, indices, data = adj.indptr.tolist(), adj.indices.tolist(), adj.data.tolist()
    w1 = int(vwgt[part == 1].sum())
    while not lo <= w1 <= hi:
        src = 1 if w1 > hi else 0
        need_lo = w1 - hi if src == 1 else lo - w1
        room = (w1 - lo) if src == 1 else (hi - w1)
        gains = _gains(indptr, indices, data, part.tolist())
        best, best_key = -1, None
        for v in np.flatnonzero(part == src).tolist():
            wv = int(vwgt[v])
            if wv > room:
                continue
            key = (gains[v], min(wv, need_lo), -v)
            if best_key is None or key > best_key:
                best, best_key = v, key
        if best == -1:
            raise PartitionError("cannot satisfy balance constraint at this level")
        part[best] = 1 - src
        w1 += -int(vwgt[best]) if src == 1 else int(vwgt[best])
    return part


# -- initial partition -------------------------------------------------------


def grow_bisection(adj: sp.csr_matrix, vwgt: np.ndarray, band: tuple[int, int], rng: np.random.Generator) -> np.ndarray:
    """Grow side 1 from a random seed vertex.

    The frontier vertex with the largest fraction of its edge weight already
    attached to the region is absorbed next.
    """
    n = adj.shape[0]
    lo, hi = band
    indptr, indices, data = adj.indptr.tolist(), adj.indices.tolist(), adj.data.tolist()
    w = vwgt.tolist()
    deg = [sum(data[indptr[v]:indptr[v + 1]]) for v in range(n)]
    part = [0] * n
    conn = [0.0] * n
    heap: list = []
    w1 = 0
    order = rng.permutation(n).tolist()
    pos = 0
    while w1 < lo:
        v = -1
        while heap:
            negg, _, cand = heapq.heappop(heap)
            if part[cand] == 0 and -negg == conn[cand] / deg[cand] and w1 + w[cand] <= hi:
                v = cand
                break
        if v == -1:
            while pos < n and (part[order[pos]] == 1 or w1 + w[order[pos]] > hi):
                pos += 1
            if pos == n:
                break
            v = order[pos]
        part[v] = 1
        w1 += w[v]
        for k in range(indptr[v], indptr[v + 1]):
            u = indices[k]
            if part[u] == 0:
                conn[u] += data[k]
                heapq.heappush(heap, (-(conn[u] / deg[u]), u, u))
    return np.asarray(part, dtype=np.int8)


# -- driver ------------------------------------------------------------------


def _relaxed_band(band, vwgt, total):
    """Widen the side-1 band by the heaviest vertex so coarse levels can still swap vertices."""
    slack = int(vwgt.max()) - 1
    return max(1, band[0] - slack), min(total - 1, band[1] + slack)


@dataclass
class Level:
    adj: sp.csr_matrix
    vwgt: np.ndarray
    cmap: np.ndarray | None = None  # map from this level to the next coarser one


def multilevel_bisect(
    adj: sp.csr_matrix,
    balance_ratio: float = 1.0,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
    coarsen_to: int = COARSEN_TO,
    n_init: int = 4,
) -> np.ndarray:
    """Bisect a symmetric weighted graph; returns a 0/1 label per vertex (side 1 sized by the ratio)."""
    n = adj.shape[0]
    if n < 2:
        raise PartitionError("need at least two vertices")
    band = balance_band(n, balance_ratio, tolerance)
    rng = np.random.default_rng(seed)
    levels = [Level(adj, np.ones(n, dtype=np.int64))]
    max_vwgt = max(2, math.ceil(1.5 * n / coarsen_to))
    while levels[-1].adj.shape[0] > coarsen_to:
        cur = levels[-1]
        cmap, nc = heavy_edge_matching(cur.adj, cur.vwgt, rng, max_vwgt)
        if nc > 0.95 * cur.adj.shape[0]:
            break
        cur.cmap = cmap
        cadj, cw = contract(cur.adj, cur.vwgt, cmap, nc)
        levels.append(Level(cadj, cw))

    coarse = levels[-1]
    cband = _relaxed_band(band, coarse.vwgt, n)
    best, best_cut = None, math.inf
    for _ in range(n_init):
        part = grow_bisection(coarse.adj, coarse.vwgt, cband, rng)
        w1 = int(coarse.vwgt[part == 1].sum())
        if not cband[0] <= w1 <= cband[1]:
            try:
                part = rebalance(coarse.adj, coarse.vwgt, part, cband)
            except PartitionError:
                if best is None:
                    best = part
                continue
        part, cut = fm_refine(coarse.adj, coarse.vwgt, part, cband, rng)
        if cut < best_cut:
            best, best_cut = part, cut
    part = best

    for level in reversed(levels[:-1]):
        part = part[level.cmap]
        lband = band if level is levels[0] else _relaxed_band(band, level.vwgt, n)
        w1 = int(level.vwgt[part == 1].sum())
        if not lband[0] <= w1 <= lband[1]:
            try:
                part = rebalance(level.adj, level.vwgt, part, lband)
            except PartitionError:
                if level is levels[0]:
                    raise
                continue
        part, _ = fm_refine(level.adj, level.vwgt, part, lband, rng)
    w1 = int(part.sum())
    if not band[0] <= w1 <= band[1]:
        raise PartitionError("bisection violates the balance constraint")
    return part.astype(np.int8)


def _as_symmetric(g) -> tuple[sp.csr_matrix, list | None]:
    if isinstance(g, EndorsementGraph):
        return g.symmetric_adjacency(), g.nodes
    adj = sp.csr_matrix(g, dtype=np.float64)
    if adj.shape[0] != adj.shape[1]:
        raise ValueError("adjacency must be square")
    adj = (adj + adj.T).tocsr() if (adj != adj.T).nnz else adj.copy()
    adj.setdiag(0)
    adj.eliminate_zeros()
    adj.sort_indices()
    return adj, None


class BalancedBisection(ClusterMixin, BaseEstimator):
    """Two-way multilevel partitioner minimizing the weighted edge cut.

    Parameters
    ----------
    balance_ratio : float
        Target size ratio of side 1 to side 0.
    tolerance : float
        Allowed relative deviation of each side from its target size.
    coarsen_to : int
        Coarsening stops once the graph has at most this many vertices.
    n_init : int
        Number of region-growing starts on the coarsest graph.
    random_state : int
        Seed controlling matching order, growth seeds and tie-breaking.

    Attributes
    ----------
    labels_ : ndarray of shape (n_nodes,)
    cut_ : float
    side_sizes_ : tuple of int
    nodes_ : list of node ids (only when fitted on an EndorsementGraph)
    """

    def __init__(self, balance_ratio=1.0, tolerance=DEFAULT_TOLERANCE, coarsen_to=COARSEN_TO, n_init=4, random_state=0):
        self.balance_ratio = balance_ratio
        self.tolerance = tolerance
        self.coarsen_to = coarsen_to
        self.n_init = n_init
        self.random_state = random_state

    def fit(self, X, y=None):
        adj, nodes = _as_symmetric(X)
        if adj.shape[0] == 0:
            raise PartitionError("empty graph")
        ncomp, _ = connected_components(adj, directed=False)
        if ncomp > 1:
            raise PartitionError(f"graph has {ncomp} components; pass the giant component")
        self.labels_ = multilevel_bisect(
            adj, self.balance_ratio, int(self.random_state), self.tolerance, self.coarsen_to, self.n_init
        )
        self.cut_ = cut_weight(adj, self.labels_)
        n1 = int(self.labels_.sum())
        self.side_sizes_ = (len(self.labels_) - n1, n1)
        self.nodes_ = nodes
        return self


@dataclass
class PartitionAssignment:
    assignment: dict[str, int]
    balance_ratio: float
    cut: float

    @property
    def imbalance(self) -> float:
        """Largest side as a fraction of all nodes."""
        n1 = sum(self.assignment.values())
        return max(n1, len(self.assignment) - n1) / len(self.assignment)


def bisect(g: EndorsementGraph, balance_ratio: float = 1.0, seed: int = 0, **kwargs) -> PartitionAssignment:
    est = BalancedBisection(balance_ratio=balance_ratio, random_state=seed, **kwargs).fit(g)
    return PartitionAssignment(dict(zip(g.nodes, est.labels_.tolist())), balance_ratio, est.cut_)
