"""Ensemble polarity scores, balance-ratio search and anchor-based side labels."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..graph import EndorsementGraph
from .multilevel import BalancedBisection, balance_band

logger = logging.getLogger(__name__)

EXTREME = 0.95
CONTROL, RIGHTS, UNKNOWN = "control", "rights", "unknown"


@dataclass
class PolarityScores:
    scores: dict[str, float]
    n_runs: int
    base_seed: int
    balance_ratio: float
    runs: np.ndarray | None = field(default=None, repr=False)  # aligned run labels, shape (n_runs, n_nodes)

    def extreme_count(self, threshold: float = EXTREME) -> int:
        return sum(1 for p in self.scores.values() if p >= threshold or p <= 1 - threshold)


def _canonical_first(labels: np.ndarray, balance_ratio: float) -> np.ndarray:
    """Orient the reference run: side 1 is the side closer to the ratio's side-1 target;
    on a tie the first node sits on side 0."""
    n = len(labels)
    t1 = n * balance_ratio / (1 + balance_ratio)
    n1 = int(labels.sum())
    d_keep, d_flip = abs(n1 - t1), abs((n - n1) - t1)
    if d_flip < d_keep or (d_flip == d_keep and labels[0] == 1):
        return 1 - labels
    return labels


def align_runs(runs: np.ndarray, balance_ratio: float = 1.0) -> np.ndarray:
    """Flip each run's side labels when that increases overlap with the (canonicalized) first run.

    Exact ties are settled by agreement on the first node, which keeps the
    result independent of each run's arbitrary orientation.
    """
    runs = np.asarray(runs, dtype=np.int8).copy()
    runs[0] = _canonical_first(runs[0], balance_ratio)
    ref = runs[0]
    n = runs.shape[1]
    for i in range(1, len(runs)):
        agree = int((runs[i] == ref).sum())
        if agree < n - agree or (agree == n - agree and runs[i][0] != ref[0]):
            runs[i] = 1 - runs[i]
    return runs


def ensemble_polarity(
    g: EndorsementGraph,
    n_runs: int = 100,
    balance_ratio: float = 1.0,
    base_seed: int = 0,
    **bisect_params,
) -> PolarityScores:
    """Bisect ``n_runs`` times with seeds ``base_seed .. base_seed + n_runs - 1`` and
    average the aligned side assignments per node."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    adj = g.symmetric_adjacency()
    runs = np.empty((n_runs, len(g.nodes)), dtype=np.int8)
    est = BalancedBisection(balance_ratio=balance_ratio, **bisect_params)
    for i in range(n_runs):
        est.set_params(random_state=base_seed + i)
        runs[i] = est.fit(adj).labels_
    runs = align_runs(runs, balance_ratio)
    p = runs.sum(axis=0) / n_runs
    return PolarityScores(dict(zip(g.nodes, p.tolist())), n_runs, base_seed, balance_ratio, runs)


def optimize_balance(
    g: EndorsementGraph,
    candidate_ratios: Sequence[float],
    n_runs: int = 100,
    base_seed: int = 0,
    threshold: float = EXTREME,
    **bisect_params,
) -> tuple[float, dict[float, PolarityScores]]:
    """Pick the side-size ratio that maximizes the number of nodes with extreme polarity.

    Ties go to the ratio closest to 1.0, then to the smaller ratio.
    """
    if not candidate_ratios:
        raise ValueError("candidate_ratios must be non-empty")
    results: dict[float, PolarityScores] = {}
    for r in candidate_ratios:
        balance_band(len(g.nodes), r)  # fail fast on infeasible ratios
        results[float(r)] = ensemble_polarity(g, n_runs, float(r), base_seed, **bisect_params)
        logger.info("ratio %.3f: %d extreme nodes", r, results[float(r)].extreme_count(threshold))
    best = min(results, key=lambda r: (-results[r].extreme_count(threshold), abs(r - 1.0), r))
    return best, results


class AnchorError(ValueError):
    pass


@dataclass
class SideLabels:
    labels: dict[str, str]
    anchors: list[tuple[str, str]]
    rights_pole: int  # 1: p > 0.5 is rights; 0: p < 0.5 is rights

    def counts(self) -> dict[str, int]:
        out = dict.fromkeys((CONTROL, RIGHTS, UNKNOWN), 0)
        for lab in self.labels.values():
            out[lab] += 1
        return out


def label_sides(scores: PolarityScores | dict[str, float], anchors: Iterable[tuple[str, str]]) -> SideLabels:
    """Name the two polarity poles from hand-labelled anchor users.

    Anchors outside the scored set, or sitting exactly at p = 0.5, are ignored.
    Raises :class:`AnchorError` when no anchor is usable or when anchors of
    opposite sides share a pole.
    """
    p = scores.scores if isinstance(scores, PolarityScores) else scores
    anchors = [(u, s) for u, s in anchors]
    poles = {CONTROL: set(), RIGHTS: set()}
    used = []
    for uid, side in anchors:
        if side not in poles:
            raise AnchorError(f"anchor {uid!r} has unknown side {side!r}")
        if uid not in p:
            logger.warning("anchor %s not in scored graph; ignored", uid)
            continue
        if p[uid] == 0.5:
            logger.warning("anchor %s has polarity 0.5; ignored", uid)
            continue
        poles[side].add(1 if p[uid] > 0.5 else 0)
        used.append((uid, side))
    if not used:
        raise AnchorError("no usable anchors")
    if poles[CONTROL] & poles[RIGHTS] or len(poles[CONTROL]) > 1 or len(poles[RIGHTS]) > 1:
        raise AnchorError("contradictory anchors: both sides map to the same polarity pole")
    rights_pole = next(iter(poles[RIGHTS])) if poles[RIGHTS] else 1 - next(iter(poles[CONTROL]))
    labels = {}
    for uid, val in p.items():
        if val == 0.5:
            labels[uid] = UNKNOWN
        else:
            labels[uid] = RIGHTS if (val > 0.5) == (rights_pole == 1) else CONTROL
    return SideLabels(labels, used, rights_pole)


def write_polarity_csv(path: str | Path, scores: PolarityScores, sides: SideLabels) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "polarity", "side"])
        for uid in sorted(scores.scores):
            w.writerow([uid, repr(scores.scores[uid]), sides.labels.get(uid, UNKNOWN)])


def read_anchors(path: str | Path) -> list[tuple[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [(row["user_id"], row["side"].strip().lower()) for row in csv.DictReader(fh)]
