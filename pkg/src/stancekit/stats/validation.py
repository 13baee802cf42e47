"""Cross-validation, classification metrics, ablation runs and stratified sampling."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import pandas as pd
from sklearn.base import clone

from .classifiers import ClassifierSpec, fit_classifier
from .linear import RankDeficiencyError, ols

METRIC_NAMES = ("accuracy", "precision", "recall", "f1")


def metrics(tp: int, fp: int, fn: int, tn: int) -> dict:
    """Accuracy, precision, recall and F1; undefined ratios are reported as 0 and listed in ``undefined``."""
    if min(tp, fp, fn, tn) < 0 or tp + fp + fn + tn == 0:
        raise ValueError("counts must be non-negative with a positive total")
    undefined = []
    acc = (tp + tn) / (tp + fp + fn + tn)
    if tp + fp == 0:
        prec = 0.0
        undefined.append("precision")
    else:
        prec = tp / (tp + fp)
    if tp + fn == 0:
        rec = 0.0
        undefined.append("recall")
    else:
        rec = tp / (tp + fn)
    if prec + rec == 0:
        f1 = 0.0
        undefined.append("f1")
    else:
        f1 = 2 * prec * rec / (prec + rec)
    return {"accuracy": acc, "precision": prec, "recall": rec, "f1": f1, "undefined": undefined}


def confusion(y_true, y_pred, positive) -> tuple[int, int, int, int]:
    t = np.asarray(y_true) == positive
    p = np.asarray(y_pred) == positive
    return int((t & p).sum()), int((~t & p).sum()), int((t & ~p).sum()), int((~t & ~p).sum())


def cohens_kappa(accuracy: float, baseline: float) -> float:
    if not baseline < 1:
        raise ValueError("baseline accuracy must be below 1")
    return (accuracy - baseline) / (1 - baseline)


@dataclass
class CVResult:
    folds: list[dict]
    test_indices: list[np.ndarray] = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.folds)

    def values(self, name: str) -> np.ndarray:
        return np.array([f[name] for f in self.folds])

    def mean(self, name: str) -> float:
        return float(self.values(name).mean())

    def std(self, name: str) -> float:
        return float(self.values(name).std())

    def summary(self) -> dict[str, float]:
        out = {}
        for m in METRIC_NAMES:
            out[f"{m}_mean"] = self.mean(m)
            out[f"{m}_std"] = self.std(m)
        return out

    def formatted(self, name: str) -> str:
        return f"{self.mean(name):.3f} (±{self.std(name):.3f})"


def kfold_indices(n: int, k: int, seed: int) -> list[np.ndarray]:
    if k < 2:
        raise ValueError("k must be at least 2")
    if n < k:
        raise ValueError(f"need at least k={k} rows, got {n}")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(f) for f in np.array_split(perm, k)]


def _take(X, idx):
    if isinstance(X, pd.DataFrame):
        return X.iloc[idx].to_numpy(dtype=np.float64)
    if isinstance(X, np.ndarray):
        return X[idx]
    return [X[i] for i in idx]


def kfold_cv(model, X, y, k: int = 5, seed: int = 0, positive=1) -> CVResult:
    """Seeded k-fold cross-validation.

    ``model`` is a :class:`ClassifierSpec` (class weights recomputed on each
    training fold) or any scikit-learn style estimator, cloned per fold.
    Precision and recall treat ``positive`` as the positive class.
    """
    y = np.asarray(y)
    folds = kfold_indices(len(y), k, seed)
    results = []
    for test in folds:
        train = np.setdiff1d(np.arange(len(y)), test)
        if isinstance(model, ClassifierSpec):
            est = fit_classifier(model, _take(X, train), y[train])
        else:
            est = clone(model).fit(_take(X, train), y[train])
        pred = est.predict(_take(X, test))
        results.append(metrics(*confusion(y[test], pred, positive)))
    return CVResult(results, folds)


@dataclass
class AblationReport:
    rows: pd.DataFrame  # one row per feature set; columns depend on mode

    def to_csv(self, path) -> None:
        self.rows.to_csv(path, index=False, float_format="%.6f", lineterminator="\n")


def _ols_row(X: pd.DataFrame, y) -> dict:
    try:
        fit = ols(X, y)
    except (RankDeficiencyError, ValueError):
        return {"r2": np.nan, "f_pvalue": np.nan, "n_features": X.shape[1]}
    return {"r2": fit.r2, "f_pvalue": fit.f_pvalue, "n_features": X.shape[1]}


def _cv_row(spec, X: pd.DataFrame, y, k, seed, positive) -> dict:
    res = kfold_cv(spec, X, y, k, seed, positive)
    row = res.summary()
    row["n_features"] = X.shape[1]
    return row


def ablation(
    groups: Mapping[str, Sequence[str]],
    X: pd.DataFrame,
    y,
    spec: ClassifierSpec | None = None,
    k: int = 5,
    seed: int = 0,
    cumulative: Sequence[Sequence[str]] = (),
    mode: str = "classifier",
    positive=1,
) -> AblationReport:
    """Evaluate the full model, each group alone, each group left out, and cumulative group sets.

    ``mode="classifier"`` reports cross-validated metrics; ``mode="ols"`` reports
    in-sample R^2 and the F-test p-value.  Cumulative entries are sequences of
    group names (a string such as ``"CB"`` is read as single-letter groups).
    """
    if mode not in ("classifier", "ols"):
        raise ValueError("mode must be 'classifier' or 'ols'")
    groups = {g: [c for c in cols if c in X.columns] for g, cols in groups.items()}
    covered = {c for cols in groups.values() for c in cols}
    uncovered = [c for c in X.columns if c not in covered]
    if uncovered:
        raise ValueError(f"columns not assigned to any group: {uncovered[:5]}")

    def evaluate(cols):
        sub = X[[c for c in X.columns if c in set(cols)]]
        if sub.shape[1] == 0:
            return None
        if mode == "ols":
            return _ols_row(sub, y)
        return _cv_row(spec or ClassifierSpec(), sub, y, k, seed, positive)

    rows = []

    def add(kind, name, cols):
        res = evaluate(cols)
        if res is not None:
            rows.append({"kind": kind, "features": name, **res})

    add("full", "all", X.columns)
    for g in groups:
        add("only", g, groups[g])
    for g in groups:
        add("excluded", g, [c for c in X.columns if c not in set(groups[g])])
    for seq in cumulative:
        names = list(seq)
        missing = [g for g in names if g not in groups]
        if missing:
            raise ValueError(f"unknown groups in cumulative set {seq!r}: {missing}")
        add("cumulative", "".join(names) if all(len(g) == 1 for g in names) else "+".join(names),
            [c for g in names for c in groups[g]])
    return AblationReport(pd.DataFrame(rows))


def largest_remainder(weights: Mapping[str, float], total: int, capacity: Mapping[str, int] | None = None) -> dict[str, int]:
    """Allocate ``total`` units proportionally to ``weights`` (Hamilton method), respecting optional capacities."""
    keys = sorted(weights)
    alloc = dict.fromkeys(keys, 0)
    cap = {k_: (capacity[k_] if capacity is not None else total) for k_ in keys}
    remaining = total
    active = [k_ for k_ in keys if weights[k_] > 0 and cap[k_] > 0]
    while remaining > 0 and active:
        wsum = sum(weights[k_] for k_ in active)
        quotas = {k_: remaining * weights[k_] / wsum for k_ in active}
        base = {k_: min(int(np.floor(quotas[k_])), cap[k_] - alloc[k_]) for k_ in active}
        given = sum(base.values())
        for k_ in active:
            alloc[k_] += base[k_]
        left = remaining - given
        order = sorted(active, key=lambda k_: (-(quotas[k_] - np.floor(quotas[k_])), k_))
        for k_ in order:
            if left == 0:
                break
            if alloc[k_] < cap[k_]:
                alloc[k_] += 1
                left -= 1
        remaining = left
        active = [k_ for k_ in active if alloc[k_] < cap[k_]]
        if given == 0 and left == remaining and not any(alloc[k_] < cap[k_] for k_ in active):
            break
    return alloc


def stratified_sample(
    candidates: Mapping[str, str],
    size: int,
    seed: int = 0,
    reference: Mapping[str, str] | None = None,
) -> list[str]:
    """Sample ``size`` ids from ``candidates`` (id -> stratum) in proportion to the
    stratum distribution of ``reference`` (defaults to the candidates themselves).

    Per-stratum quotas use largest-remainder allocation capped by availability;
    sampling inside a stratum is seeded.
    """
    ref = reference if reference is not None else candidates
    weights: dict[str, float] = {}
    for s in ref.values():
        weights[s] = weights.get(s, 0) + 1
    pools: dict[str, list[str]] = {}
    for uid in sorted(candidates):
        pools.setdefault(candidates[uid], []).append(uid)
    for s in pools:
        weights.setdefault(s, 0)
    size = min(size, len(candidates))
    alloc = largest_remainder(weights, size, {s: len(pools.get(s, [])) for s in weights})
    short = size - sum(alloc.values())
    if short > 0:  # strata absent from the reference absorb the rest
        extra = largest_remainder({s: len(p) for s, p in pools.items()}, short,
                                  {s: len(p) - alloc.get(s, 0) for s, p in pools.items()})
        for s, v in extra.items():
            alloc[s] = alloc.get(s, 0) + v
    rng = np.random.default_rng(seed)
    out = []
    for s in sorted(alloc):
        if alloc[s]:
            pool = pools[s]
            out.extend(pool[i] for i in sorted(rng.choice(len(pool), size=alloc[s], replace=False).tolist()))
    return sorted(out)
