"""Feature matrices, external tables, standardization and missing-value handling."""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np
import pandas as pd
from scipy.stats import skew
from sklearn.base import BaseEstimator, TransformerMixin

logger = logging.getLogger(__name__)

PROVENANCE_TAGS = ("network", "content", "behavior", "demographic", "economic", "health", "politics", "liwc")


@dataclass
class FeatureMatrix:
    """Named numeric columns keyed by state code or user id; NaN marks a missing cell."""

    frame: pd.DataFrame
    provenance: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.frame.columns.is_unique:
            raise ValueError("column names must be unique")
        untagged = [c for c in self.frame.columns if c not in self.provenance]
        if untagged:
            raise ValueError(f"columns without provenance tag: {untagged[:5]}")
        self.frame = self.frame.astype(np.float64)
        self.provenance = {c: self.provenance[c] for c in self.frame.columns}

    @property
    def columns(self) -> list[str]:
        return list(self.frame.columns)

    @property
    def shape(self) -> tuple[int, int]:
        return self.frame.shape

    def groups(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for col, tag in self.provenance.items():
            out.setdefault(tag, []).append(col)
        return out

    def select(self, columns) -> "FeatureMatrix":
        columns = list(columns)
        return FeatureMatrix(self.frame[columns].copy(), {c: self.provenance[c] for c in columns})

    def with_frame(self, frame: pd.DataFrame) -> "FeatureMatrix":
        return FeatureMatrix(frame, {c: self.provenance[c] for c in frame.columns})

    def to_csv(self, path: str | Path) -> None:
        path = Path(path)
        self.frame.to_csv(path, index_label="key", float_format="%.12g", lineterminator="\n")
        path.with_suffix(".provenance.json").write_text(json.dumps(self.provenance, indent=1, sort_keys=True) + "\n")

    @classmethod
    def from_csv(cls, path: str | Path) -> "FeatureMatrix":
        path = Path(path)
        frame = pd.read_csv(path, index_col=0, dtype={0: str})
        frame.index = frame.index.astype(str)
        prov = json.loads(path.with_suffix(".provenance.json").read_text())
        return cls(frame, prov)


def concat_columns(*matrices: FeatureMatrix) -> FeatureMatrix:
    frame = pd.concat([m.frame for m in matrices], axis=1)
    prov = {}
    for m in matrices:
        prov.update(m.provenance)
    return FeatureMatrix(frame, prov)


@dataclass
class ExternalTable:
    """Keyed numeric table (state code or 5-digit county FIPS in the first column)."""

    frame: pd.DataFrame
    tag: str = "demographic"
    column_tags: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.frame.index.is_unique:
            dup = self.frame.index[self.frame.index.duplicated()].tolist()
            raise ValueError(f"duplicate keys in external table: {dup[:5]}")

    @classmethod
    def from_csv(cls, path: str | Path, tag: str = "demographic", column_tags: Mapping[str, str] | None = None):
        frame = pd.read_csv(path, dtype={0: str})
        key = frame.columns[0]
        frame[key] = frame[key].astype(str).str.strip()
        frame = frame.set_index(key)
        frame = frame.apply(pd.to_numeric, errors="coerce")
        return cls(frame, tag, dict(column_tags or {}))

    def tag_of(self, column: str) -> str:
        return self.column_tags.get(column, self.tag)


def join_external(m: FeatureMatrix, table: ExternalTable, key_map: Mapping[str, str | None]) -> FeatureMatrix:
    """Append the table's columns, looking rows up through ``key_map``; unmatched keys give NaN."""
    missing = [r for r in m.frame.index if r not in key_map]
    if missing:
        raise ValueError(f"key_map has no entry for {len(missing)} rows")
    clash = set(table.frame.columns) & set(m.frame.columns)
    if clash:
        raise ValueError(f"column name clash: {sorted(clash)}")
    keys = [key_map[r] for r in m.frame.index]
    joined = table.frame.reindex(keys)
    joined.index = m.frame.index
    prov = dict(m.provenance)
    prov.update({c: table.tag_of(c) for c in table.frame.columns})
    return FeatureMatrix(pd.concat([m.frame, joined], axis=1), prov)


class SkewZScoreTransformer(TransformerMixin, BaseEstimator):
    """Log-transform strongly skewed columns, then z-score every column.

    A column whose sample skewness exceeds ``skew_threshold`` in magnitude is
    mapped through ``log(1 + x - min(x))`` before scaling.  Constant columns
    become zeros.  NaN cells are ignored in the statistics and kept as NaN.
    """

    def __init__(self, skew_threshold=2.0):
        self.skew_threshold = skew_threshold

    def fit(self, X: pd.DataFrame, y=None):
        X = pd.DataFrame(X).astype(np.float64)
        self.log_columns_, self.min_, self.mean_, self.scale_ = [], {}, {}, {}
        self.constant_columns_ = []
        for col in X.columns:
            v = X[col].dropna().to_numpy()
            if v.size >= 3 and np.ptp(v) > 0 and abs(skew(v)) > self.skew_threshold:
                self.log_columns_.append(col)
                self.min_[col] = float(v.min())
                v = np.log1p(v - v.min())
            sd = float(np.std(v, ddof=1)) if v.size > 1 else 0.0
            self.mean_[col] = float(v.mean()) if v.size else 0.0
            if not sd > 0:
                self.constant_columns_.append(col)
                warnings.warn(f"column {col!r} is constant; standardized to zeros", RuntimeWarning, stacklevel=2)
                sd = 1.0
            self.scale_[col] = sd
        self.feature_names_in_ = np.asarray(X.columns, dtype=object)
        return self

    def transform(self, X: pd.DataFrame) -> pd.DataFrame:
        X = pd.DataFrame(X).astype(np.float64).copy()
        for col in X.columns:
            v = X[col]
            if col in self.min_:
                v = np.log1p((v - self.min_[col]).clip(lower=0))
            if col in self.constant_columns_:
                X[col] = np.where(v.isna(), np.nan, 0.0)
            else:
                X[col] = (v - self.mean_[col]) / self.scale_[col]
        return X

    def get_feature_names_out(self, input_features=None):
        return self.feature_names_in_


class MissingValueFilter(TransformerMixin, BaseEstimator):
    """Drop columns missing in more than ``col_threshold`` of rows, then rows with any missing cell."""

    def __init__(self, col_threshold=0.5):
        self.col_threshold = col_threshold

    def fit(self, X: pd.DataFrame, y=None):
        X = pd.DataFrame(X)
        frac = X.isna().mean(axis=0) if len(X) else pd.Series(0.0, index=X.columns)
        self.dropped_columns_ = [c for c in X.columns if frac[c] > self.col_threshold]
        self.kept_columns_ = [c for c in X.columns if c not in self.dropped_columns_]
        return self

    def transform(self, X: pd.DataFrame) -> pd.DataFrame:
        X = pd.DataFrame(X)[self.kept_columns_]
        return X.dropna(axis=0, how="any")


def standardize_and_transform(m: FeatureMatrix, skew_threshold: float = 2.0) -> FeatureMatrix:
    return m.with_frame(SkewZScoreTransformer(skew_threshold).fit_transform(m.frame))


def missing_policy(m: FeatureMatrix, col_threshold: float = 0.5) -> FeatureMatrix:
    flt = MissingValueFilter(col_threshold).fit(m.frame)
    for c in flt.dropped_columns_:
        logger.info("dropping column %s: more than %.0f%% missing", c, 100 * col_threshold)
    return m.with_frame(flt.transform(m.frame))
