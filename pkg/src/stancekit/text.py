"""Tokenization, Naive Bayes stance classification, log-odds term comparison and lexicon scoring."""

from __future__ import annotations

import csv
import math
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import pandas as pd
import scipy.sparse as sp
from scipy.special import logsumexp
from sklearn.base import BaseEstimator, ClassifierMixin

CONTROL, RIGHTS, UNKNOWN = "control", "rights", "unknown"

_TOKEN = re.compile(r"\w+(?:'\w+)*")


def default_stopwords() -> frozenset[str]:
    with resources.files("stancekit").joinpath("data/stopwords.txt").open(encoding="utf-8") as fh:
        return frozenset(line.strip() for line in fh if line.strip())


def load_stopwords(path: str | Path) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip().lower() for line in fh if line.strip())


def tokenize(text: str, stopwords: Iterable[str] = frozenset()) -> list[str]:
    """Lowercased word tokens; '#'/'@' prefixes and punctuation dropped, internal apostrophes kept."""
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    return [t for t in _TOKEN.findall(text.lower()) if t not in stop]


# -- Naive Bayes -------------------------------------------------------------


def _vectorize(docs: Sequence[Sequence[str]], vocab: Mapping[str, int]) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    for i, doc in enumerate(docs):
        for tok, c in Counter(doc).items():
            j = vocab.get(tok)
            if j is not None:
                rows.append(i)
                cols.append(j)
                vals.append(c)
    return sp.csr_matrix((vals, (rows, cols)), shape=(len(docs), len(vocab)), dtype=np.float64)


class NaiveBayesStance(ClassifierMixin, BaseEstimator):
    """Two-class multinomial Naive Bayes on token counts.

    ``X`` is a sequence of token lists.  The majority class is randomly
    undersampled to the minority size before counting, so the priors are
    equal.  ``predict`` returns the most probable class; ``predict_stance``
    applies the confidence threshold and returns ``"unknown"`` in between.
    """

    def __init__(self, alpha=1.0, threshold=0.99, undersample=True, random_state=0):
        self.alpha = alpha
        self.threshold = threshold
        self.undersample = undersample
        self.random_state = random_state

    def fit(self, X, y):
        y = np.asarray(y)
        classes, counts = np.unique(y, return_counts=True)
        if len(classes) != 2:
            raise ValueError(f"need exactly two classes with at least one document each, got {classes.tolist()}")
        idx = np.arange(len(y))
        if self.undersample and counts[0] != counts[1]:
            rng = np.random.default_rng(self.random_state)
            minority = classes[np.argmin(counts)]
            major_idx = idx[y != minority]
            keep = np.sort(rng.choice(major_idx, size=counts.min(), replace=False))
            idx = np.sort(np.concatenate([idx[y == minority], keep]))
        self.train_index_ = idx
        docs = [X[i] for i in idx]
        yt = y[idx]
        self.vocabulary_ = {t: j for j, t in enumerate(sorted({t for d in docs for t in d}))}
        counts_mat = _vectorize(docs, self.vocabulary_)
        self.classes_ = classes
        self.class_count_ = np.array([(yt == c).sum() for c in classes], dtype=np.float64)
        self.class_log_prior_ = np.log(self.class_count_ / self.class_count_.sum())
        self.feature_count_ = np.vstack([np.asarray(counts_mat[yt == c].sum(axis=0)).ravel() for c in classes])
        smoothed = self.feature_count_ + self.alpha
        self.feature_log_prob_ = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
        return self

    def joint_log_likelihood(self, X) -> np.ndarray:
        counts = _vectorize(X, self.vocabulary_)
        return np.asarray(counts @ self.feature_log_prob_.T) + self.class_log_prior_

    def predict_log_proba(self, X):
        jll = self.joint_log_likelihood(X)
        return jll - logsumexp(jll, axis=1, keepdims=True)

    def predict_proba(self, X):
        return np.exp(self.predict_log_proba(X))

    def predict(self, X):
        return self.classes_[np.argmax(self.joint_log_likelihood(X), axis=1)]

    def positive_proba(self, X, positive=RIGHTS) -> np.ndarray:
        j = int(np.flatnonzero(self.classes_ == positive)[0])
        return self.predict_proba(X)[:, j]

    def predict_stance(self, X, positive=RIGHTS):
        """Label by the confidence threshold; documents in the uncertain band get ``"unknown"``."""
        if not 0.5 < self.threshold <= 1:
            raise ValueError("threshold must lie in (0.5, 1]")
        p = self.positive_proba(X, positive)
        negative = self.classes_[self.classes_ != positive][0]
        out = np.full(len(p), UNKNOWN, dtype=object)
        out[p >= self.threshold] = positive
        out[p <= 1 - self.threshold] = negative
        return out


def train_nb(docs: Mapping[str, Sequence[str]], labels: Mapping[str, str], alpha: float = 1.0, seed: int = 0) -> NaiveBayesStance:
    users = sorted(u for u in labels if u in docs)
    return NaiveBayesStance(alpha=alpha, random_state=seed).fit([docs[u] for u in users], [labels[u] for u in users])


def classify_nb(model: NaiveBayesStance, doc: Sequence[str], threshold: float = 0.99) -> tuple[str, float]:
    """Return ``(label, P(rights | doc))`` with the symmetric confidence rule."""
    if not 0.5 < threshold <= 1:
        raise ValueError("threshold must lie in (0.5, 1]")
    p = float(model.positive_proba([doc])[0])
    if p >= threshold:
        return RIGHTS, p
    if p <= 1 - threshold:
        return CONTROL, p
    return UNKNOWN, p


# -- corpus comparison -------------------------------------------------------


def log_odds_dirichlet(
    counts_i: Mapping[str, int],
    counts_j: Mapping[str, int],
    background: Mapping[str, int],
    prior_scale: float = 0.01,
) -> pd.DataFrame:
    """Log-odds ratio with an informative Dirichlet prior (Monroe, Colaresi & Quinn 2008).

    The prior puts ``prior_scale * background[w]`` pseudo-counts on each token,
    i.e. a total prior mass of ``prior_scale`` times the background size.
    Returns a frame indexed by token with ``delta``, ``variance`` and ``z``;
    positive values mean over-representation in corpus ``i``.
    """
    vocab = sorted(set(counts_i) | set(counts_j))
    missing = [w for w in vocab if background.get(w, 0) <= 0]
    if missing:
        raise ValueError(f"{len(missing)} tokens missing from background, e.g. {missing[:3]}")
    bg_total = float(sum(background.values()))
    n_i, n_j = float(sum(counts_i.values())), float(sum(counts_j.values()))
    if bg_total <= 0 or n_i <= 0 or n_j <= 0:
        raise ValueError("corpus totals must be positive")
    if sum(1 for v in background.values() if v > 0) < 2:
        raise ValueError("background needs at least two distinct tokens; log-odds are undefined otherwise")
    a0 = prior_scale * bg_total
    aw = np.array([a0 * background[w] / bg_total for w in vocab])
    yi = np.array([counts_i.get(w, 0) for w in vocab], dtype=np.float64)
    yj = np.array([counts_j.get(w, 0) for w in vocab], dtype=np.float64)
    delta = (np.log(yi + aw) - np.log((n_i - yi) + (a0 - aw))) - (np.log(yj + aw) - np.log((n_j - yj) + (a0 - aw)))
    var = 1.0 / (yi + aw) + 1.0 / (yj + aw)
    return pd.DataFrame({"delta": delta, "variance": var, "z": delta / np.sqrt(var)}, index=pd.Index(vocab, name="token"))


# -- lexicons ----------------------------------------------------------------


def load_lexicon(path: str | Path) -> frozenset[str] | dict[str, float]:
    """Read ``term[,score]`` rows (optional header).  Returns a term set, or a
    term -> score map when every row carries a score."""
    terms: dict[str, float | None] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or not row[0].strip():
                continue
            if i == 0 and row[0].strip().lower() == "term":
                continue
            term = row[0].strip().lower()
            terms[term] = float(row[1]) if len(row) > 1 and row[1].strip() else None
    if terms and all(v is not None for v in terms.values()):
        return {k: float(v) for k, v in terms.items()}
    return frozenset(terms)


def lexicon_rate(doc: Sequence[str], lexicon: Iterable[str]) -> float:
    if not doc:
        return 0.0
    lex = lexicon if isinstance(lexicon, (set, frozenset, dict)) else set(lexicon)
    return sum(1 for t in doc if t in lex) / len(doc)


def sentiment_avg(doc: Sequence[str], lexicon: Mapping[str, float]) -> float | None:
    """Mean lexicon score of matched tokens; ``None`` when nothing matches."""
    scores = [lexicon[t] for t in doc if t in lexicon]
    return sum(scores) / len(scores) if scores else None


@dataclass(frozen=True)
class CategoryDictionary:
    """Category -> patterns; a trailing ``*`` matches any continuation (including none)."""

    categories: tuple[tuple[str, tuple[str, ...]], ...]

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Iterable[str]]) -> "CategoryDictionary":
        cats = []
        for name, pats in mapping.items():
            pats = tuple(p.strip().lower() for p in pats)
            if any(not p or p == "*" for p in pats):
                raise ValueError(f"empty pattern in category {name!r}")
            cats.append((name, pats))
        if len({c for c, _ in cats}) != len(cats):
            raise ValueError("duplicate category names")
        return cls(tuple(cats))

    @classmethod
    def from_file(cls, path: str | Path) -> "CategoryDictionary":
        mapping: dict[str, list[str]] = {}
        current = None
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith(";"):
                    continue
                if line.startswith("[") and line.endswith("]"):
                    current = line[1:-1].strip()
                    if current in mapping:
                        raise ValueError(f"{path}:{lineno}: duplicate category {current!r}")
                    mapping[current] = []
                elif current is None:
                    raise ValueError(f"{path}:{lineno}: pattern before any [category] header")
                else:
                    mapping[current].append(line)
        return cls.from_mapping(mapping)

    @property
    def names(self) -> list[str]:
        return [c for c, _ in self.categories]

    def matcher(self):
        compiled = []
        for name, pats in self.categories:
            exact = frozenset(p for p in pats if not p.endswith("*"))
            prefixes = tuple(p[:-1] for p in pats if p.endswith("*"))
            compiled.append((name, exact, prefixes))

        @lru_cache(maxsize=None)
        def match(token: str) -> tuple[str, ...]:
            return tuple(name for name, exact, pre in compiled if token in exact or token.startswith(pre))

        return match


def category_rates(doc: Sequence[str], categories: CategoryDictionary, matcher=None) -> dict[str, float]:
    """Fraction of tokens matching each category; a token may count for several categories."""
    hits = dict.fromkeys(categories.names, 0)
    if not doc:
        return {k: 0.0 for k in hits}
    match = matcher or categories.matcher()
    for tok in doc:
        for name in match(tok):
            hits[name] += 1
    return {k: v / len(doc) for k, v in hits.items()}


def shannon_entropy(counts: Mapping[object, float] | Iterable[float]) -> float:
    """Base-2 entropy of the normalized counts (0 for an empty or all-zero distribution)."""
    values = list(counts.values()) if isinstance(counts, Mapping) else list(counts)
    if any(v < 0 for v in values):
        raise ValueError("counts must be non-negative")
    total = float(sum(values))
    if total == 0:
        return 0.0
    h = -sum((v / total) * math.log2(v / total) for v in values if v > 0)
    return max(h, 0.0)
