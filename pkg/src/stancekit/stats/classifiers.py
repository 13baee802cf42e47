"""Class-weighted logistic regression, linear SVM and random forest."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np
import scipy.linalg
from scipy.special import expit, log_expit
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.ensemble import RandomForestClassifier
from sklearn.svm import SVC

KINDS = ("logreg", "linear_svm", "random_forest")


def class_weights(labels, exact: bool = False) -> dict:
    """Balanced class weights ``n / (k * n_j)``.

    With ``exact=True`` the weights are :class:`fractions.Fraction` values, so
    ``sum(w[j] * n_j) == n`` holds exactly.
    """
    counts = Counter(np.asarray(labels).tolist())
    if len(counts) < 1:
        raise ValueError("no labels")
    n, k = sum(counts.values()), len(counts)
    if exact:
        return {c: Fraction(n, k * nj) for c, nj in sorted(counts.items())}
    return {c: n / (k * nj) for c, nj in sorted(counts.items())}


def logistic_loss_grad(params: np.ndarray, X: np.ndarray, y01: np.ndarray, sample_weight: np.ndarray, C: float):
    """Weighted logistic loss plus ``||beta||^2 / (2C)`` and its gradient.

    ``params`` is ``[intercept, beta...]``; the intercept is not penalized.
    """
    b, beta = params[0], params[1:]
    z = X @ beta + b
    # -log p(y|z) = -y log s(z) - (1 - y) log s(-z)
    loss = -(sample_weight * (y01 * log_expit(z) + (1 - y01) * log_expit(-z))).sum() + beta @ beta / (2 * C)
    r = sample_weight * (expit(z) - y01)
    grad = np.concatenate([[r.sum()], X.T @ r + beta / C])
    return float(loss), grad


class LogisticRegressionL2(ClassifierMixin, BaseEstimator):
    """Binary L2-regularized logistic regression fitted by damped Newton steps.

    Minimizes the class-weighted log loss plus ``||coef||^2 / (2C)``.  Stops
    when the gradient max-norm falls below ``tol`` or after ``max_iter`` steps.
    ``class_weight`` may be ``None``, ``"balanced"`` or a dict.
    """

    def __init__(self, C=1.0, class_weight="balanced", tol=1e-6, max_iter=1000):
        self.C = C
        self.class_weight = class_weight
        self.tol = tol
        self.max_iter = max_iter

    def _weights(self, y):
        if self.class_weight is None:
            return np.ones(len(y))
        cw = class_weights(y) if self.class_weight == "balanced" else self.class_weight
        return np.array([cw[v] for v in y.tolist()], dtype=np.float64)

    def fit(self, X, y, sample_weight=None):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        self.classes_ = np.unique(y)
        if len(self.classes_) != 2:
            raise ValueError(f"need exactly two classes, got {self.classes_.tolist()}")
        y01 = (y == self.classes_[1]).astype(np.float64)
        sw = self._weights(y)
        if sample_weight is not None:
            sw = sw * np.asarray(sample_weight, dtype=np.float64)
        n, p = X.shape
        A = np.column_stack([np.ones(n), X])
        reg = np.full(p + 1, 1.0 / self.C)
        reg[0] = 0.0
        params = np.zeros(p + 1)
        loss, grad = logistic_loss_grad(params, X, y01, sw, self.C)
        self.n_iter_ = 0
        for it in range(self.max_iter):
            if np.max(np.abs(grad)) < self.tol:
                break
            s = expit(A @ params)
            h = (A * (sw * s * (1 - s))[:, None]).T @ A + np.diag(reg)
            h[0, 0] += 1e-12
            try:
                step = scipy.linalg.solve(h, grad, assume_a="pos")
            except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
                step = np.linalg.lstsq(h, grad, rcond=None)[0]
            t = 1.0
            while True:
                cand = params - t * step
                new_loss, new_grad = logistic_loss_grad(cand, X, y01, sw, self.C)
                if new_loss <= loss - 1e-4 * t * (grad @ step) or t < 1e-10:
                    break
                t *= 0.5
            params, loss, grad = cand, new_loss, new_grad
            self.n_iter_ = it + 1
        self.intercept_ = params[:1].copy()
        self.coef_ = params[None, 1:].copy()
        self.loss_ = loss
        return self

    def decision_function(self, X):
        return np.asarray(X, dtype=np.float64) @ self.coef_[0] + self.intercept_[0]

    def predict_proba(self, X):
        p1 = expit(self.decision_function(X))
        return np.column_stack([1 - p1, p1])

    def predict(self, X):
        return self.classes_[(self.decision_function(X) > 0).astype(int)]


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str = "logreg"
    C: float = 1.0
    gamma: str = "scale"  # recorded for the linear SVM; has no effect on a linear kernel
    n_estimators: int = 10
    criterion: str = "gini"
    min_samples_split: int = 2
    class_weight: str | None = "balanced"
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown classifier kind {self.kind!r}; expected one of {KINDS}")

    def with_seed(self, seed: int) -> "ClassifierSpec":
        return replace(self, seed=seed)


def make_classifier(spec: ClassifierSpec, y=None):
    """Unfitted estimator for ``spec``; balanced class weights are computed from ``y``."""
    cw = None
    if spec.class_weight == "balanced":
        if y is None:
            raise ValueError("labels are needed to compute balanced class weights")
        cw = class_weights(y)
    if spec.kind == "logreg":
        return LogisticRegressionL2(C=spec.C, class_weight=cw, **spec.params)
    if spec.kind == "linear_svm":
        return SVC(kernel="linear", C=spec.C, class_weight=cw, **spec.params)
    return RandomForestClassifier(
        n_estimators=spec.n_estimators,
        criterion=spec.criterion,
        min_samples_split=spec.min_samples_split,
        max_features="sqrt",
        bootstrap=True,
        class_weight=cw,
        random_state=spec.seed,
        **spec.params,
    )


def fit_classifier(spec: ClassifierSpec, X, y):
    y = np.asarray(y)
    if len(np.unique(y)) != 2:
        raise ValueError("training labels must contain exactly two classes")
    return make_classifier(spec, y).fit(np.asarray(X, dtype=np.float64), y)


def train_logreg(X, y, spec: ClassifierSpec | None = None):
    return fit_classifier(spec or ClassifierSpec("logreg"), X, y)


def train_linear_svm(X, y, spec: ClassifierSpec | None = None):
    return fit_classifier(spec or ClassifierSpec("linear_svm"), X, y)


def train_random_forest(X, y, spec: ClassifierSpec | None = None):
    return fit_classifier(spec or ClassifierSpec("random_forest"), X, y)
