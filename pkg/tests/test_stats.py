import math
from fractions import Fraction

import numpy as np
import pandas as pd
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from stancekit.stats import (
    ClassifierSpec,
    CorrelationSelector,
    LogisticRegressionL2,
    RankDeficiencyError,
    VIFPruner,
    ablation,
    class_weights,
    cohens_kappa,
    confusion,
    correlation_matrix,
    fit_classifier,
    kfold_cv,
    kfold_indices,
    largest_remainder,
    metrics,
    ols,
    pearson,
    select_by_correlation,
    stratified_sample,
    train_linear_svm,
    train_random_forest,
    vif,
)
from stancekit.stats.linear import f_sf


def test_pearson_examples():
    assert pearson([1, 2, 3], [2, 4, 6]) == 1.0
    assert pearson([1, 2, 3], [3, 2, 1]) == -1.0
    assert pearson([1, 2, 3, 4], [1, -1, -1, 1]) == 0.0
    with pytest.raises(ValueError):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        pearson([1], [1])


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.floats(-100, 100), st.floats(-100, 100)), min_size=3, max_size=30))
def test_pearson_matches_scipy(pairs):
    x, y = map(np.array, zip(*pairs))
    if np.ptp(x) < 1e-3 or np.ptp(y) < 1e-3:
        return
    assert pearson(x, y) == pytest.approx(scipy.stats.pearsonr(x, y)[0], abs=1e-9)


def _target_and(r, n=400, seed=0):
    """Column with sample correlation exactly ``r`` to the returned target."""
    rng = np.random.default_rng(seed)
    y = rng.normal(size=n)
    e = rng.normal(size=n)
    y0, e0 = y - y.mean(), e - e.mean()
    e0 -= (e0 @ y0) / (y0 @ y0) * y0
    y0 /= np.linalg.norm(y0)
    e0 /= np.linalg.norm(e0)
    return y, r * y0 + math.sqrt(1 - r * r) * e0


def test_select_by_correlation_boundary():
    y, a = _target_and(0.31)
    _, b = _target_and(-0.31)
    _, c = _target_and(0.29)
    frame = pd.DataFrame({"a": a, "b": b, "c": c, "k": np.ones_like(a)})
    assert pearson(c, y) == pytest.approx(0.29, abs=1e-12)
    sel = CorrelationSelector(0.3).fit(frame, y)
    assert sel.selected_ == ["a", "b"]
    assert [(name, reason) for name, _, reason in sel.log_] == [
        ("a", "kept"), ("b", "kept"), ("c", "below_threshold"), ("k", "constant"),
    ]
    assert select_by_correlation(frame, y, min_abs=0.25) == ["a", "b", "c"]


def test_correlation_matrix():
    rng = np.random.default_rng(0)
    frame = pd.DataFrame(rng.normal(size=(50, 4)), columns=list("abcd"))
    c = correlation_matrix(frame)
    assert np.allclose(c.to_numpy(), np.corrcoef(frame.to_numpy(), rowvar=False), atol=1e-12)
    with pytest.raises(ValueError):
        correlation_matrix(pd.DataFrame({"a": [1.0, np.nan, 2.0]}))


def test_vif_orthogonal_and_duplicate():
    # exactly orthogonal centred columns
    h = np.array([[1, 1, 1], [1, -1, 1], [-1, 1, -1], [-1, -1, -1], [1, 1, -1], [1, -1, -1], [-1, 1, 1], [-1, -1, 1]], float)
    v = vif(pd.DataFrame(h, columns=list("abc")))
    assert np.allclose(v, 1.0, atol=1e-12)
    rng = np.random.default_rng(1)
    x = rng.normal(size=(40, 2))
    dup = pd.DataFrame({"a": x[:, 0], "b": x[:, 1], "a2": 2 * x[:, 0] + 1})
    assert math.isinf(vif(dup)["a"]) and math.isinf(vif(dup)["a2"])
    pr = VIFPruner(6.0).fit(dup)
    assert pr.removed_[0][0] == "a" and pr.selected_ == ["b", "a2"]
    assert (pr.vif_ < 6).all()


@settings(max_examples=20, deadline=None)
@given(st.permutations(range(30)))
def test_vif_invariant_to_row_shuffle(perm):
    rng = np.random.default_rng(2)
    x = rng.normal(size=(30, 3))
    x[:, 2] += x[:, 0]
    frame = pd.DataFrame(x, columns=list("abc"))
    assert np.allclose(vif(frame), vif(frame.iloc[list(perm)]), rtol=1e-9)


def test_ols_exact_fit():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(20, 3))
    y = 1.5 + X @ np.array([2.0, -1.0, 0.5])
    fit = ols(X, y)
    assert np.allclose(fit.coef, [2.0, -1.0, 0.5], atol=1e-12) and fit.intercept == pytest.approx(1.5)
    assert fit.r2 == 1.0 and fit.f_pvalue == 0.0


def test_ols_rank_deficiency_names_columns():
    rng = np.random.default_rng(4)
    X = pd.DataFrame(rng.normal(size=(20, 2)), columns=["a", "b"])
    X["c"] = X.a + X.b
    with pytest.raises(RankDeficiencyError) as err:
        ols(X, rng.normal(size=20))
    assert len(err.value.columns) == 1 and err.value.columns[0] in {"a", "b", "c"}
    with pytest.raises(ValueError):
        ols(np.ones((3, 2)), np.ones(3))


def test_ols_matches_normal_equations():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(60, 3))
    y = X @ np.array([1.0, 0.0, -2.0]) + rng.normal(size=60)
    fit = ols(X, y)
    A = np.column_stack([np.ones(60), X])
    XtX_inv = np.linalg.inv(A.T @ A)
    beta = XtX_inv @ A.T @ y
    resid = y - A @ beta
    s2 = resid @ resid / (60 - 4)
    assert np.allclose(fit.coef, beta[1:], atol=1e-12)
    assert np.allclose(fit.std_err, np.sqrt(s2 * np.diag(XtX_inv))[1:], rtol=1e-10)
    assert np.allclose(A.T @ fit.residuals, 0, atol=1e-9)
    lr = scipy.stats.linregress(X[:, 0], y)
    one = ols(X[:, 0], y)
    assert one.coef[0] == pytest.approx(lr.slope) and one.r2 == pytest.approx(lr.rvalue**2)
    assert fit.adj_r2 < fit.r2


@pytest.mark.parametrize("f,d1,d2", [(0.5, 1, 5), (2.3, 3, 46), (10.0, 7, 12), (1e-4, 2, 2), (50.0, 1, 100)])
def test_f_survival_matches_scipy(f, d1, d2):
    assert f_sf(f, d1, d2) == pytest.approx(scipy.stats.f.sf(f, d1, d2), rel=1e-10)


def test_class_weights_examples():
    w = class_weights(["a"] * 430 + ["b"] * 392)
    assert w["a"] == pytest.approx(0.9558, abs=1e-4) and w["b"] == pytest.approx(1.0485, abs=1e-4)
    w = class_weights([0] * 9 + [1])
    assert w == {0: pytest.approx(5 / 9), 1: 5.0}
    ex = class_weights(["x"] * 7 + ["y"] * 3, exact=True)
    assert ex["x"] * 7 + ex["y"] * 3 == 10 and isinstance(ex["x"], Fraction)


def test_logreg_separable():
    X = np.array([[-2.0], [-1.0], [1.0], [2.0]])
    y = np.array([0, 0, 1, 1])
    m = LogisticRegressionL2(C=10.0).fit(X, y)
    assert (m.predict(X) == y).all() and m.coef_[0, 0] > 0


def test_logreg_label_symmetric_data_gives_zero_coefficients():
    X = np.array([[1.0, 2.0], [1.0, 2.0], [-3.0, 0.5], [-3.0, 0.5]])
    y = np.array([0, 1, 0, 1])
    m = LogisticRegressionL2().fit(X, y)
    assert np.allclose(m.coef_, 0, atol=1e-8) and abs(m.intercept_[0]) < 1e-8


def test_logreg_recovers_planted_coefficients():
    rng = np.random.default_rng(6)
    n = 5000
    X = rng.normal(size=(n, 3))
    beta = np.array([1.0, -2.0, 0.0])
    y = (rng.random(n) < 1 / (1 + np.exp(-(X @ beta + 0.5)))).astype(int)
    m = LogisticRegressionL2(C=100.0, class_weight=None).fit(X, y)
    assert np.allclose(m.coef_[0], beta, atol=0.1)
    assert m.intercept_[0] == pytest.approx(0.5, abs=0.1)


def test_logreg_label_flip_negates():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(200, 2))
    y = (X[:, 0] + rng.normal(size=200) > 0).astype(int)
    a = LogisticRegressionL2().fit(X, y)
    b = LogisticRegressionL2().fit(X, 1 - y)
    assert np.allclose(a.coef_, -b.coef_, atol=1e-6) and np.allclose(a.intercept_, -b.intercept_, atol=1e-6)


def test_single_class_rejected_and_rf_determinism():
    X = np.random.default_rng(8).normal(size=(30, 3))
    with pytest.raises(ValueError):
        train_linear_svm(X, np.zeros(30))
    y = (X[:, 0] > 0).astype(int)
    spec = ClassifierSpec("random_forest", seed=11)
    a, b = fit_classifier(spec, X, y), fit_classifier(spec, X, y)
    assert np.array_equal(a.predict_proba(X), b.predict_proba(X))
    assert train_random_forest(X, y).n_estimators == 10
    with pytest.raises(ValueError):
        ClassifierSpec("knn")


def test_kfold_indices():
    folds = kfold_indices(10, 5, seed=0)
    assert [len(f) for f in folds] == [2] * 5
    assert sorted(np.concatenate(folds).tolist()) == list(range(10))
    assert all(np.array_equal(a, b) for a, b in zip(folds, kfold_indices(10, 5, seed=0)))
    assert [len(f) for f in kfold_indices(11, 5, 0)] == [3, 2, 2, 2, 2]
    with pytest.raises(ValueError):
        kfold_indices(3, 5, 0)


def test_metrics_examples():
    m = metrics(3, 1, 1, 5)
    assert (m["accuracy"], m["precision"], m["recall"], m["f1"]) == (0.8, 0.75, 0.75, 0.75)
    z = metrics(0, 0, 4, 6)
    assert z["precision"] == 0.0 and "precision" in z["undefined"] and "f1" in z["undefined"]
    assert confusion([1, 1, 0, 0], [1, 0, 1, 0], positive=1) == (1, 1, 1, 1)
    assert cohens_kappa(0.8, 0.5) == pytest.approx(0.6)
    with pytest.raises(ValueError):
        cohens_kappa(0.9, 1.0)


def _planted(n=300, seed=9):
    rng = np.random.default_rng(seed)
    X = pd.DataFrame(rng.normal(size=(n, 4)), columns=["s1", "s2", "n1", "n2"])
    y = (X.s1 + X.s2 + 0.3 * rng.normal(size=n) > 0).astype(int).to_numpy()
    return X, y


def test_ablation_consistency():
    X, y = _planted()
    groups = {"S": ["s1", "s2"], "N": ["n1", "n2"]}
    rep = ablation(groups, X, y, k=5, seed=2, cumulative=["SN", "S"]).rows.set_index(["kind", "features"])
    full = kfold_cv(ClassifierSpec(), X, y, k=5, seed=2).summary()
    for key, value in full.items():
        assert rep.loc[("full", "all"), key] == pytest.approx(value, abs=1e-12)
        assert rep.loc[("cumulative", "SN"), key] == pytest.approx(value, abs=1e-12)
    assert rep.loc[("only", "S"), "f1_mean"] > rep.loc[("only", "N"), "f1_mean"] + 0.2
    assert rep.loc[("excluded", "S"), "f1_mean"] < rep.loc[("excluded", "N"), "f1_mean"]
    with pytest.raises(ValueError):
        ablation({"S": ["s1", "s2"]}, X, y)


def test_ablation_ols_mode():
    X, _ = _planted()
    y = 2 * X.s1 + 0.1 * np.random.default_rng(0).normal(size=len(X))
    rep = ablation({"S": ["s1", "s2"], "N": ["n1", "n2"]}, X, y, mode="ols").rows.set_index(["kind", "features"])
    assert rep.loc[("full", "all"), "r2"] == pytest.approx(ols(X, y).r2)
    assert rep.loc[("only", "S"), "r2"] > 0.99 > rep.loc[("only", "N"), "r2"]


def test_largest_remainder():
    assert largest_remainder({"a": 1, "b": 1, "c": 1}, 10) == {"a": 4, "b": 3, "c": 3}
    assert largest_remainder({"a": 0.5, "b": 0.3, "c": 0.2}, 7) == {"a": 4, "b": 2, "c": 1}
    assert largest_remainder({"a": 9, "b": 1}, 10, capacity={"a": 5, "b": 10}) == {"a": 5, "b": 5}


@settings(max_examples=80, deadline=None)
@given(st.dictionaries(st.sampled_from("abcdefg"), st.integers(1, 50), min_size=1), st.integers(0, 200))
def test_largest_remainder_quota_property(weights, total):
    alloc = largest_remainder(weights, total)
    assert sum(alloc.values()) == total
    wsum = sum(weights.values())
    for k, w in weights.items():
        q = total * w / wsum
        assert math.floor(q) <= alloc[k] <= math.ceil(q)


def test_stratified_sample():
    cand = {f"t{i:02d}": "TX" for i in range(60)} | {f"n{i:02d}": "NY" for i in range(40)}
    s = stratified_sample(cand, 10, seed=1)
    assert sum(u.startswith("t") for u in s) == 6 and len(s) == 10
    assert s == stratified_sample(cand, 10, seed=1)
    ref = {f"r{i}": "NY" for i in range(3)} | {"r9": "TX"}
    assert sum(u.startswith("n") for u in stratified_sample(cand, 8, reference=ref)) == 6
    assert len(stratified_sample(cand, 500)) == 100
