"""Feature selection, regression, classifiers and cross-validation."""

from .classifiers import (
    ClassifierSpec,
    LogisticRegressionL2,
    class_weights,
    fit_classifier,
    logistic_loss_grad,
    make_classifier,
    train_linear_svm,
    train_logreg,
    train_random_forest,
)
from .linear import (
    CorrelationSelector,
    OLSFit,
    RankDeficiencyError,
    VIFPruner,
    correlation_matrix,
    ols,
    pearson,
    select_by_correlation,
    vif,
    vif_prune,
)
from .validation import (
    AblationReport,
    CVResult,
    ablation,
    cohens_kappa,
    confusion,
    kfold_cv,
    kfold_indices,
    largest_remainder,
    metrics,
    stratified_sample,
)

__all__ = [
    "AblationReport",
    "CVResult",
    "ClassifierSpec",
    "CorrelationSelector",
    "LogisticRegressionL2",
    "OLSFit",
    "RankDeficiencyError",
    "VIFPruner",
    "ablation",
    "class_weights",
    "cohens_kappa",
    "confusion",
    "correlation_matrix",
    "fit_classifier",
    "kfold_cv",
    "kfold_indices",
    "largest_remainder",
    "logistic_loss_grad",
    "make_classifier",
    "metrics",
    "ols",
    "pearson",
    "select_by_correlation",
    "stratified_sample",
    "train_linear_svm",
    "train_logreg",
    "train_random_forest",
    "vif",
    "vif_prune",
]
