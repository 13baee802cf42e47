"""State- and user-level feature extraction."""

from .graph_metrics import average_clustering, degree_assortativity, density, gini, local_clustering, pagerank
from .matrix import (
    ExternalTable,
    FeatureMatrix,
    MissingValueFilter,
    SkewZScoreTransformer,
    concat_columns,
    join_external,
    missing_policy,
    standardize_and_transform,
)
from .state import state_network_features, state_user_averages
from .user import (
    ContentResources,
    GraphContext,
    UserNetworkFeatures,
    user_content_behavior_features,
    user_feature_matrix,
    user_network_features,
    user_tokens,
)

__all__ = [
    "ContentResources",
    "ExternalTable",
    "FeatureMatrix",
    "GraphContext",
    "MissingValueFilter",
    "SkewZScoreTransformer",
    "UserNetworkFeatures",
    "average_clustering",
    "concat_columns",
    "degree_assortativity",
    "density",
    "gini",
    "join_external",
    "local_clustering",
    "missing_policy",
    "pagerank",
    "standardize_and_transform",
    "state_network_features",
    "state_user_averages",
    "user_content_behavior_features",
    "user_feature_matrix",
    "user_network_features",
    "user_tokens",
]
