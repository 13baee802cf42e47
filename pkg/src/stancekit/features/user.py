"""User-level network, content and account features."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import pandas as pd

from ..graph import EndorsementGraph
from ..ingest import SECONDS_PER_DAY, UserRecord
from ..text import CategoryDictionary, category_rates, lexicon_rate, sentiment_avg, shannon_entropy, tokenize
from .graph_metrics import local_clustering, pagerank
from .matrix import FeatureMatrix

NETWORK_COLUMNS = (
    "net_in_gcc",
    "net_in_degree",
    "net_out_degree",
    "net_max_in_weight",
    "net_max_out_weight",
    "net_pagerank",
    "net_clustering",
    "net_avg_in_neigh_in_degree",
    "net_avg_out_neigh_in_degree",
)
CONTENT_COLUMNS = (
    "con_rt_count",
    "con_rt_entropy",
    "con_hashtag_count",
    "con_hashtag_entropy",
    "con_vocab_count",
    "con_vocab_entropy",
    "con_hate_rate",
    "con_sentiment",
)
BEHAVIOR_COLUMNS = (
    "twt_followers",
    "twt_friends",
    "twt_follower_friend_ratio",
    "twt_account_age",
    "twt_gun_tweet_count",
    "twt_gun_tweet_rate",
    "twt_all_tweet_rate",
    "twt_english_tweet_count",
)


@dataclass
class ContentResources:
    stopwords: frozenset[str] = frozenset()
    hate: frozenset[str] = frozenset()
    sentiment: dict[str, float] = field(default_factory=dict)
    categories: CategoryDictionary | None = None


@dataclass
class UserNetworkFeatures:
    in_gcc: int
    in_degree: int
    out_degree: int
    max_in_weight: int
    max_out_weight: int
    pagerank: float
    clustering: float
    avg_in_neigh_in_degree: float | None
    avg_out_neigh_in_degree: float | None

    def as_row(self) -> dict[str, float]:
        vals = (
            self.in_gcc,
            self.in_degree,
            self.out_degree,
            self.max_in_weight,
            self.max_out_weight,
            self.pagerank,
            self.clustering,
            self.avg_in_neigh_in_degree,
            self.avg_out_neigh_in_degree,
        )
        return {c: (np.nan if v is None else float(v)) for c, v in zip(NETWORK_COLUMNS, vals)}


class GraphContext:
    """Precomputed PageRank and clustering so per-user lookups are cheap."""

    def __init__(self, g: EndorsementGraph, gcc: Iterable[str] = (), teleport: Mapping[str, float] | None = None):
        self.graph = g
        self.gcc = frozenset(gcc)
        self.pagerank = pagerank(g, teleport=dict(teleport) if teleport else None)
        self.clustering = dict(zip(g.nodes, local_clustering(g).tolist())) if g.nodes else {}


def user_network_features(g: EndorsementGraph | GraphContext, user: str, gcc: Iterable[str] = ()) -> UserNetworkFeatures:
    """Table-2 style features of one user.

    Users absent from the graph get zero degrees, zero PageRank and clustering,
    and missing neighbourhood averages.
    """
    ctx = g if isinstance(g, GraphContext) else GraphContext(g, gcc)
    graph = ctx.graph
    if user not in graph:
        return UserNetworkFeatures(0, 0, 0, 0, 0, 0.0, 0.0, None, None)
    ins, outs = graph.in_neighbors(user), graph.out_neighbors(user)
    avg_in = float(np.mean([graph.in_degree(v) for v in ins])) if ins else None
    avg_out = float(np.mean([graph.in_degree(v) for v in outs])) if outs else None
    return UserNetworkFeatures(
        in_gcc=int(user in ctx.gcc),
        in_degree=len(ins),
        out_degree=len(outs),
        max_in_weight=max(ins.values(), default=0),
        max_out_weight=max(outs.values(), default=0),
        pagerank=ctx.pagerank[user],
        clustering=ctx.clustering[user],
        avg_in_neigh_in_degree=avg_in,
        avg_out_neigh_in_degree=avg_out,
    )


def user_tokens(user: UserRecord, stopwords: Iterable[str] = frozenset(), before: float | None = None) -> list[str]:
    """Tokens of the user's original (non-retweet) posts, optionally only those before ``before``."""
    toks: list[str] = []
    for p in user.posts:
        if p.is_retweet or (before is not None and p.timestamp >= before):
            continue
        toks.extend(tokenize(p.text, stopwords))
    return toks


def user_content_behavior_features(
    user: UserRecord,
    tokens: Sequence[str],
    resources: ContentResources,
    window_start: float,
    window_end: float,
    before: float | None = None,
    matcher=None,
) -> dict[str, float]:
    """Content, account and category-rate features of one user.

    ``before`` restricts the post-derived counts to posts strictly earlier
    than that timestamp.  Rates are per day; account age is measured at
    ``window_end``.
    """
    posts = [p for p in user.posts if before is None or p.timestamp < before]
    rt_sources = Counter(p.retweeted_user_id for p in posts if p.is_retweet)
    tags = Counter(t for p in posts for t in p.hashtags)
    vocab = Counter(tokens)
    sent = sentiment_avg(tokens, resources.sentiment)
    row = {
        "con_rt_count": float(sum(rt_sources.values())),
        "con_rt_entropy": shannon_entropy(rt_sources),
        "con_hashtag_count": float(sum(tags.values())),
        "con_hashtag_entropy": shannon_entropy(tags),
        "con_vocab_count": float(len(vocab)),
        "con_vocab_entropy": shannon_entropy(vocab),
        "con_hate_rate": lexicon_rate(tokens, resources.hate),
        "con_sentiment": np.nan if sent is None else sent,
    }
    end = window_end if before is None else min(before, window_end)
    span_days = max((end - window_start) / SECONDS_PER_DAY, 1.0)
    age_days = np.nan if user.account_created is None else (window_end - user.account_created) / SECONDS_PER_DAY
    followers = np.nan if user.followers_count is None else float(user.followers_count)
    friends = np.nan if user.friends_count is None else float(user.friends_count)
    if user.statuses_count is None or not age_days > 0:
        all_rate = np.nan
    else:
        all_rate = user.statuses_count / age_days
    row.update(
        {
            "twt_followers": followers,
            "twt_friends": friends,
            "twt_follower_friend_ratio": followers / friends if friends and friends > 0 else np.nan,
            "twt_account_age": age_days,
            "twt_gun_tweet_count": float(len(posts)),
            "twt_gun_tweet_rate": len(posts) / span_days,
            "twt_all_tweet_rate": all_rate,
            "twt_english_tweet_count": float(sum(p.is_english for p in posts)),
        }
    )
    if resources.categories is not None:
        rates = category_rates(tokens, resources.categories, matcher)
        row.update({f"liwc_{k}": v for k, v in rates.items()})
    return row


def user_feature_matrix(
    users: Sequence[UserRecord],
    ctx: GraphContext | None,
    resources: ContentResources,
    window_start: float,
    window_end: float,
    before: float | None = None,
) -> FeatureMatrix:
    """One row per user: network (if ``ctx``), content, behavior and ``liwc_`` columns."""
    matcher = resources.categories.matcher() if resources.categories is not None else None
    rows, prov = {}, {}
    for u in users:
        toks = user_tokens(u, resources.stopwords, before)
        row = {}
        if ctx is not None:
            row.update(user_network_features(ctx, u.user_id).as_row())
        row.update(user_content_behavior_features(u, toks, resources, window_start, window_end, before, matcher))
        rows[u.user_id] = row
    frame = pd.DataFrame.from_dict(rows, orient="index")
    frame.index.name = "key"
    for col in frame.columns:
        if col.startswith("net_"):
            prov[col] = "network"
        elif col.startswith("con_"):
            prov[col] = "content"
        elif col.startswith("twt_"):
            prov[col] = "behavior"
        else:
            prov[col] = "liwc"
    return FeatureMatrix(frame.sort_index(), prov)
