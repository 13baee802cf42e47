"""Command-line pipeline: synth, ingest, stance, state-model, predict, top-terms."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import warnings
from collections import Counter
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .config import DEFAULT_CONFIG, GROUP_TAGS, ConfigError, DegenerateDataError, RunConfig
from .features import (
    ContentResources,
    ExternalTable,
    FeatureMatrix,
    GraphContext,
    concat_columns,
    join_external,
    missing_policy,
    state_network_features,
    state_user_averages,
    user_feature_matrix,
    user_tokens,
)
from .features.matrix import SkewZScoreTransformer
from .graph import EndorsementGraph, build_endorsement_graph, giant_component
from .ingest import (
    FILTER_RULES,
    Gazetteer,
    UserRecord,
    aggregate_users,
    apply_filters,
    parse_posts,
    read_posts,
    read_profiles,
    resolve_all,
)
from .partition import AnchorError, label_sides, louvain, modularity, optimize_balance
from .partition.ensemble import read_anchors, write_polarity_csv
from .stats import (
    ClassifierSpec,
    ablation,
    correlation_matrix,
    fit_classifier,
    kfold_cv,
    ols,
    stratified_sample,
)
from .stats.linear import CorrelationSelector, VIFPruner
from .synth import write_dataset
from .text import (
    CONTROL,
    RIGHTS,
    UNKNOWN,
    CategoryDictionary,
    NaiveBayesStance,
    default_stopwords,
    load_lexicon,
    load_stopwords,
    log_odds_dirichlet,
)

logger = logging.getLogger("stancekit")

FLOAT_FMT = "%.10g"


# -- output helpers --------------------------------------------------------------


def _write_json(path: Path, data) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, sort_keys=True, indent=1, allow_nan=True)
        fh.write("\n")


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([FLOAT_FMT % v if isinstance(v, float) else v for v in row])


def _write_frame(path: Path, frame: pd.DataFrame, index: bool = True) -> None:
    frame.to_csv(path, index=index, float_format=FLOAT_FMT, lineterminator="\n")


def _clean(value):
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return None if np.isnan(v) else v
    if isinstance(value, np.integer):
        return int(value)
    return value


# -- shared loading ----------------------------------------------------------------


def load_store(cfg: RunConfig) -> dict[str, UserRecord]:
    """Kept users with their posts, as persisted by the ingest command."""
    d = cfg.outdir / "ingest"
    if not (d / "users.jsonl").exists() or not (d / "posts.jsonl").exists():
        raise ConfigError(f"no ingest output under {d}; run the ingest command first")
    users: dict[str, UserRecord] = {}
    with open(d / "users.jsonl", encoding="utf-8") as fh:
        for line in fh:
            r = json.loads(line)
            users[r["user_id"]] = UserRecord(
                user_id=r["user_id"],
                followers_count=r["followers"],
                friends_count=r["friends"],
                account_created=r["created_ts"],
                location_string=r["location"],
                statuses_count=r["statuses"],
                resolved_state=r["resolved_state"],
                state_source=r["state_source"],
                per_state_tweet_counts=r["per_state_tweet_counts"],
            )
    posts, _ = read_posts(d / "posts.jsonl")
    for p in posts:
        rec = users.get(p.user_id)
        if rec is not None:
            rec.posts.append(p)
            rec.tweet_count += 1
            rec.english_tweet_count += p.is_english
    return users


def load_sides(cfg: RunConfig) -> dict[str, str]:
    path = cfg.outdir / "stance" / "sides.csv"
    if not path.exists():
        raise ConfigError(f"no stance output at {path}; run the stance command first")
    with open(path, newline="", encoding="utf-8") as fh:
        return {row["user_id"]: row["side"] for row in csv.DictReader(fh)}


def load_graph(cfg: RunConfig, users) -> EndorsementGraph:
    path = cfg.outdir / "stance" / "edges.csv"
    if path.exists():
        return EndorsementGraph.from_csv(path)
    posts = [p for u in users.values() for p in u.posts]
    return build_endorsement_graph(posts, set(users), cfg.getint("stance", "min_weight", 2))


def load_resources(cfg: RunConfig) -> ContentResources:
    sw_path = cfg.path_of("text", "stopwords", required=False)
    stop = load_stopwords(sw_path) if sw_path else default_stopwords()
    res = ContentResources(stopwords=stop)
    try:
        hate_path = cfg.path_of("text", "hate_lexicon", required=False)
        if hate_path:
            hate = load_lexicon(hate_path)
            res.hate = frozenset(hate)
        sent_path = cfg.path_of("text", "sentiment_lexicon", required=False)
        if sent_path:
            sent = load_lexicon(sent_path)
            if not isinstance(sent, dict):
                raise ConfigError(f"sentiment lexicon {sent_path} needs a score on every row")
            res.sentiment = sent
        cat_path = cfg.path_of("text", "categories", required=False)
        if cat_path:
            res.categories = CategoryDictionary.from_file(cat_path)
    except (ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from exc
    return res


def load_external(cfg: RunConfig, section: str) -> list[ExternalTable]:
    tables = []
    for item in cfg.getlist(section, "external"):
        if ":" not in item:
            raise ConfigError(f"[{section}] external entries must be tag:path, got {item!r}")
        tag, raw = item.split(":", 1)
        path = cfg.resolve(raw.strip())
        if not path.exists():
            raise ConfigError(f"external table not found: {path}")
        try:
            tables.append(ExternalTable.from_csv(path, tag.strip()))
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return tables


def load_truth(cfg: RunConfig) -> dict | None:
    path = cfg.path_of("stance", "truth", required=False, must_exist=False)
    if path is None or not path.exists():
        return None
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# -- commands ----------------------------------------------------------------------


def cmd_synth(cfg: RunConfig) -> dict:
    data_dir = cfg.resolve(cfg.get("synth", "data_dir", str(cfg.outdir / "synth")))
    files = write_dataset(cfg.synth_config(), data_dir)
    logger.info("synthetic dataset written to %s", data_dir)
    return files


def cmd_ingest(cfg: RunConfig) -> dict:
    posts_path = cfg.path_of("ingest", "posts")
    profiles_path = cfg.path_of("ingest", "profiles", required=False)
    gaz_path = cfg.path_of("ingest", "gazetteer")
    window_end = cfg.getfloat("ingest", "window_end")
    if window_end is None:
        raise ConfigError("missing [ingest] window_end")
    try:
        gaz = Gazetteer.from_csv(gaz_path)
    except (ValueError, OSError) as exc:
        raise ConfigError(f"bad gazetteer: {exc}") from exc
    try:
        with open(posts_path, encoding="utf-8", errors="replace") as fh:
            posts, skipped = parse_posts(fh)
        profiles, skipped_profiles = read_profiles(profiles_path) if profiles_path else ([], 0)
    except OSError as exc:
        raise ConfigError(f"cannot read input: {exc}") from exc
    users = aggregate_users(posts, profiles, gaz)
    resolve_all(users, gaz)
    kept, report = apply_filters(users, window_end)

    out = cfg.command_dir("ingest")
    with open(out / "posts.jsonl", "w", encoding="utf-8") as fh:
        for p in posts:
            if p.user_id in kept:
                fh.write(json.dumps(p.to_json(), separators=(",", ":")) + "\n")
    with open(out / "users.jsonl", "w", encoding="utf-8") as fh:
        for uid in sorted(kept):
            fh.write(json.dumps(users[uid].to_json(), sort_keys=True, separators=(",", ":")) + "\n")
    summary = report.to_json()
    summary["skipped_post_lines"] = skipped
    summary["skipped_profile_lines"] = skipped_profiles
    summary["top_activity_users"] = sorted(report.top_users)
    _write_json(out / "filter_report.json", summary)
    logger.info("ingest: %d of %d users kept", report.kept_count, report.input_count)
    return summary


def _truth_sides(truth: dict | None) -> dict[str, str]:
    if truth is None:
        return {}
    return {r["user_id"]: r["side"] for r in truth["users"] if r.get("side")}


def cmd_stance(cfg: RunConfig) -> dict:
    anchors_path = cfg.path_of("stance", "anchors")
    try:
        anchors = read_anchors(anchors_path)
    except (KeyError, OSError) as exc:
        raise ConfigError(f"bad anchors file {anchors_path}: {exc}") from exc
    if not anchors:
        raise ConfigError("anchors file lists no users")
    users = load_store(cfg)
    resources = load_resources(cfg)
    min_weight = cfg.getint("stance", "min_weight", 2)
    n_runs = cfg.getint("stance", "n_runs", 100)
    candidates = [float(x) for x in cfg.getlist("stance", "balance_candidates", ["1.0"])]
    threshold = cfg.getfloat("stance", "nb_threshold", 0.99)
    alpha = cfg.getfloat("stance", "nb_alpha", 1.0)
    seed = cfg.seed

    posts = [p for u in users.values() for p in u.posts]
    g = build_endorsement_graph(posts, set(users), min_weight)
    out = cfg.command_dir("stance")
    g.to_csv(out / "edges.csv")
    gcc = giant_component(g)
    if len(gcc) < 2:
        raise DegenerateDataError(f"giant component has {len(gcc)} nodes; nothing to partition")
    sub = g.subgraph(gcc)
    best, results = optimize_balance(sub, candidates, n_runs, seed)
    scores = results[best]
    try:
        sides = label_sides(scores, anchors)
    except AnchorError as exc:
        raise ConfigError(f"anchors: {exc}") from exc
    write_polarity_csv(out / "polarity.csv", scores, sides)
    _write_rows(
        out / "balance.csv",
        ["ratio", "extreme_count", "n_nodes"],
        [[float(r), results[r].extreme_count(), len(results[r].scores)] for r in sorted(results)],
    )

    # modularity: majority side of the ensemble vs Louvain
    assign = {u: int(p >= 0.5) for u, p in scores.scores.items()}
    q_bisect = modularity(sub, assign)
    comm, q_louvain = louvain(sub, seed)

    # text fallback for users outside the giant component
    docs = {u: user_tokens(users[u], resources.stopwords) for u in sorted(users)}
    train_ids = [u for u in sorted(gcc) if sides.labels[u] in (CONTROL, RIGHTS)]
    y_train = np.array([sides.labels[u] for u in train_ids])
    classes = set(y_train.tolist())
    nb_cv = None
    final: dict[str, tuple[str, str, float]] = {}
    for u in sorted(gcc):
        final[u] = (sides.labels[u], "graph", scores.scores[u])
    off = [u for u in sorted(users) if u not in gcc]
    if len(classes) == 2:
        model = NaiveBayesStance(alpha=alpha, threshold=threshold, random_state=seed)
        model.fit([docs[u] for u in train_ids], y_train)
        if len(train_ids) >= 5:
            cv = kfold_cv(NaiveBayesStance(alpha=alpha, random_state=seed), [docs[u] for u in train_ids], y_train, 5, seed, RIGHTS)
            nb_cv = cv.mean("accuracy")
        if off:
            probs = model.positive_proba([docs[u] for u in off], RIGHTS)
            for u, p in zip(off, probs.tolist()):
                label = RIGHTS if p >= threshold else CONTROL if p <= 1 - threshold else UNKNOWN
                final[u] = (label, "text", p)
    else:
        logger.warning("only one side present among graph labels; text classifier skipped")
        for u in off:
            final[u] = (UNKNOWN, "none", float("nan"))
    _write_rows(out / "sides.csv", ["user_id", "side", "source", "score"], [[u, *final[u]] for u in sorted(final)])

    counts = Counter(v[0] for v in final.values())
    report = {
        "graph_nodes": len(g.nodes),
        "graph_edges": g.n_edges,
        "gcc_size": len(gcc),
        "best_ratio": best,
        "extreme_counts": {str(r): results[r].extreme_count() for r in sorted(results)},
        "n_runs": n_runs,
        "side_counts_gcc": sides.counts(),
        "side_counts_all": {k: counts.get(k, 0) for k in (CONTROL, RIGHTS, UNKNOWN)},
        "modularity_bisection": q_bisect,
        "modularity_louvain": q_louvain,
        "louvain_communities": len(set(comm.values())),
        "nb_cv_accuracy": nb_cv,
        "nb_threshold": threshold,
        "anchors_used": [list(a) for a in sides.anchors],
    }
    truth = _truth_sides(load_truth(cfg))
    if truth:
        g_ok = [u for u in gcc if u in truth]
        report["truth_gcc_accuracy"] = sum(sides.labels[u] == truth[u] for u in g_ok) / len(g_ok) if g_ok else None
        txt = [u for u in off if u in truth]
        labelled = [u for u in txt if final[u][0] in (CONTROL, RIGHTS)]
        report["truth_text_users"] = len(txt)
        report["truth_text_labelled"] = len(labelled)
        report["truth_text_error_rate"] = (
            sum(final[u][0] != truth[u] for u in labelled) / len(labelled) if labelled else None
        )
    _write_json(out / "report.json", report)
    logger.info("stance: best ratio %s, Q bisection %.3f vs Louvain %.3f", best, q_bisect, q_louvain)
    return report


def _state_of(users: dict[str, UserRecord]) -> dict[str, str | None]:
    return {u: r.resolved_state for u, r in users.items()}


def _read_ratings(path: Path) -> pd.Series:
    try:
        frame = pd.read_csv(path, dtype={0: str})
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read ratings {path}: {exc}") from exc
    if frame.shape[1] < 2:
        raise ConfigError(f"ratings file {path} needs key and value columns")
    s = pd.to_numeric(frame.iloc[:, 1], errors="coerce")
    s.index = frame.iloc[:, 0].astype(str).str.strip()
    return s


def _stars(p: float) -> str:
    if p is None or np.isnan(p):
        return ""
    for cut, mark in ((1e-4, "***"), (1e-3, "**"), (1e-2, "*"), (5e-2, ".")):
        if p < cut:
            return mark
    return ""


def cmd_state_model(cfg: RunConfig) -> dict:
    ratings = _read_ratings(cfg.path_of("state_model", "ratings"))
    tables = load_external(cfg, "state_model")
    min_abs = cfg.getfloat("state_model", "min_abs_r", 0.3)
    max_vif = cfg.getfloat("state_model", "max_vif", 6.0)
    users = load_store(cfg)
    sides = load_sides(cfg)
    g = load_graph(cfg, users)
    resources = load_resources(cfg)
    state_of = _state_of(users)
    ingest_cfg_start = cfg.getfloat("ingest", "window_start", 0.0)
    window_end = cfg.getfloat("ingest", "window_end")

    user_fm = user_feature_matrix([users[u] for u in sorted(users)], None, resources, ingest_cfg_start, window_end)
    net = state_network_features(g, state_of, sides)
    avg = state_user_averages(user_fm, state_of, sides)
    fm = concat_columns(net, avg)
    for t in tables:
        fm = join_external(fm, t, {s: s for s in fm.frame.index})
    states = [s for s in fm.frame.index if s in ratings.index and not np.isnan(ratings[s])]
    if len(states) < 3:
        raise DegenerateDataError(f"only {len(states)} states have a rating")
    fm = fm.with_frame(fm.frame.loc[states])
    y = ratings.loc[states].to_numpy(dtype=np.float64)

    out = cfg.command_dir("state_model")
    fm.to_csv(out / "features.csv")
    log: list[list] = []
    frame = fm.frame
    complete = [c for c in frame.columns if not frame[c].isna().any()]
    for c in frame.columns:
        if c not in complete:
            log.append([c, "missing", float(frame[c].isna().mean()), "dropped"])
    frame = frame[complete]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        std = SkewZScoreTransformer().fit(frame)
    frame = std.transform(frame)
    nonconst = [c for c in frame.columns if c not in std.constant_columns_]
    for c in frame.columns:
        if c in std.constant_columns_:
            log.append([c, "constant", 0.0, "dropped"])
    frame = frame[nonconst]
    sel = CorrelationSelector(min_abs).fit(frame, y)
    for c, r, reason in sel.log_:
        log.append([c, "correlation", r, "kept" if reason == "kept" else f"dropped:{reason}"])
    frame = frame[sel.selected_]
    if frame.shape[1] >= 2:
        pruner = VIFPruner(max_vif).fit(frame)
        for c, v in pruner.removed_:
            log.append([c, "vif", v, "dropped"])
        for c in pruner.selected_:
            log.append([c, "vif", float(pruner.vif_[c]), "kept"])
        frame = frame[pruner.selected_]
    _write_rows(out / "selection_log.csv", ["column", "stage", "value", "decision"], log)
    if frame.shape[1] < 2:
        raise DegenerateDataError(f"only {frame.shape[1]} feature(s) survive selection; need at least 2")
    if frame.shape[0] <= frame.shape[1] + 1:
        raise DegenerateDataError(f"{frame.shape[0]} states cannot support {frame.shape[1]} regressors")

    fit = ols(frame, y)
    prov = {c: fm.provenance[c] for c in frame.columns}
    group_of = {c: ("twitter" if t in ("network", "content", "behavior") else t) for c, t in prov.items()}
    groups: dict[str, list[str]] = {}
    for c in frame.columns:
        groups.setdefault(group_of[c], []).append(c)
    rep = ablation(groups, frame, y, mode="ols").rows
    full = rep[rep.kind == "full"].iloc[0]
    rows = [["full", full.r2, full.f_pvalue, _stars(full.f_pvalue), full.r2, full.f_pvalue, _stars(full.f_pvalue)]]
    for gname in sorted(groups):
        only = rep[(rep.kind == "only") & (rep.features == gname)]
        exc = rep[(rep.kind == "excluded") & (rep.features == gname)]
        o_r2, o_p = (only.r2.iloc[0], only.f_pvalue.iloc[0]) if len(only) else (float("nan"), float("nan"))
        e_r2, e_p = (exc.r2.iloc[0], exc.f_pvalue.iloc[0]) if len(exc) else (float("nan"), float("nan"))
        rows.append([gname, float(o_r2), float(o_p), _stars(o_p), float(e_r2), float(e_p), _stars(e_p)])
    _write_rows(
        out / "ablation.csv",
        ["group", "only_r2", "only_p", "only_sig", "excluded_r2", "excluded_p", "excluded_sig"],
        rows,
    )
    corr = correlation_matrix(pd.concat([frame, pd.Series(y, index=frame.index, name="target")], axis=1))
    _write_frame(out / "correlation.csv", corr)
    _write_rows(
        out / "ols.csv",
        ["term", "coef", "std_err", "group"],
        [["intercept", fit.intercept, fit.intercept_std_err, ""]]
        + [[c, float(b), float(s), group_of[c]] for c, b, s in zip(frame.columns, fit.coef, fit.std_err)],
    )
    report = {
        "n_states": int(frame.shape[0]),
        "n_candidate_features": int(fm.shape[1]),
        "selected": list(frame.columns),
        "r2": fit.r2,
        "adj_r2": fit.adj_r2,
        "f_stat": fit.f_stat,
        "f_pvalue": fit.f_pvalue,
        "groups": {k: v for k, v in sorted(groups.items())},
    }
    truth = load_truth(cfg)
    if truth and truth.get("panel"):
        report["planted_r2"] = truth["panel"].get("planted_r2")
    _write_json(out / "report.json", report)
    logger.info("state model: %d features selected, R2 %.3f", frame.shape[1], fit.r2)
    return report


def _read_ids(path: Path) -> list[str]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "user_id" not in reader.fieldnames:
            raise ConfigError(f"{path} needs a user_id column")
        return sorted({row["user_id"].strip() for row in reader if row["user_id"].strip()})


def _group_columns(fm: FeatureMatrix, letters) -> dict[str, list[str]]:
    out = {}
    for letter in letters:
        if letter not in GROUP_TAGS:
            raise ConfigError(f"unknown feature group letter {letter!r}; expected one of {sorted(GROUP_TAGS)}")
        cols = [c for c in fm.columns if fm.provenance[c] == GROUP_TAGS[letter]]
        if cols:
            out[letter] = cols
    return out


def cmd_predict(cfg: RunConfig) -> dict:
    attendees_path = cfg.path_of("predict", "attendees")
    march_ts = cfg.getfloat("predict", "march_ts")
    if march_ts is None:
        raise ConfigError("missing [predict] march_ts")
    k = cfg.getint("predict", "k", 5)
    control_ratio = cfg.getfloat("predict", "control_ratio", 1.0)
    letters = cfg.getlist("predict", "groups", list(GROUP_TAGS))
    cumulative = cfg.getlist("predict", "cumulative", [])
    best_set = cfg.get("predict", "best_set", "".join(letters))
    top_k = cfg.getint("predict", "top_k", 20)
    col_threshold = cfg.getfloat("predict", "missing_threshold", 0.5)
    seed = cfg.seed
    tables = load_external(cfg, "state_model")
    users = load_store(cfg)
    g = load_graph(cfg, users)
    resources = load_resources(cfg)

    declared = _read_ids(attendees_path)
    attendees = [u for u in declared if u in users]
    others = {u: r.resolved_state for u, r in sorted(users.items()) if u not in set(attendees)}
    reference = {u: r.resolved_state for u, r in users.items()}
    size = int(round(control_ratio * len(attendees)))
    controls = stratified_sample(others, size, seed, reference)
    cohort = sorted(set(attendees) | set(controls))
    if len(attendees) == 0 or len(controls) == 0 or len(cohort) < k:
        raise DegenerateDataError(f"cohort of {len(attendees)} attendees and {len(controls)} controls is too small for {k}-fold CV")

    ctx = GraphContext(g, giant_component(g))
    fm = user_feature_matrix(
        [users[u] for u in cohort], ctx, resources, cfg.getfloat("ingest", "window_start", 0.0), march_ts, before=march_ts
    )
    for t in tables:
        fm = join_external(fm, t, {u: users[u].resolved_state for u in cohort})
    n_before = fm.shape
    fm = missing_policy(fm, col_threshold)
    if fm.shape[0] < k:
        raise DegenerateDataError(f"only {fm.shape[0]} complete rows after the missing-value policy")
    att = set(attendees)
    y = np.array([1 if u in att else 0 for u in fm.frame.index])
    if len(set(y.tolist())) < 2 or min(np.bincount(y)) < k:
        raise DegenerateDataError("each class needs at least k rows after the missing-value policy")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        std = SkewZScoreTransformer().fit(fm.frame)
    X = std.transform(fm.frame)
    X = X[[c for c in X.columns if c not in std.constant_columns_]]
    fm = fm.with_frame(X)
    groups = _group_columns(fm, letters)
    used = [c for cols in groups.values() for c in cols]
    X = X[used]

    out = cfg.command_dir("predict")
    specs = {
        "linear_svm": ClassifierSpec("linear_svm", seed=seed),
        "logreg": ClassifierSpec("logreg", seed=seed),
        "random_forest": ClassifierSpec("random_forest", seed=seed),
    }
    rows, folds = [], {}
    for name, spec in specs.items():
        res = kfold_cv(spec, X, y, k, seed, positive=1)
        s = res.summary()
        rows.append([name] + [s[f"{m}_{t}"] for m in ("accuracy", "precision", "recall", "f1") for t in ("mean", "std")])
        folds[name] = [{m: f[m] for m in ("accuracy", "precision", "recall", "f1")} for f in res.folds]
    metric_cols = [f"{m}_{t}" for m in ("accuracy", "precision", "recall", "f1") for t in ("mean", "std")]
    _write_rows(out / "classifiers.csv", ["model"] + metric_cols, rows)

    cum = [list(c) for c in cumulative if all(ch in groups for ch in c)]
    skipped_cum = [c for c in cumulative if not all(ch in groups for ch in c)]
    abl = ablation(groups, X, y, spec=specs["logreg"], k=k, seed=seed, cumulative=cum).rows
    _write_frame(out / "ablation.csv", abl[["kind", "features", "n_features"] + metric_cols], index=False)

    best_cols = [c for ch in best_set if ch in groups for c in groups[ch]]
    if not best_cols:
        best_cols = used
    model = fit_classifier(specs["logreg"], X[best_cols].to_numpy(), y)
    coef = pd.Series(model.coef_[0], index=best_cols)
    pos = coef[coef > 0].sort_values(ascending=False, kind="mergesort").head(top_k)
    neg = coef[coef < 0].sort_values(ascending=True, kind="mergesort").head(top_k)
    top_rows = []
    for i in range(max(len(pos), len(neg))):
        top_rows.append(
            [
                i + 1,
                pos.index[i] if i < len(pos) else "",
                float(pos.iloc[i]) if i < len(pos) else "",
                neg.index[i] if i < len(neg) else "",
                float(neg.iloc[i]) if i < len(neg) else "",
            ]
        )
    _write_rows(out / "top_features.csv", ["rank", "attended_feature", "attended_coef", "not_attended_feature", "not_attended_coef"], top_rows)
    report = {
        "attendees_declared": len(declared),
        "attendees_kept": len(attendees),
        "controls": len(controls),
        "rows_before_missing_policy": n_before[0],
        "columns_before_missing_policy": n_before[1],
        "rows": int(X.shape[0]),
        "columns": int(X.shape[1]),
        "positives": int(y.sum()),
        "groups": {g_: len(c) for g_, c in groups.items()},
        "best_set": best_set,
        "skipped_cumulative": skipped_cum,
        "folds": folds,
    }
    _write_json(out / "report.json", report)
    logger.info("predict: %d rows, logreg F1 %.3f", X.shape[0], rows[1][7])
    return report


def cmd_top_terms(cfg: RunConfig) -> dict:
    min_count = cfg.getint("top_terms", "min_count", 20)
    top_n = cfg.getint("top_terms", "top_n", 50)
    z_thr = cfg.getfloat("top_terms", "z_threshold", 1.96)
    prior = cfg.getfloat("top_terms", "prior_scale", 0.01)
    users = load_store(cfg)
    sides = load_sides(cfg)
    resources = load_resources(cfg)
    counts = {CONTROL: Counter(), RIGHTS: Counter()}
    for u in sorted(users):
        s = sides.get(u)
        if s in counts:
            counts[s].update(user_tokens(users[u], resources.stopwords))
    if not counts[CONTROL] or not counts[RIGHTS]:
        raise DegenerateDataError("both sides need a non-empty corpus")
    background = counts[CONTROL] + counts[RIGHTS]
    try:
        lo = log_odds_dirichlet(counts[CONTROL], counts[RIGHTS], background, prior)
    except ValueError as exc:
        raise DegenerateDataError(str(exc)) from exc
    lo["count_control"] = [counts[CONTROL].get(t, 0) for t in lo.index]
    lo["count_rights"] = [counts[RIGHTS].get(t, 0) for t in lo.index]
    lo = lo[(lo.count_control + lo.count_rights) >= min_count]
    out = cfg.command_dir("top_terms")
    rows = []
    summary = {}
    for side, sign in ((CONTROL, 1.0), (RIGHTS, -1.0)):
        z = sign * lo["z"]
        sig = lo[z > z_thr].assign(score=z[z > z_thr])
        sig = sig.reset_index().sort_values(["score", "token"], ascending=[False, True], kind="mergesort").head(top_n)
        for rank, r in enumerate(sig.itertuples(index=False), 1):
            rows.append([side, rank, r.token, float(r.score), float(sign * r.delta), int(r.count_control), int(r.count_rights)])
        summary[side] = list(sig.token)
    _write_rows(out / "top_terms.csv", ["side", "rank", "token", "z", "delta", "count_control", "count_rights"], rows)
    _write_json(out / "report.json", {"min_count": min_count, "top_n": top_n, "z_threshold": z_thr, "terms": summary})
    return summary


COMMANDS = {
    "synth": cmd_synth,
    "ingest": cmd_ingest,
    "stance": cmd_stance,
    "state-model": cmd_state_model,
    "predict": cmd_predict,
    "top-terms": cmd_top_terms,
}
PIPELINE = ("synth", "ingest", "stance", "state-model", "predict", "top-terms")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stancekit", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    init = sub.add_parser("init", help="write a default config file")
    init.add_argument("path", type=Path)
    init.add_argument("--force", action="store_true")
    for name in (*COMMANDS, "all"):
        sp = sub.add_parser(name, help="run the whole pipeline" if name == "all" else f"run the {name} step")
        sp.add_argument("--config", "-c", type=Path, required=True)
        sp.add_argument("--seed", type=int, default=None, help="override [general] seed")
        sp.add_argument("--verbose", "-v", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "init":
        if args.path.exists() and not args.force:
            print(f"error: {args.path} exists (use --force)", file=sys.stderr)
            return 2
        args.path.parent.mkdir(parents=True, exist_ok=True)
        args.path.write_text(DEFAULT_CONFIG, encoding="utf-8")
        return 0
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = RunConfig(args.config, seed=args.seed)
        steps = PIPELINE if args.command == "all" else (args.command,)
        for step in steps:
            COMMANDS[step](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DegenerateDataError as exc:
        print(f"degenerate data: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
