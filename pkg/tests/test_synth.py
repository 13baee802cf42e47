import json
from collections import Counter

import numpy as np
import pytest

from stancekit.graph import giant_component
from stancekit.ingest import aggregate_users, apply_filters, resolve_all
from stancekit.stats import ols
from stancekit.synth import GroundTruth, SynthConfig, generate_corpus, generate_network, generate_state_panel, pick_anchors

SMALL = SynthConfig(n_users=300, p_in=0.05, p_out=0.002, n_peripheral=40)


def test_no_cross_edges_gives_larger_block_gcc():
    cfg = SynthConfig(n_users=200, p_in=0.1, p_out=0.0)
    g, truth = generate_network(cfg)
    big = {u for u, b in truth.block.items() if b == 1}
    assert giant_component(g) == big
    assert len(big) == cfg.block_sizes()[1] == 120


def test_edge_counts_within_three_sigma():
    cfg = SynthConfig(n_users=400, p_in=0.03, p_out=0.004)
    g, truth = generate_network(cfg, seed=5)
    n0, n1 = cfg.block_sizes()
    within = n0 * (n0 - 1) + n1 * (n1 - 1)
    across = 2 * n0 * n1
    observed = Counter(truth.block[a] == truth.block[b] for a, b, _ in g.edges())
    for count, pairs, p in ((observed[True], within, cfg.p_in), (observed[False], across, cfg.p_out)):
        assert abs(count - pairs * p) <= 3 * np.sqrt(pairs * p * (1 - p))
    weights = [w for *_, w in g.edges()]
    assert min(weights) >= cfg.weight_min and max(weights) <= cfg.weight_max


def test_determinism_and_seed_sensitivity():
    a, _ = generate_network(SMALL)
    b, _ = generate_network(SMALL)
    c, _ = generate_network(SMALL, seed=SMALL.seed + 1)
    assert a == b and a != c
    pa = generate_corpus(SMALL).posts
    pb = generate_corpus(SMALL).posts
    assert [p.to_json() for p in pa] == [p.to_json() for p in pb]


def test_corpus_truth_matches_filters():
    corpus = generate_corpus(SMALL)
    users = aggregate_users(corpus.posts, corpus.profiles, corpus.gazetteer)
    resolve_all(users, corpus.gazetteer)
    kept, report = apply_filters(users, SMALL.window_end)
    truth = corpus.truth
    assert sorted(kept) == truth.kept
    assert report.exclusions == {r: list(truth.violations.values()).count(r) for r in report.exclusions}
    assert sum(report.exclusions.values()) / report.input_count == pytest.approx(SMALL.violation_fraction, abs=0.01)
    assert all(users[u].resolved_state == truth.state[u] for u in kept)


def test_truth_json_roundtrip():
    corpus = generate_corpus(SMALL)
    t = corpus.truth
    back = GroundTruth.from_json(json.loads(json.dumps(t.to_json())))
    assert back.side == t.side and back.block == t.block and back.kept == t.kept
    assert len(t.side) == SMALL.n_users + SMALL.n_peripheral


def test_pick_anchors():
    g, truth = generate_network(SMALL)
    anchors = pick_anchors(truth, g, 2)
    assert [s for _, s in anchors] == ["control", "control", "rights", "rights"]
    for u, side in anchors:
        assert truth.side[u] == side
        peers = [v for v in truth.core if truth.side[v] == side]
        assert g.in_degree(u) >= sorted((g.in_degree(v) for v in peers), reverse=True)[1]


def test_panel_recovers_planted_coefficients():
    cfg = SynthConfig(panel_rounded=False, panel_noise_sd=0.3)
    tables, target, info = generate_state_panel(cfg)
    cols = [c for c in cfg.panel_coefficients if info["coefficients_raw"][c] is not None]
    frame = next(t for t in tables.values() if cols[0] in t)
    X = np.column_stack([next(t for t in tables.values() if c in t)[c] for c in cols])
    fit = ols(X, target.to_numpy())
    for j, c in enumerate(cols):
        assert abs(fit.coef[j] - info["coefficients_raw"][c]) <= 3 * fit.std_err[j], c
    assert len(frame) == len(target) >= 50


def test_panel_without_noise_is_exact():
    coefs = {"perc_rural": 0.6, "income_inequality_ratio": 0.5}
    cfg = SynthConfig(panel_rounded=False, panel_noise_sd=0.0, panel_coefficients=coefs)
    tables, target, info = generate_state_panel(cfg)
    X = np.column_stack([tables["demographic"]["perc_rural"], tables["economic"]["income_inequality_ratio"]])
    assert ols(X, target.to_numpy()).r2 == pytest.approx(1.0, abs=1e-9)
    assert info["planted_r2"] == pytest.approx(1.0)


def test_panel_rounded_target_in_rating_range():
    _, target, info = generate_state_panel(SynthConfig())
    assert set(target.unique()) <= {1.0, 2.0, 3.0, 4.0, 5.0}
    assert 0 < info["planted_r2"] < 1
    with pytest.raises(ValueError):
        generate_state_panel(SynthConfig(panel_coefficients={"nope": 1.0}))
