"""Synthetic corpora, endorsement networks and state panels with planted ground truth."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .graph import EndorsementGraph
from .ingest import FILTER_RULES, SECONDS_PER_DAY, STATE_CODES, Gazetteer, Post, Profile, state_names
from .text import CONTROL, RIGHTS, default_stopwords

# 2018-02-14 .. 2018-04-14 UTC, march day 2018-03-24
WINDOW_START = 1518566400
WINDOW_END = 1523664000
MARCH_TS = 1521849600

STATE_PANEL_GROUPS: dict[str, tuple[str, ...]] = {
    "demographic": (
        "perc_under_18",
        "perc_65_and_over",
        "perc_african_american",
        "perc_asian",
        "perc_hispanic",
        "perc_non_hispanic_white",
        "perc_rural",
    ),
    "economic": (
        "high_school_graduation_rate",
        "perc_some_college",
        "perc_unemployment",
        "income_inequality_ratio",
        "perc_uninsured",
        "perc_single_parent_households",
        "association_rate",
        "violent_crime_rate",
        "perc_severe_housing_problems",
        "median_household_income",
        "residential_segregation_black_white",
        "homicide_rate",
    ),
    "health": ("mentally_unhealthy_days", "perc_adult_smoking", "perc_adult_obesity", "perc_excessive_drinking"),
    "politics": ("gun_sales", "firearm_fatalities_rate", "perc_vote_republican"),
}

# synthetic stand-ins for psycholinguistic categories
CATEGORY_NAMES = ("i", "we", "they", "posemo", "negemo", "anger", "time", "work", "family", "death")

_NEUTRAL = (
    "gun", "guns", "law", "laws", "shooting", "school", "people", "today", "vote", "congress",
    "rifle", "safety", "debate", "news", "state", "kids", "police", "right", "control", "policy",
)
_ONSETS = ("b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "kr", "st", "tr")
_VOWELS = ("a", "e", "i", "o", "u", "ai", "ou")


@dataclass
class SynthConfig:
    seed: int = 7
    n_users: int = 2000
    ratio: float = 1.5  # larger block : smaller block
    p_in: float = 0.02
    p_out: float = 0.001
    weight_min: int = 2
    weight_max: int = 5
    n_peripheral: int = 300
    violation_fraction: float = 0.2
    vocab_size: int = 150
    vocab_overlap: float = 0.2
    class_token_rate: float = 0.5
    tokens_per_tweet: int = 8
    mean_original_tweets: float = 10.0
    gps_fraction: float = 0.3
    n_hashtags: int = 24
    attend_rate_control: float = 0.22
    attend_rate_rights: float = 0.01
    panel_coefficients: dict[str, float] = field(
        default_factory=lambda: {"perc_rural": 0.6, "income_inequality_ratio": 0.5, "perc_vote_republican": 0.5}
    )
    panel_intercept: float = 3.0
    panel_noise_sd: float = 0.6
    panel_rounded: bool = True
    anchors_per_side: int = 3
    window_start: int = WINDOW_START
    window_end: int = WINDOW_END
    march_ts: int = MARCH_TS

    def __post_init__(self):
        for name in ("p_in", "p_out", "violation_fraction", "vocab_overlap", "class_token_rate", "gps_fraction"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.violation_fraction >= 1:
            raise ValueError("violation_fraction must be below 1")
        if self.ratio <= 0 or self.n_users < 2:
            raise ValueError("need ratio > 0 and at least 2 users")
        if not 2 <= self.weight_min <= self.weight_max:
            raise ValueError("weights must satisfy 2 <= weight_min <= weight_max")

    def block_sizes(self) -> tuple[int, int]:
        """(smaller, larger) block sizes, each at least 1."""
        big = int(round(self.n_users * self.ratio / (1 + self.ratio)))
        big = min(max(big, 1), self.n_users - 1)
        return self.n_users - big, big


@dataclass
class GroundTruth:
    side: dict[str, str]  # core and peripheral users
    block: dict[str, int]  # core users; 1 = larger block
    ratio: float
    state: dict[str, str] = field(default_factory=dict)
    attended: dict[str, int] = field(default_factory=dict)
    kept: list[str] = field(default_factory=list)
    violations: dict[str, str] = field(default_factory=dict)
    panel: dict = field(default_factory=dict)

    @property
    def core(self) -> list[str]:
        return sorted(self.block)

    @property
    def peripheral(self) -> list[str]:
        return sorted(set(self.side) - set(self.block))

    def to_json(self) -> dict:
        return {
            "ratio": self.ratio,
            "users": [
                {
                    "user_id": u,
                    "side": self.side.get(u),
                    "block": self.block.get(u),
                    "state": self.state.get(u),
                    "attended": self.attended.get(u, 0),
                    "violation": self.violations.get(u),
                }
                for u in sorted(set(self.side) | set(self.violations))
            ],
            "kept": sorted(self.kept),
            "panel": self.panel,
        }

    @classmethod
    def from_json(cls, data: dict) -> "GroundTruth":
        side, block, state, attended, viol = {}, {}, {}, {}, {}
        for row in data["users"]:
            u = row["user_id"]
            if row["side"] is not None:
                side[u] = row["side"]
            if row["block"] is not None:
                block[u] = row["block"]
            if row["state"] is not None:
                state[u] = row["state"]
            if row["attended"]:
                attended[u] = 1
            if row["violation"] is not None:
                viol[u] = row["violation"]
        return cls(side, block, data["ratio"], state, attended, list(data["kept"]), viol, data.get("panel", {}))


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream])


def generate_network(cfg: SynthConfig, seed: int | None = None) -> tuple[EndorsementGraph, GroundTruth]:
    """Directed two-block SBM; every ordered pair is an edge independently, weights uniform on the weight range.

    The larger block holds the control side.  Node ids are shuffled so that id order carries no block information.
    """
    seed = cfg.seed if seed is None else seed
    rng = _rng(seed, 1)
    n0, n1 = cfg.block_sizes()
    n = n0 + n1
    block = np.r_[np.zeros(n0, dtype=int), np.ones(n1, dtype=int)]
    same = block[:, None] == block[None, :]
    prob = np.where(same, cfg.p_in, cfg.p_out)
    mask = rng.random((n, n)) < prob
    np.fill_diagonal(mask, False)
    src, dst = np.nonzero(mask)
    weights = rng.integers(cfg.weight_min, cfg.weight_max + 1, size=len(src))
    ids = [f"u{i:05d}" for i in rng.permutation(n)]
    edges = {(ids[a], ids[b]): int(w) for a, b, w in zip(src.tolist(), dst.tolist(), weights.tolist())}
    g = EndorsementGraph(edges, nodes=ids)
    blocks = {ids[i]: int(block[i]) for i in range(n)}
    side = {u: CONTROL if b == 1 else RIGHTS for u, b in blocks.items()}
    return g, GroundTruth(side, blocks, cfg.ratio)


# -- vocabularies ------------------------------------------------------------


def _pseudo_words(rng: np.random.Generator, count: int, exclude: set[str]) -> list[str]:
    out: list[str] = []
    seen = set(exclude)
    while len(out) < count:
        k = int(rng.integers(2, 4))
        w = "".join(_ONSETS[rng.integers(len(_ONSETS))] + _VOWELS[rng.integers(len(_VOWELS))] for _ in range(k))
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


@dataclass
class Vocabulary:
    control: list[str]
    rights: list[str]
    neutral: list[str]
    style: dict[str, list[str]]  # category -> words
    hashtags: dict[str, list[str]]  # side -> tags
    hate: list[str]
    sentiment: dict[str, float]

    def class_words(self, side: str) -> list[str]:
        return self.control if side == CONTROL else self.rights

    @property
    def style_words(self) -> list[str]:
        return [w for words in self.style.values() for w in words]


def build_vocabulary(cfg: SynthConfig, seed: int | None = None) -> Vocabulary:
    seed = cfg.seed if seed is None else seed
    rng = _rng(seed, 2)
    exclude = set(default_stopwords()) | set(_NEUTRAL)
    n_shared = int(round(cfg.vocab_overlap * cfg.vocab_size))
    n_own = cfg.vocab_size - n_shared
    words = _pseudo_words(rng, n_shared + 2 * n_own + 30 + 6 * len(CATEGORY_NAMES) + cfg.n_hashtags + 8, exclude)
    it = iter(words)
    shared = [next(it) for _ in range(n_shared)]
    control = [next(it) for _ in range(n_own)] + shared
    rights = [next(it) for _ in range(n_own)] + shared
    neutral = list(_NEUTRAL) + [next(it) for _ in range(30)]
    style = {c: [next(it) for _ in range(6)] for c in CATEGORY_NAMES}
    tags = [next(it) for _ in range(cfg.n_hashtags)]
    hate = [next(it) for _ in range(8)]
    half = cfg.n_hashtags // 2
    sentiment = {w: float(np.round(rng.uniform(1, 9), 2)) for w in neutral + [w for ws in style.values() for w in ws]}
    return Vocabulary(control, rights, neutral, style, {CONTROL: tags[:half], RIGHTS: tags[half:]}, hate, sentiment)


def _zipf(n: int, s: float = 0.8) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1) ** s
    return w / w.sum()


# -- geography ---------------------------------------------------------------


def synthetic_gazetteer() -> Gazetteer:
    """Disjoint grid boxes (one per state code) plus state names, codes and one city per state."""
    names = state_names()
    boxes, entries = [], {}
    for i, code in enumerate(sorted(STATE_CODES)):
        lat0, lon0 = 25.0 + (i // 9) * 4.0, -125.0 + (i % 9) * 6.0
        boxes.append((code, lat0, lon0, lat0 + 3.5, lon0 + 5.5))
        entries[names[code]] = code
        entries[code.lower()] = code
        entries[f"{names[code]} city"] = code
    return Gazetteer(entries, boxes)


def _point_in(gaz: Gazetteer, code: str, rng: np.random.Generator) -> tuple[float, float]:
    for c, a, b, c2, d in gaz.boxes:
        if c == code:
            return round(float(rng.uniform(a + 0.1, c2 - 0.1)), 5), round(float(rng.uniform(b + 0.1, d - 0.1)), 5)
    raise KeyError(code)


# -- corpus ------------------------------------------------------------------


@dataclass
class SynthCorpus:
    posts: list[Post]
    profiles: list[Profile]
    gazetteer: Gazetteer
    vocabulary: Vocabulary
    truth: GroundTruth
    graph: EndorsementGraph


class _Writer:
    def __init__(self, cfg: SynthConfig, vocab: Vocabulary, rng: np.random.Generator):
        self.cfg, self.vocab, self.rng = cfg, vocab, rng
        self.posts: list[Post] = []
        self.class_cdf = np.minimum(np.cumsum(_zipf(cfg.vocab_size)), 1.0)
        self.class_cdf[-1] = 1.0
        self.neutral_cdf = np.minimum(np.cumsum(_zipf(len(vocab.neutral), 1.0)), 1.0)
        self.neutral_cdf[-1] = 1.0
        self.style = vocab.style_words

    def words(self, side: str | None, n: int) -> list[str]:
        rng = self.rng
        u = rng.random((4, n))
        rate = self.cfg.class_token_rate if side is not None else 0.0
        cls_idx = np.searchsorted(self.class_cdf, u[1], side="right")
        neu_idx = np.searchsorted(self.neutral_cdf, u[2], side="right")
        sty_idx = (u[3] * len(self.style)).astype(int)
        words = self.vocab.class_words(side) if side is not None else ()
        out = []
        for r, c, m, s in zip(u[0].tolist(), cls_idx.tolist(), neu_idx.tolist(), sty_idx.tolist()):
            if r < rate:
                out.append(words[c])
            elif r < rate + (1 - rate) * 0.6:
                out.append(self.vocab.neutral[m])
            else:
                out.append(self.style[s])
        if side is not None and rng.random() < 0.03:
            out.append(self.vocab.hate[rng.integers(len(self.vocab.hate))])
        return out

    def add(self, uid, ts, text, rt=None, tags=(), gps=None, english=True):
        lat, lon = gps if gps else (None, None)
        self.posts.append(Post(f"p{len(self.posts):07d}", uid, float(ts), text, rt, tuple(tags), lat, lon, english))

    def ts(self) -> int:
        return int(self.rng.integers(self.cfg.window_start, self.cfg.march_ts))


def _profile(uid, rng, cfg, location, created=None, followers=None, friends=None) -> Profile:
    if followers is None:
        followers = int(max(5, round(rng.lognormal(5.0, 1.2))))
    if friends is None:
        friends = int(min(10 * followers, max(5, round(rng.lognormal(5.2, 1.0)))))
    if created is None:
        created = cfg.window_end - int(rng.uniform(1.1, 10) * 365 * SECONDS_PER_DAY)
    statuses = int(rng.integers(200, 40000))
    return Profile(uid, followers, friends, float(created), location, statuses)


def generate_corpus(
    cfg: SynthConfig,
    graph: EndorsementGraph | None = None,
    truth: GroundTruth | None = None,
    seed: int | None = None,
) -> SynthCorpus:
    """Posts and profiles consistent with the planted network.

    Core (network) users and peripheral users pass every filter; peripheral
    users only retweet once per target, so their endorsements fall below the
    edge threshold.  Additional users each violate exactly one filter rule so
    that ``violation_fraction`` of all users is excluded.  Attendees (mostly on
    the control side) use a wider range of hashtags.
    """
    seed = cfg.seed if seed is None else seed
    if graph is None or truth is None:
        graph, truth = generate_network(cfg, seed)
    rng = _rng(seed, 3)
    vocab = build_vocabulary(cfg, seed)
    gaz = synthetic_gazetteer()
    names = state_names()
    codes = sorted(STATE_CODES)
    w = _Writer(cfg, vocab, rng)

    # state allocation with a per-state rights propensity
    pop = rng.gamma(2.0, 1.0, len(codes)) + 0.2
    lean = rng.beta(2.0, 2.0, len(codes))
    p_state = {RIGHTS: pop * lean / (pop * lean).sum(), CONTROL: pop * (1 - lean) / (pop * (1 - lean)).sum()}

    core = truth.core
    n_peri = cfg.n_peripheral
    peri = [f"q{i:05d}" for i in range(n_peri)]
    for u in peri:
        truth.side[u] = CONTROL if rng.random() < cfg.ratio / (1 + cfg.ratio) else RIGHTS
    good = core + peri
    for u in good:
        truth.state[u] = codes[rng.choice(len(codes), p=p_state[truth.side[u]])]
        rate = cfg.attend_rate_control if truth.side[u] == CONTROL else cfg.attend_rate_rights
        if rng.random() < rate:
            truth.attended[u] = 1

    profiles: list[Profile] = []
    # original tweets of good users
    for u in good:
        side, state = truth.side[u], truth.state[u]
        use_gps = rng.random() < cfg.gps_fraction
        n_orig = 2 + int(rng.poisson(cfg.mean_original_tweets))
        if truth.attended.get(u):
            k = 1 + int(rng.binomial(10, 0.5))
            extra = 0.6
        else:
            k = 1 + int(rng.binomial(10, 0.2))
            extra = 0.3
        pool = vocab.hashtags[side]
        own_tags = [pool[i] for i in rng.choice(len(pool), size=min(k, len(pool)), replace=False)]
        for j in range(n_orig):
            n_tags = 1 + int(rng.random() < extra)
            tags = [own_tags[i] for i in rng.choice(len(own_tags), size=min(n_tags, len(own_tags)), replace=False)]
            toks = w.words(side, cfg.tokens_per_tweet)
            text = " ".join(toks + ["#" + t for t in tags])
            gps = _point_in(gaz, state, rng) if use_gps and (j < 2 or rng.random() < 0.3) else None
            english = j == 0 or rng.random() > 0.05
            w.add(u, w.ts(), text, tags=tags, gps=gps, english=english)
        if truth.attended.get(u):
            w.add(u, cfg.march_ts + int(rng.integers(0, 36000)), "i am at the march today #marchforourlives", tags=["marchforourlives"])
        if use_gps:
            loc = "" if rng.random() < 0.5 else f"{names[codes[rng.integers(len(codes))]].title()}"
        else:
            style = rng.integers(3)
            loc = [f"{names[state]} city, {names[state].title()}", names[state].title(), f"somewhere, {state}"][style]
        profiles.append(_profile(u, rng, cfg, loc))

    # retweets along planted edges (each weight = that many retweet events)
    for a, b, wt in graph.edges():
        for _ in range(wt):
            w.add(a, w.ts(), "RT @" + b + ": " + " ".join(w.words(truth.side[b], cfg.tokens_per_tweet)), rt=b)
    by_side = {s: [u for u in core if truth.side[u] == s] for s in (CONTROL, RIGHTS)}
    for u in peri:
        targets = by_side[truth.side[u]] or core
        for t in rng.choice(len(targets), size=min(3, len(targets)), replace=False):
            b = targets[t]
            w.add(u, w.ts(), "RT @" + b + ": " + " ".join(w.words(truth.side[b], cfg.tokens_per_tweet)), rt=b)

    # filter violators
    n_good = len(good)
    n_viol = int(round(cfg.violation_fraction * n_good / (1 - cfg.violation_fraction)))
    n_power = math.ceil(0.001 * (n_good + n_viol)) if n_viol else 0
    counts = {}
    for p in w.posts:
        counts[p.user_id] = counts.get(p.user_id, 0) + 1
    max_count = max(counts.values(), default=0)
    other_rules = [r for r in FILTER_RULES if r != "top_activity"]
    viol_rules = ["top_activity"] * min(n_power, n_viol) + [other_rules[i % len(other_rules)] for i in range(n_viol - min(n_power, n_viol))]
    for i, rule in enumerate(viol_rules):
        u = f"v{i:05d}"
        truth.violations[u] = rule
        state = codes[rng.integers(len(codes))]
        loc = names[state].title()
        n = 2 + int(rng.integers(0, 4))
        prof_kw = {}
        english, gps_posts, write_profile = True, 0, True
        if rule == "single_tweet":
            n = 1
        elif rule == "top_activity":
            n = int(max_count * 1.5) + 10 + i
        elif rule == "few_followers_or_friends":
            if i % 2:
                write_profile = False
            else:
                prof_kw = {"followers": int(rng.integers(0, 5))}
        elif rule == "friend_follower_ratio":
            f = int(rng.integers(5, 50))
            prof_kw = {"followers": f, "friends": 10 * f + int(rng.integers(1, 100))}
        elif rule == "young_account":
            prof_kw = {"created": cfg.window_end - int(rng.integers(10, 364)) * SECONDS_PER_DAY}
        elif rule == "no_english_tweet":
            english = False
        elif rule == "no_state":
            loc = ["the moon", "", "everywhere", "planet earth"][i % 4]
        elif rule == "few_state_tweets":
            loc, gps_posts, n = "", 1, 3
        for j in range(n):
            gps = _point_in(gaz, state, rng) if j < gps_posts else None
            w.add(u, w.ts(), " ".join(w.words(None, cfg.tokens_per_tweet)), gps=gps, english=english)
        if write_profile:
            profiles.append(_profile(u, rng, cfg, loc, **prof_kw))

    truth.kept = sorted(good)
    posts = sorted(w.posts, key=lambda p: (p.timestamp, p.post_id))
    return SynthCorpus(posts, profiles, gaz, vocab, truth, graph)


# -- state panel ---------------------------------------------------------------


def generate_state_panel(cfg: SynthConfig, seed: int | None = None) -> tuple[dict[str, pd.DataFrame], pd.Series, dict]:
    """External state tables (one frame per group, indexed by state code) and the law rating target.

    Columns share a within-group latent factor.  The target is
    ``intercept + sum(beta_j * z_j) + noise`` on the latent z-scores of the
    active columns, rounded and clipped to 1..5 unless ``panel_rounded`` is off.
    The returned info holds the coefficients in raw column units and
    ``planted_r2``, the squared correlation between target and planted signal.
    """
    seed = cfg.seed if seed is None else seed
    rng = _rng(seed, 4)
    codes = sorted(STATE_CODES)
    n = len(codes)
    tables: dict[str, pd.DataFrame] = {}
    latent: dict[str, np.ndarray] = {}
    scale: dict[str, tuple[float, float]] = {}
    for gi, (group, cols) in enumerate(STATE_PANEL_GROUPS.items()):
        shared = rng.normal(size=n)
        data = {}
        for ci, col in enumerate(cols):
            z = np.sqrt(0.3) * shared + np.sqrt(0.7) * rng.normal(size=n)
            z = (z - z.mean()) / z.std()
            latent[col] = z
            mu, sd = 20.0 + 5 * ci, 2.0 + ci % 4
            scale[col] = (mu, sd)
            if col == "gun_sales":
                data[col] = np.round(1000 * np.exp(1.6 * z), 4)  # heavy-tailed
            else:
                data[col] = np.round(mu + sd * z, 6)
        frame = pd.DataFrame(data, index=pd.Index(codes, name="state"))
        tables[group] = frame
    unknown = set(cfg.panel_coefficients) - set(latent)
    if unknown:
        raise ValueError(f"unknown panel columns: {sorted(unknown)}")
    signal = cfg.panel_intercept + sum(b * latent[c] for c, b in cfg.panel_coefficients.items())
    y = signal + rng.normal(0.0, cfg.panel_noise_sd, n) if cfg.panel_noise_sd > 0 else signal.copy()
    if cfg.panel_rounded:
        y = np.clip(np.round(y), 1, 5)
    target = pd.Series(y, index=pd.Index(codes, name="state"), name="rating")
    if np.std(y) > 0 and np.std(signal) > 0:
        r2 = float(np.corrcoef(y, signal)[0, 1] ** 2)
    else:
        r2 = float("nan")
    # regenerate exact raw-unit coefficients from the stored (rounded) columns
    raw_coef = {}
    for c, b in cfg.panel_coefficients.items():
        if c == "gun_sales":
            raw_coef[c] = None
        else:
            raw_coef[c] = b / scale[c][1]
    info = {
        "coefficients_latent": dict(cfg.panel_coefficients),
        "coefficients_raw": raw_coef,
        "intercept": cfg.panel_intercept,
        "noise_sd": cfg.panel_noise_sd,
        "rounded": cfg.panel_rounded,
        "planted_r2": r2,
    }
    return tables, target, info


# -- category dictionary / lexicons / anchors -----------------------------------


def pick_anchors(truth: GroundTruth, g: EndorsementGraph, per_side: int) -> list[tuple[str, str]]:
    """Highest in-degree core users of each side, ties by id."""
    out = []
    for side in (CONTROL, RIGHTS):
        members = [u for u in truth.core if truth.side[u] == side]
        ranked = sorted(members, key=lambda u: (-g.in_degree(u), u))
        out.extend((u, side) for u in ranked[:per_side])
    return out


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_dataset(cfg: SynthConfig, outdir: str | Path) -> dict[str, str]:
    """Generate everything and write the ingest-ready files; returns name -> relative path."""
    out = Path(outdir)
    (out / "external").mkdir(parents=True, exist_ok=True)
    graph, truth = generate_network(cfg)
    corpus = generate_corpus(cfg, graph, truth)
    vocab = corpus.vocabulary
    files = {}

    with open(out / "posts.jsonl", "w", encoding="utf-8") as fh:
        for p in corpus.posts:
            fh.write(json.dumps(p.to_json(), separators=(",", ":")) + "\n")
    files["posts"] = "posts.jsonl"
    with open(out / "profiles.jsonl", "w", encoding="utf-8") as fh:
        for pr in sorted(corpus.profiles, key=lambda p: p.user_id):
            rec = {
                "user_id": pr.user_id,
                "followers": pr.followers,
                "friends": pr.friends,
                "created_ts": pr.created_ts,
                "location": pr.location,
                "statuses": pr.statuses,
            }
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
    files["profiles"] = "profiles.jsonl"
    corpus.gazetteer.to_csv(out / "gazetteer.csv")
    files["gazetteer"] = "gazetteer.csv"

    _write_csv(out / "hate.csv", ["term"], [[t] for t in sorted(vocab.hate)])
    files["hate_lexicon"] = "hate.csv"
    _write_csv(out / "sentiment.csv", ["term", "score"], [[t, vocab.sentiment[t]] for t in sorted(vocab.sentiment)])
    files["sentiment_lexicon"] = "sentiment.csv"
    with open(out / "categories.dic", "w", encoding="utf-8") as fh:
        for cat, words in vocab.style.items():
            fh.write(f"[{cat}]\n")
            pats = sorted(words[:4]) + [w[:3] + "*" for w in sorted(words[4:])]
            fh.write("\n".join(pats) + "\n")
    files["categories"] = "categories.dic"

    anchors = pick_anchors(truth, graph, cfg.anchors_per_side)
    _write_csv(out / "anchors.csv", ["user_id", "side"], anchors)
    files["anchors"] = "anchors.csv"
    _write_csv(out / "attendees.csv", ["user_id"], [[u] for u in sorted(truth.attended)])
    files["attendees"] = "attendees.csv"

    tables, target, info = generate_state_panel(cfg)
    for group, frame in tables.items():
        frame.to_csv(out / "external" / f"{group}.csv", lineterminator="\n")
        files[f"external_{group}"] = f"external/{group}.csv"
    target.to_csv(out / "ratings.csv", lineterminator="\n")
    files["ratings"] = "ratings.csv"
    truth.panel = info

    with open(out / "truth.json", "w", encoding="utf-8") as fh:
        json.dump(truth.to_json(), fh, sort_keys=True, indent=1)
        fh.write("\n")
    files["truth"] = "truth.json"
    with open(out / "synth_config.json", "w", encoding="utf-8") as fh:
        json.dump(asdict(cfg), fh, sort_keys=True, indent=1)
        fh.write("\n")
    return files
