"""Post/profile ingestion, per-user aggregation, geolocation and user filtering."""

from __future__ import annotations

import csv
import json
import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

logger = logging.getLogger(__name__)

SECONDS_PER_DAY = 86400
_WS = re.compile(r"\s+")


def _load_state_codes() -> tuple[str, ...]:
    with resources.files("stancekit").joinpath("data/states.csv").open() as fh:
        return tuple(row["code"] for row in csv.DictReader(fh))


STATE_CODES: tuple[str, ...] = _load_state_codes()


def state_names() -> dict[str, str]:
    """Map of state code to lowercase state name (50 states + DC)."""
    with resources.files("stancekit").joinpath("data/states.csv").open() as fh:
        return {row["code"]: row["name"] for row in csv.DictReader(fh)}


@dataclass(frozen=True, slots=True)
class Post:
    post_id: str
    user_id: str
    timestamp: float
    text: str
    retweeted_user_id: str | None = None
    hashtags: tuple[str, ...] = ()
    lat: float | None = None
    lon: float | None = None
    is_english: bool = True

    @property
    def is_retweet(self) -> bool:
        return self.retweeted_user_id is not None

    @property
    def has_gps(self) -> bool:
        return self.lat is not None and self.lon is not None

    def to_json(self) -> dict:
        return {
            "id": self.post_id,
            "user_id": self.user_id,
            "ts": self.timestamp,
            "text": self.text,
            "rt_user_id": self.retweeted_user_id,
            "hashtags": list(self.hashtags),
            "lat": self.lat,
            "lon": self.lon,
            "lang": "en" if self.is_english else "und",
        }


@dataclass
class UserRecord:
    user_id: str
    tweet_count: int = 0
    followers_count: int | None = None
    friends_count: int | None = None
    account_created: float | None = None
    location_string: str = ""
    statuses_count: int | None = None
    resolved_state: str | None = None
    state_source: str | None = None  # "gps" | "profile" | None
    posts: list[Post] = field(default_factory=list)
    english_tweet_count: int = 0
    per_state_tweet_counts: dict[str, int] = field(default_factory=dict)

    @property
    def has_profile(self) -> bool:
        return self.followers_count is not None

    def to_json(self) -> dict:
        return {
            "user_id": self.user_id,
            "tweet_count": self.tweet_count,
            "followers": self.followers_count,
            "friends": self.friends_count,
            "created_ts": self.account_created,
            "location": self.location_string,
            "statuses": self.statuses_count,
            "resolved_state": self.resolved_state,
            "state_source": self.state_source,
            "english_tweet_count": self.english_tweet_count,
            "per_state_tweet_counts": dict(sorted(self.per_state_tweet_counts.items())),
        }


# -- parsing -----------------------------------------------------------------


def _opt_float(value) -> float | None:
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"expected number, got {value!r}")
    return float(value)


def _id(value) -> str:
    if isinstance(value, bool) or not isinstance(value, (str, int)) or value == "":
        raise ValueError(f"bad id {value!r}")
    return str(value)


def post_from_json(rec: Mapping) -> Post:
    """Build a :class:`Post` from one decoded JSON record; raises ValueError on schema violations."""
    if not isinstance(rec, Mapping):
        raise ValueError("record is not an object")
    ts = rec["ts"]
    if isinstance(ts, bool) or not isinstance(ts, (int, float)):
        raise ValueError(f"bad ts {ts!r}")
    text = rec.get("text", "")
    if not isinstance(text, str):
        raise ValueError("text must be a string")
    rt = rec.get("rt_user_id")
    tags = rec.get("hashtags") or []
    if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
        raise ValueError("hashtags must be a list of strings")
    lat, lon = _opt_float(rec.get("lat")), _opt_float(rec.get("lon"))
    if (lat is None) != (lon is None):
        lat = lon = None
    return Post(
        post_id=_id(rec["id"]),
        user_id=_id(rec["user_id"]),
        timestamp=float(ts),
        text=text,
        retweeted_user_id=None if rt in (None, "") else _id(rt),
        hashtags=tuple(t.lstrip("#").lower() for t in tags if t.lstrip("#")),
        lat=lat,
        lon=lon,
        is_english=rec.get("lang", "en") == "en",
    )


def parse_posts(lines: Iterable[str]) -> tuple[list[Post], int]:
    """Parse line-delimited JSON posts.

    Returns the valid posts in input order and the number of skipped lines.
    Malformed lines and duplicate post ids are logged and skipped.
    """
    posts: list[Post] = []
    seen: set[str] = set()
    skipped = 0
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            post = post_from_json(json.loads(line))
        except (ValueError, KeyError, TypeError) as exc:
            logger.warning("skipping post line %d: %s", lineno, exc)
            skipped += 1
            continue
        if post.post_id in seen:
            logger.warning("skipping post line %d: duplicate id %s", lineno, post.post_id)
            skipped += 1
            continue
        seen.add(post.post_id)
        posts.append(post)
    return posts, skipped


def read_posts(path: str | Path) -> tuple[list[Post], int]:
    with open(path, encoding="utf-8") as fh:
        return parse_posts(fh)


@dataclass(frozen=True)
class Profile:
    user_id: str
    followers: int
    friends: int
    created_ts: float
    location: str = ""
    statuses: int | None = None  # lifetime status count, optional


def parse_profiles(lines: Iterable[str]) -> tuple[list[Profile], int]:
    profiles, skipped = [], 0
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            followers, friends = rec["followers"], rec["friends"]
            if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in (followers, friends)):
                raise ValueError("followers/friends must be non-negative integers")
            loc = rec.get("location") or ""
            if not isinstance(loc, str):
                raise ValueError("location must be a string")
            statuses = rec.get("statuses")
            if statuses is not None and (not isinstance(statuses, int) or isinstance(statuses, bool) or statuses < 0):
                raise ValueError("statuses must be a non-negative integer")
            profiles.append(Profile(_id(rec["user_id"]), followers, friends, float(rec["created_ts"]), loc, statuses))
        except (ValueError, KeyError, TypeError) as exc:
            logger.warning("skipping profile line %d: %s", lineno, exc)
            skipped += 1
    return profiles, skipped


def read_profiles(path: str | Path) -> tuple[list[Profile], int]:
    with open(path, encoding="utf-8") as fh:
        return parse_profiles(fh)


# -- gazetteer ---------------------------------------------------------------


def normalize_location(text: str) -> str:
    return _WS.sub(" ", text.strip().lower())


@dataclass
class Gazetteer:
    """Offline location resolver: normalized place names and GPS bounding boxes."""

    names: dict[str, str] = field(default_factory=dict)
    # (code, minlat, minlon, maxlat, maxlon), kept sorted by code
    boxes: list[tuple[str, float, float, float, float]] = field(default_factory=list)

    def __post_init__(self):
        self.names = {normalize_location(k): v for k, v in self.names.items()}
        self.boxes = sorted(self.boxes, key=lambda b: b[0])

    @classmethod
    def from_csv(cls, path: str | Path, valid_codes: Iterable[str] | None = STATE_CODES) -> "Gazetteer":
        """Load ``kind,state,key_or_minlat,minlon,maxlat,maxlon`` rows.

        Raises ValueError on unknown kinds, invalid codes or unparsable boxes.
        """
        valid = set(valid_codes) if valid_codes is not None else None
        names, boxes = {}, []
        expected = {"kind", "state", "key_or_minlat", "minlon", "maxlat", "maxlon"}
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            try:
                rows = list(reader)
            except csv.Error as exc:
                raise ValueError(f"gazetteer {path}: {exc}") from exc
            if reader.fieldnames is None or not expected <= set(reader.fieldnames):
                raise ValueError(f"gazetteer {path}: header must contain {sorted(expected)}")
            for i, row in enumerate(rows, 2):
                code = (row["state"] or "").strip().upper()
                if valid is not None and code not in valid:
                    raise ValueError(f"gazetteer {path}:{i}: unknown code {code!r}")
                kind = (row["kind"] or "").strip()
                if kind == "name":
                    key = normalize_location(row["key_or_minlat"] or "")
                    if not key:
                        raise ValueError(f"gazetteer {path}:{i}: empty name")
                    names[key] = code
                elif kind == "box":
                    try:
                        minlat, minlon, maxlat, maxlon = (
                            float(row[c]) for c in ("key_or_minlat", "minlon", "maxlat", "maxlon")
                        )
                    except (TypeError, ValueError) as exc:
                        raise ValueError(f"gazetteer {path}:{i}: bad box") from exc
                    if minlat > maxlat or minlon > maxlon:
                        raise ValueError(f"gazetteer {path}:{i}: inverted box")
                    boxes.append((code, minlat, minlon, maxlat, maxlon))
                else:
                    raise ValueError(f"gazetteer {path}:{i}: unknown kind {kind!r}")
        return cls(names, boxes)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["kind", "state", "key_or_minlat", "minlon", "maxlat", "maxlon"])
            for code, a, b, c, d in self.boxes:
                w.writerow(["box", code, a, b, c, d])
            for key in sorted(self.names):
                w.writerow(["name", self.names[key], key, "", "", ""])

    def locate_point(self, lat: float, lon: float) -> str | None:
        for code, minlat, minlon, maxlat, maxlon in self.boxes:
            if minlat <= lat <= maxlat and minlon <= lon <= maxlon:
                return code
        return None

    def lookup_name(self, location: str) -> str | None:
        """Exact lookup of the normalized string, then of its comma-separated parts right to left."""
        key = normalize_location(location)
        if not key:
            return None
        if key in self.names:
            return self.names[key]
        for part in reversed(key.split(",")):
            part = part.strip()
            if part in self.names:
                return self.names[part]
        return None


# -- aggregation -------------------------------------------------------------


def aggregate_users(
    posts: Iterable[Post],
    profiles: Iterable[Profile] = (),
    gazetteer: Gazetteer | None = None,
) -> dict[str, UserRecord]:
    """Group posts by author and attach profile fields.

    With a gazetteer, GPS-tagged posts are counted per state in
    ``per_state_tweet_counts``.  Users without a profile keep ``None`` profile fields.
    """
    users: dict[str, UserRecord] = {}
    for post in posts:
        rec = users.get(post.user_id)
        if rec is None:
            rec = users[post.user_id] = UserRecord(post.user_id)
        rec.posts.append(post)
        rec.tweet_count += 1
        rec.english_tweet_count += post.is_english
        if gazetteer is not None and post.has_gps:
            code = gazetteer.locate_point(post.lat, post.lon)
            if code is not None:
                rec.per_state_tweet_counts[code] = rec.per_state_tweet_counts.get(code, 0) + 1
    seen: set[str] = set()
    for prof in profiles:
        rec = users.get(prof.user_id)
        if rec is None:
            continue
        if prof.user_id in seen:
            logger.warning("duplicate profile for user %s; keeping the last one", prof.user_id)
        seen.add(prof.user_id)
        rec.followers_count = prof.followers
        rec.friends_count = prof.friends
        rec.account_created = prof.created_ts
        rec.location_string = prof.location
        rec.statuses_count = prof.statuses
    return users


def resolve_state(user: UserRecord, posts: Iterable[Post], gaz: Gazetteer) -> str | None:
    """Resolve a user's state: GPS posts first (modal state, ties to the smaller code),
    then the profile location string.  The result is stored on ``user``."""
    hits = Counter()
    for post in posts:
        if post.has_gps:
            code = gaz.locate_point(post.lat, post.lon)
            if code is not None:
                hits[code] += 1
    if hits:
        best = max(hits.values())
        user.resolved_state = min(c for c, n in hits.items() if n == best)
        user.state_source = "gps"
    else:
        user.resolved_state = gaz.lookup_name(user.location_string)
        user.state_source = "profile" if user.resolved_state else None
    return user.resolved_state


def resolve_all(users: Mapping[str, UserRecord], gaz: Gazetteer) -> None:
    for rec in users.values():
        resolve_state(rec, rec.posts, gaz)


def state_tweet_count(user: UserRecord) -> int:
    """Tweets attributable to the resolved state (all tweets for profile-resolved users)."""
    if user.resolved_state is None:
        return 0
    if user.state_source == "profile":
        return user.tweet_count
    return user.per_state_tweet_counts.get(user.resolved_state, 0)


# -- filtering ---------------------------------------------------------------

FILTER_RULES: tuple[str, ...] = (
    "single_tweet",
    "top_activity",
    "few_followers_or_friends",
    "friend_follower_ratio",
    "young_account",
    "no_english_tweet",
    "no_state",
    "few_state_tweets",
)

MIN_FOLLOWERS = 5
MIN_FRIENDS = 5
MAX_FRIEND_FOLLOWER_RATIO = 10.0
MIN_ACCOUNT_AGE_DAYS = 365
TOP_FRACTION = 0.001


@dataclass
class FilterReport:
    exclusions: dict[str, int]
    kept_count: int
    input_count: int
    top_users: frozenset[str] = frozenset()

    def to_json(self) -> dict:
        out = {rule: self.exclusions[rule] for rule in FILTER_RULES}
        out["kept"] = self.kept_count
        out["input"] = self.input_count
        return out


def top_activity_users(users: Mapping[str, UserRecord], fraction: float = TOP_FRACTION) -> frozenset[str]:
    """The ``ceil(fraction * n)`` most active users; ties broken by ascending user id."""
    n = len(users)
    if n == 0:
        return frozenset()
    cutoff = math.ceil(fraction * n)
    ranked = sorted(users.values(), key=lambda u: (-u.tweet_count, u.user_id))
    return frozenset(u.user_id for u in ranked[:cutoff])


def first_failed_rule(user: UserRecord, window_end: float, top_users: frozenset[str]) -> str | None:
    if user.tweet_count < 2:
        return "single_tweet"
    if user.user_id in top_users:
        return "top_activity"
    if (
        user.followers_count is None
        or user.friends_count is None
        or user.followers_count < MIN_FOLLOWERS
        or user.friends_count < MIN_FRIENDS
    ):
        return "few_followers_or_friends"
    if user.friends_count > MAX_FRIEND_FOLLOWER_RATIO * user.followers_count:
        return "friend_follower_ratio"
    if user.account_created is None or window_end - user.account_created < MIN_ACCOUNT_AGE_DAYS * SECONDS_PER_DAY:
        return "young_account"
    if user.english_tweet_count < 1:
        return "no_english_tweet"
    if user.resolved_state is None:
        return "no_state"
    if state_tweet_count(user) < 2:
        return "few_state_tweets"
    return None


def apply_filters(
    users: Mapping[str, UserRecord],
    window_end: float,
    top_users: frozenset[str] | None = None,
) -> tuple[frozenset[str], FilterReport]:
    """Apply the eight exclusion rules in order.

    Each excluded user is attributed to the first rule it fails.  Pass the
    ``top_users`` of a previous report to freeze the activity cutoff when
    re-filtering an already filtered set.
    """
    if top_users is None:
        top_users = top_activity_users(users)
    counts = dict.fromkeys(FILTER_RULES, 0)
    kept = []
    for uid in sorted(users):
        rule = first_failed_rule(users[uid], window_end, top_users)
        if rule is None:
            kept.append(uid)
        else:
            counts[rule] += 1
    report = FilterReport(counts, len(kept), len(users), frozenset(top_users))
    return frozenset(kept), report
