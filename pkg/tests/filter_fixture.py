"""Twelve hand-traced users: each exclusion rule fires exactly once and four users survive.

u01  1 post                                  -> single_tweet
u02  40 posts (most active; ceil(12*0.001)=1) -> top_activity
u03  4 followers                             -> few_followers_or_friends
u04  friends/followers = 110/10 = 11         -> friend_follower_ratio
u05  account 364 days old at window end      -> young_account
u06  no English post                         -> no_english_tweet
u07  location "the moon", no GPS             -> no_state
u08  one GPS post in NY, one without         -> few_state_tweets (1 attributable tweet)
u09  5/5 followers/friends, "Austin, Texas"  -> kept (thresholds inclusive)
u10  ratio exactly 10, GPS NY x2 + TX x1     -> kept, modal state NY
u11  account exactly 365 days, 1 English post -> kept
u12  "somewhere, new york"                   -> kept via comma-part lookup
"""

from stancekit.ingest import FILTER_RULES, SECONDS_PER_DAY, Gazetteer, Post, Profile, aggregate_users, resolve_all
from stancekit.synth import WINDOW_END, WINDOW_START

W = float(WINDOW_END)
OLD = W - 400 * SECONDS_PER_DAY

NY_POINT = (42.0, -75.0)
TX_POINT = (31.0, -99.0)

EXPECTED_KEPT = {"u09", "u10", "u11", "u12"}
EXPECTED_EXCLUSIONS = dict.fromkeys(FILTER_RULES, 1)
EXPECTED_STATES = {"u08": "NY", "u09": "TX", "u10": "NY", "u11": "TX", "u12": "NY"}


def gazetteer() -> Gazetteer:
    return Gazetteer(
        names={"texas": "TX", "austin, texas": "TX", "new york": "NY"},
        boxes=[("NY", 40.5, -79.8, 45.0, -71.8), ("TX", 25.8, -106.6, 36.5, -93.5)],
    )


def _posts(uid, n, english=None, gps=None):
    english = english or [True] * n
    gps = gps or [None] * n
    out = []
    for i in range(n):
        lat, lon = gps[i] if gps[i] else (None, None)
        out.append(Post(f"{uid}-{i}", uid, WINDOW_START + 3600.0 * (i + 1), f"post {i}", lat=lat, lon=lon, is_english=english[i]))
    return out


def build():
    posts = (
        _posts("u01", 1)
        + _posts("u02", 40)
        + _posts("u03", 3)
        + _posts("u04", 3)
        + _posts("u05", 3)
        + _posts("u06", 3, english=[False] * 3)
        + _posts("u07", 3)
        + _posts("u08", 2, gps=[NY_POINT, None])
        + _posts("u09", 2)
        + _posts("u10", 3, gps=[NY_POINT, TX_POINT, NY_POINT])
        + _posts("u11", 4, english=[False, True, False, False])
        + _posts("u12", 5)
    )
    tx = "Austin, Texas"
    profiles = [
        Profile("u01", 50, 50, OLD, tx),
        Profile("u02", 50, 50, OLD, tx),
        Profile("u03", 4, 20, OLD, tx),
        Profile("u04", 10, 110, OLD, tx),
        Profile("u05", 50, 50, W - 364 * SECONDS_PER_DAY, tx),
        Profile("u06", 50, 50, OLD, tx),
        Profile("u07", 50, 50, OLD, "the moon"),
        Profile("u08", 50, 50, OLD, ""),
        Profile("u09", 5, 5, OLD, tx),
        Profile("u10", 10, 100, OLD, ""),
        Profile("u11", 50, 50, W - 365 * SECONDS_PER_DAY, "Texas"),
        Profile("u12", 50, 50, OLD, "somewhere, new york"),
    ]
    gaz = gazetteer()
    users = aggregate_users(posts, profiles, gaz)
    resolve_all(users, gaz)
    return users
