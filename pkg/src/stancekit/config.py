"""INI run configuration; relative paths resolve against the config file's directory."""

from __future__ import annotations

import configparser
from dataclasses import fields
from pathlib import Path

from .synth import MARCH_TS, WINDOW_END, WINDOW_START, SynthConfig


class ConfigError(Exception):
    """Invalid configuration or unusable input file (exit code 2)."""


class DegenerateDataError(Exception):
    """Input is valid but too small or uninformative for the requested analysis (exit code 3)."""


DEFAULT_CONFIG = f"""\
[general]
seed = 7
outdir = out

[synth]
data_dir = out/synth

[ingest]
posts = out/synth/posts.jsonl
profiles = out/synth/profiles.jsonl
gazetteer = out/synth/gazetteer.csv
window_start = {WINDOW_START}
window_end = {WINDOW_END}

[text]
stopwords =
hate_lexicon = out/synth/hate.csv
sentiment_lexicon = out/synth/sentiment.csv
categories = out/synth/categories.dic

[stance]
anchors = out/synth/anchors.csv
min_weight = 2
n_runs = 20
balance_candidates = 1.0, 1.5, 2.0
nb_threshold = 0.99
nb_alpha = 1.0
truth = out/synth/truth.json

[state_model]
ratings = out/synth/ratings.csv
external = demographic:out/synth/external/demographic.csv, economic:out/synth/external/economic.csv,
    health:out/synth/external/health.csv, politics:out/synth/external/politics.csv
min_abs_r = 0.3
max_vif = 6

[predict]
attendees = out/synth/attendees.csv
march_ts = {MARCH_TS}
k = 5
control_ratio = 1.0
missing_threshold = 0.5
groups = N, P, H, S, D, L, B, C
cumulative = C, CB, CBL, CBLD, CBLDS, CBLDSH, CBLDSHP, CBLDSHPN
best_set = CBLD
top_k = 20

[top_terms]
min_count = 20
top_n = 50
z_threshold = 1.96
prior_scale = 0.01
"""

GROUP_TAGS = {
    "N": "network",
    "C": "content",
    "B": "behavior",
    "L": "liwc",
    "D": "demographic",
    "S": "economic",
    "H": "health",
    "P": "politics",
}


class RunConfig:
    def __init__(self, path: str | Path, seed: int | None = None):
        self.path = Path(path)
        if not self.path.is_file():
            raise ConfigError(f"config file not found: {self.path}")
        self.base = self.path.resolve().parent
        self.parser = configparser.ConfigParser(interpolation=None)
        try:
            self.parser.read(self.path, encoding="utf-8")
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {self.path}: {exc}") from exc
        try:
            self.seed = seed if seed is not None else self.parser.getint("general", "seed", fallback=0)
        except ValueError as exc:
            raise ConfigError(f"seed must be an integer: {exc}") from exc
        self.outdir = self.resolve(self.get("general", "outdir", "out"))

    def get(self, section: str, key: str, default: str | None = None) -> str | None:
        value = self.parser.get(section, key, fallback=None)
        if value is None or value.strip() == "":
            return default
        return value.strip()

    def require(self, section: str, key: str) -> str:
        value = self.get(section, key)
        if value is None:
            raise ConfigError(f"missing [{section}] {key}")
        return value

    def _typed(self, section, key, default, cast):
        raw = self.get(section, key)
        if raw is None:
            return default
        try:
            return cast(raw)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from exc

    def getint(self, section, key, default=None) -> int:
        return self._typed(section, key, default, int)

    def getfloat(self, section, key, default=None) -> float:
        return self._typed(section, key, default, float)

    def getlist(self, section, key, default=()) -> list[str]:
        raw = self.get(section, key)
        if raw is None:
            return list(default)
        return [p.strip() for p in raw.replace("\n", ",").split(",") if p.strip()]

    def resolve(self, value: str) -> Path:
        p = Path(value)
        return p if p.is_absolute() else self.base / p

    def path_of(self, section: str, key: str, required: bool = True, must_exist: bool = True) -> Path | None:
        raw = self.get(section, key) if not required else self.require(section, key)
        if raw is None:
            return None
        p = self.resolve(raw)
        if must_exist and not p.exists():
            raise ConfigError(f"[{section}] {key}: file not found: {p}")
        return p

    def command_dir(self, command: str) -> Path:
        d = self.outdir / command
        d.mkdir(parents=True, exist_ok=True)
        return d

    def synth_config(self) -> SynthConfig:
        kwargs = {"seed": self.seed}
        types = {f.name: f.type for f in fields(SynthConfig)}
        for key, raw in self.parser.items("synth") if self.parser.has_section("synth") else []:
            if key == "data_dir" or key not in types:
                continue
            t = str(types[key])
            try:
                if "bool" in t:
                    kwargs[key] = raw.strip().lower() in ("1", "true", "yes", "on")
                elif "int" in t and "float" not in t:
                    kwargs[key] = int(raw)
                elif "float" in t:
                    kwargs[key] = float(raw)
            except ValueError as exc:
                raise ConfigError(f"[synth] {key}: cannot parse {raw!r}") from exc
        try:
            return SynthConfig(**kwargs)
        except ValueError as exc:
            raise ConfigError(f"[synth] {exc}") from exc
