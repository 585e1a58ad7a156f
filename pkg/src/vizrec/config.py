"""Run configuration: a flat TOML-style key/value document.

Supported syntax is a deliberate subset of TOML: one ``key = value`` pair per
line, ``#`` comments, and scalar values (quoted strings, integers, floats,
booleans) plus one-dimensional arrays of those scalars. ``parse_config`` and
``emit_config`` are exact inverses for every RunConfig whose strings are free
of line terminators (the emitter refuses anything else), so a committed
config file fully reproduces a run.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError, IoError

_INT_RE = re.compile(r"^[+-]?\d+$")


@dataclass
class RunConfig:
    # inputs / outputs
    repo_path: str = ""
    bundle_path: str = ""
    seed: int = -1  # -1 means unset; build/eval refuse to run without a seed
    # model selection and hyperparameters
    lda_k: int = 30
    lda_iterations: int = 1000
    lda_k_grid: tuple = (15, 30, 75, 150)
    lsi_k_grid: tuple = (15, 30, 75, 150)
    embedding_dims: tuple = (100, 300)
    eval_models: tuple = ("tfidf", "lsi", "lda")
    # facet score bands
    related_low: float = 0.65
    related_high: float = 0.90
    versions_low: float = 0.90
    versions_high: float = 1.0
    similar_data_low: float = 0.90
    similar_data_high: float = 1.0
    # resources
    stop_list_path: str = ""  # empty -> built-in list
    word_vectors_path: str = ""
    exclusion_list_path: str = ""
    # near-duplicate prefilter
    minhash_prefilter: bool = False
    minhash_threshold: float = 0.30
    # recommendation lists
    neighbor_k: int = 100
    # evaluation run
    n_triplets: int = 50
    n_raters: int = 5
    rater_accuracy: float = 0.85
    # execution
    workers: int = 1
    # serving
    host: str = "127.0.0.1"
    port: int = 8000
    cors_origin: str = "*"

    def validate(self) -> None:
        bands = {
            "related": (self.related_low, self.related_high),
            "versions": (self.versions_low, self.versions_high),
            "similar_data": (self.similar_data_low, self.similar_data_high),
        }
        for name, (low, high) in bands.items():
            if not (0.0 <= low <= 1.0 and 0.0 <= high <= 1.0):
                raise ConfigError(
                    f"{name} thresholds must lie in [0, 1], got [{low}, {high}]"
                )
            if not low < high:
                raise ConfigError(
                    f"{name} band must satisfy low < high, got [{low}, {high}]"
                )
        if self.lda_k < 2:
            raise ConfigError(f"lda_k must be >= 2, got {self.lda_k}")
        if self.lda_iterations < 1:
            raise ConfigError("lda_iterations must be >= 1")
        if not 0.0 <= self.minhash_threshold <= 1.0:
            raise ConfigError("minhash_threshold must lie in [0, 1]")
        if self.neighbor_k < 1:
            raise ConfigError("neighbor_k must be >= 1")
        if not 0.0 <= self.rater_accuracy <= 1.0:
            raise ConfigError("rater_accuracy must lie in [0, 1]")
        for model in self.eval_models:
            if model not in ("tfidf", "lsi", "lda", "embedding"):
                raise ConfigError(f"unknown model tag {model!r} in eval_models")

    def require_seed(self) -> int:
        """Build and eval runs must be reproducible; no time-based fallback."""
        if self.seed < 0:
            raise ConfigError(
                "seed is required (set `seed = <nonnegative integer>` in the "
                "config or pass --seed)"
            )
        return self.seed


def _emit_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        if "\n" in value or "\r" in value:
            raise ConfigError(
                "config strings cannot contain line terminators: " f"{value!r}"
            )
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(value, (tuple, list)):
        return "[" + ", ".join(_emit_value(v) for v in value) + "]"
    raise ConfigError(f"cannot emit config value of type {type(value).__name__}")


def emit_config(config: RunConfig) -> str:
    lines = [f"{f.name} = {_emit_value(getattr(config, f.name))}" for f in fields(RunConfig)]
    return "\n".join(lines) + "\n"


def _parse_string(text: str, lineno: int) -> str:
    out = []
    i = 1
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            if i + 1 >= len(text):
                raise ConfigError(f"line {lineno}: dangling escape")
            nxt = text[i + 1]
            if nxt not in ('"', "\\"):
                raise ConfigError(f"line {lineno}: unsupported escape \\{nxt}")
            out.append(nxt)
            i += 2
            continue
        if ch == '"':
            if i != len(text) - 1:
                raise ConfigError(f"line {lineno}: trailing characters after string")
            return "".join(out)
        out.append(ch)
        i += 1
    raise ConfigError(f"line {lineno}: unterminated string")


def _split_array_items(body: str, lineno: int) -> list[str]:
    items, depth, current, in_string = [], 0, [], False
    i = 0
    while i < len(body):
        ch = body[i]
        if in_string:
            current.append(ch)
            if ch == "\\" and i + 1 < len(body):
                current.append(body[i + 1])
                i += 2
                continue
            if ch == '"':
                in_string = False
        elif ch == '"':
            in_string = True
            current.append(ch)
        elif ch == "[":
            raise ConfigError(f"line {lineno}: nested arrays are not supported")
        elif ch == "," and depth == 0:
            items.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
        i += 1
    tail = "".join(current).strip()
    if tail:
        items.append(tail)
    return [item for item in items if item]


def _parse_value(text: str, lineno: int):
    text = text.strip()
    if not text:
        raise ConfigError(f"line {lineno}: missing value")
    if text.startswith('"'):
        return _parse_string(text, lineno)
    if text in ("true", "false"):
        return text == "true"
    if text.startswith("["):
        if not text.endswith("]"):
            raise ConfigError(f"line {lineno}: unterminated array")
        return tuple(
            _parse_value(item, lineno)
            for item in _split_array_items(text[1:-1], lineno)
        )
    if _INT_RE.match(text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"line {lineno}: cannot parse value {text!r}") from None


def parse_config(text: str) -> RunConfig:
    known = {f.name: f for f in fields(RunConfig)}
    values: dict = {}
    # split on real newlines only: exotic characters that str.splitlines()
    # treats as breaks (\x1e,  , ...) are legal inside quoted strings
    lines = text.replace("\r\n", "\n").split("\n")
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected `key = value`")
        key, _, rest = line.partition("=")
        key = key.strip()
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate config key {key!r}")
        value = _parse_value(rest, lineno)
        default = getattr(RunConfig(), key)
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigError(f"line {lineno}: {key} expects true/false")
        elif isinstance(default, int):
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"line {lineno}: {key} expects an integer")
        elif isinstance(default, float):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"line {lineno}: {key} expects a number")
            value = float(value)
        elif isinstance(default, str):
            if not isinstance(value, str):
                raise ConfigError(f"line {lineno}: {key} expects a string")
        elif isinstance(default, tuple):
            if not isinstance(value, tuple):
                raise ConfigError(f"line {lineno}: {key} expects an array")
        values[key] = value
    config = RunConfig(**values)
    config.validate()
    return config


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def save_config(config: RunConfig, path) -> None:
    Path(path).write_text(emit_config(config), encoding="utf-8")
