"""Pipeline configuration: a UTF-8 key-value file plus CLI overrides.

Format: one ``key = value`` per line, ``#`` starts a comment line, blank
lines are ignored. Relative paths are resolved against the config file's
directory. Recognized keys:

    languages            comma-separated subset of en,es,fr,jp
    pivot                pivot language (default en)
    embeddings.<lang>    path to the language's embedding file
    data.<lang>.<split>  dataset path, split in train|dev|test
    translations.<lang>  optional translated-to-pivot test dataset
    n_min n_max min_df   character n-gram channel settings
    C tol max_epochs seed bias_scale   SVM training settings
    dictionary_cap       optional cap on pseudo-dictionary size

Every key can be overridden with a command-line flag of the same name,
e.g. ``--C 1`` or ``--data.en.train other.tsv``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .corpus import LANGUAGES, SPLIT_NAMES
from .errors import UsageError
from .svm import TrainConfig

_INT_KEYS = ("n_min", "n_max", "min_df", "max_epochs", "seed")
_FLOAT_KEYS = ("C", "tol", "bias_scale")


@dataclass
class PipelineConfig:
    languages: list[str]
    pivot: str = "en"
    embeddings: dict[str, Path] = field(default_factory=dict)
    data: dict[str, dict[str, Path]] = field(default_factory=dict)
    translations: dict[str, Path] = field(default_factory=dict)
    n_min: int = 3
    n_max: int = 10
    min_df: int = 1
    C: float = 10.0
    tol: float = 1e-4
    max_epochs: int = 1000
    seed: int = 0
    bias_scale: float = 1.0
    dictionary_cap: int | None = None

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            C=self.C,
            tol=self.tol,
            max_epochs=self.max_epochs,
            seed=self.seed,
            bias_scale=self.bias_scale,
        )

    def dataset_path(self, language: str, split: str) -> Path | None:
        return self.data.get(language, {}).get(split)


def _parse_kv_lines(text: str, source: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise UsageError(f"{source} line {lineno}: expected 'key = value'")
        entries[key.strip()] = value.strip()
    return entries


def load_config(
    path: str | Path, overrides: dict[str, str] | None = None
) -> PipelineConfig:
    """Parse the config file, apply overrides, validate cross-references."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    entries = _parse_kv_lines(text, str(path))
    entries.update(overrides or {})

    base = path.parent

    def as_path(value: str) -> Path:
        p = Path(value)
        return p if p.is_absolute() else base / p

    cfg = PipelineConfig(languages=[])
    for key, value in entries.items():
        if key == "languages":
            cfg.languages = [v for v in value.split(",") if v]
        elif key == "pivot":
            cfg.pivot = value
        elif key == "dictionary_cap":
            cfg.dictionary_cap = int(value) if value else None
        elif key in _INT_KEYS:
            try:
                setattr(cfg, key, int(value))
            except ValueError:
                raise UsageError(f"{key} must be an integer, got {value!r}") from None
        elif key in _FLOAT_KEYS:
            try:
                setattr(cfg, key, float(value))
            except ValueError:
                raise UsageError(f"{key} must be a number, got {value!r}") from None
        elif key.startswith("embeddings."):
            cfg.embeddings[key.split(".", 1)[1]] = as_path(value)
        elif key.startswith("translations."):
            cfg.translations[key.split(".", 1)[1]] = as_path(value)
        elif key.startswith("data."):
            parts = key.split(".")
            if len(parts) != 3 or parts[2] not in SPLIT_NAMES:
                raise UsageError(
                    f"bad dataset key {key!r}, expected data.<lang>.<train|dev|test>"
                )
            cfg.data.setdefault(parts[1], {})[parts[2]] = as_path(value)
        else:
            raise UsageError(f"unknown config key {key!r}")

    _validate(cfg)
    return cfg


def _validate(cfg: PipelineConfig) -> None:
    if not cfg.languages:
        raise UsageError("config must list at least one language")
    for lang in cfg.languages:
        if lang not in LANGUAGES:
            raise UsageError(
                f"unknown language {lang!r}, supported: {', '.join(LANGUAGES)}"
            )
    if cfg.pivot not in cfg.languages:
        raise UsageError(f"pivot {cfg.pivot!r} is not among languages")
    missing = []
    for lang in cfg.languages:
        if lang not in cfg.embeddings:
            missing.append(f"embeddings.{lang}")
        if cfg.dataset_path(lang, "train") is None:
            missing.append(f"data.{lang}.train")
    if missing:
        raise UsageError(f"config is missing: {', '.join(missing)}")
    for key in ("embeddings", "data", "translations"):
        for lang in getattr(cfg, key):
            if lang not in cfg.languages:
                raise UsageError(f"{key}.{lang} refers to an unlisted language")
    if not (1 <= cfg.n_min <= cfg.n_max):
        raise UsageError("need 1 <= n_min <= n_max")
    if cfg.min_df < 1:
        raise UsageError("min_df must be >= 1")


def parse_override_args(extras: list[str]) -> dict[str, str]:
    """Turn leftover ``--key value`` CLI pairs into config overrides."""
    overrides: dict[str, str] = {}
    i = 0
    while i < len(extras):
        arg = extras[i]
        if not arg.startswith("--"):
            raise UsageError(f"unexpected argument {arg!r}")
        key = arg[2:]
        if "=" in key:
            key, _, value = key.partition("=")
        else:
            if i + 1 >= len(extras):
                raise UsageError(f"override {arg!r} is missing a value")
            i += 1
            value = extras[i]
        overrides[key] = value
        i += 1
    return overrides
