"""Experiment configuration: defaults, TOML loading, validation."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

try:
    import tomllib as _toml
except ImportError:
    import tomli as _toml

from .dataset import DEFAULT_LOOKBACKS, DEFAULT_THRESHOLDS

__all__ = [
    "METHODS",
    "REGRESSION_METHODS",
    "CLASSIFICATION_METHODS",
    "DETECTION_METHODS",
    "DEFAULT_PAIRS",
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "config_digest",
]

REGRESSION_METHODS = ("OLS", "SVR", "NNR")
CLASSIFICATION_METHODS = ("RF", "SVC", "NNC")
DETECTION_METHODS = ("RC", "LOF", "PKDE")
METHODS = REGRESSION_METHODS + CLASSIFICATION_METHODS + DETECTION_METHODS + ("RSI",)

DEFAULT_PAIRS = ("EURUSD", "GBPUSD", "JPYUSD", "AUDUSD")


class ConfigError(ValueError):
    """Invalid configuration file or field."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of a grid run."""

    pairs: tuple = DEFAULT_PAIRS
    data_paths: dict = field(default_factory=dict)
    lookbacks: tuple = DEFAULT_LOOKBACKS
    thresholds: tuple = DEFAULT_THRESHOLDS
    methods: tuple = METHODS
    split_ratio: float = 0.7
    sigma_scope: str = "full"
    standardize: bool = False
    regression_rule: str = "abs_threshold"
    rsi_mode: str = "level"
    contamination: float | None = None
    seed: int = 0
    method_params: dict = field(default_factory=dict)
    out_dir: str = "results"
    workers: int = 1
    dump_scores: bool = False

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(str(p) for p in self.pairs))
        object.__setattr__(self, "lookbacks", tuple(int(p) for p in self.lookbacks))
        object.__setattr__(self, "thresholds",
                           tuple(float(k) for k in self.thresholds))
        object.__setattr__(self, "methods", tuple(str(m) for m in self.methods))
        if not (self.pairs and self.lookbacks and self.thresholds and self.methods):
            raise ConfigError("pairs, lookbacks, thresholds and methods must "
                              "all be non-empty")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}, expected one of "
                                  f"{', '.join(METHODS)}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("duplicate method")
        for p in self.lookbacks:
            if p < 1:
                raise ConfigError(f"lookback {p} must be >= 1")
        for k in self.thresholds:
            if not k > 0:
                raise ConfigError(f"threshold multiplier {k} must be > 0")
        if not 0.0 < self.split_ratio < 1.0:
            raise ConfigError("split_ratio must lie in (0, 1)")
        if self.sigma_scope not in ("full", "train"):
            raise ConfigError("sigma_scope must be 'full' or 'train'")
        if self.regression_rule != "abs_threshold":
            raise ConfigError("regression_rule supports only 'abs_threshold'")
        if self.rsi_mode not in ("level", "crossing"):
            raise ConfigError("rsi_mode must be 'level' or 'crossing'")
        if self.contamination is not None and not 0.0 < self.contamination < 1.0:
            raise ConfigError("contamination must lie in (0, 1) when set")
        if int(self.workers) < 1:
            raise ConfigError("workers must be >= 1")
        object.__setattr__(self, "workers", int(self.workers))
        object.__setattr__(self, "seed", int(self.seed))
        for m in self.method_params:
            if m not in METHODS:
                raise ConfigError(f"method_params for unknown method {m!r}")

    def path_for(self, pair):
        try:
            return self.data_paths[pair]
        except KeyError:
            raise ConfigError(f"no data path configured for pair {pair!r}") from None


_TOML_KEYS = {
    "pairs", "lookbacks", "thresholds", "methods", "split_ratio",
    "sigma_scope", "standardize", "regression_rule", "rsi_mode",
    "contamination", "seed", "out_dir", "workers", "dump_scores",
}


def load_config(path):
    """Parse a TOML experiment file into an ExperimentConfig.

    Top-level keys mirror the dataclass fields; [data] maps pair -> csv
    path and [method_params.<METHOD>] holds per-method overrides.
    """
    try:
        with open(path, "rb") as fh:
            doc = _toml.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    kwargs = {}
    for key, value in doc.items():
        if key == "data":
            if not isinstance(value, dict):
                raise ConfigError("[data] must be a table of pair = path")
            kwargs["data_paths"] = {str(k): str(v) for k, v in value.items()}
        elif key == "method_params":
            if not isinstance(value, dict):
                raise ConfigError("[method_params] must be a table")
            kwargs["method_params"] = {str(k): dict(v) for k, v in value.items()}
        elif key in _TOML_KEYS:
            kwargs[key] = value
        else:
            raise ConfigError(f"unknown config key {key!r}")
    try:
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def config_digest(cfg):
    """Stable hash of the full configuration, recorded in run metadata."""
    blob = json.dumps(asdict(cfg), sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
