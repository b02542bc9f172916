"""Run configuration: defaults, JSON loading, strict validation.

Unknown keys are rejected so typos fail loudly before any computation runs.
"""

from __future__ import annotations

import copy
import json
from pathlib import Path

from .metrics import DEFAULT_BLUR_SIGMA, DEFAULT_FRACTIONS
from .models import LOGISTIC, ONE_HIDDEN_LAYER


class ConfigError(ValueError):
    """Invalid run configuration; the CLI maps this to exit code 2."""


DEFAULT_CONFIG: dict = {
    "seed": 7,
    "geometry": {"height": 64, "width": 64, "latent_dim": 8},
    "traversal": {"alpha_min": 0.0, "alpha_max": 30.0, "k": 30},
    "saliency": {
        "diff_normalize_by_alpha": False,
        "dump_raw": False,
        "ig_steps": 128,
        "smoothgrad_samples": 25,
        "smoothgrad_noise_sd": 0.1,
    },
    "metrics": {"blur_sigma": DEFAULT_BLUR_SIGMA, "fractions": list(DEFAULT_FRACTIONS)},
    "training": {
        "n_samples": 500,
        "holdout_fraction": 0.2,
        "epochs": 100,
        "learning_rate": 0.005,
        "batch_size": 32,
        "architecture": LOGISTIC,
        "hidden": 16,
    },
    "evaluate": {"n_queries": 50},
    "paths": {
        "out_dir": "out",
        "generator": "generator.json",
        "classifier": "classifier.json",
        "attributes": "attributes.json",
    },
}

_LEAF_TYPES: dict[tuple[str, ...], type | tuple] = {
    ("seed",): int,
    ("geometry", "height"): int,
    ("geometry", "width"): int,
    ("geometry", "latent_dim"): int,
    ("traversal", "alpha_min"): (int, float),
    ("traversal", "alpha_max"): (int, float),
    ("traversal", "k"): int,
    ("saliency", "diff_normalize_by_alpha"): bool,
    ("saliency", "dump_raw"): bool,
    ("saliency", "ig_steps"): int,
    ("saliency", "smoothgrad_samples"): int,
    ("saliency", "smoothgrad_noise_sd"): (int, float),
    ("metrics", "blur_sigma"): (int, float),
    ("metrics", "fractions"): list,
    ("training", "n_samples"): int,
    ("training", "holdout_fraction"): (int, float),
    ("training", "epochs"): int,
    ("training", "learning_rate"): (int, float),
    ("training", "batch_size"): int,
    ("training", "architecture"): str,
    ("training", "hidden"): int,
    ("evaluate", "n_queries"): int,
    ("paths", "out_dir"): str,
    ("paths", "generator"): str,
    ("paths", "classifier"): str,
    ("paths", "attributes"): str,
}


def _merge(base: dict, override: dict, path: tuple[str, ...] = ()) -> None:
    for key, value in override.items():
        here = path + (key,)
        dotted = ".".join(here)
        if key not in base:
            raise ConfigError(f"unknown config key {dotted!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {dotted!r} must be an object")
            _merge(base[key], value, here)
        else:
            expected = _LEAF_TYPES[here]
            if isinstance(value, bool) and expected is not bool:
                raise ConfigError(f"config key {dotted!r} has wrong type bool")
            if not isinstance(value, expected):
                raise ConfigError(f"config key {dotted!r} has wrong type {type(value).__name__}")
            base[key] = value


def _validate(cfg: dict) -> None:
    geom = cfg["geometry"]
    if geom["height"] < 1 or geom["width"] < 1 or geom["latent_dim"] < 1:
        raise ConfigError("geometry values must be positive")
    trav = cfg["traversal"]
    if not trav["alpha_min"] < trav["alpha_max"]:
        raise ConfigError("traversal.alpha_min must be < traversal.alpha_max")
    if trav["k"] < 2:
        raise ConfigError("traversal.k must be >= 2")
    sal = cfg["saliency"]
    if sal["ig_steps"] < 1 or sal["smoothgrad_samples"] < 1 or sal["smoothgrad_noise_sd"] < 0:
        raise ConfigError("saliency options out of range")
    met = cfg["metrics"]
    fracs = met["fractions"]
    if not all(isinstance(f, (int, float)) and 0.0 <= f <= 1.0 for f in fracs):
        raise ConfigError("metrics.fractions must lie in [0, 1]")
    if 0.0 not in [float(f) for f in fracs] or 1.0 not in [float(f) for f in fracs]:
        raise ConfigError("metrics.fractions must include 0 and 1")
    if met["blur_sigma"] <= 0:
        raise ConfigError("metrics.blur_sigma must be positive")
    tr = cfg["training"]
    if tr["architecture"] not in (LOGISTIC, ONE_HIDDEN_LAYER):
        raise ConfigError(f"training.architecture must be {LOGISTIC!r} or {ONE_HIDDEN_LAYER!r}")
    if tr["n_samples"] < 2 or tr["epochs"] < 0 or tr["batch_size"] < 1 or tr["hidden"] < 1:
        raise ConfigError("training options out of range")
    if not 0.0 < tr["holdout_fraction"] < 1.0:
        raise ConfigError("training.holdout_fraction must be in (0, 1)")
    if cfg["evaluate"]["n_queries"] < 1:
        raise ConfigError("evaluate.n_queries must be >= 1")
    if cfg["seed"] < 0:
        raise ConfigError("seed must be a nonnegative integer")


def load_config(path=None, seed: int | None = None, out_dir: str | None = None) -> dict:
    """Defaults, overlaid with the JSON file at path, then CLI overrides."""
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config file must contain a JSON object")
        _merge(cfg, doc)
    if seed is not None:
        cfg["seed"] = seed
    if out_dir is not None:
        cfg["paths"]["out_dir"] = out_dir
    _validate(cfg)
    return cfg
