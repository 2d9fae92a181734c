"""Experiment configuration: one declarative file plus command-line overrides."""

import dataclasses
import json
import os
from dataclasses import dataclass, field

import numpy as np
import yaml

from . import _diagnostics
from .exceptions import ConfigError
from .mapping import METRICS
from .semspace.pca import SWEEP_DIMS

# Named random streams, in a fixed order. Each gets its own Philox counter
# block keyed by the experiment seed, so adding a stream never shifts others.
STREAMS = ("split", "tsne")


@dataclass
class ExperimentConfig:
    lexicon: str = None
    embeddings: str = None
    out: str = "dislex-out"
    seed: int = 0
    n: int = 3
    ridge: float = 0.0
    theta: float = 0.01
    beam: int = 20
    max_len: int = 30
    metric: str = "pearson"
    shrinkage: float = 0.01
    heldout_fraction: float = 0.05
    heldout_size: int = None
    strict_heldout: bool = False
    sweep_dims: list = field(default_factory=lambda: list(SWEEP_DIMS))
    perplexity: float = 30.0
    tsne_iterations: int = 1000
    feature: str = None
    source: str = "embeddings"

    def validate(self):
        def need(ok, msg):
            if not ok:
                raise ConfigError(msg)

        need(isinstance(self.seed, int) and self.seed >= 0, f"seed must be a non-negative integer, got {self.seed!r}")
        need(isinstance(self.n, int) and self.n >= 2, f"n must be an integer >= 2, got {self.n!r}")
        need(self.ridge >= 0, f"ridge must be >= 0, got {self.ridge}")
        need(self.theta >= 0, f"theta must be >= 0, got {self.theta}")
        need(isinstance(self.beam, int) and self.beam >= 1, f"beam must be a positive integer, got {self.beam!r}")
        need(isinstance(self.max_len, int) and self.max_len >= 1, f"max_len must be positive, got {self.max_len!r}")
        need(self.metric in METRICS, f"metric must be one of {METRICS}, got {self.metric!r}")
        need(0.0 <= self.shrinkage <= 1.0, f"lambda must lie in [0, 1], got {self.shrinkage}")
        need(0.0 < self.heldout_fraction < 1.0, f"heldout_fraction must lie in (0, 1), got {self.heldout_fraction}")
        need(self.heldout_size is None or (isinstance(self.heldout_size, int) and self.heldout_size >= 1),
             f"heldout_size must be a positive integer, got {self.heldout_size!r}")
        need(len(self.sweep_dims) > 0 and all(isinstance(d, int) and d >= 1 for d in self.sweep_dims),
             f"sweep_dims must be positive integers, got {self.sweep_dims!r}")
        need(self.perplexity > 1, f"perplexity must exceed 1, got {self.perplexity}")
        need(isinstance(self.tsne_iterations, int) and self.tsne_iterations >= 1,
             f"tsne_iterations must be positive, got {self.tsne_iterations!r}")
        parse_source(self.source)
        return self

    def n_test(self, n_words):
        if self.heldout_size is not None:
            return self.heldout_size
        return max(1, int(round(self.heldout_fraction * n_words)))

    def to_dict(self):
        return dataclasses.asdict(self)


_ALIASES = {"lambda": "shrinkage"}
_FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}


def parse_source(source):
    """Split a classify source into ``(kind, d)``; ``d`` is only set for ``pca:d``."""
    if source in ("embeddings", "shifts"):
        return source, None
    if isinstance(source, str) and source.startswith("pca:"):
        try:
            d = int(source[4:])
        except ValueError:
            d = 0
        if d >= 1:
            return "pca", d
    raise ConfigError(f"source must be 'embeddings', 'shifts' or 'pca:<d>', got {source!r}")


def from_mapping(values, base=None):
    """Apply the keys of ``values`` to a copy of ``base`` (the defaults if omitted)."""
    cfg = dataclasses.replace(base) if base is not None else ExperimentConfig()
    for key, value in values.items():
        name = _ALIASES.get(key, key)
        if name not in _FIELDS:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(getattr(ExperimentConfig, name, None), float) and isinstance(value, int) \
                and not isinstance(value, bool):
            value = float(value)
        setattr(cfg, name, value)
    return cfg


def load_config(path):
    """Read a YAML or JSON config file (chosen by extension; YAML otherwise)."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        values = json.loads(text) if os.fspath(path).endswith(".json") else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if values is None:
        values = {}
    if not isinstance(values, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return from_mapping(values)


def resolve(path=None, overrides=None):
    """Defaults, then the config file, then explicit overrides (flags win)."""
    cfg = load_config(path) if path else ExperimentConfig()
    cfg = from_mapping({k: v for k, v in (overrides or {}).items() if v is not None}, cfg)
    return cfg.validate()


def derive_seeds(seed, streams=STREAMS):
    """One 32-bit seed per named stream from a counter-based generator keyed by ``seed``."""
    seeds = {}
    for i, name in enumerate(streams):
        bitgen = np.random.Philox(key=seed, counter=[0, 0, 0, i])
        seeds[name] = int(np.random.Generator(bitgen).integers(2**32))
    _diagnostics.logger.info("derived seeds %s", json.dumps(seeds, sort_keys=True))
    return seeds
