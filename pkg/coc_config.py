#!/usr/bin/env python3
"""
COC Configuration
=================

Tolerances and walk defaults, resolved through a short inheritance chain:

  CLI overrides (--tol-rank, --tol-num, --seed)
    ↓ inherits from
  Config file (--config settings.json)
    ↓ inherits from
  Built-in defaults

Config file layout (every key optional):

    {
      "tolerances": {"rank": 1e-9, "num": 1e-9, "alg": 1e-9, "levi": 1e-7,
                     "flow": 1e-9, "cluster": 1e-6, "seed": 49325},
      "walk": {"eps": 0.1, "steps": 50000, "escape": 100.0, "min_steps": 1000,
               "stab_tol": 1e-3, "trend_tol": 0.05,
               "saturation": 2.0}
    }

Usage:
    from coc_config import load_settings

    settings = load_settings(Path("settings.json"), {"tolerances": {"num": 1e-8}})
    settings.tolerances.rank_threshold(singular_values, n)
"""

import json
from collections import ChainMap
from dataclasses import dataclass, asdict, fields
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from coc_errors import ConfigError


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds; relative coefficients unless noted"""
    rank: float = 1e-9      # tau_rank = rank * sigma_max * n
    num: float = 1e-9       # tau_num, absolute on unit-scaled data
    alg: float = 1e-9       # tau_alg = alg * (max|c| + 1)
    levi: float = 1e-7      # tau_levi = levi * max(1, ||c||_F)
    flow: float = 1e-9      # tau_flow, relative
    cluster: float = 1e-6   # eigenvalue clustering, relative
    seed: int = 0xC0AD

    def rank_threshold(self, singular_values: np.ndarray, n: int) -> float:
        smax = float(np.max(singular_values)) if np.size(singular_values) else 0.0
        return self.rank * smax * max(n, 1)

    def alg_threshold(self, c: np.ndarray) -> float:
        cmax = float(np.max(np.abs(c))) if np.size(c) else 0.0
        return self.alg * (cmax + 1.0)

    def levi_threshold(self, c: np.ndarray) -> float:
        return self.levi * max(1.0, float(np.linalg.norm(c)))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class WalkDefaults:
    """Orbit sampler defaults"""
    eps: float = 0.1
    steps: int = 50_000
    escape: float = 100.0
    min_steps: int = 1000
    stab_tol: float = 1e-3
    trend_tol: float = 0.05
    saturation: float = 2.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()
DEFAULT_WALK = WalkDefaults()


@dataclass(frozen=True)
class Settings:
    tolerances: Tolerances = DEFAULT_TOLERANCES
    walk: WalkDefaults = DEFAULT_WALK

    def to_dict(self) -> Dict[str, Any]:
        return {"tolerances": self.tolerances.to_dict(), "walk": self.walk.to_dict()}


def _section(layer: Dict[str, Any], name: str, source: str) -> Dict[str, Any]:
    section = layer.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"'{name}' in {source} must be an object")
    return {k: v for k, v in section.items() if v is not None}


def _build(cls, chain: ChainMap, section: str):
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(chain) - set(known))
    if unknown:
        raise ConfigError(f"Unknown {section} keys: {', '.join(unknown)}",
                          {"unknown": unknown, "valid": sorted(known)})
    values = {}
    for name, field_ in known.items():
        if name not in chain:
            continue
        kind = int if field_.type in (int, "int") else float
        try:
            values[name] = kind(chain[name])
        except (TypeError, ValueError):
            raise ConfigError(f"{section}.{name} must be a number, got {chain[name]!r}")
        if name == "seed" and values[name] < 0:
            raise ConfigError(f"{section}.seed must be non-negative")
        if values[name] <= 0 and name != "seed":
            raise ConfigError(f"{section}.{name} must be positive")
    return cls(**values)


def read_config_file(path: Path) -> Dict[str, Any]:
    """Load a JSON config layer; a missing file is an input error"""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file is not valid JSON: {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"Config file must hold a JSON object: {path}")
    unknown = sorted(set(data) - {"tolerances", "walk"})
    if unknown:
        raise ConfigError(f"Unknown config sections: {', '.join(unknown)}")
    return data


def load_settings(config_path: Optional[Path] = None,
                  overrides: Optional[Dict[str, Any]] = None) -> Settings:
    """Resolve overrides <- config file <- defaults"""
    layers = []
    if overrides:
        layers.append(("overrides", overrides))
    if config_path is not None:
        layers.append((str(config_path), read_config_file(config_path)))

    tol_chain = ChainMap(*[_section(layer, "tolerances", src) for src, layer in layers])
    walk_chain = ChainMap(*[_section(layer, "walk", src) for src, layer in layers])
    return Settings(
        tolerances=_build(Tolerances, tol_chain, "tolerances"),
        walk=_build(WalkDefaults, walk_chain, "walk"),
    )
