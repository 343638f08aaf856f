#!/usr/bin/env python3
"""
COC Orbit Sampler
=================

Brute-force oracle for the classifier: a seeded random walk over the coadjoint
orbit of f, each step a flow of length eps along a uniformly random unit
generator, followed by a boundedness estimate.

Status rules:
  unbounded     growth ratio above the escape threshold, or a flow overflowed
  inconclusive  walk shorter than min_steps
  bounded       running max stable over the last half, no trend in the norm,
                the mean squared displacement saturated, and the walk never
                closed in on the origin or on the fixed-point space
  inconclusive  anything else

Usage:
    from coc_sampler import WalkConfig, sample_orbit, estimate_bounded

    sample = sample_orbit(g, f, WalkConfig(seed=7, steps=10_000))
    print(estimate_bounded(sample).status)
"""

import asyncio
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.linalg import expm

from coc_algebra import Covector, LieAlgebra
from coc_coadjoint import OVERFLOW, as_covector
from coc_config import DEFAULT_WALK, WalkDefaults

BATCH = 4096


# ============================================================================
# CONFIGURATION AND RECORDS
# ============================================================================

@dataclass(frozen=True)
class WalkConfig:
    eps: float = DEFAULT_WALK.eps
    steps: int = DEFAULT_WALK.steps
    seed: int = 0
    escape: float = DEFAULT_WALK.escape
    min_steps: int = DEFAULT_WALK.min_steps
    stab_tol: float = DEFAULT_WALK.stab_tol
    trend_tol: float = DEFAULT_WALK.trend_tol
    saturation: float = DEFAULT_WALK.saturation
    generators: str = "uniform-sphere"

    @classmethod
    def from_defaults(cls, defaults: WalkDefaults, **overrides) -> "WalkConfig":
        base = cls(eps=defaults.eps, steps=defaults.steps, escape=defaults.escape,
                   min_steps=defaults.min_steps, stab_tol=defaults.stab_tol,
                   trend_tol=defaults.trend_tol, saturation=defaults.saturation)
        return replace(base, **{k: v for k, v in overrides.items() if v is not None})


@dataclass(frozen=True, eq=False)
class OrbitSample:
    start: Covector
    points: np.ndarray              # (steps taken + 1) x n, row 0 is start
    config: WalkConfig
    diverged_at: Optional[int] = None
    derived: Optional[np.ndarray] = None    # orthonormal basis of [g, g]

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.points, axis=1)

    @property
    def max_norm(self) -> float:
        return float(np.max(self.norms))

    @property
    def min_norm(self) -> float:
        return float(np.min(self.norms))

    @property
    def moving_norms(self) -> Optional[np.ndarray]:
        """Distance of each point from the fixed-point space, the annihilator of [g, g]"""
        if self.derived is None:
            return None
        return np.linalg.norm(self.points @ self.derived, axis=1)

    @property
    def steps(self) -> int:
        return self.points.shape[0] - 1

    @property
    def diverged(self) -> bool:
        return self.diverged_at is not None

    @property
    def diameter(self) -> float:
        """Largest distance from the start (a lower bound on the diameter)"""
        return float(np.max(np.linalg.norm(self.points - self.start, axis=1)))


@dataclass(frozen=True)
class BoundednessEstimate:
    status: str                      # "bounded" | "unbounded" | "inconclusive"
    growth_ratio: float
    escape: float
    notes: List[str] = field(default_factory=list)


def summary(sample: OrbitSample, estimate: BoundednessEstimate) -> Dict[str, Any]:
    return {
        "max_norm": sample.max_norm,
        "min_norm": sample.min_norm,
        "growth_ratio": estimate.growth_ratio,
        "status": estimate.status,
        "steps": sample.steps,
        "seed": sample.config.seed,
        "eps": sample.config.eps,
        "escape": estimate.escape,
        "diverged": sample.diverged,
        "notes": list(estimate.notes),
    }


# ============================================================================
# WALK
# ============================================================================

def _step_operators(g: LieAlgebra, generators: np.ndarray, eps: float) -> np.ndarray:
    """expm(eps * coad(x)) for each row x, as one batched call"""
    coads = -np.einsum("mi,ijk->mjk", generators, g.c)
    return expm(eps * coads)


def sample_orbit(g: LieAlgebra, f: Covector, config: WalkConfig) -> OrbitSample:
    """Deterministic walk: f <- expm(eps * coad(x_k)) f, x_k uniform on the sphere"""
    f = as_covector(g, f)
    derived = g.derived.basis
    rng = np.random.Generator(np.random.PCG64(config.seed))
    points = [f.copy()]
    current = f.copy()
    done = 0
    while done < config.steps:
        size = min(BATCH, config.steps - done)
        generators = rng.standard_normal((size, g.dim))
        generators /= np.linalg.norm(generators, axis=1, keepdims=True)
        with np.errstate(over="ignore", invalid="ignore"):
            for step in _step_operators(g, generators, config.eps):
                current = step @ current
                if not np.all(np.isfinite(current)) or np.max(np.abs(current)) > OVERFLOW:
                    return OrbitSample(f, np.array(points), config, diverged_at=len(points),
                                       derived=derived)
                points.append(current)
        done += size
    return OrbitSample(f, np.array(points), config, derived=derived)


async def _sample_async(g: LieAlgebra, f: Covector, seeds: Sequence[int],
                        config: WalkConfig) -> List[OrbitSample]:
    tasks = [asyncio.to_thread(sample_orbit, g, f, replace(config, seed=seed)) for seed in seeds]
    return list(await asyncio.gather(*tasks))


def sample_many(g: LieAlgebra, f: Covector, seeds: Sequence[int],
                config: WalkConfig) -> List[OrbitSample]:
    """Independent walks in worker threads, returned in seed order"""
    return asyncio.run(_sample_async(g, f, list(seeds), config))


# ============================================================================
# ESTIMATE
# ============================================================================

def _msd(points: np.ndarray, lag: int) -> float:
    lag = max(lag, 1)
    if points.shape[0] <= lag:
        return 0.0
    return float(np.mean(np.sum((points[lag:] - points[:-lag]) ** 2, axis=1)))


def estimate_bounded(sample: OrbitSample) -> BoundednessEstimate:
    config = sample.config
    norms = sample.norms
    start = float(norms[0])
    growth = sample.max_norm / start if start > 0 else 1.0

    if sample.diverged:
        return BoundednessEstimate("unbounded", float("inf"), config.escape,
                                   [f"flow overflowed at step {sample.diverged_at}"])
    if growth > config.escape:
        return BoundednessEstimate("unbounded", growth, config.escape,
                                   [f"growth ratio {growth:.6g} exceeds {config.escape:g}"])
    if sample.steps < config.min_steps:
        return BoundednessEstimate("inconclusive", growth, config.escape,
                                   [f"{sample.steps} steps is below the minimum {config.min_steps}"])

    notes = []
    collapsed = False
    if start > 0 and sample.min_norm < start / config.escape:
        collapsed = True
        notes.append(f"norm fell to {sample.min_norm:.6g} from {start:.6g}")
    moving = sample.moving_norms
    if moving is not None and moving[0] > 0 and float(np.min(moving)) < moving[0] / config.escape:
        collapsed = True
        notes.append(f"walk closes in on the fixed-point space "
                     f"(distance {float(np.min(moving)):.3g} from {moving[0]:.3g})")

    half = len(norms) // 2
    running = np.maximum.accumulate(norms)
    stable = running[-1] <= running[half] * (1.0 + config.stab_tol)
    if not stable:
        notes.append(f"running max still rising: {running[half]:.6g} -> {running[-1]:.6g}")

    tail = norms[half:]
    mean = float(np.mean(tail))
    slope = float(np.polyfit(np.arange(tail.size), tail, 1)[0]) if mean > 0 else 0.0
    trend = abs(slope) * tail.size / mean if mean > 0 else 0.0
    flat = trend <= config.trend_tol
    if not flat:
        notes.append(f"norm trend {trend:.3g} over the last half exceeds {config.trend_tol:g}")

    short = _msd(sample.points, sample.steps // 64)
    long = _msd(sample.points, sample.steps // 8)
    ratio = long / short if short > 0 else (1.0 if long == 0 else float("inf"))
    saturated = ratio <= config.saturation
    if not saturated:
        notes.append(f"displacement not saturated (MSD ratio {ratio:.3g})")

    status = "bounded" if stable and flat and saturated and not collapsed else "inconclusive"
    return BoundednessEstimate(status, growth, config.escape, notes)
