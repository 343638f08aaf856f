#!/usr/bin/env python3
"""
COC Coadjoint Action
====================

Fixed points, orbit dimensions, stabilizers and one-parameter coadjoint flows.

Covectors are coordinates in the dual basis, so <f, x> = f @ x. The flow of f
along x for time t is expm(t * coad(x)) @ f.

Usage:
    from coc_coadjoint import flow, orbit_dimension

    orbit_dimension(su2, np.array([0.0, 0.0, 1.0]))      # 2
    flow(sl2r, np.array([0.0, 1.0, 0.0]), h, 1.0)        # (0, e^-2, 0)
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from coc_algebra import (
    Covector,
    LieAlgebra,
    Operator,
    Subspace,
    Vector,
    annihilates,
    coad,
    null_space,
    numerical_rank,
)
from coc_errors import DimensionMismatch, FlowDiverged, RankAmbiguous
from coc_structure import killing_floor, killing_form

OVERFLOW = 1e300


def as_covector(g: LieAlgebra, f) -> Covector:
    f = np.asarray(f, dtype=float)
    if f.shape != (g.dim,):
        raise DimensionMismatch(f"Covector has {f.size} entries, {g.name} has dim {g.dim}")
    return f


def coad_orbit_map(g: LieAlgebra, f: Covector) -> Operator:
    """K[i, j] = -f([e_i, e_j]); row i is coad(e_i) f"""
    return -np.einsum("ijk,k->ij", g.c, f)


def _orbit_floor(g: LieAlgebra, f: Covector) -> float:
    return g.noise_floor * float(np.linalg.norm(f))


# ============================================================================
# FIXED POINTS AND ORBIT DIMENSION
# ============================================================================

def is_fixed_point(g: LieAlgebra, f: Covector) -> bool:
    """f vanishes on [g, g]"""
    return annihilates(as_covector(g, f), g.derived, g.tol.num)


def fixed_point_space(g: LieAlgebra) -> Subspace:
    """All fixed covectors: the annihilator of [g, g] in dual coordinates"""
    return g.derived.complement(g.tol)


def orbit_dimension(g: LieAlgebra, f: Covector) -> int:
    f = as_covector(g, f)
    if not np.any(f):
        return 0
    singular = np.linalg.svd(coad_orbit_map(g, f), compute_uv=False)
    rank = numerical_rank(singular, g.dim, g.tol, floor=_orbit_floor(g, f),
                          strict=True, what="coadjoint orbit map")
    if rank % 2:
        raise RankAmbiguous(f"{g.name}: orbit map has odd rank {rank}",
                            {"singular_values": singular.tolist()})
    return rank


def stabilizer(g: LieAlgebra, f: Covector) -> Subspace:
    """{x : coad(x) f = 0}"""
    f = as_covector(g, f)
    if not np.any(f):
        return Subspace.full(g.dim)
    kernel = null_space(coad_orbit_map(g, f).T, g.dim, g.tol, floor=_orbit_floor(g, f))
    return Subspace.span(kernel, g.tol, floor=0.5)


# ============================================================================
# FLOWS
# ============================================================================

@dataclass(frozen=True)
class FlowSegment:
    generator: Vector
    time: float
    start: Covector
    end: Covector

    def to_dict(self):
        return {
            "generator": self.generator.tolist(),
            "time": self.time,
            "start": self.start.tolist(),
            "end": self.end.tolist(),
        }


def flow(g: LieAlgebra, f: Covector, x: Vector, t: float) -> Covector:
    """expm(t * coad(x)) @ f"""
    f = as_covector(g, f)
    t = float(t)
    if not np.isfinite(t):
        raise FlowDiverged(f"Flow time must be finite, got {t}")
    if t == 0.0:
        return f.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        end = expm(t * coad(g, x)) @ f
    if not np.all(np.isfinite(end)) or np.max(np.abs(end)) > OVERFLOW:
        raise FlowDiverged(f"{g.name}: flow overflowed at t = {t}", {"time": t})
    return end


def flow_segment(g: LieAlgebra, f: Covector, x: Vector, t: float) -> FlowSegment:
    f = as_covector(g, f)
    x = np.asarray(x, dtype=float)
    return FlowSegment(generator=x.copy(), time=float(t), start=f.copy(), end=flow(g, f, x, t))


# ============================================================================
# KILLING DUALITY
# ============================================================================

def _killing_matrix(g: LieAlgebra) -> np.ndarray:
    b = killing_form(g)
    singular = np.linalg.svd(b, compute_uv=False)
    if numerical_rank(singular, g.dim, g.tol, floor=killing_floor(g)) < g.dim:
        raise RankAmbiguous(f"{g.name} is not semisimple: Killing form is degenerate",
                            {"singular_values": singular.tolist()})
    return b


def killing_dual(g: LieAlgebra, f: Covector) -> Vector:
    """The element xi with B(xi, .) = f (semisimple g only)"""
    return np.linalg.solve(_killing_matrix(g), as_covector(g, f))


def casimir(g: LieAlgebra, f: Covector) -> float:
    """f^T B^-1 f, constant on coadjoint orbits of a semisimple algebra"""
    f = as_covector(g, f)
    return float(f @ np.linalg.solve(_killing_matrix(g), f))


def restrict(f: Covector, sub: Subspace) -> np.ndarray:
    """Values of f on the basis columns of sub"""
    f = np.asarray(f, dtype=float)
    if f.shape != (sub.ambient_dim,):
        raise DimensionMismatch(f"Covector has {f.size} entries, subspace lives in dim {sub.ambient_dim}")
    return sub.coords(f)
