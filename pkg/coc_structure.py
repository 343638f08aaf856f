#!/usr/bin/env python3
"""
COC Structure Analysis
======================

Killing form, solvable radical, semisimple quotient, simple ideals with
compact/non-compact tags, the ideal g_n and a constructive Levi complement.

Pipeline (structure_report):
  1. r   = B-orthogonal complement of [g, g]          (Cartan's criterion)
  2. s   = g / r with projection pi: g -> s
  3. s   = sum of simple ideals, split with a random element of the centroid
  4. tag each ideal compact iff B restricted to it is negative definite
  5. g_n = r + pi^-1(s_n)
  6. Levi complement by correcting a linear section of pi stage by stage down
     the derived series of r (one least-squares solve per stage)

Usage:
    from coc_structure import structure_report

    report = structure_report(g)
    print(report.g_n.dim, [ideal.compact for ideal in report.simple_ideals])
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from coc_algebra import (
    LieAlgebra,
    Subspace,
    bracket_subspaces,
    derived_series,
    generated_ideal,
    is_ideal,
    lower_central_series,
    null_space,
    numerical_rank,
    quotient,
)
from coc_errors import (
    CriterionDisagreement,
    DecompositionFailed,
    IndefiniteBorderline,
    LeviNotFound,
    RankAmbiguous,
)

LEVI_RESTARTS = 5


# ============================================================================
# KILLING FORM AND SOLVABILITY
# ============================================================================

def killing_form(g: LieAlgebra) -> np.ndarray:
    """B[i, j] = trace(ad(e_i) ad(e_j))"""
    b = np.einsum("ilk,jkl->ij", g.c, g.c)
    return 0.5 * (b + b.T)


def killing_floor(g: LieAlgebra) -> float:
    """Killing entries scale with c squared, so the floor does too"""
    return g.tol.num * g.scale ** 2 * max(g.dim, 1)


def is_solvable(g: LieAlgebra) -> bool:
    """Cartan's criterion, cross-checked against the derived series"""
    b = killing_form(g)
    derived = g.derived
    cartan_residual = float(np.max(np.abs(b @ derived.basis), initial=0.0))
    cartan = cartan_residual <= killing_floor(g)
    series = derived_series(g)[-1].dim == 0
    if cartan != series:
        raise CriterionDisagreement(
            f"{g.name}: Cartan's criterion says solvable={cartan} "
            f"(residual {cartan_residual:.3e}) but the derived series says {series}",
            {"cartan_residual": cartan_residual})
    return series


def is_nilpotent(g: LieAlgebra) -> bool:
    return lower_central_series(g)[-1].dim == 0


def radical(g: LieAlgebra) -> Subspace:
    """Solvable radical: the B-orthogonal complement of [g, g]"""
    derived = g.derived
    if derived.dim == 0:
        return Subspace.full(g.dim)
    b = killing_form(g)
    kernel = null_space(derived.basis.T @ b, g.dim, g.tol, floor=killing_floor(g),
                        strict=True, what=f"{g.name} radical system")
    return Subspace.span(kernel, g.tol, floor=0.5)


def killing_orthogonal(s: LieAlgebra, b: np.ndarray, sub: Subspace,
                       within: Optional[Subspace] = None) -> Subspace:
    """{x : B(x, sub) = 0}, optionally intersected with `within`"""
    if sub.dim == 0:
        perp = Subspace.full(s.dim)
    else:
        perp = Subspace.span(null_space(sub.basis.T @ b, s.dim, s.tol, floor=killing_floor(s)),
                             s.tol, floor=0.5)
    return perp if within is None else perp.intersect(within, s.tol)


# ============================================================================
# SIMPLE IDEALS
# ============================================================================

def centroid_basis(s: LieAlgebra) -> List[np.ndarray]:
    """Basis of {T : T[x, y] = [Tx, y]} by one null-space solve"""
    n = s.dim
    eye = np.eye(n)
    # coefficient of T[a, b] in T[e_i, e_j]_m - [T e_i, e_j]_m
    system = (np.einsum("am,ijb->ijmab", eye, s.c)
              - np.einsum("bi,ajm->ijmab", eye, s.c)).reshape(n ** 3, n * n)
    kernel = null_space(system, n * n, s.tol, floor=s.noise_floor)
    return [kernel[:, k].reshape(n, n) for k in range(kernel.shape[1])]


def _cluster(values: np.ndarray, tol: float) -> List[complex]:
    centers: List[complex] = []
    for value in sorted(values, key=lambda z: (z.real, z.imag)):
        if not any(abs(value - center) <= tol for center in centers):
            centers.append(complex(value))
    return centers


def _centroid_split(s: LieAlgebra, rng: np.random.Generator) -> List[Subspace]:
    basis = centroid_basis(s)
    if not basis:
        return [Subspace.full(s.dim)]
    element = sum(coef * t for coef, t in zip(rng.standard_normal(len(basis)), basis))
    norm = max(1.0, float(np.linalg.norm(element, 2)))
    tol = s.tol.cluster * norm
    eye = np.eye(s.dim)

    components = []
    for center in _cluster(np.linalg.eigvals(element), tol):
        if center.imag < -tol:
            continue  # handled with its conjugate
        if abs(center.imag) <= tol:
            operator = element - center.real * eye
            floor = tol
        else:
            shifted = element - center.real * eye
            operator = shifted @ shifted + (center.imag ** 2) * eye
            floor = tol * norm
        kernel = null_space(operator, s.dim, s.tol, floor=floor)
        if kernel.shape[1]:
            components.append(Subspace.span(kernel, s.tol, floor=0.5))
    return components


def _split_by_ideal(s: LieAlgebra, b: np.ndarray, component: Subspace,
                    ideal: Subspace) -> List[Subspace]:
    inside = component.intersect(ideal, s.tol)
    if inside.dim == 0 or inside.dim == component.dim:
        return [component]
    outside = killing_orthogonal(s, b, inside, within=component)
    return [inside, outside]


def _refine(s: LieAlgebra, b: np.ndarray, components: List[Subspace],
            probes: List[np.ndarray]) -> List[Subspace]:
    """Split components until no probe vector generates a smaller ideal"""
    work = list(components)
    done: List[Subspace] = []
    while work:
        component = work.pop()
        for v in probes + [component.basis[:, k] for k in range(component.dim)]:
            v = component.project(v)
            if np.linalg.norm(v) <= 1e-8:
                continue
            generated = generated_ideal(s, Subspace.span(v.reshape(-1, 1), s.tol))
            pieces = _split_by_ideal(s, b, component, generated)
            if len(pieces) > 1:
                work.extend(pieces)
                break
        else:
            done.append(component)
    return done


def _is_minimal(s: LieAlgebra, component: Subspace) -> bool:
    if not is_ideal(s, component):
        return False
    for k in range(component.dim):
        v = Subspace.span(component.basis[:, k:k + 1], s.tol)
        if generated_ideal(s, v).dim != component.dim:
            return False
    return True


def _first_index(component: Subspace) -> int:
    weights = np.diag(component.projector)
    return int(np.flatnonzero(weights > 1e-6)[0])


def simple_ideal_decomposition(s: LieAlgebra, seed: Optional[int] = None) -> List[Subspace]:
    """Split a semisimple algebra into its simple ideals"""
    if s.dim == 0:
        return []
    seed = s.tol.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    b = killing_form(s)

    components = _centroid_split(s, rng)
    if sum(c.dim for c in components) != s.dim or not all(is_ideal(s, c) for c in components):
        components = [Subspace.full(s.dim)]
    components = _refine(s, b, components, [])

    if not all(_is_minimal(s, c) for c in components):
        # fallback: split by ideals generated from basis and random vectors
        probes = [np.eye(s.dim)[:, i] for i in range(s.dim)]
        probes += [rng.standard_normal(s.dim) for _ in range(s.dim)]
        components = _refine(s, b, [Subspace.full(s.dim)], probes)
        if not all(_is_minimal(s, c) for c in components):
            raise DecompositionFailed(
                f"{s.name}: could not split into minimal ideals "
                f"(component dims {[c.dim for c in components]})")

    for i, first in enumerate(components):
        for second in components[i + 1:]:
            commutator = bracket_subspaces(s, first, second)
            pairing = float(np.max(np.abs(first.basis.T @ b @ second.basis), initial=0.0))
            if commutator.dim or pairing > killing_floor(s):
                raise DecompositionFailed(
                    f"{s.name}: ideals of dims {first.dim} and {second.dim} do not split "
                    f"(commutator dim {commutator.dim}, Killing pairing {pairing:.3e})")
    return sorted(components, key=_first_index)


def is_compact_type(s: LieAlgebra, ideal: Subspace) -> bool:
    """Negative definite restricted Killing form <=> compact type"""
    if ideal.dim == 0:
        return True
    restricted = ideal.basis.T @ killing_form(s) @ ideal.basis
    eigenvalues = np.linalg.eigvalsh(0.5 * (restricted + restricted.T))
    threshold = max(s.tol.rank_threshold(np.abs(eigenvalues), s.dim), killing_floor(s))
    if np.any(np.abs(eigenvalues) <= threshold):
        raise IndefiniteBorderline(
            f"{s.name}: restricted Killing form has eigenvalues {eigenvalues.tolist()} "
            f"within {threshold:.3e} of zero", {"eigenvalues": eigenvalues.tolist()})
    return bool(np.max(eigenvalues) < 0)


# ============================================================================
# LEVI COMPLEMENT
# ============================================================================

def _section_defect(g: LieAlgebra, sigma: np.ndarray, cs: np.ndarray) -> np.ndarray:
    """[sigma a, sigma b] - sigma [a, b]_s for all basis pairs (n x q x q)"""
    brackets = np.einsum("ia,jb,ijk->kab", sigma, sigma, g.c)
    return brackets - np.einsum("kl,abl->kab", sigma, cs)


def _correct_stage(g: LieAlgebra, sigma: np.ndarray, cs: np.ndarray,
                   layer: np.ndarray) -> Tuple[np.ndarray, float]:
    """One Levi-Malcev step: kill the defect modulo the next derived ideal"""
    q = cs.shape[0]
    d = layer.shape[1]
    defect = _section_defect(g, sigma, cs)
    rhs = -np.einsum("kp,kab->pab", layer, defect)
    mixed = np.einsum("ia,ju,ijk,kp->pau", sigma, layer, g.c, layer)
    system = (np.einsum("lb,pau->pabul", np.eye(q), mixed)
              - np.einsum("la,pbu->pabul", np.eye(q), mixed)
              - np.einsum("pu,abl->pabul", np.eye(d), cs)).reshape(d * q * q, d * q)
    t, *_ = np.linalg.lstsq(system, rhs.ravel(), rcond=None)
    residual = float(np.max(np.abs(system @ t - rhs.ravel()), initial=0.0))
    return sigma + layer @ t.reshape(d, q), residual


def levi_section(g: LieAlgebra, rad: Subspace, projection: np.ndarray,
                 s: LieAlgebra) -> Tuple[np.ndarray, float]:
    """Homomorphic section sigma: s -> g of the projection (n x q matrix)"""
    q = s.dim
    if q == 0:
        return np.zeros((g.dim, 0)), 0.0
    lift = projection.T.copy()
    if rad.dim == 0:
        return lift, 0.0

    series = [rad]
    while series[-1].dim:
        nxt = bracket_subspaces(g, series[-1], series[-1])
        if nxt.dim == series[-1].dim:
            raise LeviNotFound(f"{g.name}: radical of dim {rad.dim} is not solvable")
        series.append(nxt)
    layers = []
    for upper, lower in zip(series, series[1:]):
        rest = upper.basis - lower.projector @ upper.basis
        layers.append(Subspace.span(rest, g.tol, floor=0.5).basis)

    threshold = g.tol.levi_threshold(g.c)
    rng = np.random.default_rng(g.tol.seed)
    best = np.inf
    for attempt in range(LEVI_RESTARTS + 1):
        sigma = lift.copy()
        if attempt:
            sigma += rad.basis @ rng.standard_normal((rad.dim, q))
        stage_residual = 0.0
        for layer in layers:
            sigma, residual = _correct_stage(g, sigma, s.c, layer)
            stage_residual = max(stage_residual, residual)
            if residual > threshold:
                break
        closure = float(np.max(np.abs(_section_defect(g, sigma, s.c)), initial=0.0))
        best = min(best, max(stage_residual, closure))
        if stage_residual <= threshold and closure <= threshold:
            return sigma, closure
    raise LeviNotFound(
        f"{g.name}: Levi complement did not converge after {LEVI_RESTARTS} restarts "
        f"(best residual {best:.3e} > {threshold:.3e})", {"residual": best})


def levi_complement(g: LieAlgebra, rad: Optional[Subspace] = None) -> Subspace:
    """A subalgebra L with g = L + r as vector spaces"""
    rad = radical(g) if rad is None else rad
    if rad.dim == g.dim:
        return Subspace.zero(g.dim)
    if rad.dim == 0:
        return Subspace.full(g.dim)
    s, projection = quotient(g, rad, name=f"{g.name}/rad")
    sigma, _ = levi_section(g, rad, projection, s)
    return _levi_subspace(g, rad, sigma)


def _levi_subspace(g: LieAlgebra, rad: Subspace, sigma: np.ndarray) -> Subspace:
    levi = Subspace.span(sigma, g.tol, floor=g.noise_floor)
    together = np.hstack([levi.basis, rad.basis])
    rank = numerical_rank(np.linalg.svd(together, compute_uv=False), g.dim, g.tol, floor=1e-6)
    if levi.dim != sigma.shape[1] or rank != g.dim:
        raise LeviNotFound(f"{g.name}: Levi candidate of dim {levi.dim} does not complement "
                           f"the radical (rank {rank} of {g.dim})")
    return levi


def closure_residual(g: LieAlgebra, sub: Subspace) -> float:
    """Largest component of [L, L] outside L"""
    if sub.dim == 0:
        return 0.0
    products = np.einsum("ip,jq,ijk->kpq", sub.basis, sub.basis, g.c).reshape(g.dim, -1)
    return sub.residual(products)


# ============================================================================
# STRUCTURE REPORT
# ============================================================================

@dataclass(frozen=True)
class SimpleIdeal:
    subspace: Subspace      # in semisimple-quotient coordinates
    compact: bool

    @property
    def dim(self) -> int:
        return self.subspace.dim


@dataclass(frozen=True)
class LeviData:
    subspace: Subspace      # in g
    compact: Subspace       # image of s_c under the Levi isomorphism
    noncompact: Subspace    # image of s_n
    section: np.ndarray     # homomorphism s -> g, n x q


@dataclass(frozen=True, eq=False)
class StructureReport:
    algebra: LieAlgebra
    radical: Subspace
    semisimple: LieAlgebra
    projection: np.ndarray
    simple_ideals: List[SimpleIdeal]
    s_c: Subspace
    s_n: Subspace
    g_n: Subspace
    levi: Optional[LeviData]
    derived_dim: int
    solvable: bool
    nilpotent: bool
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def semisimple_dim(self) -> int:
        return self.semisimple.dim

    @property
    def has_property_bf(self) -> bool:
        """Every bounded orbit is a single fixed point"""
        return self.s_c.dim == 0

    @property
    def fixed_point_dim(self) -> int:
        return self.algebra.dim - self.derived_dim

    def signature(self) -> List[Dict[str, Any]]:
        return [{"dim": ideal.dim, "compact": ideal.compact} for ideal in self.simple_ideals]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algebra": self.algebra.name,
            "dim": self.algebra.dim,
            "radical": self.radical.to_list(),
            "radical_dim": self.radical.dim,
            "semisimple_dim": self.semisimple_dim,
            "simple_ideals": self.signature(),
            "gn": self.g_n.to_list(),
            "gn_dim": self.g_n.dim,
            "levi": self.levi.subspace.to_list() if self.levi else None,
            "solvable": self.solvable,
            "nilpotent": self.nilpotent,
            "has_property_bf": self.has_property_bf,
            "fixed_point_dim": self.fixed_point_dim,
            "residuals": dict(self.diagnostics),
        }


def _killing_invariance_residual(g: LieAlgebra, b: np.ndarray, rng: np.random.Generator,
                                 samples: int = 100) -> float:
    worst = 0.0
    scale = max(1.0, float(np.max(np.abs(b), initial=0.0)))
    for _ in range(samples):
        x, y, z = rng.standard_normal((3, g.dim))
        xy = np.einsum("i,j,ijk->k", x, y, g.c)
        xz = np.einsum("i,j,ijk->k", x, z, g.c)
        worst = max(worst, abs(xy @ b @ z + y @ b @ xz) / scale)
    return worst


def structure_report(g: LieAlgebra) -> StructureReport:
    """Radical, semisimple quotient, simple ideals, g_n and Levi data"""
    solvable = is_solvable(g)
    rad = radical(g)
    s, projection = quotient(g, rad, name=f"{g.name}/rad")
    diagnostics: Dict[str, Any] = {"jacobi": g.jacobi_residual}

    if s.dim:
        singular = np.linalg.svd(killing_form(s), compute_uv=False)
        diagnostics["killing_min_singular"] = float(singular.min())
        if singular.min() <= max(s.tol.rank_threshold(singular, s.dim), killing_floor(s)):
            raise RankAmbiguous(
                f"{g.name}: quotient by the radical has a degenerate Killing form "
                f"(smallest singular value {singular.min():.3e})",
                {"killing_min_singular": float(singular.min())})

    ideals = [SimpleIdeal(sub, is_compact_type(s, sub)) for sub in simple_ideal_decomposition(s)]
    s_c = _span_of(s.dim, [i.subspace for i in ideals if i.compact], g)
    s_n = _span_of(s.dim, [i.subspace for i in ideals if not i.compact], g)
    lifted_n = Subspace.span(projection.T @ s_n.basis, g.tol, floor=0.5) if s_n.dim else Subspace.zero(g.dim)
    g_n = rad.sum(lifted_n, g.tol)

    levi = None
    try:
        sigma, closure = levi_section(g, rad, projection, s)
        subspace = _levi_subspace(g, rad, sigma) if s.dim else Subspace.zero(g.dim)
        levi = LeviData(
            subspace=subspace,
            compact=_image(g, sigma, s_c),
            noncompact=_image(g, sigma, s_n),
            section=sigma,
        )
        diagnostics["levi_closure"] = closure_residual(g, subspace)
    except LeviNotFound as e:
        diagnostics["levi_error"] = e.message

    rng = np.random.default_rng(g.tol.seed)
    diagnostics["killing_invariance"] = _killing_invariance_residual(g, killing_form(g), rng)
    if g_n.dim < g.dim:
        compact_quotient, _ = quotient(g, g_n, name=f"{g.name}/gn")
        diagnostics["compact_quotient_max_eig"] = float(
            np.max(np.linalg.eigvalsh(killing_form(compact_quotient))))

    return StructureReport(
        algebra=g,
        radical=rad,
        semisimple=s,
        projection=projection,
        simple_ideals=ideals,
        s_c=s_c,
        s_n=s_n,
        g_n=g_n,
        levi=levi,
        derived_dim=g.derived.dim,
        solvable=solvable,
        nilpotent=is_nilpotent(g),
        diagnostics=diagnostics,
    )


def _span_of(n: int, parts: List[Subspace], g: LieAlgebra) -> Subspace:
    if not parts:
        return Subspace.zero(n)
    return Subspace.span(np.hstack([p.basis for p in parts]), g.tol, floor=0.5)


def _image(g: LieAlgebra, sigma: np.ndarray, sub: Subspace) -> Subspace:
    if sub.dim == 0:
        return Subspace.zero(g.dim)
    return Subspace.span(sigma @ sub.basis, g.tol, floor=g.noise_floor)
