#!/usr/bin/env python3
"""
COC Orbit Classifier
====================

Decides whether the coadjoint orbit through f is a fixed point, compact, or
unbounded, and backs every verdict with data:

  fixed_point   f vanishes on [g, g]
  compact       f vanishes on [g, g_n]; f = f1 + (compact covector on g/g_n)
                with f1 a fixed point
  unbounded     otherwise; a one-parameter escape witness when one is found

g_n is the ideal of g projecting onto the non-compact simple ideals of g/rad.
The annihilator of [g, g_n] is invariant under the coadjoint action, and on
it the action factors through the compact quotient g/g_n, which is why the
test is both necessary and sufficient (see docs/THEORY.md).

Usage:
    from coc_classifier import OrbitClassifier

    classifier = OrbitClassifier(g)
    result = classifier.classify(f)
    print(result.verdict.value, result.orbit_dim)
"""

import math
import threading
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import schur, solve_sylvester

from coc_algebra import (
    Covector,
    LieAlgebra,
    Operator,
    Subspace,
    Vector,
    bracket_subspaces,
    coad,
    quotient,
)
from coc_coadjoint import as_covector, flow, is_fixed_point, orbit_dimension
from coc_errors import FlowDiverged, NotBounded, WitnessReplayFailed
from coc_structure import StructureReport, structure_report

REPLAY_TIMES = (1.0, 2.0, 4.0)
RANDOM_CANDIDATES = 64


class Verdict(Enum):
    FIXED_POINT = "fixed_point"
    COMPACT = "compact"
    UNBOUNDED = "unbounded"

    @property
    def bounded(self) -> bool:
        return self is not Verdict.UNBOUNDED


# ============================================================================
# RESULT RECORDS
# ============================================================================

@dataclass(frozen=True)
class Witness:
    """Generator whose flow drives f to infinity, with its growth model"""
    generator: Vector
    kind: str                   # "exponential" | "polynomial"
    rate: Optional[float]       # exponential only
    degree: Optional[int]       # polynomial only
    coefficient: float          # growth model scale, relative to ||f||
    verified_growth: float = 0.0

    def model(self, t: float) -> float:
        """Certified lower model for ||flow(f, generator, t)|| / ||f||"""
        if self.kind == "exponential":
            try:
                return self.coefficient * math.exp(self.rate * t)
            except OverflowError:
                return math.inf
        return self.coefficient * t ** self.degree / math.factorial(self.degree)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "generator": self.generator.tolist(),
            "kind": self.kind,
            "rate": self.rate,
            "degree": self.degree,
            "verified_growth": self.verified_growth,
        }


@dataclass(frozen=True)
class Decomposition:
    """f = f1 + embedding @ compact_covector"""
    f1: Optional[Covector]          # None when no Levi complement was found
    compact_algebra: LieAlgebra     # g / g_n, isomorphic to s_c
    compact_covector: Covector
    embedding: Optional[Operator]   # n x dim(s_c), zero on g_n

    def reconstruct(self) -> Optional[Covector]:
        if self.f1 is None or self.embedding is None:
            return None
        return self.f1 + self.embedding @ self.compact_covector

    def as_tuple(self) -> Tuple[Optional[Covector], Tuple[LieAlgebra, Covector], Optional[Operator]]:
        return self.f1, (self.compact_algebra, self.compact_covector), self.embedding

    def compact_part(self) -> Dict[str, Any]:
        return {
            "algebra": self.compact_algebra.name,
            "dim": self.compact_algebra.dim,
            "basis": list(self.compact_algebra.basis),
            "covector": self.compact_covector.tolist(),
            "embedding": (None if self.embedding is None
                          else [self.embedding[:, k].tolist() for k in range(self.embedding.shape[1])]),
        }


@dataclass(frozen=True)
class OrbitClassification:
    verdict: Verdict
    orbit_dim: int
    criterion_residual: float
    decomposition: Optional[Decomposition] = None
    witness: Optional[Witness] = None

    @property
    def f1(self) -> Optional[Covector]:
        return self.decomposition.f1 if self.decomposition else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "orbit_dim": self.orbit_dim,
            "criterion_residual": self.criterion_residual,
            "f1": self.f1.tolist() if self.f1 is not None else None,
            "compact_part": self.decomposition.compact_part() if self.decomposition else None,
            "witness": self.witness.to_dict() if self.witness else None,
        }


# ============================================================================
# SPECTRAL GROWTH
# ============================================================================

def spectral_projector(a: Operator, select: Callable[[float, float], bool]) -> Optional[Operator]:
    """Projector onto the invariant subspace of the selected eigenvalues,
    along the complementary invariant subspace. None if reordering failed."""
    n = a.shape[0]
    wanted = sum(1 for w in np.linalg.eigvals(a) if select(w.real, w.imag))
    if wanted == 0:
        return np.zeros((n, n))
    if wanted == n:
        return np.eye(n)
    t, z, sdim = schur(a, output="real", sort=select)
    if sdim != wanted:
        return None
    t11, t12, t22 = t[:sdim, :sdim], t[:sdim, sdim:], t[sdim:, sdim:]
    x = solve_sylvester(t11, -t22, -t12)
    block = np.zeros((n, n))
    block[:sdim, :sdim] = np.eye(sdim)
    block[:sdim, sdim:] = -x
    return z @ block @ z.T


def _real_part_clusters(eigenvalues: np.ndarray, tol: float) -> List[float]:
    centers: List[float] = []
    for re in sorted(eigenvalues.real):
        if not centers or re - centers[-1] > tol:
            centers.append(float(re))
    return centers


def growth_candidates(g: LieAlgebra, f: Covector, eta: Vector) -> List[Witness]:
    """Growth models of the flow of f along +eta and -eta"""
    a = coad(g, eta)
    norm_f = float(np.linalg.norm(f))
    scale = max(1.0, float(np.linalg.norm(a, 2)))
    tol = g.tol.cluster * scale
    significant = g.tol.cluster * norm_f
    eigenvalues = np.linalg.eigvals(a)
    found: List[Witness] = []

    # exponential: the dominant real part on each side that sees f
    clusters = _real_part_clusters(eigenvalues, tol)
    for sign, ordered in ((1.0, reversed(clusters)), (-1.0, clusters)):
        for center in ordered:
            if sign * center <= tol:
                break
            projector = spectral_projector(a, lambda re, im, c=center: abs(re - c) <= tol)
            if projector is None:
                continue
            part = float(np.linalg.norm(projector @ f))
            if part > significant:
                found.append(Witness(sign * eta, "exponential", abs(center), None, part / norm_f))
                break

    # polynomial: nilpotent action on the generalized 0-eigenspace
    projector = spectral_projector(a, lambda re, im: abs(complex(re, im)) <= tol)
    if projector is not None and np.any(projector):
        base = projector @ f
        nil = a @ projector
        degree, top = 0, base
        power = base
        for k in range(1, g.dim + 1):
            power = nil @ power
            if np.linalg.norm(power) <= significant * scale ** k:
                break
            degree, top = k, power
        if degree:
            coefficient = float(np.linalg.norm(top)) / norm_f
            for sign in (1.0, -1.0):
                found.append(Witness(sign * eta, "polynomial", None, degree, coefficient))
    return found


def _growth_key(w: Witness) -> Tuple[int, float]:
    return (1 if w.kind == "exponential" else 0, w.model(REPLAY_TIMES[-1]))


def replay_witness(g: LieAlgebra, f: Covector, witness: Witness,
                   times: Sequence[float] = REPLAY_TIMES) -> List[float]:
    """Observed ||flow|| / ||f|| at each time; each must reach half the model"""
    f = as_covector(g, f)
    norm_f = float(np.linalg.norm(f))
    ratios = []
    for t in times:
        try:
            observed = float(np.linalg.norm(flow(g, f, witness.generator, t))) / norm_f
        except FlowDiverged:
            observed = math.inf
        if observed < 0.5 * witness.model(t):
            raise WitnessReplayFailed(
                f"{g.name}: {witness.kind} witness predicted {witness.model(t):.6g} at t = {t} "
                f"but the flow reached {observed:.6g}",
                {"time": t, "model": witness.model(t), "observed": observed})
        ratios.append(observed)
    return ratios


# ============================================================================
# CLASSIFIER
# ============================================================================

class OrbitClassifier:
    """Classifies covectors of one algebra against a shared structure report"""

    def __init__(self, g: LieAlgebra, report: Optional[StructureReport] = None):
        self.g = g
        self._report = report
        self._lock = threading.Lock()
        self._criterion: Optional[Subspace] = None
        self._compact: Optional[Tuple[LieAlgebra, Operator]] = None

    @property
    def report(self) -> StructureReport:
        with self._lock:
            if self._report is None:
                self._report = structure_report(self.g)
            return self._report

    @property
    def criterion_space(self) -> Subspace:
        """[g, g_n]"""
        if self._criterion is None:
            self._criterion = bracket_subspaces(self.g, Subspace.full(self.g.dim), self.report.g_n)
        return self._criterion

    @property
    def compact_quotient(self) -> Tuple[LieAlgebra, Operator]:
        """g / g_n and the projection onto it"""
        if self._compact is None:
            self._compact = quotient(self.g, self.report.g_n, name=f"{self.g.name}/gn")
        return self._compact

    def criterion_residual(self, f: Covector) -> float:
        """max |f(v)| over the orthonormal basis v of [g, g_n]"""
        space = self.criterion_space
        if space.dim == 0:
            return 0.0
        return float(np.max(np.abs(space.coords(f))))

    def is_bounded(self, f: Covector) -> bool:
        f = as_covector(self.g, f)
        return self.criterion_residual(f) <= self.g.tol.num * float(np.linalg.norm(f))

    # -- operations ---------------------------------------------------------

    def verdict(self, f: Covector) -> Verdict:
        """Bounded by the criterion residual, then refined to a fixed point"""
        f = as_covector(self.g, f)
        if not self.is_bounded(f):
            return Verdict.UNBOUNDED
        return Verdict.FIXED_POINT if is_fixed_point(self.g, f) else Verdict.COMPACT

    def classify(self, f: Covector) -> OrbitClassification:
        f = as_covector(self.g, f)
        residual = self.criterion_residual(f)
        verdict = self.verdict(f)

        orbit_dim = 0 if verdict is Verdict.FIXED_POINT else orbit_dimension(self.g, f)
        if verdict.bounded:
            return OrbitClassification(verdict, orbit_dim, residual, decomposition=self._decompose(f))
        try:
            witness = self.unboundedness_witness(f)
        except WitnessReplayFailed:
            witness = None
        return OrbitClassification(verdict, orbit_dim, residual, witness=witness)

    def decompose(self, f: Covector) -> Decomposition:
        f = as_covector(self.g, f)
        if not self.is_bounded(f):
            raise NotBounded(
                f"{self.g.name}: orbit is unbounded, f does not vanish on [g, g_n] "
                f"(residual {self.criterion_residual(f):.3e})")
        return self._decompose(f)

    def _decompose(self, f: Covector) -> Decomposition:
        report = self.report
        compact_algebra, projection = self.compact_quotient
        embedding = projection.T
        levi_compact = report.levi.compact if report.levi else None
        if report.s_c.dim == 0:
            levi_compact = Subspace.zero(self.g.dim)
        if levi_compact is None:
            # no Levi complement: quotient-level data only
            return Decomposition(None, compact_algebra, projection @ f, None)

        # f1 = f on g_n and 0 on the compact Levi part
        frame = np.hstack([report.g_n.basis, levi_compact.basis])
        values = np.concatenate([report.g_n.coords(f), np.zeros(levi_compact.dim)])
        f1 = np.linalg.solve(frame.T, values)
        return Decomposition(f1, compact_algebra, projection @ (f - f1), embedding)

    def witness_generators(self) -> List[Vector]:
        """Basis vectors, non-compact Levi generators, then seeded random ones"""
        n = self.g.dim
        generators = [np.eye(n)[:, i] for i in range(n)]
        levi = self.report.levi
        if levi is not None:
            generators += [levi.noncompact.basis[:, k] for k in range(levi.noncompact.dim)]
        rng = np.random.default_rng(self.g.tol.seed)
        for _ in range(RANDOM_CANDIDATES):
            v = rng.standard_normal(n)
            generators.append(v / np.linalg.norm(v))
        return generators

    def unboundedness_witness(self, f: Covector) -> Optional[Witness]:
        f = as_covector(self.g, f)
        if self.is_bounded(f):
            return None
        candidates: List[Witness] = []
        for eta in self.witness_generators():
            candidates.extend(growth_candidates(self.g, f, eta))
        if not candidates:
            return None

        failure: Optional[WitnessReplayFailed] = None
        for candidate in sorted(candidates, key=_growth_key, reverse=True):
            try:
                ratios = replay_witness(self.g, f, candidate)
            except WitnessReplayFailed as e:
                failure = failure or e
                continue
            return Witness(candidate.generator, candidate.kind, candidate.rate, candidate.degree,
                           candidate.coefficient, verified_growth=ratios[-1])
        raise failure

    def restriction_drift(self, f: Covector, rng: np.random.Generator,
                          flows: int = 100, total_time: float = 10.0) -> float:
        """Largest change of f restricted to g_n over random flow compositions"""
        f = as_covector(self.g, f)
        g_n = self.report.g_n
        reference = g_n.coords(f)
        worst = 0.0
        for _ in range(flows):
            steps = int(rng.integers(1, 6))
            times = rng.uniform(-1.0, 1.0, steps)
            times *= rng.uniform(0.0, total_time) / max(float(np.sum(np.abs(times))), 1e-12)
            current = f
            for t in times:
                x = rng.standard_normal(self.g.dim)
                current = flow(self.g, current, x / np.linalg.norm(x), t)
            worst = max(worst, float(np.max(np.abs(g_n.coords(current) - reference), initial=0.0)))
        return worst


# ============================================================================
# MODULE-LEVEL OPERATIONS
# ============================================================================

@lru_cache(maxsize=32)
def classifier_for(g: LieAlgebra) -> OrbitClassifier:
    return OrbitClassifier(g)


def classify(g: LieAlgebra, f: Covector) -> OrbitClassification:
    return classifier_for(g).classify(f)


def decompose(g: LieAlgebra, f: Covector) -> Decomposition:
    return classifier_for(g).decompose(f)


def unboundedness_witness(g: LieAlgebra, f: Covector) -> Optional[Witness]:
    return classifier_for(g).unboundedness_witness(f)


def restriction_drift(g: LieAlgebra, f: Covector, rng: np.random.Generator,
                      flows: int = 100, total_time: float = 10.0) -> float:
    return classifier_for(g).restriction_drift(f, rng, flows, total_time)
