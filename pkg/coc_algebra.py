#!/usr/bin/env python3
"""
COC Algebra Core
================

Lie algebras given by structure constants, with bracket, adjoint and coadjoint
operators and a small subspace calculus.

Conventions:
- [e_i, e_j] = sum_k c[i][j][k] e_k
- ad(x) is the matrix with ad(x) @ y == bracket(x, y)
- coad(x) = -ad(x).T acts on dual-basis coordinates, so that
  <coad(x) f, y> = -<f, [x, y]>
- Subspaces keep an orthonormal basis; it is made canonical by Gram-Schmidt of
  the projected standard basis vectors in index order, so subspaces aligned with
  the coordinates get basis vectors aligned with the coordinates.

Algebra JSON:
    {"name": "su2", "dim": 3, "basis": ["e1", "e2", "e3"],
     "brackets": [{"i": 0, "j": 1, "terms": [{"k": 2, "c": 1}]}, ...]}

Usage:
    from coc_algebra import validate_algebra, bracket_subspaces

    g = validate_algebra(json.loads(Path("su2.json").read_text()))
    derived = bracket_subspaces(g, Subspace.full(g.dim), Subspace.full(g.dim))
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from coc_config import DEFAULT_TOLERANCES, Tolerances
from coc_errors import (
    AlgebraFormatError,
    AntisymmetryViolation,
    DimensionMismatch,
    IndexOutOfRange,
    JacobiViolation,
    NotAnIdeal,
    RankAmbiguous,
)

# Coordinates in the algebra basis, the dual basis, and n x n operators
Vector = np.ndarray
Covector = np.ndarray
Operator = np.ndarray

# Gram-Schmidt acceptance for canonical bases; any value well above roundoff
# and below 1/sqrt(n) works for n < 10^4
_CANONICAL_ACCEPT = 1e-2


# ============================================================================
# LINEAR ALGEBRA HELPERS
# ============================================================================

def numerical_rank(singular_values: np.ndarray, n: int, tol: Tolerances,
                   floor: float = 0.0, strict: bool = False,
                   what: str = "matrix") -> int:
    """Count singular values above tau_rank (never below `floor`)"""
    s = np.asarray(singular_values, dtype=float)
    if s.size == 0:
        return 0
    threshold = max(tol.rank_threshold(s, n), floor)
    if strict and threshold > 0:
        straddling = s[(s > threshold / 10.0) & (s < threshold * 10.0)]
        if straddling.size:
            raise RankAmbiguous(
                f"Rank of {what} is ambiguous: singular values {straddling.tolist()} "
                f"lie within a factor of 10 of the threshold {threshold:.3e}",
                {"threshold": threshold, "straddling": straddling.tolist(), "what": what},
            )
    return int(np.count_nonzero(s > threshold))


def null_space(matrix: np.ndarray, n: int, tol: Tolerances, floor: float = 0.0,
               strict: bool = False, what: str = "matrix") -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of `matrix` (rows x n)"""
    matrix = np.asarray(matrix, dtype=float).reshape(-1, n)
    if matrix.shape[0] == 0:
        return np.eye(n)
    _, s, vh = np.linalg.svd(matrix, full_matrices=True)
    rank = numerical_rank(s, n, tol, floor=floor, strict=strict, what=what)
    return vh[rank:].T.copy()


def _canonical_basis(q: np.ndarray, n: int) -> np.ndarray:
    """Canonical orthonormal basis of span(q); q already orthonormal"""
    m = q.shape[1]
    if m == 0:
        return np.zeros((n, 0))
    if m == n:
        return np.eye(n)
    projector = q @ q.T
    accepted: List[np.ndarray] = []
    for i in range(n):
        if len(accepted) == m:
            break
        v = projector[:, i].copy()
        for _ in range(2):
            for b in accepted:
                v -= (b @ v) * b
        norm = np.linalg.norm(v)
        if norm > _CANONICAL_ACCEPT:
            accepted.append(v / norm)
    if len(accepted) < m:
        return q.copy()
    basis = np.column_stack(accepted)
    # snap exact coordinate vectors so aligned subspaces print cleanly
    basis[np.abs(basis) < 1e-15] = 0.0
    return basis


# ============================================================================
# SUBSPACES
# ============================================================================

@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of R^n held as an n x m matrix with orthonormal columns"""
    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float)
        if basis.size == 0:
            basis = np.zeros((self.ambient_dim, 0))
        else:
            basis = basis.reshape(self.ambient_dim, -1)
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, np.zeros((n, 0)))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, np.eye(n))

    @classmethod
    def span(cls, vectors: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES,
             floor: float = 0.0, strict: bool = False,
             what: str = "spanning set") -> "Subspace":
        """Span of the columns of `vectors`, rank decided by tau_rank"""
        vectors = np.asarray(vectors, dtype=float)
        n = vectors.shape[0]
        if n == 0 or vectors.size == 0 or not np.any(vectors):
            return cls.zero(n)
        vectors = vectors.reshape(n, -1)
        u, s, _ = np.linalg.svd(vectors, full_matrices=False)
        rank = numerical_rank(s, n, tol, floor=floor, strict=strict, what=what)
        return cls(n, _canonical_basis(u[:, :rank], n))

    # -- queries ------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @cached_property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def project(self, v: np.ndarray) -> np.ndarray:
        return self.projector @ v

    def coords(self, v: np.ndarray) -> np.ndarray:
        return self.basis.T @ v

    def residual(self, vectors: np.ndarray) -> float:
        """Largest distance of the given columns from this subspace"""
        vectors = np.asarray(vectors, dtype=float)
        if vectors.size == 0:
            return 0.0
        vectors = vectors.reshape(self.ambient_dim, -1)
        return float(np.max(np.linalg.norm(vectors - self.projector @ vectors, axis=0)))

    def contains(self, other: "Subspace", tol: float = 1e-9) -> bool:
        _check_ambient(self, other)
        return self.residual(other.basis) <= tol

    def equals(self, other: "Subspace", tol: float = 1e-9) -> bool:
        return self.dim == other.dim and self.contains(other, tol)

    # -- constructions ------------------------------------------------------

    def sum(self, other: "Subspace", tol: Tolerances = DEFAULT_TOLERANCES) -> "Subspace":
        _check_ambient(self, other)
        return Subspace.span(np.hstack([self.basis, other.basis]), tol)

    def complement(self, tol: Tolerances = DEFAULT_TOLERANCES) -> "Subspace":
        """Euclidean orthogonal complement"""
        n = self.ambient_dim
        if self.dim == 0:
            return Subspace.full(n)
        rest = np.eye(n) - self.projector
        return Subspace.span(rest, tol, floor=0.5)

    def intersect(self, other: "Subspace", tol: Tolerances = DEFAULT_TOLERANCES) -> "Subspace":
        _check_ambient(self, other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim)
        return self.complement(tol).sum(other.complement(tol), tol).complement(tol)

    def to_list(self) -> List[List[float]]:
        """Columns as coordinate lists"""
        return [self.basis[:, k].tolist() for k in range(self.dim)]

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def _check_ambient(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(
            f"Subspaces live in different spaces ({a.ambient_dim} vs {b.ambient_dim})")


# ============================================================================
# LIE ALGEBRAS
# ============================================================================

@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """A real Lie algebra by structure constants c[i, j, k]"""
    name: str
    basis: Tuple[str, ...]
    c: np.ndarray
    tol: Tolerances = DEFAULT_TOLERANCES
    jacobi_residual: float = 0.0
    description: str = ""

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        n = len(self.basis)
        if c.shape != (n, n, n):
            raise DimensionMismatch(f"Structure constants have shape {c.shape}, expected {(n, n, n)}")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "basis", tuple(self.basis))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def scale(self) -> float:
        return float(np.max(np.abs(self.c))) if self.c.size else 0.0

    @cached_property
    def noise_floor(self) -> float:
        """Absolute size below which bracket results count as zero"""
        return self.tol.num * (self.scale + 1.0)

    @cached_property
    def ad_matrices(self) -> np.ndarray:
        """ad(e_i) stacked: ad_matrices[i] @ y == bracket(e_i, y)"""
        matrices = np.ascontiguousarray(np.transpose(self.c, (0, 2, 1)))
        matrices.setflags(write=False)
        return matrices

    @cached_property
    def derived(self) -> Subspace:
        """[g, g], computed once per algebra"""
        full = Subspace.full(self.dim)
        return bracket_subspaces(self, full, full)

    @classmethod
    def from_constants(cls, name: str, basis, c: np.ndarray,
                       tol: Tolerances = DEFAULT_TOLERANCES,
                       description: str = "") -> "LieAlgebra":
        """Build from a dense table, enforcing antisymmetry and Jacobi"""
        c = np.asarray(c, dtype=float)
        n = len(basis)
        if c.shape != (n, n, n):
            raise DimensionMismatch(f"Structure constants have shape {c.shape}, expected {(n, n, n)}")
        threshold = tol.alg_threshold(c)
        skew = c + np.transpose(c, (1, 0, 2))
        if np.max(np.abs(skew), initial=0.0) > threshold:
            i, j, k = np.unravel_index(int(np.argmax(np.abs(skew))), skew.shape)
            raise AntisymmetryViolation(
                f"c[{i}][{j}][{k}] + c[{j}][{i}][{k}] = {skew[i, j, k]:.3e}",
                {"i": int(i), "j": int(j), "k": int(k)})
        c = 0.5 * (c - np.transpose(c, (1, 0, 2)))
        residual, triple, vector = jacobi_check(c)
        if residual > threshold:
            raise JacobiViolation(
                f"Jacobi identity fails on {tuple(basis[t] for t in triple)}: "
                f"residual {_format_vector(vector, basis)} (max {residual:.3e} > {threshold:.3e})",
                {"triple": list(triple), "residual": vector.tolist(), "max_residual": residual})
        return cls(name=name, basis=tuple(basis), c=c, tol=tol,
                   jacobi_residual=residual, description=description)

    def __repr__(self) -> str:
        return f"LieAlgebra({self.name!r}, dim={self.dim})"


def _format_vector(v: np.ndarray, basis) -> str:
    terms = [f"{coef:+g}·{label}" for coef, label in zip(v, basis) if abs(coef) > 0]
    return " ".join(terms) if terms else "0"


def jacobi_check(c: np.ndarray) -> Tuple[float, Tuple[int, int, int], np.ndarray]:
    """Max cyclic Jacobi residual over unordered triples i <= j <= k"""
    n = c.shape[0]
    if n == 0:
        return 0.0, (0, 0, 0), np.zeros(0)
    # [[e_i, e_j], e_k]_m = sum_p c[i,j,p] c[p,k,m]
    cyclic = (np.einsum("ijp,pkm->ijkm", c, c)
              + np.einsum("jkp,pim->ijkm", c, c)
              + np.einsum("kip,pjm->ijkm", c, c))
    norms = np.max(np.abs(cyclic), axis=3)
    best, best_triple = -1.0, (0, 0, 0)
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                if norms[i, j, k] > best:
                    best, best_triple = float(norms[i, j, k]), (i, j, k)
    return best, best_triple, cyclic[best_triple].copy()


# ============================================================================
# PARSING AND SERIALIZATION
# ============================================================================

def _parse_int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise AlgebraFormatError(f"{what} must be an integer, got {value!r}")
    return value


def parse_number(value: Any, what: str = "coefficient") -> float:
    """Decimal strings, rationals like '1/2', or JSON numbers -> float"""
    if isinstance(value, bool):
        raise AlgebraFormatError(f"{what} must be a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise AlgebraFormatError(f"{what} must be a number or decimal string, got {value!r}")


def validate_algebra(raw: Dict[str, Any], tol: Optional[Tolerances] = None) -> LieAlgebra:
    """Parse and check a structure-constant table"""
    tol = tol or DEFAULT_TOLERANCES
    if not isinstance(raw, dict):
        raise AlgebraFormatError("Algebra must be a JSON object")
    for key in ("name", "dim", "basis"):
        if key not in raw:
            raise AlgebraFormatError(f"Algebra is missing '{key}'")

    name = raw["name"]
    if not isinstance(name, str) or not name:
        raise AlgebraFormatError("'name' must be a non-empty string")
    n = _parse_int(raw["dim"], "'dim'")
    if n <= 0:
        raise AlgebraFormatError(f"'dim' must be positive, got {n}")
    basis = raw["basis"]
    if not isinstance(basis, list) or not all(isinstance(b, str) for b in basis):
        raise AlgebraFormatError("'basis' must be a list of strings")
    if len(basis) != n:
        raise AlgebraFormatError(f"'basis' has {len(basis)} labels but dim is {n}")
    if len(set(basis)) != n:
        raise AlgebraFormatError("'basis' labels must be distinct")
    brackets = raw.get("brackets", [])
    if not isinstance(brackets, list):
        raise AlgebraFormatError("'brackets' must be a list")

    entries: Dict[Tuple[int, int], np.ndarray] = {}
    for index, entry in enumerate(brackets):
        if not isinstance(entry, dict) or "i" not in entry or "j" not in entry:
            raise AlgebraFormatError(f"brackets[{index}] needs 'i', 'j' and 'terms'")
        i = _parse_int(entry["i"], f"brackets[{index}].i")
        j = _parse_int(entry["j"], f"brackets[{index}].j")
        for which, value in (("i", i), ("j", j)):
            if not 0 <= value < n:
                raise IndexOutOfRange(f"brackets[{index}].{which} = {value} outside 0..{n - 1}",
                                      {"entry": index, "index": value})
        terms = entry.get("terms", [])
        if not isinstance(terms, list):
            raise AlgebraFormatError(f"brackets[{index}].terms must be a list")
        vector = np.zeros(n)
        seen = set()
        for term in terms:
            if not isinstance(term, dict) or "k" not in term or "c" not in term:
                raise AlgebraFormatError(f"brackets[{index}] terms need 'k' and 'c'")
            k = _parse_int(term["k"], f"brackets[{index}] term k")
            if not 0 <= k < n:
                raise IndexOutOfRange(f"brackets[{index}] term k = {k} outside 0..{n - 1}",
                                      {"entry": index, "index": k})
            if k in seen:
                raise AlgebraFormatError(f"brackets[{index}] lists k = {k} twice")
            seen.add(k)
            vector[k] = parse_number(term["c"], f"brackets[{index}] coefficient")
        if i == j and np.any(vector):
            raise AntisymmetryViolation(
                f"[{basis[i]}, {basis[i]}] must vanish", {"i": i, "j": j})
        if (i, j) in entries:
            raise AlgebraFormatError(f"Bracket ({i},{j}) is listed twice")
        entries[(i, j)] = vector

    c = np.zeros((n, n, n))
    threshold = tol.alg_threshold(np.array([np.max(np.abs(v)) for v in entries.values()] or [0.0]))
    for (i, j), vector in entries.items():
        if i == j:
            continue
        if i > j and (j, i) in entries:
            mirror = entries[(j, i)]
            if np.max(np.abs(vector + mirror)) > threshold:
                raise AntisymmetryViolation(
                    f"Entries ({j},{i}) and ({i},{j}) are not antisymmetric: "
                    f"[{basis[j]}, {basis[i]}] = {_format_vector(mirror, basis)} but "
                    f"[{basis[i]}, {basis[j]}] = {_format_vector(vector, basis)}",
                    {"i": j, "j": i})
            continue
        c[i, j] = vector
        c[j, i] = -vector

    return LieAlgebra.from_constants(name, basis, c, tol,
                                     description=str(raw.get("description", "")))


def _json_coefficient(value: float):
    return int(value) if float(value).is_integer() else float(value)


def to_raw(g: LieAlgebra) -> Dict[str, Any]:
    """Serialize to the algebra JSON schema (i < j entries only)"""
    brackets = []
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            terms = [{"k": k, "c": _json_coefficient(g.c[i, j, k])}
                     for k in range(g.dim) if g.c[i, j, k] != 0.0]
            if terms:
                brackets.append({"i": i, "j": j, "terms": terms})
    return {"name": g.name, "dim": g.dim, "basis": list(g.basis), "brackets": brackets}


# ============================================================================
# BRACKET, AD, COAD
# ============================================================================

def _as_coords(g: LieAlgebra, v, what: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (g.dim,):
        raise DimensionMismatch(f"{what} has shape {v.shape}, algebra {g.name} has dim {g.dim}")
    return v


def bracket(g: LieAlgebra, x: Vector, y: Vector) -> Vector:
    x = _as_coords(g, x, "x")
    y = _as_coords(g, y, "y")
    return np.einsum("i,j,ijk->k", x, y, g.c)


def ad(g: LieAlgebra, x: Vector) -> Operator:
    x = _as_coords(g, x, "x")
    return np.einsum("i,ijk->kj", x, g.c)


def coad(g: LieAlgebra, x: Vector) -> Operator:
    """Infinitesimal coadjoint operator, exactly -ad(x).T"""
    return -ad(g, x).T


def bracket_subspaces(g: LieAlgebra, a: Subspace, b: Subspace) -> Subspace:
    """span{[a_p, b_q]} over the basis columns of A and B"""
    for s in (a, b):
        if s.ambient_dim != g.dim:
            raise DimensionMismatch(f"Subspace of dim-{s.ambient_dim} space used with {g.name}")
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(g.dim)
    products = np.einsum("ip,jq,ijk->kpq", a.basis, b.basis, g.c).reshape(g.dim, -1)
    return Subspace.span(products, g.tol, floor=g.noise_floor)


def derived_series(g: LieAlgebra) -> List[Subspace]:
    """g, [g,g], [[g,g],[g,g]], ... up to the first repeated dimension"""
    chain = [Subspace.full(g.dim)]
    while chain[-1].dim > 0:
        nxt = bracket_subspaces(g, chain[-1], chain[-1])
        if nxt.dim == chain[-1].dim:
            break
        chain.append(nxt)
    return chain


def lower_central_series(g: LieAlgebra) -> List[Subspace]:
    """g, [g,g], [g,[g,g]], ... up to the first repeated dimension"""
    full = Subspace.full(g.dim)
    chain = [full]
    while chain[-1].dim > 0:
        nxt = bracket_subspaces(g, full, chain[-1])
        if nxt.dim == chain[-1].dim:
            break
        chain.append(nxt)
    return chain


def centre(g: LieAlgebra) -> Subspace:
    stacked = g.ad_matrices.reshape(g.dim * g.dim, g.dim)
    return Subspace(g.dim, _canonical_basis(
        null_space(stacked, g.dim, g.tol, floor=g.noise_floor), g.dim))


def ideal_residual(g: LieAlgebra, s: Subspace) -> float:
    """How far [g, S] sticks out of S"""
    if s.dim == 0:
        return 0.0
    products = np.einsum("ijk,jq->kiq", g.c, s.basis).reshape(g.dim, -1)
    return s.residual(products)


def is_ideal(g: LieAlgebra, s: Subspace) -> bool:
    return ideal_residual(g, s) <= g.noise_floor


def generated_ideal(g: LieAlgebra, s: Subspace) -> Subspace:
    """Smallest ideal of g containing S"""
    full = Subspace.full(g.dim)
    current = s
    while True:
        grown = current.sum(bracket_subspaces(g, full, current), g.tol)
        if grown.dim == current.dim:
            return current
        current = grown


def quotient(g: LieAlgebra, ideal: Subspace,
             name: Optional[str] = None) -> Tuple[LieAlgebra, Operator]:
    """g / ideal on the orthogonal-complement basis, with its projection"""
    if ideal.ambient_dim != g.dim:
        raise DimensionMismatch(f"Ideal lives in dim {ideal.ambient_dim}, algebra has dim {g.dim}")
    residual = ideal_residual(g, ideal)
    if residual > g.noise_floor:
        raise NotAnIdeal(f"Subspace of dim {ideal.dim} is not an ideal of {g.name} "
                         f"(residual {residual:.3e})", {"residual": residual})
    w = ideal.complement(g.tol).basis
    q = w.shape[1]
    c = np.einsum("ia,jb,ijk,kl->abl", w, w, g.c, w) if q else np.zeros((0, 0, 0))
    labels = []
    for a in range(q):
        hit = np.flatnonzero(np.abs(np.abs(w[:, a]) - 1.0) < 1e-12)
        labels.append(g.basis[hit[0]] if hit.size == 1 and w[hit[0], a] > 0 else f"q{a + 1}")
    if len(set(labels)) != len(labels):
        labels = [f"q{a + 1}" for a in range(q)]
    if q == 0:
        quotient_algebra = LieAlgebra(name or f"{g.name}/ideal", (), np.zeros((0, 0, 0)), g.tol)
    else:
        quotient_algebra = LieAlgebra.from_constants(name or f"{g.name}/ideal", labels, c, g.tol)
    return quotient_algebra, w.T.copy()


def annihilates(f: Covector, s: Subspace, tol: float = DEFAULT_TOLERANCES.num) -> bool:
    """True iff |<f, s>| <= tol * ||f|| for every basis column s"""
    f = np.asarray(f, dtype=float)
    if f.shape != (s.ambient_dim,):
        raise DimensionMismatch(f"Covector has shape {f.shape}, subspace lives in dim {s.ambient_dim}")
    if s.dim == 0:
        return True
    return bool(np.max(np.abs(s.basis.T @ f)) <= tol * np.linalg.norm(f))


def change_basis(g: LieAlgebra, m: np.ndarray, name: Optional[str] = None,
                 basis: Optional[List[str]] = None) -> LieAlgebra:
    """Re-express g in the basis given by the columns of M"""
    m = np.asarray(m, dtype=float)
    if m.shape != (g.dim, g.dim):
        raise DimensionMismatch(f"Basis change must be {g.dim}x{g.dim}, got {m.shape}")
    inverse = np.linalg.inv(m)
    c = np.einsum("ia,jb,ijk,lk->abl", m, m, g.c, inverse)
    labels = basis or [f"{label}'" for label in g.basis]
    return LieAlgebra.from_constants(name or f"{g.name}'", labels, c, g.tol)
